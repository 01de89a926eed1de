#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uta/matrix.hpp"

namespace uta {

enum class Purpose { work, education, buy, entertainment, non_home_base };

constexpr std::array<Purpose, 5> kAllPurposes = {Purpose::work, Purpose::education, Purpose::buy,
                                                 Purpose::entertainment, Purpose::non_home_base};

const char* to_string(Purpose purpose);
Purpose purpose_from_string(const std::string& name);

/// Per-zone socioeconomic attributes. Covariates (DRA..D444) are 0/1 flags.
struct ZoneAttributes {
    double P = 0.0;      // population
    double VP = 0.0;     // cars per capita
    double ER = 0.0;     // resident employment
    double STR = 0.0;    // resident school students
    double STUR = 0.0;   // resident university students
    double EMPE = 0.0;   // staff at workplaces
    double SHOP = 0.0;   // shop count
    double ST = 0.0;     // students at school
    double STU = 0.0;    // students at university
    double HOSPB = 0.0;  // hospital beds
    double PARK = 0.0;   // park count
    double DRA = 0.0;    // traffic-plan-zone covariate
    double DB = 0.0;
    double DT = 0.0;
    double DQ = 0.0;
    double DF = 0.0;
    double DR = 0.0;
    double D128 = 0.0;
    double D444 = 0.0;
    double DIST = 0.0;  // distance term, km
};

enum class ZoneVar { P, VP, ER, STR, STUR, EMPE, SHOP, ST, STU, HOSPB, PARK, DRA, DB, DT, DQ, DF, DR, D128, D444, DIST };

constexpr std::array<ZoneVar, 20> kAllZoneVars = {
    ZoneVar::P,    ZoneVar::VP,   ZoneVar::ER,   ZoneVar::STR, ZoneVar::STUR,
    ZoneVar::EMPE, ZoneVar::SHOP, ZoneVar::ST,   ZoneVar::STU, ZoneVar::HOSPB,
    ZoneVar::PARK, ZoneVar::DRA,  ZoneVar::DB,   ZoneVar::DT,  ZoneVar::DQ,
    ZoneVar::DF,   ZoneVar::DR,   ZoneVar::D128, ZoneVar::D444, ZoneVar::DIST};

const char* to_string(ZoneVar var);
ZoneVar zone_var_from_string(const std::string& name);
double zone_value(const ZoneAttributes& z, ZoneVar var);

/// Invariant violations of a zone row (negative counts, covariate not 0/1).
std::vector<std::string> validate_zone(const ZoneAttributes& z);

/// One additive regression term: coefficient times a product of attributes.
struct RegressionTerm {
    double coef = 0.0;
    std::vector<ZoneVar> vars;
};

struct Regression {
    std::vector<RegressionTerm> terms;

    double evaluate(const ZoneAttributes& z) const;
};

Regression default_production_model(Purpose purpose);
Regression default_attraction_model(Purpose purpose);

/// Daily trips produced by a zone for one purpose; negatives clamp to 0.
double trip_production(const ZoneAttributes& z, Purpose purpose);
double trip_production(const ZoneAttributes& z, const Regression& model);

/// Daily trips attracted to a zone for one purpose; negatives clamp to 0.
double trip_attraction(const ZoneAttributes& z, Purpose purpose);
double trip_attraction(const ZoneAttributes& z, const Regression& model);

struct TripEnds {
    Purpose purpose = Purpose::work;
    std::vector<double> productions;
    std::vector<double> attractions;
};

/// Scales attractions uniformly so they sum to total productions.
TripEnds balance_attractions(TripEnds ends);

struct GravityOptions {
    double mu = 0.1;  // 1/min deterrence rate in f(c) = exp(-mu c)
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

/// Doubly-constrained gravity distribution balanced by iterative
/// proportional fitting; both margin errors end below opts.tolerance.
Matrix gravity_distribute(const TripEnds& ends, const Matrix& impedance,
                          const GravityOptions& opts = {});

// --- mode choice ----------------------------------------------------------

enum class ModeId { car, motorcycle, bus, taxi, minibus };

constexpr std::array<ModeId, 5> kAllModes = {ModeId::car, ModeId::motorcycle, ModeId::bus,
                                             ModeId::taxi, ModeId::minibus};

const char* to_string(ModeId mode);
ModeId mode_from_string(const std::string& name);

enum class SkimVar { TIMCAR, TIMMOT, TIMTAX, TIMBIN, TIMBOT, DIST, OWNCAR, OWNMOT, DESFLAG };

const char* to_string(SkimVar var);
SkimVar skim_var_from_string(const std::string& name);

/// Level-of-service values for one zone pair. NaN marks a missing variable;
/// mode_utility rejects utilities that reference one.
struct SkimEntry {
    double timcar, timmot, timtax, timbin, timbot, dist, owncar, ownmot, desflag;

    SkimEntry();
    double get(SkimVar var) const;
    double& ref(SkimVar var);
};

/// Zone-pair level-of-service matrices plus per-zone ownership rates and the
/// per-destination restricted-zone flag.
struct SkimSet {
    Matrix timcar, timmot, timtax, timbin, timbot, dist;
    std::vector<double> owncar, ownmot, desflag;

    std::size_t zone_count() const { return owncar.size(); }
    SkimEntry entry(std::size_t origin, std::size_t dest) const;
};

struct UtilityTerm {
    double coef = 0.0;
    SkimVar var = SkimVar::TIMCAR;
};

struct ModeUtility {
    ModeId mode = ModeId::car;
    double constant = 0.0;
    std::vector<UtilityTerm> terms;
};

struct Nest {
    std::string name;
    std::vector<ModeId> members;
    double theta = 1.0;
};

/// Linear-in-parameters vehicle choice model for one trip purpose, with an
/// optional one-level nest structure over the modes.
struct ChoiceModel {
    Purpose purpose = Purpose::work;
    std::vector<ModeUtility> modes;
    std::vector<Nest> nests;

    bool has_mode(ModeId mode) const;
};

/// Built-in calibrated vehicle choice model for a purpose; the work model
/// carries a bus/taxi public-transport nest (theta defaults to 1).
ChoiceModel default_choice_model(Purpose purpose, double work_nest_theta = 1.0);

/// Evaluates the purpose's utility for one mode. Throws naming the variable
/// when a referenced skim value is missing.
double mode_utility(const ChoiceModel& model, ModeId mode, const SkimEntry& entry);

/// theta * ln(sum exp(U_k)) with a max-shift overflow guard.
double nest_logsum(std::span<const double> utilities, double theta);

/// Nested-logit choice probabilities. Within-nest conditionals use scale
/// 1/theta and nests enter the first level through their inclusive value, so
/// shares are invariant to adding a constant to every elemental utility and
/// collapse to the flat multinomial at theta = 1.
std::map<ModeId, double> mode_shares(const ChoiceModel& model,
                                     const std::map<ModeId, double>& utilities);

// --- demand deviation (Table-9 style diversion) ----------------------------

struct DeviationParams {
    double a = 0.0;
    double b = 0.0;
};

using DiversionCurve = double (*)(const DeviationParams&, double delta_cost);

/// Assumed diversion curve d = 1 / (1 + exp(a + b * delta_cost)).
double logistic_diversion(const DeviationParams& params, double delta_cost);

/// Fraction of a mode's share diverted to transit under the given curve.
double demand_deviation(double share, const DeviationParams& params, double delta_cost,
                        DiversionCurve curve = logistic_diversion);

/// Calibrated per-mode deviation parameters (car, taxi, minibus, bicycle).
std::map<std::string, DeviationParams> default_deviation_params();

// --- person -> vehicle -> PCE conversion -----------------------------------

enum class VehicleClass { car, pickup, taxi, minibus, bus, motorcycle, lorry };

const char* to_string(VehicleClass cls);
VehicleClass vehicle_class_from_string(const std::string& name);

/// Assignable vehicle class for a person mode; bus has none.
VehicleClass vehicle_class_for_mode(ModeId mode);

struct VehicleConversion {
    std::map<ModeId, double> occupancy;       // persons per vehicle
    std::map<VehicleClass, double> pce;       // passenger car equivalents

    static VehicleConversion defaults();
};

/// Person OD to vehicle OD by occupancy. Bus is excluded by contract.
Matrix vehicles_from_persons(const Matrix& person_od, const VehicleConversion& conv, ModeId mode);

/// Sum of per-class vehicle ODs weighted by their PCE factors.
Matrix pce_matrix(const std::map<VehicleClass, Matrix>& vehicle_ods,
                  const VehicleConversion& conv);

}  // namespace uta
