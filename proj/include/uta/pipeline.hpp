#pragma once

#include <map>
#include <string>
#include <vector>

#include "uta/appraise.hpp"
#include "uta/assign.hpp"
#include "uta/demand.hpp"
#include "uta/io.hpp"
#include "uta/matrix.hpp"
#include "uta/network.hpp"

namespace uta {

/// One assignment period of the 24-hour expansion. Hourly demand is the
/// daily total scaled by demand_fraction_per_hour; results scale linearly
/// by weight_hours_per_year.
struct Period {
    std::string name;
    double demand_fraction_per_hour = 0.0;
    double weight_hours_per_year = 0.0;
};

/// Demand model bundle: regressions, choice models, deviation parameters and
/// vehicle conversion, with every coefficient overridable from configuration.
struct DemandModels {
    std::map<Purpose, Regression> production;
    std::map<Purpose, Regression> attraction;
    std::map<Purpose, ChoiceModel> choice;
    std::map<std::string, DeviationParams> deviation;
    VehicleConversion conversion;

    static DemandModels defaults();
};

struct RunConfig {
    // paths, resolved against the config file directory
    std::string network_path;
    std::string zones_path;
    std::string skims_path;
    std::string ownership_path;
    std::vector<std::string> scenario_paths;
    std::string output_dir = "out";

    double population_growth = 1.02;     // per-year multiplier on P
    double car_ownership_growth = 1.03;  // per-year multiplier on VP
    std::vector<Period> periods;
    UnitValues unit_values;
    FuelModel fuel_model;
    EmissionFactors emission_factors;
    DemandModels models;
    AssignmentOptions assignment;
    GravityOptions gravity;
    double hotspot_multiplier = 1.0;
    double transit_time_scale = 1.0;  // per-year multiplier on TIMBIN/TIMBOT
    bool update_car_skims = true;     // feed congested car times into next year
    std::string currency = "M$";

    static RunConfig defaults();
};

/// Parses the run configuration, applying defaults for every missing key.
RunConfig load_config(const std::string& path);
RunConfig config_from_ini(const IniFile& ini, const std::string& base_dir);

struct Inputs {
    Network network;
    std::vector<ZoneAttributes> zones;
    SkimSet skims;
    std::vector<ScenarioDelta> scenarios;
};

/// Loads and validates every input file; any network defect or parse error
/// is rejected with file and line context.
Inputs load_inputs(const RunConfig& config);

/// Output of one evaluated year on one network.
struct YearResult {
    AnnualMetrics metrics;
    bool all_converged = true;
    SkimResult car_skims;                       // congested time/distance by zone pair
    std::map<std::string, FlowState> period_flows;
    std::map<ModeId, Matrix> person_od;         // daily person trips, all purposes
    Matrix daily_pce_od;
    long clamped_regressions = 0;
};

/// Runs the demand-to-assignment chain for one year: growth on P and VP,
/// generation, attraction balancing, gravity distribution, mode choice,
/// vehicle and PCE conversion, per-period equilibrium assignment and the
/// daily expansion into annual metrics.
YearResult run_year(const Network& net, const std::vector<ZoneAttributes>& zones,
                    const SkimSet& skims, const RunConfig& config, int year);

struct ScenarioOutcome {
    std::string name;
    AppraisalLedger ledger;
    std::vector<AnnualMetrics> metrics;  // construction year 0 then years 1..T
    Network operation_network;
    std::map<std::string, FlowState> final_flows;  // last horizon year, per period
    bool all_converged = true;
};

struct HorizonResult {
    std::vector<AnnualMetrics> status_quo;  // years 0..T
    Network base_network;
    std::map<std::string, FlowState> status_quo_flows;
    std::vector<ScenarioOutcome> scenarios;
    Comparison comparison;
    bool all_converged = true;
};

HorizonResult run_horizon(const RunConfig& config, const Inputs& inputs);
HorizonResult run_horizon(const RunConfig& config);

/// Writes ledger/NPV year series, final-year link flows and the JSON summary;
/// returns the emitted file names in manifest order. Re-running on identical
/// inputs yields byte-identical files.
std::vector<std::string> emit_reports(const HorizonResult& result, const RunConfig& config,
                                      const std::string& out_dir);

/// Ledger CSV round-trip used by the appraise/compare subcommands.
void write_ledger_csv(const AppraisalLedger& ledger, double discount_rate,
                      const std::string& path);
AppraisalLedger read_ledger_csv(const std::string& path);

}  // namespace uta
