#include "uta/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uta {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(Purpose purpose) {
    switch (purpose) {
        case Purpose::work: return "work";
        case Purpose::education: return "education";
        case Purpose::buy: return "buy";
        case Purpose::entertainment: return "entertainment";
        case Purpose::non_home_base: return "non_home_base";
    }
    return "?";
}

Purpose purpose_from_string(const std::string& name) {
    for (Purpose p : kAllPurposes)
        if (name == to_string(p)) return p;
    throw std::invalid_argument("unknown trip purpose: " + name);
}

const char* to_string(ZoneVar var) {
    switch (var) {
        case ZoneVar::P: return "P";
        case ZoneVar::VP: return "VP";
        case ZoneVar::ER: return "ER";
        case ZoneVar::STR: return "STR";
        case ZoneVar::STUR: return "STUR";
        case ZoneVar::EMPE: return "EMPE";
        case ZoneVar::SHOP: return "SHOP";
        case ZoneVar::ST: return "ST";
        case ZoneVar::STU: return "STU";
        case ZoneVar::HOSPB: return "HOSPB";
        case ZoneVar::PARK: return "PARK";
        case ZoneVar::DRA: return "DRA";
        case ZoneVar::DB: return "DB";
        case ZoneVar::DT: return "DT";
        case ZoneVar::DQ: return "DQ";
        case ZoneVar::DF: return "DF";
        case ZoneVar::DR: return "DR";
        case ZoneVar::D128: return "D128";
        case ZoneVar::D444: return "D444";
        case ZoneVar::DIST: return "DIST";
    }
    return "?";
}

ZoneVar zone_var_from_string(const std::string& name) {
    for (ZoneVar v : kAllZoneVars)
        if (name == to_string(v)) return v;
    throw std::invalid_argument("unknown zone attribute: " + name);
}

double zone_value(const ZoneAttributes& z, ZoneVar var) {
    switch (var) {
        case ZoneVar::P: return z.P;
        case ZoneVar::VP: return z.VP;
        case ZoneVar::ER: return z.ER;
        case ZoneVar::STR: return z.STR;
        case ZoneVar::STUR: return z.STUR;
        case ZoneVar::EMPE: return z.EMPE;
        case ZoneVar::SHOP: return z.SHOP;
        case ZoneVar::ST: return z.ST;
        case ZoneVar::STU: return z.STU;
        case ZoneVar::HOSPB: return z.HOSPB;
        case ZoneVar::PARK: return z.PARK;
        case ZoneVar::DRA: return z.DRA;
        case ZoneVar::DB: return z.DB;
        case ZoneVar::DT: return z.DT;
        case ZoneVar::DQ: return z.DQ;
        case ZoneVar::DF: return z.DF;
        case ZoneVar::DR: return z.DR;
        case ZoneVar::D128: return z.D128;
        case ZoneVar::D444: return z.D444;
        case ZoneVar::DIST: return z.DIST;
    }
    return 0.0;
}

std::vector<std::string> validate_zone(const ZoneAttributes& z) {
    std::vector<std::string> issues;
    constexpr std::array<ZoneVar, 12> counts = {ZoneVar::P,     ZoneVar::VP,  ZoneVar::ER,
                                                ZoneVar::STR,   ZoneVar::STUR, ZoneVar::EMPE,
                                                ZoneVar::SHOP,  ZoneVar::ST,   ZoneVar::STU,
                                                ZoneVar::HOSPB, ZoneVar::PARK, ZoneVar::DIST};
    for (ZoneVar v : counts)
        if (zone_value(z, v) < 0.0) issues.push_back(std::string(to_string(v)) + " negative");
    constexpr std::array<ZoneVar, 8> covariates = {ZoneVar::DRA, ZoneVar::DB, ZoneVar::DT,
                                                   ZoneVar::DQ,  ZoneVar::DF, ZoneVar::DR,
                                                   ZoneVar::D128, ZoneVar::D444};
    for (ZoneVar v : covariates) {
        double value = zone_value(z, v);
        if (value != 0.0 && value != 1.0)
            issues.push_back(std::string(to_string(v)) + " not a 0/1 covariate");
    }
    return issues;
}

double Regression::evaluate(const ZoneAttributes& z) const {
    double total = 0.0;
    for (const RegressionTerm& term : terms) {
        double product = term.coef;
        for (ZoneVar v : term.vars) product *= zone_value(z, v);
        total += product;
    }
    return total;
}

namespace {

using V = ZoneVar;
RegressionTerm term(double coef, std::initializer_list<V> vars) { return {coef, vars}; }

}  // namespace

Regression default_production_model(Purpose purpose) {
    switch (purpose) {
        case Purpose::work:
            return {{term(0.569, {V::VP, V::ER}), term(1.107, {V::ER})}};
        case Purpose::education:
            return {{term(3.070, {V::VP, V::STR}), term(0.903, {V::STUR}),
                     term(0.020, {V::DIST, V::P})}};
        case Purpose::buy:
            return {{term(0.061, {V::P}), term(0.414, {V::VP, V::P})}};
        case Purpose::entertainment:
            return {{term(0.073, {V::P}), term(0.373, {V::VP, V::P})}};
        case Purpose::non_home_base:
            return {{term(0.490, {V::EMPE}), term(10.213, {V::VP, V::SHOP}),
                     term(14485.0, {V::DB}), term(951.0, {V::DQ})}};
    }
    throw std::invalid_argument("unknown trip purpose");
}

Regression default_attraction_model(Purpose purpose) {
    switch (purpose) {
        case Purpose::work:
            return {{term(1.620, {V::EMPE}), term(2.420, {V::SHOP}), term(62694.0, {V::DB})}};
        case Purpose::education:
            return {{term(3.833, {V::VP, V::ST}), term(0.500, {V::STU}), term(26789.0, {V::DT}),
                     term(9299.0, {V::D128})}};
        case Purpose::buy:
            return {{term(15.760, {V::VP, V::SHOP}), term(0.195, {V::EMPE}),
                     term(0.825, {V::HOSPB}), term(15456.0, {V::DB}), term(3469.0, {V::DQ}),
                     term(7474.0, {V::DF}), term(4607.0, {V::D444}),
                     term(-0.889, {V::SHOP, V::DRA})}};
        case Purpose::entertainment:
            return {{term(122.140, {V::PARK}), term(0.040, {V::P}), term(7.364, {V::VP, V::SHOP}),
                     term(0.304, {V::EMPE}), term(4098.0, {V::DR}), term(1937.0, {V::DF}),
                     term(1532.0, {V::DQ}), term(-0.279, {V::SHOP, V::DRA}),
                     term(-0.208, {V::EMPE, V::DRA})}};
        case Purpose::non_home_base:
            return {{term(0.458, {V::EMPE}), term(11.526, {V::VP, V::SHOP}),
                     term(11706.0, {V::DB}), term(1173.0, {V::DQ})}};
    }
    throw std::invalid_argument("unknown trip purpose");
}

double trip_production(const ZoneAttributes& z, const Regression& model) {
    return std::max(0.0, model.evaluate(z));
}

double trip_production(const ZoneAttributes& z, Purpose purpose) {
    return trip_production(z, default_production_model(purpose));
}

double trip_attraction(const ZoneAttributes& z, const Regression& model) {
    return std::max(0.0, model.evaluate(z));
}

double trip_attraction(const ZoneAttributes& z, Purpose purpose) {
    return trip_attraction(z, default_attraction_model(purpose));
}

TripEnds balance_attractions(TripEnds ends) {
    double total_p = 0.0, total_a = 0.0;
    for (double p : ends.productions) total_p += p;
    for (double a : ends.attractions) total_a += a;
    if (total_p <= 0.0) throw std::invalid_argument("balance_attractions: no production mass");
    if (total_a <= 0.0) throw std::invalid_argument("balance_attractions: no attraction mass");
    double factor = total_p / total_a;
    for (double& a : ends.attractions) a *= factor;
    return ends;
}

Matrix gravity_distribute(const TripEnds& ends, const Matrix& impedance,
                          const GravityOptions& opts) {
    std::size_t n = ends.productions.size();
    if (ends.attractions.size() != n)
        throw std::invalid_argument("gravity_distribute: production/attraction size mismatch");
    if (impedance.rows() != n || impedance.cols() != n)
        throw std::invalid_argument("gravity_distribute: impedance shape mismatch");

    double total_p = 0.0, total_a = 0.0;
    for (double p : ends.productions) total_p += p;
    for (double a : ends.attractions) total_a += a;
    if (total_p <= 0.0) throw std::invalid_argument("gravity_distribute: no production mass");
    if (std::abs(total_p - total_a) > 1e-6 * std::max(total_p, total_a))
        throw std::invalid_argument("gravity_distribute: trip ends are not balanced");

    Matrix cells(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double c = impedance.at(i, j);
            if (!(c > 0.0) || !std::isfinite(c))
                throw std::invalid_argument("gravity_distribute: impedance must be finite and positive");
            cells.at(i, j) = ends.productions[i] * ends.attractions[j] * std::exp(-opts.mu * c);
        }

    auto margin_error = [&]() {
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double target = ends.productions[i];
            double diff = std::abs(cells.row_sum(i) - target);
            err = std::max(err, target > 0.0 ? diff / target : diff);
        }
        for (std::size_t j = 0; j < n; ++j) {
            double target = ends.attractions[j];
            double diff = std::abs(cells.col_sum(j) - target);
            err = std::max(err, target > 0.0 ? diff / target : diff);
        }
        return err;
    };

    double achieved = margin_error();
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (achieved < opts.tolerance) return cells;
        for (std::size_t i = 0; i < n; ++i) {
            double sum = cells.row_sum(i);
            double factor = sum > 0.0 ? ends.productions[i] / sum : 0.0;
            for (std::size_t j = 0; j < n; ++j) cells.at(i, j) *= factor;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double sum = cells.col_sum(j);
            double factor = sum > 0.0 ? ends.attractions[j] / sum : 0.0;
            for (std::size_t i = 0; i < n; ++i) cells.at(i, j) *= factor;
        }
        achieved = margin_error();
    }
    if (achieved < opts.tolerance) return cells;
    throw std::runtime_error("gravity_distribute: IPF did not converge, margin error " +
                             std::to_string(achieved));
}

// --- mode choice ------------------------------------------------------------

const char* to_string(ModeId mode) {
    switch (mode) {
        case ModeId::car: return "car";
        case ModeId::motorcycle: return "motorcycle";
        case ModeId::bus: return "bus";
        case ModeId::taxi: return "taxi";
        case ModeId::minibus: return "minibus";
    }
    return "?";
}

ModeId mode_from_string(const std::string& name) {
    for (ModeId m : kAllModes)
        if (name == to_string(m)) return m;
    throw std::invalid_argument("unknown mode: " + name);
}

const char* to_string(SkimVar var) {
    switch (var) {
        case SkimVar::TIMCAR: return "TIMCAR";
        case SkimVar::TIMMOT: return "TIMMOT";
        case SkimVar::TIMTAX: return "TIMTAX";
        case SkimVar::TIMBIN: return "TIMBIN";
        case SkimVar::TIMBOT: return "TIMBOT";
        case SkimVar::DIST: return "DIST";
        case SkimVar::OWNCAR: return "OWNCAR";
        case SkimVar::OWNMOT: return "OWNMOT";
        case SkimVar::DESFLAG: return "DESFLAG";
    }
    return "?";
}

SkimVar skim_var_from_string(const std::string& name) {
    constexpr std::array<SkimVar, 9> all = {SkimVar::TIMCAR, SkimVar::TIMMOT, SkimVar::TIMTAX,
                                            SkimVar::TIMBIN, SkimVar::TIMBOT, SkimVar::DIST,
                                            SkimVar::OWNCAR, SkimVar::OWNMOT, SkimVar::DESFLAG};
    for (SkimVar v : all)
        if (name == to_string(v)) return v;
    throw std::invalid_argument("unknown skim variable: " + name);
}

SkimEntry::SkimEntry()
    : timcar(kNaN), timmot(kNaN), timtax(kNaN), timbin(kNaN), timbot(kNaN), dist(kNaN),
      owncar(kNaN), ownmot(kNaN), desflag(kNaN) {}

double SkimEntry::get(SkimVar var) const { return const_cast<SkimEntry*>(this)->ref(var); }

double& SkimEntry::ref(SkimVar var) {
    switch (var) {
        case SkimVar::TIMCAR: return timcar;
        case SkimVar::TIMMOT: return timmot;
        case SkimVar::TIMTAX: return timtax;
        case SkimVar::TIMBIN: return timbin;
        case SkimVar::TIMBOT: return timbot;
        case SkimVar::DIST: return dist;
        case SkimVar::OWNCAR: return owncar;
        case SkimVar::OWNMOT: return ownmot;
        case SkimVar::DESFLAG: return desflag;
    }
    throw std::invalid_argument("unknown skim variable");
}

SkimEntry SkimSet::entry(std::size_t origin, std::size_t dest) const {
    SkimEntry e;
    e.timcar = timcar.at(origin, dest);
    e.timmot = timmot.at(origin, dest);
    e.timtax = timtax.at(origin, dest);
    e.timbin = timbin.at(origin, dest);
    e.timbot = timbot.at(origin, dest);
    e.dist = dist.at(origin, dest);
    e.owncar = owncar[origin];
    e.ownmot = ownmot[origin];
    e.desflag = desflag[dest];
    return e;
}

bool ChoiceModel::has_mode(ModeId mode) const {
    return std::any_of(modes.begin(), modes.end(),
                       [mode](const ModeUtility& m) { return m.mode == mode; });
}

ChoiceModel default_choice_model(Purpose purpose, double work_nest_theta) {
    using SV = SkimVar;
    ChoiceModel model;
    model.purpose = purpose;
    switch (purpose) {
        case Purpose::work:
            model.modes = {
                {ModeId::car, 0.697568, {{-0.034575, SV::TIMCAR}, {9.008179, SV::OWNCAR}, {-0.588848, SV::DESFLAG}}},
                {ModeId::motorcycle, -0.480759, {{-0.047222, SV::TIMMOT}, {18.345253, SV::OWNMOT}}},
                {ModeId::bus, 0.330393, {{-0.020389, SV::TIMBIN}, {-0.026496, SV::TIMBOT}}},
                {ModeId::taxi, 0.0, {{-0.048415, SV::TIMTAX}, {3.100169, SV::OWNCAR}}},
            };
            model.nests = {{"public_transport", {ModeId::bus, ModeId::taxi}, work_nest_theta}};
            break;
        case Purpose::education:
            model.modes = {
                {ModeId::bus, 0.8811690, {{-0.012004, SV::TIMBIN}, {-0.012004, SV::TIMBOT}}},
                {ModeId::taxi, -0.0365572, {{-0.030786, SV::TIMTAX}, {8.253327, SV::OWNCAR}}},
                {ModeId::car, -1.1044833, {{-0.041592, SV::TIMCAR}, {11.324764, SV::OWNCAR}, {-0.582493, SV::DESFLAG}}},
                {ModeId::minibus, 0.0, {{-1.104768, SV::DIST}, {6.648515, SV::OWNCAR}}},
            };
            break;
        case Purpose::buy:
            model.modes = {
                {ModeId::bus, 2.794484, {{-0.013595, SV::TIMBIN}, {-0.015329, SV::TIMBOT}}},
                {ModeId::taxi, 1.967395, {{-0.037180, SV::TIMTAX}, {6.596312, SV::OWNCAR}}},
                {ModeId::car, 0.0, {{-0.015029, SV::TIMCAR}, {12.443686, SV::OWNCAR}, {-0.689367, SV::DESFLAG}}},
            };
            break;
        case Purpose::entertainment:
            model.modes = {
                {ModeId::bus, 2.725886, {{-0.009414, SV::TIMBIN}, {-0.009414, SV::TIMBOT}}},
                {ModeId::taxi, 2.393202, {{-0.033543, SV::TIMTAX}, {5.379732, SV::OWNCAR}}},
                {ModeId::car, 0.0, {{-0.015111, SV::TIMCAR}, {13.957626, SV::OWNCAR}, {-0.374195, SV::DESFLAG}}},
            };
            break;
        case Purpose::non_home_base:
            model.modes = {
                {ModeId::bus, 0.039002, {{-0.008689, SV::TIMBIN}, {-0.041852, SV::TIMBOT}}},
                {ModeId::taxi, 0.334293, {{-0.020176, SV::TIMTAX}}},
                {ModeId::car, 0.0, {{-0.012662, SV::TIMCAR}, {-0.705396, SV::DESFLAG}}},
            };
            break;
    }
    return model;
}

double mode_utility(const ChoiceModel& model, ModeId mode, const SkimEntry& entry) {
    for (const ModeUtility& spec : model.modes) {
        if (spec.mode != mode) continue;
        double u = spec.constant;
        for (const UtilityTerm& t : spec.terms) {
            double value = entry.get(t.var);
            if (std::isnan(value))
                throw std::invalid_argument(std::string("mode_utility: missing skim variable ") +
                                            to_string(t.var));
            u += t.coef * value;
        }
        return u;
    }
    throw std::invalid_argument(std::string("mode_utility: mode ") + to_string(mode) +
                                " not in the " + to_string(model.purpose) + " model");
}

double nest_logsum(std::span<const double> utilities, double theta) {
    if (utilities.empty()) throw std::invalid_argument("nest_logsum: empty utility list");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("nest_logsum: theta must be in (0, 1]");
    double shift = *std::max_element(utilities.begin(), utilities.end());
    double sum = 0.0;
    for (double u : utilities) sum += std::exp(u - shift);
    return theta * (shift + std::log(sum));
}

std::map<ModeId, double> mode_shares(const ChoiceModel& model,
                                     const std::map<ModeId, double>& utilities) {
    for (const ModeUtility& spec : model.modes)
        if (!utilities.count(spec.mode))
            throw std::invalid_argument(std::string("mode_shares: missing utility for ") +
                                        to_string(spec.mode));

    std::map<ModeId, int> nest_of;  // mode -> nest index, or absent when elemental
    for (std::size_t n = 0; n < model.nests.size(); ++n) {
        const Nest& nest = model.nests[n];
        if (!(nest.theta > 0.0 && nest.theta <= 1.0))
            throw std::invalid_argument("mode_shares: nest theta must be in (0, 1]");
        for (ModeId m : nest.members) {
            if (nest_of.count(m))
                throw std::invalid_argument("mode_shares: mode in more than one nest");
            if (model.has_mode(m)) nest_of[m] = static_cast<int>(n);
        }
    }

    // First level: elemental utilities plus each nest's inclusive value
    // theta * ln(sum exp(U/theta)), the scaling that keeps shares invariant
    // under a common utility shift.
    struct FirstLevel {
        double utility;
        bool is_nest;
        int nest_index;
        ModeId mode;
    };
    std::vector<FirstLevel> level;
    for (const ModeUtility& spec : model.modes)
        if (!nest_of.count(spec.mode))
            level.push_back({utilities.at(spec.mode), false, -1, spec.mode});
    std::vector<std::vector<ModeId>> nest_members(model.nests.size());
    for (const ModeUtility& spec : model.modes)
        if (auto it = nest_of.find(spec.mode); it != nest_of.end())
            nest_members[it->second].push_back(spec.mode);
    for (std::size_t n = 0; n < model.nests.size(); ++n) {
        if (nest_members[n].empty()) continue;
        double theta = model.nests[n].theta;
        std::vector<double> scaled;
        scaled.reserve(nest_members[n].size());
        for (ModeId m : nest_members[n]) scaled.push_back(utilities.at(m) / theta);
        level.push_back({nest_logsum(scaled, theta), true, static_cast<int>(n), ModeId::car});
    }

    double shift = level.front().utility;
    for (const FirstLevel& alt : level) shift = std::max(shift, alt.utility);
    double denom = 0.0;
    for (const FirstLevel& alt : level) denom += std::exp(alt.utility - shift);

    std::map<ModeId, double> shares;
    for (const FirstLevel& alt : level) {
        double p_first = std::exp(alt.utility - shift) / denom;
        if (!alt.is_nest) {
            shares[alt.mode] = p_first;
            continue;
        }
        const auto& members = nest_members[alt.nest_index];
        double theta = model.nests[alt.nest_index].theta;
        double nest_shift = utilities.at(members.front()) / theta;
        for (ModeId m : members) nest_shift = std::max(nest_shift, utilities.at(m) / theta);
        double nest_denom = 0.0;
        for (ModeId m : members) nest_denom += std::exp(utilities.at(m) / theta - nest_shift);
        for (ModeId m : members)
            shares[m] = p_first * std::exp(utilities.at(m) / theta - nest_shift) / nest_denom;
    }
    return shares;
}

double logistic_diversion(const DeviationParams& params, double delta_cost) {
    return 1.0 / (1.0 + std::exp(params.a + params.b * delta_cost));
}

double demand_deviation(double share, const DeviationParams& params, double delta_cost,
                        DiversionCurve curve) {
    if (share < 0.0 || share > 1.0)
        throw std::invalid_argument("demand_deviation: share outside [0, 1]");
    double diverted = share * curve(params, delta_cost);
    return std::clamp(diverted, 0.0, 1.0);
}

std::map<std::string, DeviationParams> default_deviation_params() {
    return {
        {"car", {1.559, 19.198}},
        {"taxi", {4.794, 2.668}},
        {"minibus", {1.652, 19.198}},
        {"bicycle", {1.652, 19.198}},
    };
}

// --- vehicle conversion ------------------------------------------------------

const char* to_string(VehicleClass cls) {
    switch (cls) {
        case VehicleClass::car: return "car";
        case VehicleClass::pickup: return "pickup";
        case VehicleClass::taxi: return "taxi";
        case VehicleClass::minibus: return "minibus";
        case VehicleClass::bus: return "bus";
        case VehicleClass::motorcycle: return "motorcycle";
        case VehicleClass::lorry: return "lorry";
    }
    return "?";
}

VehicleClass vehicle_class_from_string(const std::string& name) {
    constexpr std::array<VehicleClass, 7> all = {VehicleClass::car,  VehicleClass::pickup,
                                                 VehicleClass::taxi, VehicleClass::minibus,
                                                 VehicleClass::bus,  VehicleClass::motorcycle,
                                                 VehicleClass::lorry};
    for (VehicleClass c : all)
        if (name == to_string(c)) return c;
    throw std::invalid_argument("unknown vehicle class: " + name);
}

VehicleClass vehicle_class_for_mode(ModeId mode) {
    switch (mode) {
        case ModeId::car: return VehicleClass::car;
        case ModeId::motorcycle: return VehicleClass::motorcycle;
        case ModeId::taxi: return VehicleClass::taxi;
        case ModeId::minibus: return VehicleClass::minibus;
        case ModeId::bus: break;
    }
    throw std::invalid_argument("bus has no assignable vehicle class");
}

VehicleConversion VehicleConversion::defaults() {
    VehicleConversion conv;
    conv.occupancy = {
        {ModeId::car, 1.5}, {ModeId::taxi, 2.5}, {ModeId::motorcycle, 1.1}, {ModeId::minibus, 12.0}};
    conv.pce = {{VehicleClass::car, 1.0},     {VehicleClass::pickup, 1.0},
                {VehicleClass::taxi, 2.0},    {VehicleClass::minibus, 2.5},
                {VehicleClass::bus, 2.5},     {VehicleClass::motorcycle, 0.5},
                {VehicleClass::lorry, 2.5}};
    return conv;
}

Matrix vehicles_from_persons(const Matrix& person_od, const VehicleConversion& conv, ModeId mode) {
    if (mode == ModeId::bus)
        throw std::invalid_argument("vehicles_from_persons: bus is excluded by contract");
    auto it = conv.occupancy.find(mode);
    if (it == conv.occupancy.end() || !(it->second > 0.0))
        throw std::invalid_argument(std::string("vehicles_from_persons: no occupancy for ") +
                                    to_string(mode));
    Matrix vehicles = person_od;
    vehicles *= 1.0 / it->second;
    return vehicles;
}

Matrix pce_matrix(const std::map<VehicleClass, Matrix>& vehicle_ods, const VehicleConversion& conv) {
    Matrix result;
    for (const auto& [cls, od] : vehicle_ods) {
        auto it = conv.pce.find(cls);
        if (it == conv.pce.end())
            throw std::invalid_argument(std::string("pce_matrix: no PCE factor for ") +
                                        to_string(cls));
        Matrix weighted = od * it->second;
        if (result.empty())
            result = std::move(weighted);
        else
            result += weighted;
    }
    return result;
}

}  // namespace uta
