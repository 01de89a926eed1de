#include "uta/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace uta {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

DemandModels DemandModels::defaults() {
    DemandModels models;
    for (Purpose p : kAllPurposes) {
        models.production[p] = default_production_model(p);
        models.attraction[p] = default_attraction_model(p);
        models.choice[p] = default_choice_model(p);
    }
    models.deviation = default_deviation_params();
    models.conversion = VehicleConversion::defaults();
    return models;
}

RunConfig RunConfig::defaults() {
    RunConfig config;
    config.periods = {
        {"am_peak", 0.10, 730.0},
        {"pm_peak", 0.10, 730.0},
        {"off_peak", 0.03, 7300.0},
    };
    config.models = DemandModels::defaults();
    config.emission_factors = EmissionFactors::defaults();
    return config;
}

namespace {

std::string join_path(const std::string& base, const std::string& rel) {
    if (rel.empty()) return rel;
    fs::path p(rel);
    if (p.is_absolute() || base.empty()) return rel;
    return (fs::path(base) / p).lexically_normal().string();
}

Regression parse_regression(const std::string& text, const std::string& context) {
    Regression model;
    for (const std::string& part : split_fields(text, ';')) {
        if (part.empty()) continue;
        std::istringstream is(part);
        std::string token;
        if (!(is >> token)) continue;
        RegressionTerm term;
        term.coef = parse_double(token, context);
        while (is >> token) term.vars.push_back(zone_var_from_string(token));
        model.terms.push_back(term);
    }
    if (model.terms.empty()) throw InputError(context + ": empty regression");
    return model;
}

ModeUtility parse_mode_utility(ModeId mode, const std::string& text, const std::string& context) {
    ModeUtility spec;
    spec.mode = mode;
    for (const std::string& part : split_fields(text, ';')) {
        if (part.empty()) continue;
        std::istringstream is(part);
        std::vector<std::string> tokens;
        std::string token;
        while (is >> token) tokens.push_back(token);
        if (tokens.size() == 1)
            spec.constant += parse_double(tokens[0], context);
        else if (tokens.size() == 2)
            spec.terms.push_back({parse_double(tokens[0], context),
                                  skim_var_from_string(tokens[1])});
        else
            throw InputError(context + ": utility terms are 'constant' or 'coef VAR'");
    }
    return spec;
}

std::vector<EmissionBin> parse_emission_bins(const std::string& text, const std::string& context) {
    std::vector<EmissionBin> bins;
    std::istringstream is(text);
    std::string token;
    while (is >> token) {
        std::size_t dash = token.find('-');
        std::size_t colon = token.find(':');
        if (dash == std::string::npos || colon == std::string::npos || colon < dash)
            throw InputError(context + ": emission bins are 'lo-hi:grams', got '" + token + "'");
        EmissionBin bin;
        bin.speed_lo = parse_double(token.substr(0, dash), context);
        bin.speed_hi = parse_double(token.substr(dash + 1, colon - dash - 1), context);
        bin.grams_per_veh_km = parse_double(token.substr(colon + 1), context);
        bins.push_back(bin);
    }
    if (bins.empty()) throw InputError(context + ": empty emission bin table");
    return bins;
}

void apply_model_overrides(DemandModels& models, const IniFile& ini) {
    for (Purpose p : kAllPurposes) {
        std::string prod_section = std::string("production.") + to_string(p);
        if (auto terms = ini.get(prod_section, "terms"))
            models.production[p] = parse_regression(*terms, ini.origin() + " [" + prod_section + "]");
        std::string attr_section = std::string("attraction.") + to_string(p);
        if (auto terms = ini.get(attr_section, "terms"))
            models.attraction[p] = parse_regression(*terms, ini.origin() + " [" + attr_section + "]");

        std::string choice_section = std::string("choice.") + to_string(p);
        for (const IniFile::Entry& e : ini.section_entries(choice_section)) {
            std::string context = ini.origin() + " [" + choice_section + "] " + e.key;
            if (e.key.rfind("nest.", 0) == 0) {
                Nest nest;
                nest.name = e.key.substr(5);
                std::istringstream is(e.value);
                std::string token;
                while (is >> token) nest.members.push_back(mode_from_string(token));
                auto& nests = models.choice[p].nests;
                auto it = std::find_if(nests.begin(), nests.end(),
                                       [&nest](const Nest& n) { return n.name == nest.name; });
                if (it != nests.end()) {
                    it->members = nest.members;
                } else {
                    nests.push_back(nest);
                }
                continue;
            }
            if (e.key.rfind("theta.", 0) == 0) {
                std::string name = e.key.substr(6);
                auto& nests = models.choice[p].nests;
                auto it = std::find_if(nests.begin(), nests.end(),
                                       [&name](const Nest& n) { return n.name == name; });
                if (it == nests.end()) throw InputError(context + ": unknown nest '" + name + "'");
                it->theta = parse_double(e.value, context);
                continue;
            }
            ModeId mode = mode_from_string(e.key);
            ModeUtility spec = parse_mode_utility(mode, e.value, context);
            auto& modes = models.choice[p].modes;
            auto it = std::find_if(modes.begin(), modes.end(),
                                   [mode](const ModeUtility& m) { return m.mode == mode; });
            if (it != modes.end())
                *it = spec;
            else
                modes.push_back(spec);
        }
    }

    for (const IniFile::Entry& e : ini.section_entries("occupancy"))
        models.conversion.occupancy[mode_from_string(e.key)] =
            parse_double(e.value, ini.origin() + " [occupancy] " + e.key);
    for (const IniFile::Entry& e : ini.section_entries("pce"))
        models.conversion.pce[vehicle_class_from_string(e.key)] =
            parse_double(e.value, ini.origin() + " [pce] " + e.key);
    for (const IniFile::Entry& e : ini.section_entries("deviation")) {
        std::istringstream is(e.value);
        DeviationParams params;
        if (!(is >> params.a >> params.b))
            throw InputError(ini.origin() + " [deviation] " + e.key + ": expected 'a b'");
        models.deviation[e.key] = params;
    }
}

}  // namespace

RunConfig config_from_ini(const IniFile& ini, const std::string& base_dir) {
    RunConfig config = RunConfig::defaults();

    config.network_path = join_path(base_dir, ini.get_or("paths", "network", ""));
    config.zones_path = join_path(base_dir, ini.get_or("paths", "zones", ""));
    config.skims_path = join_path(base_dir, ini.get_or("paths", "skims", ""));
    config.ownership_path = join_path(base_dir, ini.get_or("paths", "ownership", ""));
    for (const IniFile::Entry& e : ini.section_entries("paths"))
        if (e.key == "scenario") config.scenario_paths.push_back(join_path(base_dir, e.value));
    config.output_dir = join_path(base_dir, ini.get_or("paths", "output", config.output_dir));

    config.population_growth = ini.get_double("growth", "population", config.population_growth);
    config.car_ownership_growth =
        ini.get_double("growth", "car_ownership", config.car_ownership_growth);

    if (ini.has_section("periods")) {
        config.periods.clear();
        for (const IniFile::Entry& e : ini.section_entries("periods")) {
            std::istringstream is(e.value);
            Period period;
            period.name = e.key;
            if (!(is >> period.demand_fraction_per_hour >> period.weight_hours_per_year))
                throw InputError(ini.origin() + " [periods] " + e.key +
                                 ": expected 'hourly_fraction weight_hours'");
            config.periods.push_back(period);
        }
    }
    if (config.periods.empty()) throw InputError(ini.origin() + ": no assignment periods");
    for (const Period& p : config.periods)
        if (!(p.demand_fraction_per_hour > 0.0) || !(p.weight_hours_per_year > 0.0))
            throw InputError(ini.origin() + ": period '" + p.name + "' weights must be positive");

    UnitValues& unit = config.unit_values;
    unit.horizon_years = ini.get_int("horizon", "years", unit.horizon_years);
    unit.discount_rate = ini.get_double("horizon", "discount_rate", unit.discount_rate);
    config.currency = ini.get_or("horizon", "currency", config.currency);
    if (unit.horizon_years < 1) throw InputError(ini.origin() + ": horizon must be >= 1 year");
    if (!(unit.discount_rate >= 0.0 && unit.discount_rate < 1.0))
        throw InputError(ini.origin() + ": discount rate must be in [0, 1)");

    unit.value_of_time = ini.get_double("unit_values", "value_of_time", unit.value_of_time);
    unit.fuel_price = ini.get_double("unit_values", "fuel_price", unit.fuel_price);
    unit.annual_accident_cost_base =
        ini.get_double("unit_values", "accident_cost_base", unit.annual_accident_cost_base);
    unit.severity_fatal = ini.get_double("unit_values", "severity_fatal", unit.severity_fatal);
    unit.severity_injury = ini.get_double("unit_values", "severity_injury", unit.severity_injury);
    unit.severity_pdo = ini.get_double("unit_values", "severity_pdo", unit.severity_pdo);
    if (ini.get_bool("unit_values", "raw_table_prices", false)) {
        // Literal reading of the source price table (SO2 1.825, NMVOC 0.5 $/t).
        unit.pollutant_price[Pollutant::SO2] = 1.825;
        unit.pollutant_price[Pollutant::HC] = 0.5;
    }
    for (Pollutant p : kAllPollutants)
        unit.pollutant_price[p] = ini.get_double("unit_values", std::string("price_") + to_string(p),
                                                 unit.pollutant_price[p]);
    if (auto price = ini.get("unit_values", "price_NMVOC"))
        unit.pollutant_price[Pollutant::HC] =
            parse_double(*price, ini.origin() + " [unit_values] price_NMVOC");
    if (unit.value_of_time < 0.0 || unit.fuel_price < 0.0 || unit.annual_accident_cost_base < 0.0)
        throw InputError(ini.origin() + ": unit prices must be non-negative");
    for (const auto& [p, price] : unit.pollutant_price)
        if (price < 0.0)
            throw InputError(ini.origin() + ": pollutant prices must be non-negative");
    double severity_total = unit.severity_fatal + unit.severity_injury + unit.severity_pdo;
    if (std::abs(severity_total - 1.0) > 1e-9)
        throw InputError(ini.origin() + ": accident severity shares must sum to 1");

    config.assignment.max_iterations =
        ini.get_int("assignment", "max_iterations", config.assignment.max_iterations);
    config.assignment.relative_gap_target =
        ini.get_double("assignment", "relative_gap", config.assignment.relative_gap_target);
    config.assignment.bisection_steps =
        ini.get_int("assignment", "bisection_steps", config.assignment.bisection_steps);
    std::string search = ini.get_or("assignment", "line_search", "bisection");
    if (search == "bisection") config.assignment.line_search = LineSearch::exact_bisection;
    else if (search == "msa") config.assignment.line_search = LineSearch::msa;
    else throw InputError(ini.origin() + ": line_search must be 'bisection' or 'msa'");
    config.update_car_skims =
        ini.get_bool("assignment", "update_car_skims", config.update_car_skims);

    config.gravity.mu = ini.get_double("gravity", "mu", config.gravity.mu);
    config.gravity.tolerance = ini.get_double("gravity", "tolerance", config.gravity.tolerance);
    config.gravity.max_iterations =
        ini.get_int("gravity", "max_iterations", config.gravity.max_iterations);

    config.fuel_model.k1 = ini.get_double("fuel_model", "k1", config.fuel_model.k1);
    config.fuel_model.k2 = ini.get_double("fuel_model", "k2", config.fuel_model.k2);
    config.fuel_model.k3 = ini.get_double("fuel_model", "k3", config.fuel_model.k3);

    for (const IniFile::Entry& e : ini.section_entries("emissions"))
        config.emission_factors.table[pollutant_from_string(e.key)] =
            parse_emission_bins(e.value, ini.origin() + " [emissions] " + e.key);

    config.hotspot_multiplier =
        ini.get_double("pipeline", "hotspot_multiplier", config.hotspot_multiplier);
    config.transit_time_scale =
        ini.get_double("pipeline", "transit_time_scale", config.transit_time_scale);

    double work_theta = ini.get_double("nesting", "work_theta", 1.0);
    config.models.choice[Purpose::work] = default_choice_model(Purpose::work, work_theta);
    apply_model_overrides(config.models, ini);
    return config;
}

RunConfig load_config(const std::string& path) {
    IniFile ini = IniFile::parse_file(path);
    std::string base = fs::path(path).parent_path().string();
    return config_from_ini(ini, base);
}

Inputs load_inputs(const RunConfig& config) {
    Inputs inputs{read_network(config.network_path), {}, {}, {}};

    std::vector<Defect> defects = validate_network(inputs.network);
    if (!defects.empty()) {
        std::string message = config.network_path + ": invalid network:";
        for (const Defect& d : defects) message += "\n  [" + d.invariant + "] " + d.detail;
        throw InputError(message);
    }

    inputs.zones = read_zones(config.zones_path, inputs.network.zone_count());
    inputs.skims = read_skims(config.skims_path, config.ownership_path, inputs.network.zone_ids());

    for (const std::string& path : config.scenario_paths) {
        ScenarioDelta delta = read_scenario(path);
        for (Phase phase : {Phase::construction, Phase::operation}) {
            Network changed = apply_scenario(inputs.network, delta, phase);
            std::vector<Defect> phase_defects = validate_network(changed);
            if (!phase_defects.empty())
                throw InputError(path + ": scenario breaks the network in the " +
                                 (phase == Phase::construction ? std::string("construction")
                                                               : std::string("operation")) +
                                 " phase: [" + phase_defects.front().invariant + "] " +
                                 phase_defects.front().detail);
        }
        inputs.scenarios.push_back(std::move(delta));
    }
    return inputs;
}

namespace {

std::vector<ZoneAttributes> grown_zones(const std::vector<ZoneAttributes>& zones,
                                        const RunConfig& config, int year) {
    std::vector<ZoneAttributes> grown = zones;
    double pg = std::pow(config.population_growth, year);
    double vg = std::pow(config.car_ownership_growth, year);
    for (ZoneAttributes& z : grown) {
        z.P *= pg;
        z.VP *= vg;
    }
    return grown;
}

SkimSet scaled_transit(const SkimSet& skims, double factor) {
    if (factor == 1.0) return skims;
    SkimSet scaled = skims;
    scaled.timbin *= factor;
    scaled.timbot *= factor;
    return scaled;
}

}  // namespace

YearResult run_year(const Network& net, const std::vector<ZoneAttributes>& zones,
                    const SkimSet& skims, const RunConfig& config, int year) {
    if (zones.size() != net.zone_count())
        throw std::invalid_argument("run_year: zone row count does not match the network");
    std::size_t n = net.zone_count();

    std::vector<ZoneAttributes> grown = grown_zones(zones, config, year);
    SkimSet year_skims = scaled_transit(skims, std::pow(config.transit_time_scale, year));

    YearResult result;

    // Demand stages: generation, balancing, distribution and mode choice per
    // purpose, accumulated into per-mode person OD matrices.
    std::map<ModeId, Matrix> person_od;
    for (Purpose purpose : kAllPurposes) {
        const Regression& prod_model = config.models.production.at(purpose);
        const Regression& attr_model = config.models.attraction.at(purpose);
        TripEnds ends;
        ends.purpose = purpose;
        ends.productions.resize(n);
        ends.attractions.resize(n);
        for (std::size_t z = 0; z < n; ++z) {
            double raw_p = prod_model.evaluate(grown[z]);
            double raw_a = attr_model.evaluate(grown[z]);
            if (raw_p < 0.0 || raw_a < 0.0) ++result.clamped_regressions;
            ends.productions[z] = std::max(0.0, raw_p);
            ends.attractions[z] = std::max(0.0, raw_a);
        }
        double total_p = 0.0, total_a = 0.0;
        for (std::size_t z = 0; z < n; ++z) {
            total_p += ends.productions[z];
            total_a += ends.attractions[z];
        }
        if (total_p <= 0.0 || total_a <= 0.0) continue;  // no demand for this purpose
        ends = balance_attractions(std::move(ends));
        Matrix od = gravity_distribute(ends, year_skims.timcar, config.gravity);

        const ChoiceModel& choice = config.models.choice.at(purpose);
        for (std::size_t o = 0; o < n; ++o) {
            for (std::size_t d = 0; d < n; ++d) {
                double trips = od.at(o, d);
                if (trips <= 0.0) continue;
                SkimEntry entry = year_skims.entry(o, d);
                std::map<ModeId, double> utilities;
                for (const ModeUtility& spec : choice.modes)
                    utilities[spec.mode] = mode_utility(choice, spec.mode, entry);
                std::map<ModeId, double> shares = mode_shares(choice, utilities);
                for (const auto& [mode, share] : shares) {
                    auto [it, inserted] = person_od.try_emplace(mode, Matrix::square(n, 0.0));
                    it->second.at(o, d) += trips * share;
                }
            }
        }
    }

    // Person trips to vehicles (bus stays a person mode) and on to PCE.
    std::map<VehicleClass, Matrix> vehicle_od;
    double total_vehicles = 0.0;
    for (const auto& [mode, od] : person_od) {
        if (mode == ModeId::bus) continue;
        Matrix vehicles = vehicles_from_persons(od, config.models.conversion, mode);
        total_vehicles += vehicles.total();
        vehicle_od[vehicle_class_for_mode(mode)] = std::move(vehicles);
    }
    result.daily_pce_od = vehicle_od.empty() ? Matrix::square(n, 0.0)
                                             : pce_matrix(vehicle_od, config.models.conversion);
    result.person_od = std::move(person_od);
    double total_pce = result.daily_pce_od.total();
    double fleet_ratio = total_pce > 0.0 ? total_vehicles / total_pce : 0.0;

    // Per-period equilibrium assignment expanded to annual totals.
    for (Pollutant p : kAllPollutants) result.metrics.emissions_kg[p] = 0.0;
    for (const Period& period : config.periods) {
        Matrix hourly = result.daily_pce_od * period.demand_fraction_per_hour;
        FlowState state = frank_wolfe(net, hourly, config.assignment);
        result.all_converged = result.all_converged && state.converged;

        std::vector<LinkLoad> loads;
        loads.reserve(net.link_count());
        for (std::size_t l = 0; l < net.link_count(); ++l) {
            const Link& link = net.links()[l];
            double veh_flow = state.flow[l] * fleet_ratio;
            double minutes = state.time[l];
            result.metrics.vehicle_hours += veh_flow * (minutes / 60.0) * period.weight_hours_per_year;
            result.metrics.vehicle_km += veh_flow * link.length * period.weight_hours_per_year;
            if (link.length > 0.0 && veh_flow > 0.0)
                loads.push_back({veh_flow, link.length / (minutes / 60.0), link.length,
                                 period.weight_hours_per_year});
        }
        result.metrics.fuel_liters += fuel_liters(loads, config.fuel_model);
        for (const auto& [p, kg] : emissions_kg(loads, config.emission_factors))
            result.metrics.emissions_kg[p] += kg;

        result.period_flows.emplace(period.name, std::move(state));
    }

    // Congested zone-to-zone car times/distances from the first (peak) period.
    const FlowState& peak = result.period_flows.at(config.periods.front().name);
    result.car_skims = uta::skims(net, peak.flow);
    return result;
}

namespace {

/// Feeds congested car times back into the next year's level-of-service:
/// TIMCAR is replaced, TIMMOT/TIMTAX scale by the same congestion ratio and
/// DIST follows the congested paths. Intrazonal cells keep their inputs.
void update_highway_skims(SkimSet& skims, const SkimResult& congested) {
    std::size_t n = skims.zone_count();
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t d = 0; d < n; ++d) {
            if (o == d) continue;
            double updated = congested.time.at(o, d);
            if (!std::isfinite(updated)) continue;
            double previous = skims.timcar.at(o, d);
            double ratio = previous > 0.0 ? updated / previous : 1.0;
            skims.timcar.at(o, d) = updated;
            skims.timmot.at(o, d) *= ratio;
            skims.timtax.at(o, d) *= ratio;
            skims.dist.at(o, d) = congested.distance.at(o, d);
        }
    }
}

struct TrackedRun {
    std::vector<AnnualMetrics> metrics;       // years 0..T
    std::map<std::string, FlowState> final_flows;
    bool all_converged = true;
};

TrackedRun run_years(const Network& construction_net, const Network& operation_net,
                     const Inputs& inputs, const RunConfig& config) {
    TrackedRun run;
    SkimSet skims = inputs.skims;
    int horizon = config.unit_values.horizon_years;
    for (int year = 0; year <= horizon; ++year) {
        const Network& net = year == 0 ? construction_net : operation_net;
        YearResult result = run_year(net, inputs.zones, skims, config, year);
        run.metrics.push_back(result.metrics);
        run.all_converged = run.all_converged && result.all_converged;
        // Only operation years feed congested car times forward; the one-year
        // construction squeeze must not shape the following year's demand.
        if (config.update_car_skims && year >= 1)
            update_highway_skims(skims, result.car_skims);
        if (year == horizon) run.final_flows = std::move(result.period_flows);
    }
    return run;
}

}  // namespace

HorizonResult run_horizon(const RunConfig& config, const Inputs& inputs) {
    const UnitValues& unit = config.unit_values;
    HorizonResult result;

    TrackedRun base = run_years(inputs.network, inputs.network, inputs, config);
    result.status_quo = base.metrics;
    result.base_network = inputs.network;
    result.status_quo_flows = std::move(base.final_flows);
    result.all_converged = base.all_converged;

    std::vector<AppraisalLedger> ledgers;
    for (const ScenarioDelta& delta : inputs.scenarios) {
        Network construction_net = apply_scenario(inputs.network, delta, Phase::construction);
        Network operation_net = apply_scenario(inputs.network, delta, Phase::operation);
        TrackedRun run = run_years(construction_net, operation_net, inputs, config);

        auto component_year = [&](int year) {
            AnnualMetrics delta_metrics = run.metrics[year] - base.metrics[year];
            LedgerYear components = monetize(delta_metrics, unit);
            double base_vkt = base.metrics[year].vehicle_km;
            double ratio = base_vkt > 0.0
                               ? (run.metrics[year].vehicle_km - base_vkt) / base_vkt
                               : 0.0;
            components.accident_cost =
                accident_cost(ratio, unit, config.hotspot_multiplier).total;
            return components;
        };

        LedgerYear construction_delta = component_year(0);
        std::vector<LedgerYear> operation_years;
        for (int year = 1; year <= unit.horizon_years; ++year)
            operation_years.push_back(component_year(year));

        AppraisalLedger ledger = assemble_ledger(
            delta.name, delta.direct_costs.construction, delta.direct_costs.acquisition,
            delta.direct_costs.annual_maintenance, construction_delta, operation_years, unit);

        ScenarioOutcome outcome;
        outcome.name = delta.name;
        outcome.ledger = ledger;
        outcome.metrics = run.metrics;
        outcome.operation_network = std::move(operation_net);
        outcome.final_flows = std::move(run.final_flows);
        outcome.all_converged = run.all_converged;
        result.all_converged = result.all_converged && run.all_converged;
        result.scenarios.push_back(std::move(outcome));
        ledgers.push_back(std::move(ledger));
    }

    if (ledgers.size() >= 2) {
        result.comparison = compare_scenarios(ledgers, unit.discount_rate);
    } else if (ledgers.size() == 1) {
        const AppraisalLedger& l = ledgers.front();
        result.comparison.ranking = {{l.name, npv(l, unit.discount_rate),
                                      payback_year(l, unit.discount_rate),
                                      bc_ratio(l, unit.discount_rate)}};
        result.comparison.npv_ratio = {{1.0}};
    }
    return result;
}

HorizonResult run_horizon(const RunConfig& config) {
    return run_horizon(config, load_inputs(config));
}

// --- reports -------------------------------------------------------------------

namespace {

std::string safe_name(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out.empty() ? "scenario" : out;
}

std::ofstream open_report(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

}  // namespace

void write_ledger_csv(const AppraisalLedger& ledger, double discount_rate,
                      const std::string& path) {
    std::ofstream out = open_report(path);
    out << "year,time_benefit,fuel_benefit,emission_benefit,accident_benefit,maintenance,net,"
           "cumulative_npv\n";
    double cumulative = -ledger.initial_cost();
    out << "0," << format_number(-ledger.construction.time_cost) << ","
        << format_number(-ledger.construction.fuel_cost) << ","
        << format_number(-ledger.construction.emission_cost) << ","
        << format_number(-ledger.construction.accident_cost) << ","
        << format_number(ledger.construction.maintenance_cost) << ","
        << format_number(-ledger.initial_cost()) << "," << format_number(cumulative) << "\n";
    double denominator = 1.0;
    for (std::size_t i = 0; i < ledger.years.size(); ++i) {
        const LedgerYear& y = ledger.years[i];
        double net = -y.total_cost();
        denominator *= 1.0 + discount_rate;
        cumulative += net / denominator;
        out << (i + 1) << "," << format_number(-y.time_cost) << "," << format_number(-y.fuel_cost)
            << "," << format_number(-y.emission_cost) << "," << format_number(-y.accident_cost)
            << "," << format_number(y.maintenance_cost) << "," << format_number(net) << ","
            << format_number(cumulative) << "\n";
    }
}

AppraisalLedger read_ledger_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty ledger file");
    const std::string expected =
        "year,time_benefit,fuel_benefit,emission_benefit,accident_benefit,maintenance,net,"
        "cumulative_npv";
    if (line.find(expected) != 0)
        throw InputError(path + ": header must be '" + expected + "'");

    AppraisalLedger ledger;
    {
        fs::path p(path);
        ledger.name = p.stem().string();
        const std::string suffix = "_ledger";
        if (ledger.name.size() > suffix.size() &&
            ledger.name.compare(ledger.name.size() - suffix.size(), suffix.size(), suffix) == 0)
            ledger.name.resize(ledger.name.size() - suffix.size());
    }
    int line_no = 1;
    bool saw_year0 = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_fields(line, ',');
        if (fields.size() != 8)
            throw InputError(path + ":" + std::to_string(line_no) + ": expected 8 fields");
        std::string ctx = path + ":" + std::to_string(line_no);
        int year = static_cast<int>(parse_double(fields[0], ctx));
        LedgerYear y;
        y.time_cost = -parse_double(fields[1], ctx);
        y.fuel_cost = -parse_double(fields[2], ctx);
        y.emission_cost = -parse_double(fields[3], ctx);
        y.accident_cost = -parse_double(fields[4], ctx);
        y.maintenance_cost = parse_double(fields[5], ctx);
        double net = parse_double(fields[6], ctx);
        if (year == 0) {
            ledger.construction = y;
            ledger.construction.maintenance_cost = 0.0;
            ledger.c0_direct = -net - ledger.construction.total_cost();
            saw_year0 = true;
        } else {
            ledger.years.push_back(y);
        }
    }
    if (!saw_year0) throw InputError(path + ": missing year 0 row");
    return ledger;
}

std::vector<std::string> emit_reports(const HorizonResult& result, const RunConfig& config,
                                      const std::string& out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + out_dir);

    const double rate = config.unit_values.discount_rate;
    std::vector<std::string> manifest;

    auto write_flow_files = [&](const std::string& label,
                                const std::map<std::string, FlowState>& flows,
                                const Network& net) {
        for (const Period& period : config.periods) {
            auto it = flows.find(period.name);
            if (it == flows.end()) continue;
            std::string name = label + "_flows_" + safe_name(period.name) + ".csv";
            write_flows(net, it->second, (dir / name).string());
            manifest.push_back(name);
        }
    };

    ordered_json summary;
    summary["currency"] = config.currency;
    summary["horizon_years"] = config.unit_values.horizon_years;
    summary["discount_rate"] = rate;
    summary["all_converged"] = result.all_converged;
    summary["scenarios"] = ordered_json::object();

    for (const ScenarioOutcome& outcome : result.scenarios) {
        std::string stem = safe_name(outcome.name);
        std::string ledger_name = stem + "_ledger.csv";
        write_ledger_csv(outcome.ledger, rate, (dir / ledger_name).string());
        manifest.push_back(ledger_name);

        std::string npv_name = stem + "_npv.csv";
        {
            std::ofstream out = open_report(dir / npv_name);
            out << "year,discounted_net,cumulative_npv\n";
            double cumulative = -outcome.ledger.initial_cost();
            out << "0," << format_number(cumulative) << "," << format_number(cumulative) << "\n";
            double denominator = 1.0;
            std::vector<double> flows = outcome.ledger.cash_flows();
            for (std::size_t i = 0; i < flows.size(); ++i) {
                denominator *= 1.0 + rate;
                double discounted = flows[i] / denominator;
                cumulative += discounted;
                out << (i + 1) << "," << format_number(discounted) << ","
                    << format_number(cumulative) << "\n";
            }
        }
        manifest.push_back(npv_name);

        write_flow_files(stem, outcome.final_flows, outcome.operation_network);

        ordered_json entry;
        entry["initial_cost"] = outcome.ledger.initial_cost();
        entry["npv"] = npv(outcome.ledger, rate);
        std::optional<int> payback = payback_year(outcome.ledger, rate);
        entry["payback_year"] = payback ? ordered_json(*payback) : ordered_json(nullptr);
        entry["bc_ratio"] = bc_ratio(outcome.ledger, rate);
        entry["converged"] = outcome.all_converged;
        try {
            entry["sensitivity_shares"] = sensitivity(outcome.ledger, config.unit_values);
        } catch (const std::invalid_argument&) {
            entry["sensitivity_shares"] = nullptr;  // degenerate (all-zero) ledger
        }
        summary["scenarios"][outcome.name] = entry;
    }

    write_flow_files("status_quo", result.status_quo_flows, result.base_network);

    ordered_json ranking = ordered_json::array();
    for (const ScenarioScore& score : result.comparison.ranking) ranking.push_back(score.name);
    summary["ranking"] = ranking;
    summary["npv_ratio"] = result.comparison.npv_ratio;

    std::ofstream summary_out = open_report(dir / "summary.json");
    summary_out << summary.dump(2) << "\n";
    manifest.push_back("summary.json");

    std::ofstream manifest_out = open_report(dir / "manifest.txt");
    for (const std::string& name : manifest) manifest_out << name << "\n";
    return manifest;
}

}  // namespace uta
