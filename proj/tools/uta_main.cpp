// uta: urban transport appraisal toolkit
//
// Subcommands: validate, demand, assign, appraise, compare, run.
// Exit codes: 0 success, 1 input error, 2 non-convergence flagged, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "uta/io.hpp"
#include "uta/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInternal = 3;

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<double> gap;
    std::optional<int> max_iters;
    std::optional<int> years;
    std::optional<double> rate;
    std::vector<std::string> scenario_names;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts, bool config_required) {
    auto* config = cmd->add_option("--config", opts.config_path, "run configuration file");
    if (config_required) config->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--gap", opts.gap, "relative gap target override");
    cmd->add_option("--max-iters", opts.max_iters, "assignment iteration cap override");
    cmd->add_option("--years", opts.years, "horizon override in years");
    cmd->add_option("--rate", opts.rate, "discount rate override");
    cmd->add_option("--scenario", opts.scenario_names, "restrict to the named scenarios")
        ->take_all();
}

uta::RunConfig effective_config(const CommonOptions& opts) {
    uta::RunConfig config = uta::load_config(opts.config_path);
    if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
    if (opts.gap) config.assignment.relative_gap_target = *opts.gap;
    if (opts.max_iters) config.assignment.max_iterations = *opts.max_iters;
    if (opts.years) config.unit_values.horizon_years = *opts.years;
    if (opts.rate) config.unit_values.discount_rate = *opts.rate;
    return config;
}

void filter_scenarios(uta::Inputs& inputs, const std::vector<std::string>& names) {
    if (names.empty()) return;
    std::vector<uta::ScenarioDelta> kept;
    for (const std::string& name : names) {
        bool found = false;
        for (const uta::ScenarioDelta& delta : inputs.scenarios)
            if (delta.name == name) {
                kept.push_back(delta);
                found = true;
            }
        if (!found) throw uta::InputError("unknown scenario '" + name + "'");
    }
    inputs.scenarios = std::move(kept);
}

int cmd_validate(const CommonOptions& opts) {
    uta::RunConfig config = effective_config(opts);
    uta::Inputs inputs = uta::load_inputs(config);
    std::cout << "network: " << inputs.network.node_count() << " nodes, "
              << inputs.network.link_count() << " links, " << inputs.network.zone_count()
              << " zones\n";
    std::cout << "zones file: " << inputs.zones.size() << " rows\n";
    std::cout << "scenarios: " << inputs.scenarios.size() << "\n";
    std::cout << "all inputs valid\n";
    return kExitOk;
}

int cmd_demand(const CommonOptions& opts) {
    uta::RunConfig config = effective_config(opts);
    uta::Inputs inputs = uta::load_inputs(config);
    uta::YearResult year = uta::run_year(inputs.network, inputs.zones, inputs.skims, config, 0);

    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    const auto& zone_ids = inputs.network.zone_ids();
    auto write_matrix = [&](const fs::path& path, const uta::Matrix& od,
                            const std::string& column) {
        std::ofstream out(path);
        out << "origin,dest," << column << "\n";
        for (std::size_t o = 0; o < zone_ids.size(); ++o)
            for (std::size_t d = 0; d < zone_ids.size(); ++d)
                out << zone_ids[o] << "," << zone_ids[d] << ","
                    << uta::format_number(od.at(o, d)) << "\n";
    };
    for (const auto& [mode, od] : year.person_od)
        write_matrix(dir / (std::string("person_od_") + uta::to_string(mode) + ".csv"), od,
                     "persons_per_day");
    write_matrix(dir / "pce_daily_od.csv", year.daily_pce_od, "pce_per_day");
    std::cout << "wrote " << (dir / "pce_daily_od.csv").string() << " (total "
              << uta::format_number(year.daily_pce_od.total()) << " PCE/day, "
              << year.person_od.size() << " person-mode matrices)\n";
    if (year.clamped_regressions > 0)
        std::cerr << "note: " << year.clamped_regressions
                  << " negative regression outputs clamped to zero\n";
    return kExitOk;
}

int cmd_assign(const std::string& network_path, const std::string& demand_path,
               const CommonOptions& opts) {
    uta::AssignmentOptions options;
    if (opts.gap) options.relative_gap_target = *opts.gap;
    if (opts.max_iters) options.max_iterations = *opts.max_iters;

    uta::Network net = uta::read_network(network_path);
    // unreachable zone pairs only matter here if demand crosses them, which
    // all_or_nothing rejects on its own
    bool structural = false;
    for (const uta::Defect& d : uta::validate_network(net)) {
        std::cerr << "defect [" << d.invariant << "] " << d.detail << "\n";
        if (d.invariant != "unreachable zone pair") structural = true;
    }
    if (structural) return kExitInputError;
    uta::Matrix od = uta::read_demand(demand_path, net.zone_ids());
    uta::FlowState state = uta::frank_wolfe(net, od, options);

    fs::path out_path = opts.out_dir.empty() ? fs::path("flows.csv")
                                             : fs::path(opts.out_dir) / "flows.csv";
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    uta::write_flows(net, state, out_path.string());
    std::cout << "iterations: " << state.iterations
              << ", relative gap: " << uta::format_number(state.gap_history.back())
              << ", beckmann: " << uta::format_number(state.beckmann_value) << "\n";
    std::cout << "wrote " << out_path.string() << "\n";
    if (!state.converged) {
        std::cerr << "assignment did not reach the gap target\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int appraise_or_compare(const std::vector<std::string>& ledger_paths, double rate,
                        const std::string& out_path, bool require_two) {
    std::vector<uta::AppraisalLedger> ledgers;
    for (const std::string& path : ledger_paths)
        ledgers.push_back(uta::read_ledger_csv(path));
    if (require_two && ledgers.size() < 2)
        throw uta::InputError("compare needs at least two ledgers");

    ordered_json report;
    report["discount_rate"] = rate;
    report["scenarios"] = ordered_json::object();
    uta::UnitValues unit;
    unit.discount_rate = rate;
    for (const uta::AppraisalLedger& ledger : ledgers) {
        ordered_json entry;
        entry["initial_cost"] = ledger.initial_cost();
        entry["npv"] = uta::npv(ledger, rate);
        std::optional<int> payback = uta::payback_year(ledger, rate);
        entry["payback_year"] = payback ? ordered_json(*payback) : ordered_json(nullptr);
        entry["bc_ratio"] = uta::bc_ratio(ledger, rate);
        try {
            entry["sensitivity_shares"] = uta::sensitivity(ledger, unit);
        } catch (const std::invalid_argument&) {
            entry["sensitivity_shares"] = nullptr;
        }
        report["scenarios"][ledger.name] = entry;
    }
    if (ledgers.size() >= 2) {
        uta::Comparison cmp = uta::compare_scenarios(ledgers, rate);
        ordered_json ranking = ordered_json::array();
        for (const uta::ScenarioScore& s : cmp.ranking) ranking.push_back(s.name);
        report["ranking"] = ranking;
        report["npv_ratio"] = cmp.npv_ratio;
    }

    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        fs::path p(out_path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p);
        out << report.dump(2) << "\n";
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_run(const CommonOptions& opts) {
    uta::RunConfig config = effective_config(opts);
    uta::Inputs inputs = uta::load_inputs(config);
    filter_scenarios(inputs, opts.scenario_names);
    if (inputs.scenarios.empty())
        throw uta::InputError("run needs at least one scenario (config [paths] scenario = ...)");

    uta::HorizonResult result = uta::run_horizon(config, inputs);
    std::vector<std::string> files = uta::emit_reports(result, config, config.output_dir);
    for (const std::string& f : files) std::cout << config.output_dir << "/" << f << "\n";
    for (const uta::ScenarioScore& score : result.comparison.ranking) {
        std::cout << score.name << ": npv " << uta::format_number(score.npv) << " "
                  << config.currency << ", payback "
                  << (score.payback ? std::to_string(*score.payback) : std::string("never"))
                  << ", b/c " << uta::format_number(score.bc) << "\n";
    }
    if (!result.all_converged) {
        std::cerr << "warning: at least one assignment did not reach the gap target\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"urban transport appraisal toolkit"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string network_path, demand_path, out_path;
    std::vector<std::string> ledger_paths;
    double rate = 0.06;

    CLI::App* validate = app.add_subcommand("validate", "load and validate all inputs");
    add_common_flags(validate, opts, true);

    CLI::App* demand = app.add_subcommand("demand", "zones to daily PCE OD matrices");
    add_common_flags(demand, opts, true);

    CLI::App* assign = app.add_subcommand("assign", "equilibrium-assign one demand matrix");
    assign->add_option("--network", network_path, "TNTP-flavored network file")->required();
    assign->add_option("--demand", demand_path, "demand matrix (TNTP block or CSV)")->required();
    assign->add_option("--out", opts.out_dir, "output directory");
    assign->add_option("--gap", opts.gap, "relative gap target");
    assign->add_option("--max-iters", opts.max_iters, "iteration cap");

    CLI::App* appraise = app.add_subcommand("appraise", "NPV/payback/sensitivity of ledgers");
    appraise->add_option("ledgers", ledger_paths, "ledger CSV files")->required();
    appraise->add_option("--rate", rate, "discount rate");
    appraise->add_option("--out", out_path, "write the JSON report here");

    CLI::App* compare = app.add_subcommand("compare", "rank existing ledgers");
    compare->add_option("ledgers", ledger_paths, "ledger CSV files")->required();
    compare->add_option("--rate", rate, "discount rate");
    compare->add_option("--out", out_path, "write the JSON report here");

    CLI::App* run = app.add_subcommand("run", "full multi-year horizon evaluation");
    add_common_flags(run, opts, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(opts);
        if (demand->parsed()) return cmd_demand(opts);
        if (assign->parsed()) return cmd_assign(network_path, demand_path, opts);
        if (appraise->parsed()) return appraise_or_compare(ledger_paths, rate, out_path, false);
        if (compare->parsed()) return appraise_or_compare(ledger_paths, rate, out_path, true);
        if (run->parsed()) return cmd_run(opts);
    } catch (const uta::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
