// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerance in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uta/appraise.hpp"
#include "uta/assign.hpp"
#include "uta/demand.hpp"
#include "uta/io.hpp"
#include "uta/pipeline.hpp"

using namespace uta;
namespace fs = std::filesystem;

namespace {

int failures = 0;
std::vector<std::string> notes;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        notes.push_back(what);
    }
}

struct Criterion {
    const char* label;
    std::function<void()> body;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// --- criterion bodies -------------------------------------------------------

void criterion_ledger_totals() {
    auto start = std::chrono::steady_clock::now();
    UnitValues unit;
    unit.horizon_years = 15;
    std::vector<LedgerYear> years(15);

    AppraisalLedger directional =
        assemble_ledger("directional", 403.0, 164.0, 0.0,
                        LedgerYear{576.0, 866.0, 366.0, 47.0, 0.0}, years, unit);
    expect(directional.initial_cost() == 2422.0, "directional total != 2422 exactly");

    AppraisalLedger cloverleaf =
        assemble_ledger("cloverleaf", 314.0, 0.0, 0.0,
                        LedgerYear{329.0, 495.0, 215.0, 23.0, 0.0}, years, unit);
    expect(cloverleaf.initial_cost() == 1376.0, "cloverleaf total != 1376 exactly");
    expect(seconds_since(start) < 1.0, "ledger totals exceeded 1 s");
}

void criterion_monetization_anchors() {
    auto start = std::chrono::steady_clock::now();
    UnitValues unit;  // 2.004 $/h, 0.7 $/L, 110e6 accident base

    AnnualMetrics delta;
    delta.vehicle_hours = 28620924.0;
    delta.fuel_liters = 124325265.0;
    LedgerYear year = monetize(delta, unit);
    expect(std::abs(year.time_cost - 57.6e6) / 57.6e6 < 0.01,
           "time monetization outside 1% of 57.6e6");
    expect(std::abs(year.fuel_cost - 86.6e6) / 86.6e6 < 0.01,
           "fuel monetization outside 1% of 86.6e6");

    double accidents = accident_cost(0.0432, unit).total;
    expect(std::abs(accidents - 4.7e6) / 4.7e6 < 0.02, "accident cost outside 2% of 4.7e6");
    expect(seconds_since(start) < 1.0, "monetization anchors exceeded 1 s");
}

void criterion_emission_deltas() {
    AnnualMetrics construction;
    construction.emissions_kg = {{Pollutant::CO, 898952107.3},
                                 {Pollutant::HC, 113958772.6},
                                 {Pollutant::NOx, 20669540.7}};
    AnnualMetrics status_quo;
    status_quo.emissions_kg = {{Pollutant::CO, 862434217.6},
                               {Pollutant::HC, 108149728.5},
                               {Pollutant::NOx, 19821223.1}};
    AnnualMetrics delta = construction - status_quo;

    // exact up to one ulp of the 1e8-scale inputs
    expect(std::abs(delta.emissions_kg.at(Pollutant::CO) - 36517889.7) < 1e-6,
           "delta CO != 36517889.7");
    expect(std::abs(delta.emissions_kg.at(Pollutant::HC) - 5809044.1) < 1e-6,
           "delta HC != 5809044.1");
    expect(std::abs(delta.emissions_kg.at(Pollutant::NOx) - 848317.6) < 1e-6,
           "delta NOx != 848317.6");

    auto pct = [&](Pollutant p) {
        return 100.0 * delta.emissions_kg.at(p) / status_quo.emissions_kg.at(p);
    };
    expect(std::abs(pct(Pollutant::CO) - 4.23) < 0.01, "CO increase not 4.23% +- 0.01");
    expect(std::abs(pct(Pollutant::HC) - 5.37) < 0.01, "HC increase not 5.37% +- 0.01");
    expect(std::abs(pct(Pollutant::NOx) - 4.28) < 0.01, "NOx increase not 4.28% +- 0.01");
}

void criterion_braess_equilibrium() {
    auto start = std::chrono::steady_clock::now();
    Matrix od = oracles::braess_demand(4000.0);
    AssignmentOptions opts;
    opts.relative_gap_target = 1e-4;
    opts.max_iterations = 200;

    Network without = oracles::braess_network(false);
    Network with = oracles::braess_network(true);
    FlowState fw_without = frank_wolfe(without, od, opts);
    FlowState fw_with = frank_wolfe(with, od, opts);
    expect(fw_without.converged && fw_without.iterations <= 200,
           "braess (no center link) did not converge in 200 iterations");
    expect(fw_with.converged && fw_with.iterations <= 200,
           "braess (center link) did not converge in 200 iterations");
    expect(fw_without.gap_history.back() <= 1e-4, "braess gap above 1e-4");
    expect(fw_with.gap_history.back() <= 1e-4, "braess gap above 1e-4");

    oracles::EquilibriumOracle oracle_without = oracles::path_equilibrium(without, od);
    oracles::EquilibriumOracle oracle_with = oracles::path_equilibrium(with, od);
    for (std::size_t l = 0; l < without.link_count(); ++l)
        expect(std::abs(fw_without.flow[l] - oracle_without.link_flows[l]) < 1e-3,
               "braess link flow off the oracle by > 1e-3");
    for (std::size_t l = 0; l < with.link_count(); ++l)
        expect(std::abs(fw_with.flow[l] - oracle_with.link_flows[l]) < 1e-3,
               "braess (center) link flow off the oracle by > 1e-3");

    double time_without = skims(without, fw_without.flow).time.at(0, 1);
    double time_with = skims(with, fw_with.flow).time.at(0, 1);
    expect(time_with > time_without, "adding the center link did not raise the OD time");
    expect(seconds_since(start) < 1.0, "braess criterion exceeded 1 s");
}

void criterion_solver_scaling() {
    auto start = std::chrono::steady_clock::now();

    // 6x4 grid: 24 nodes (all centroids), 38 undirected edges = 76 links,
    // demand on all ordered pairs except o==d and the 24 pairs d = o+12 (mod
    // 24): 552 - 24 = 528 OD pairs.
    constexpr int kRows = 4, kCols = 6;
    auto node_id = [](int r, int c) { return r * kCols + c + 1; };
    std::vector<Node> nodes;
    for (int i = 1; i <= kRows * kCols; ++i) nodes.push_back({i, true});
    std::vector<Link> links;
    auto add_pair = [&links](int a, int b, double fft, double cap) {
        links.push_back({a, b, 1.5, fft, cap, 0.15, 4.0, 1.0});
        links.push_back({b, a, 1.5, fft, cap, 0.15, 4.0, 1.0});
    };
    for (int r = 0; r < kRows; ++r)
        for (int c = 0; c + 1 < kCols; ++c)
            add_pair(node_id(r, c), node_id(r, c + 1), 2.0 + ((r + c) % 3), 1000.0);
    for (int c = 0; c < kCols; ++c)
        for (int r = 0; r + 1 < kRows; ++r)
            add_pair(node_id(r, c), node_id(r + 1, c), 2.5 + ((r * c) % 2), 900.0);
    std::vector<int> zones;
    for (int i = 1; i <= kRows * kCols; ++i) zones.push_back(i);
    Network net(std::move(nodes), std::move(links), std::move(zones));
    expect(net.link_count() == 76, "scaling fixture is not 76 links");

    Matrix od = Matrix::square(24, 0.0);
    int pairs = 0;
    for (int o = 0; o < 24; ++o)
        for (int d = 0; d < 24; ++d) {
            if (o == d || d == (o + 12) % 24) continue;
            od.at(o, d) = 10.0 + ((o * 7 + d * 3) % 41);
            ++pairs;
        }
    expect(pairs == 528, "scaling fixture is not 528 OD pairs");

    AssignmentOptions opts;
    opts.relative_gap_target = 1e-4;
    opts.max_iterations = 4000;
    FlowState state = frank_wolfe(net, od, opts);
    expect(state.converged, "24-node assignment did not reach gap 1e-4");
    expect(state.gap_history.back() <= 1e-4, "24-node final gap above 1e-4");
    for (std::size_t k = 1; k < state.objective_history.size(); ++k)
        expect(state.objective_history[k] <= state.objective_history[k - 1] * (1.0 + 1e-12) + 1e-12,
               "beckmann objective not monotone");
    double elapsed = seconds_since(start);
    expect(elapsed < 10.0, "24-node criterion exceeded 10 s");
    std::printf("          (24-node net: %d iterations, gap %.2e, %.2f s)\n", state.iterations,
                state.gap_history.back(), elapsed);
}

void criterion_choice_suite() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> utility(-50.0, 50.0), theta_dist(0.05, 1.0);
    double worst_sum = 0.0, worst_shift = 0.0, worst_collapse = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        double theta = theta_dist(rng);
        ChoiceModel model = default_choice_model(Purpose::work, theta);
        std::map<ModeId, double> utilities = {{ModeId::car, utility(rng)},
                                              {ModeId::motorcycle, utility(rng)},
                                              {ModeId::bus, utility(rng)},
                                              {ModeId::taxi, utility(rng)}};
        auto shares = mode_shares(model, utilities);
        double total = 0.0;
        for (const auto& [mode, share] : shares) total += share;
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));

        std::map<ModeId, double> shifted;
        for (const auto& [mode, u] : utilities) shifted[mode] = u + 17.5;
        auto shifted_shares = mode_shares(model, shifted);
        for (const auto& [mode, share] : shares)
            worst_shift = std::max(worst_shift, std::abs(shifted_shares.at(mode) - share));

        // theta = 1 nesting collapse vs a direct flat multinomial
        ChoiceModel collapsed = default_choice_model(Purpose::work, 1.0);
        auto nested = mode_shares(collapsed, utilities);
        double shift = utilities.at(ModeId::car);
        for (const auto& [mode, u] : utilities) shift = std::max(shift, u);
        double denom = 0.0;
        for (const auto& [mode, u] : utilities) denom += std::exp(u - shift);
        for (const auto& [mode, u] : utilities)
            worst_collapse =
                std::max(worst_collapse, std::abs(nested.at(mode) - std::exp(u - shift) / denom));
    }
    expect(worst_sum < 1e-12, "share sums drift beyond 1e-12");
    expect(worst_shift < 1e-10, "translation invariance violated beyond 1e-10");
    expect(worst_collapse < 1e-12, "theta=1 collapse violated beyond 1e-12");
    std::printf("          (10000 vectors: sum %.1e, shift %.1e, collapse %.1e)\n", worst_sum,
                worst_shift, worst_collapse);
}

void criterion_distribution_suite() {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(2, 20);
    std::uniform_real_distribution<double> mass(1.0, 1000.0), cost(0.2, 60.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = size(rng);
        TripEnds ends;
        ends.purpose = Purpose::work;
        ends.productions.resize(n);
        ends.attractions.resize(n);
        double total_p = 0.0, total_a = 0.0;
        for (std::size_t i = 0; i < n; ++i) total_p += ends.productions[i] = mass(rng);
        for (std::size_t j = 0; j < n; ++j) total_a += ends.attractions[j] = mass(rng);
        for (std::size_t j = 0; j < n; ++j) ends.attractions[j] *= total_p / total_a;
        Matrix impedance(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) impedance.at(i, j) = cost(rng);

        GravityOptions opts;
        opts.tolerance = 1e-13;
        opts.max_iterations = 100000;
        Matrix od = gravity_distribute(ends, impedance, opts);
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(od.row_sum(i) - ends.productions[i]));
        for (std::size_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(od.col_sum(j) - ends.attractions[j]));
    }
    expect(worst < 1e-8, "IPF margins off by more than 1e-8");
    std::printf("          (1000 instances: worst margin error %.1e)\n", worst);
}

void criterion_npv_suite() {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> cash(1.0, 100.0), rate(0.0, 0.4);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 1 + rng() % 12;
        std::vector<double> a(n), b(n), sum(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = cash(rng);
            b[i] = cash(rng);
            sum[i] = a[i] + b[i];
        }
        double r = rate(rng);
        expect(std::abs(npv(0.0, sum, r) - (npv(0.0, a, r) + npv(0.0, b, r))) <
                   1e-12 * std::abs(npv(0.0, sum, r)) + 1e-12,
               "npv linearity violated");
        expect(npv(0.0, a, r + 0.05) < npv(0.0, a, r), "npv not decreasing in r");

        double plain = -25.0;
        for (double c : a) plain += c;
        expect(npv(25.0, a, 0.0) == plain, "npv at r=0 not the exact plain sum");
    }

    // payback structure of the study: one plan crosses B/C = 1 between years
    // 2 and 3, the other between years 3 and 4; the faster one ranks first.
    auto one_component = [](const char* name, double c0, double yearly, int n) {
        AppraisalLedger ledger;
        ledger.name = name;
        ledger.c0_direct = c0;
        ledger.years.assign(n, LedgerYear{-yearly, 0.0, 0.0, 0.0, 0.0});
        return ledger;
    };
    AppraisalLedger fast = one_component("fast", 100.0, 45.0, 6);
    AppraisalLedger slow = one_component("slow", 100.0, 30.0, 6);
    auto payback_fast = payback_year(fast, 0.0);
    auto payback_slow = payback_year(slow, 0.0);
    expect(payback_fast && *payback_fast == 3, "fast plan does not pay back between years 2-3");
    expect(payback_slow && *payback_slow == 4, "slow plan does not pay back between years 3-4");

    std::vector<AppraisalLedger> ledgers = {slow, fast};
    Comparison cmp = compare_scenarios(ledgers, 0.0);
    expect(cmp.ranking[0].name == "fast" && cmp.ranking[1].name == "slow",
           "compare_scenarios does not preserve the payback ordering");
    expect(cmp.ranking[0].bc > 1.0 && cmp.ranking[1].bc > 1.0, "b/c ratios not above 1");
}

void criterion_sensitivity() {
    UnitValues unit;
    unit.discount_rate = 0.0;
    AppraisalLedger ledger;
    ledger.name = "sensitivity";
    ledger.years = {LedgerYear{-38.0, -55.0, -3.0, -4.0, 0.0}};
    auto shares = sensitivity(ledger, unit, 0.1);
    expect(std::abs(shares.at("fuel") - 0.55) < 1e-12, "fuel share != 0.55");
    expect(std::abs(shares.at("time") - 0.38) < 1e-12, "time share != 0.38");
    expect(std::abs(shares.at("accident") - 0.04) < 1e-12, "accident share != 0.04");
    expect(std::abs(shares.at("emission") - 0.03) < 1e-12, "emission share != 0.03");
    expect(shares.at("fuel") > shares.at("time") && shares.at("time") > shares.at("accident") &&
               shares.at("accident") > shares.at("emission"),
           "sensitivity ordering is not fuel > time > accidents > environment");
}

void criterion_end_to_end_determinism() {
    RunConfig config = load_config(std::string(FIXTURE_DIR) + "/ninezone.ini");
    Inputs inputs = load_inputs(config);

    HorizonResult first = run_horizon(config, inputs);
    HorizonResult second = run_horizon(config, inputs);

    fs::path out_a = fs::temp_directory_path() / "uta_acceptance_a";
    fs::path out_b = fs::temp_directory_path() / "uta_acceptance_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    std::vector<std::string> manifest_a = emit_reports(first, config, out_a.string());
    std::vector<std::string> manifest_b = emit_reports(second, config, out_b.string());
    expect(manifest_a == manifest_b, "manifests differ between runs");
    bool identical = !manifest_a.empty();
    for (const std::string& name : manifest_a)
        if (slurp(out_a / name) != slurp(out_b / name)) identical = false;
    expect(identical, "output files are not byte-identical across runs");

    // null scenario: no edits, so NPV is exactly -C0
    const ScenarioOutcome* null_scenario = nullptr;
    for (const ScenarioOutcome& outcome : first.scenarios)
        if (outcome.name == "no_build") null_scenario = &outcome;
    expect(null_scenario != nullptr, "fixture lacks the null scenario");
    if (null_scenario) {
        double c0 = null_scenario->ledger.initial_cost();
        expect(c0 == 2e6, "null scenario C0 is not the configured direct cost");
        expect(npv(null_scenario->ledger, config.unit_values.discount_rate) == -c0,
               "null scenario NPV != -C0 exactly");
        for (const LedgerYear& y : null_scenario->ledger.years)
            expect(y.total_cost() == 0.0, "null scenario has nonzero benefit components");
    }
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"1 ledger totals 2422/1376", criterion_ledger_totals},
        {"2 monetization anchors", criterion_monetization_anchors},
        {"3 emission deltas", criterion_emission_deltas},
        {"4 braess equilibrium + paradox", criterion_braess_equilibrium},
        {"5 solver scaling 24 nodes", criterion_solver_scaling},
        {"6 choice-model suite", criterion_choice_suite},
        {"7 distribution suite", criterion_distribution_suite},
        {"8 npv suite", criterion_npv_suite},
        {"9 sensitivity shares", criterion_sensitivity},
        {"10 end-to-end determinism", criterion_end_to_end_determinism},
    };

    int failed_criteria = 0;
    for (const Criterion& criterion : criteria) {
        int before = failures;
        notes.clear();
        try {
            criterion.body();
        } catch (const std::exception& e) {
            ++failures;
            notes.push_back(std::string("exception: ") + e.what());
        }
        bool ok = failures == before;
        std::printf("[%s] criterion %s\n", ok ? "PASS" : "FAIL", criterion.label);
        if (!ok) {
            ++failed_criteria;
            for (const std::string& note : notes) std::printf("         - %s\n", note.c_str());
        }
    }
    std::printf("%d/%zu acceptance criteria passed\n",
                static_cast<int>(criteria.size()) - failed_criteria, criteria.size());
    return failed_criteria == 0 ? 0 : 1;
}
