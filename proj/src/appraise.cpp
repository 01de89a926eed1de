#include "uta/appraise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uta {

const char* to_string(Pollutant p) {
    switch (p) {
        case Pollutant::CO: return "CO";
        case Pollutant::HC: return "HC";
        case Pollutant::NOx: return "NOx";
        case Pollutant::SO2: return "SO2";
    }
    return "?";
}

Pollutant pollutant_from_string(const std::string& name) {
    for (Pollutant p : kAllPollutants)
        if (name == to_string(p)) return p;
    if (name == "NMVOC") return Pollutant::HC;  // priced as the same species class
    throw std::invalid_argument("unknown pollutant: " + name);
}

double FuelModel::liters_per_veh_km(double speed_kmh) const {
    if (!(speed_kmh > 0.0)) throw std::invalid_argument("fuel model: speed must be positive");
    return k1 + k2 / speed_kmh + k3 * speed_kmh * speed_kmh;
}

double EmissionFactors::factor(Pollutant p, double speed_kmh) const {
    auto it = table.find(p);
    if (it == table.end())
        throw std::invalid_argument(std::string("no emission factors for ") + to_string(p));
    const auto& bins = it->second;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        bool last = i + 1 == bins.size();
        if (speed_kmh >= bins[i].speed_lo &&
            (speed_kmh < bins[i].speed_hi || (last && speed_kmh <= bins[i].speed_hi)))
            return bins[i].grams_per_veh_km;
    }
    throw std::invalid_argument("speed " + std::to_string(speed_kmh) +
                                " km/h outside emission bin coverage for " + to_string(p));
}

EmissionFactors EmissionFactors::defaults() {
    // Illustrative urban factors; real tables come from configuration.
    EmissionFactors f;
    f.table[Pollutant::CO] = {{0, 20, 60.0}, {20, 40, 35.0}, {40, 60, 20.0},
                              {60, 80, 14.0}, {80, 100, 12.0}, {100, 120, 15.0}};
    f.table[Pollutant::HC] = {{0, 20, 8.0}, {20, 40, 4.5}, {40, 60, 2.5},
                              {60, 80, 1.8}, {80, 100, 1.5}, {100, 120, 1.8}};
    f.table[Pollutant::NOx] = {{0, 20, 1.5}, {20, 40, 1.2}, {40, 60, 1.0},
                               {60, 80, 1.1}, {80, 100, 1.4}, {100, 120, 1.9}};
    f.table[Pollutant::SO2] = {{0, 20, 0.10}, {20, 40, 0.07}, {40, 60, 0.05},
                               {60, 80, 0.05}, {80, 100, 0.06}, {100, 120, 0.08}};
    return f;
}

AnnualMetrics& AnnualMetrics::operator+=(const AnnualMetrics& other) {
    vehicle_hours += other.vehicle_hours;
    vehicle_km += other.vehicle_km;
    fuel_liters += other.fuel_liters;
    for (const auto& [p, kg] : other.emissions_kg) emissions_kg[p] += kg;
    return *this;
}

AnnualMetrics operator-(AnnualMetrics a, const AnnualMetrics& b) {
    a.vehicle_hours -= b.vehicle_hours;
    a.vehicle_km -= b.vehicle_km;
    a.fuel_liters -= b.fuel_liters;
    for (const auto& [p, kg] : b.emissions_kg) a.emissions_kg[p] -= kg;
    return a;
}

double fuel_liters(std::span<const LinkLoad> loads, const FuelModel& model) {
    double liters = 0.0;
    for (const LinkLoad& load : loads) {
        if (load.length_km == 0.0 || load.flow_veh_per_hour == 0.0) continue;
        liters += load.flow_veh_per_hour * load.hours * load.length_km *
                  model.liters_per_veh_km(load.speed_kmh);
    }
    return liters;
}

std::map<Pollutant, double> emissions_kg(std::span<const LinkLoad> loads,
                                         const EmissionFactors& factors) {
    std::map<Pollutant, double> result;
    for (const auto& [p, bins] : factors.table) result[p] = 0.0;
    for (const LinkLoad& load : loads) {
        if (load.length_km == 0.0 || load.flow_veh_per_hour == 0.0) continue;
        double veh_km = load.flow_veh_per_hour * load.hours * load.length_km;
        for (auto& [p, kg] : result) kg += veh_km * factors.factor(p, load.speed_kmh) / 1000.0;
    }
    return result;
}

AccidentCost accident_cost(double vkt_ratio_change, const UnitValues& unit,
                           double hotspot_multiplier) {
    if (vkt_ratio_change <= -1.0)
        throw std::invalid_argument("accident_cost: VKT cannot fall below zero");
    AccidentCost cost;
    cost.total = unit.annual_accident_cost_base * vkt_ratio_change * hotspot_multiplier;
    cost.fatal = cost.total * unit.severity_fatal;
    cost.injury = cost.total * unit.severity_injury;
    cost.pdo = cost.total * unit.severity_pdo;
    return cost;
}

LedgerYear monetize(const AnnualMetrics& delta, const UnitValues& unit) {
    LedgerYear year;
    year.time_cost = delta.vehicle_hours * unit.value_of_time;
    year.fuel_cost = delta.fuel_liters * unit.fuel_price;
    for (const auto& [p, kg] : delta.emissions_kg) {
        auto it = unit.pollutant_price.find(p);
        if (it == unit.pollutant_price.end())
            throw std::invalid_argument(std::string("monetize: no unit price for ") + to_string(p));
        year.emission_cost += kg * it->second / 1000.0;
    }
    return year;
}

std::vector<double> AppraisalLedger::cash_flows() const {
    std::vector<double> flows;
    flows.reserve(years.size());
    for (const LedgerYear& y : years) flows.push_back(-y.total_cost());
    return flows;
}

double npv(double c0, std::span<const double> cash_flows, double discount_rate) {
    if (discount_rate < 0.0) throw std::invalid_argument("npv: negative discount rate");
    double value = -c0;
    double denominator = 1.0;
    for (double cash : cash_flows) {
        denominator *= 1.0 + discount_rate;
        value += cash / denominator;
    }
    return value;
}

std::optional<int> payback_year(double c0, std::span<const double> cash_flows,
                                double discount_rate) {
    if (discount_rate < 0.0) throw std::invalid_argument("payback_year: negative discount rate");
    double cumulative = -c0;
    double denominator = 1.0;
    for (std::size_t i = 0; i < cash_flows.size(); ++i) {
        denominator *= 1.0 + discount_rate;
        cumulative += cash_flows[i] / denominator;
        if (cumulative >= 0.0) return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

double npv(const AppraisalLedger& ledger, double discount_rate) {
    return npv(ledger.initial_cost(), ledger.cash_flows(), discount_rate);
}

std::optional<int> payback_year(const AppraisalLedger& ledger, double discount_rate) {
    return payback_year(ledger.initial_cost(), ledger.cash_flows(), discount_rate);
}

double bc_ratio(const AppraisalLedger& ledger, double discount_rate) {
    auto split = [](double value, double& benefit, double& cost) {
        if (value < 0.0)
            benefit += -value;
        else
            cost += value;
    };
    double benefits = 0.0;
    double costs = ledger.c0_direct;
    split(ledger.construction.time_cost, benefits, costs);
    split(ledger.construction.fuel_cost, benefits, costs);
    split(ledger.construction.emission_cost, benefits, costs);
    split(ledger.construction.accident_cost, benefits, costs);
    split(ledger.construction.maintenance_cost, benefits, costs);
    double denominator = 1.0;
    for (const LedgerYear& y : ledger.years) {
        denominator *= 1.0 + discount_rate;
        double db = 0.0, dc = 0.0;
        split(y.time_cost, db, dc);
        split(y.fuel_cost, db, dc);
        split(y.emission_cost, db, dc);
        split(y.accident_cost, db, dc);
        split(y.maintenance_cost, db, dc);
        benefits += db / denominator;
        costs += dc / denominator;
    }
    return costs > 0.0 ? benefits / costs : 0.0;
}

AppraisalLedger assemble_ledger(const std::string& name, double construction_cost,
                                double acquisition_cost, double annual_maintenance,
                                const LedgerYear& construction_delta,
                                std::span<const LedgerYear> operation_years,
                                const UnitValues& unit) {
    if (operation_years.size() != static_cast<std::size_t>(unit.horizon_years))
        throw std::invalid_argument("assemble_ledger: expected " +
                                    std::to_string(unit.horizon_years) + " operation years, got " +
                                    std::to_string(operation_years.size()));
    AppraisalLedger ledger;
    ledger.name = name;
    ledger.c0_direct = construction_cost + acquisition_cost;
    ledger.annual_maintenance = annual_maintenance;
    ledger.construction = construction_delta;
    ledger.years.assign(operation_years.begin(), operation_years.end());
    for (LedgerYear& y : ledger.years) y.maintenance_cost += annual_maintenance;
    return ledger;
}

std::map<std::string, double> sensitivity(const AppraisalLedger& ledger, const UnitValues& unit,
                                          double perturbation) {
    if (!(perturbation > 0.0))
        throw std::invalid_argument("sensitivity: perturbation must be positive");

    // Each component is linear in its unit price, so scaling a price by
    // (1 +/- eps) shifts the NPV by eps times the component's present value.
    auto npv_shift = [&](double LedgerYear::* component) {
        double pv = ledger.construction.*component;
        double denominator = 1.0;
        for (const LedgerYear& y : ledger.years) {
            denominator *= 1.0 + unit.discount_rate;
            pv += y.*component / denominator;
        }
        return std::abs(pv);
    };
    std::map<std::string, double> delta;
    delta["time"] = perturbation * npv_shift(&LedgerYear::time_cost);
    delta["fuel"] = perturbation * npv_shift(&LedgerYear::fuel_cost);
    delta["emission"] = perturbation * npv_shift(&LedgerYear::emission_cost);
    delta["accident"] = perturbation * npv_shift(&LedgerYear::accident_cost);

    double total = 0.0;
    for (const auto& [key, v] : delta) total += v;
    if (total <= 0.0)
        throw std::invalid_argument("sensitivity: degenerate ledger, all price sensitivities zero");
    std::map<std::string, double> shares;
    for (const auto& [key, v] : delta) shares[key] = v / total;
    return shares;
}

Comparison compare_scenarios(std::span<const AppraisalLedger> ledgers, double discount_rate) {
    if (ledgers.size() < 2)
        throw std::invalid_argument("compare_scenarios: need at least two ledgers");
    std::size_t horizon = ledgers.front().years.size();
    for (const AppraisalLedger& l : ledgers)
        if (l.years.size() != horizon)
            throw std::invalid_argument("compare_scenarios: mismatched horizons");

    Comparison cmp;
    for (const AppraisalLedger& l : ledgers)
        cmp.ranking.push_back(
            {l.name, npv(l, discount_rate), payback_year(l, discount_rate), bc_ratio(l, discount_rate)});
    std::sort(cmp.ranking.begin(), cmp.ranking.end(), [](const ScenarioScore& a, const ScenarioScore& b) {
        if (a.npv != b.npv) return a.npv > b.npv;
        int pa = a.payback.value_or(std::numeric_limits<int>::max());
        int pb = b.payback.value_or(std::numeric_limits<int>::max());
        if (pa != pb) return pa < pb;
        return a.name < b.name;
    });

    cmp.npv_ratio.assign(cmp.ranking.size(), std::vector<double>(cmp.ranking.size(), 1.0));
    for (std::size_t i = 0; i < cmp.ranking.size(); ++i)
        for (std::size_t j = 0; j < cmp.ranking.size(); ++j)
            cmp.npv_ratio[i][j] = cmp.ranking[j].npv != 0.0
                                      ? cmp.ranking[i].npv / cmp.ranking[j].npv
                                      : std::numeric_limits<double>::quiet_NaN();
    return cmp;
}

}  // namespace uta
