#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uta {

enum class Pollutant { CO, HC, NOx, SO2 };

constexpr std::array<Pollutant, 4> kAllPollutants = {Pollutant::CO, Pollutant::HC, Pollutant::NOx,
                                                     Pollutant::SO2};

const char* to_string(Pollutant p);
Pollutant pollutant_from_string(const std::string& name);

/// Monetization constants. Pollutant prices default to the scaled reading of
/// the source table (SO2 1825, NMVOC/HC 500 $/tonne); the raw reading is
/// config-selectable because it cannot reproduce multi-million emission costs.
struct UnitValues {
    double value_of_time = 2.004;  // currency per hour
    double fuel_price = 0.7;       // currency per liter
    std::map<Pollutant, double> pollutant_price = {
        {Pollutant::CO, 188.0}, {Pollutant::HC, 500.0}, {Pollutant::NOx, 600.0},
        {Pollutant::SO2, 1825.0}};  // currency per tonne
    double annual_accident_cost_base = 110e6;  // currency per year
    double severity_fatal = 0.04;
    double severity_injury = 0.24;
    double severity_pdo = 0.72;
    double discount_rate = 0.06;  // per year
    int horizon_years = 15;
};

/// Speed-fuel curve in liters per vehicle-km: k1 + k2/v + k3 v^2.
struct FuelModel {
    double k1 = 0.05;   // L per veh-km
    double k2 = 1.2;    // L (km/h) per veh-km
    double k3 = 1e-5;   // L per veh-km (km/h)^-2

    double liters_per_veh_km(double speed_kmh) const;
};

struct EmissionBin {
    double speed_lo = 0.0;  // inclusive
    double speed_hi = 0.0;  // exclusive except the last bin
    double grams_per_veh_km = 0.0;
};

/// Speed-binned emission factors per pollutant in g/veh-km. The default
/// table is illustrative and meant to be overridden from configuration.
struct EmissionFactors {
    std::map<Pollutant, std::vector<EmissionBin>> table;

    double factor(Pollutant p, double speed_kmh) const;
    static EmissionFactors defaults();
};

/// Physical network performance of one evaluated year.
struct AnnualMetrics {
    double vehicle_hours = 0.0;
    double vehicle_km = 0.0;
    double fuel_liters = 0.0;
    std::map<Pollutant, double> emissions_kg;

    AnnualMetrics& operator+=(const AnnualMetrics& other);
    friend AnnualMetrics operator-(AnnualMetrics a, const AnnualMetrics& b);
};

/// Per-link loading used by the fuel and emission estimators.
struct LinkLoad {
    double flow_veh_per_hour = 0.0;
    double speed_kmh = 0.0;
    double length_km = 0.0;
    double hours = 0.0;
};

double fuel_liters(std::span<const LinkLoad> loads, const FuelModel& model);

std::map<Pollutant, double> emissions_kg(std::span<const LinkLoad> loads,
                                         const EmissionFactors& factors);

struct AccidentCost {
    double total = 0.0;
    double fatal = 0.0;
    double injury = 0.0;
    double pdo = 0.0;
};

/// Annual accident cost change from a VKT ratio change under the linear
/// distance-collision relationship, split by severity shares.
AccidentCost accident_cost(double vkt_ratio_change, const UnitValues& unit,
                           double hotspot_multiplier = 1.0);

/// One year of monetized components. Costs are stored positive and benefits
/// negative; reports flip to the benefit-positive presentation.
struct LedgerYear {
    double time_cost = 0.0;
    double fuel_cost = 0.0;
    double emission_cost = 0.0;
    double accident_cost = 0.0;
    double maintenance_cost = 0.0;

    double total_cost() const {
        return time_cost + fuel_cost + emission_cost + accident_cost + maintenance_cost;
    }
    friend bool operator==(const LedgerYear&, const LedgerYear&) = default;
};

/// Monetizes a metrics delta (scenario minus baseline): time, fuel and
/// emission components; positive deltas are costs.
LedgerYear monetize(const AnnualMetrics& delta, const UnitValues& unit);

/// Per-year cost/benefit ledger of one scenario against the status quo.
/// c0_direct is construction + acquisition; the construction year (year 0)
/// disbenefits are folded into the initial cost block.
struct AppraisalLedger {
    std::string name;
    double c0_direct = 0.0;
    double annual_maintenance = 0.0;
    LedgerYear construction;          // year-0 disbenefit block
    std::vector<LedgerYear> years;    // operation years 1..T

    double initial_cost() const { return c0_direct + construction.total_cost(); }
    /// Benefit-positive net cash flow of each operation year.
    std::vector<double> cash_flows() const;
};

/// -C0 + sum of cash_flows[i] / (1+r)^(i+1).
double npv(double c0, std::span<const double> cash_flows, double discount_rate);

/// First year whose cumulative discounted cash flow covers C0, or nullopt.
std::optional<int> payback_year(double c0, std::span<const double> cash_flows,
                                double discount_rate);

double npv(const AppraisalLedger& ledger, double discount_rate);
std::optional<int> payback_year(const AppraisalLedger& ledger, double discount_rate);

/// Discounted benefits over discounted costs (initial block included).
double bc_ratio(const AppraisalLedger& ledger, double discount_rate);

/// Builds a ledger from direct costs, the monetized construction-phase delta
/// and exactly unit.horizon_years of operation-year components.
AppraisalLedger assemble_ledger(const std::string& name, double construction_cost,
                                double acquisition_cost, double annual_maintenance,
                                const LedgerYear& construction_delta,
                                std::span<const LedgerYear> operation_years,
                                const UnitValues& unit);

/// One-at-a-time price perturbation: NPV contribution share of each unit
/// price (keys "time", "fuel", "emission", "accident"); shares sum to 1.
std::map<std::string, double> sensitivity(const AppraisalLedger& ledger, const UnitValues& unit,
                                          double perturbation = 0.1);

struct ScenarioScore {
    std::string name;
    double npv = 0.0;
    std::optional<int> payback;
    double bc = 0.0;
};

struct Comparison {
    std::vector<ScenarioScore> ranking;           // NPV descending
    std::vector<std::vector<double>> npv_ratio;   // ranking[i].npv / ranking[j].npv
};

/// Ranks scenarios by NPV (ties: earlier payback, then name) and reports the
/// pairwise NPV ratios. Ledgers must share one horizon.
Comparison compare_scenarios(std::span<const AppraisalLedger> ledgers, double discount_rate);

}  // namespace uta
