#pragma once

#include <span>
#include <vector>

#include "uta/matrix.hpp"
#include "uta/network.hpp"

namespace uta {

enum class LineSearch { exact_bisection, msa };

struct AssignmentOptions {
    int max_iterations = 500;
    double relative_gap_target = 1e-4;
    LineSearch line_search = LineSearch::exact_bisection;
    int bisection_steps = 40;
};

/// Result of one user-equilibrium assignment. Flows are PCE/hour, times the
/// congested BPR minutes at those flows.
struct FlowState {
    std::vector<double> flow;
    std::vector<double> time;
    double beckmann_value = 0.0;
    std::vector<double> gap_history;
    std::vector<double> objective_history;
    int iterations = 0;
    bool converged = false;
};

/// Loads every OD cell onto its single shortest path at the given costs.
/// Demand between an unreachable pair is rejected naming the pair.
std::vector<double> all_or_nothing(const Network& net, const Matrix& od,
                                   std::span<const double> link_costs);

/// Beckmann user-equilibrium objective: the closed-form BPR integral summed
/// over links, fft * (x + alpha * x^(beta+1) / ((beta+1) * capacity^beta)).
double beckmann(const Network& net, std::span<const double> flows);

/// (total cost - all-or-nothing cost at current times) / total cost.
double relative_gap(const Network& net, std::span<const double> flows, const Matrix& od);

/// Frank-Wolfe user equilibrium: all-or-nothing directions with an exact
/// bisection line search on the Beckmann derivative (or MSA steps). Stops at
/// the gap target or max_iterations; non-convergence is flagged, not thrown.
FlowState frank_wolfe(const Network& net, const Matrix& od, const AssignmentOptions& opts = {});

struct SkimResult {
    Matrix time;      // minutes at congested link times
    Matrix distance;  // km along the same shortest paths
};

/// Zone-to-zone shortest-path times at congested link times, with the
/// distance along the chosen path. Unreachable pairs carry kUnreachable.
SkimResult skims(const Network& net, std::span<const double> flows);

/// Congested BPR times for each link at the given flows.
std::vector<double> link_times(const Network& net, std::span<const double> flows);

}  // namespace uta
