#include "uta/assign.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uta {

namespace {

void require_od_shape(const Network& net, const Matrix& od) {
    if (od.rows() != net.zone_count() || od.cols() != net.zone_count())
        throw std::invalid_argument("OD matrix shape does not match the zone count");
}

}  // namespace

std::vector<double> link_times(const Network& net, std::span<const double> flows) {
    std::vector<double> times(net.link_count());
    for (std::size_t l = 0; l < net.link_count(); ++l) times[l] = bpr_time(net.links()[l], flows[l]);
    return times;
}

std::vector<double> all_or_nothing(const Network& net, const Matrix& od,
                                   std::span<const double> link_costs) {
    require_od_shape(net, od);
    std::vector<double> flows(net.link_count(), 0.0);
    for (std::size_t o = 0; o < net.zone_count(); ++o) {
        bool any = false;
        for (std::size_t d = 0; d < net.zone_count(); ++d)
            if (od.at(o, d) != 0.0 && o != d) any = true;
        if (!any) continue;

        PathTree tree = shortest_path_tree(net, net.zone_ids()[o], link_costs);
        for (std::size_t d = 0; d < net.zone_count(); ++d) {
            double demand = od.at(o, d);
            if (demand == 0.0 || o == d) continue;
            if (demand < 0.0) throw std::invalid_argument("all_or_nothing: negative demand");
            int node = net.node_index(net.zone_ids()[d]);
            if (!tree.reachable(node))
                throw std::invalid_argument("all_or_nothing: no path for OD pair " +
                                            std::to_string(net.zone_ids()[o]) + "->" +
                                            std::to_string(net.zone_ids()[d]));
            while (node != tree.origin_node) {
                int l = tree.pred_link[node];
                flows[l] += demand;
                node = net.node_index(net.links()[l].from);
            }
        }
    }
    return flows;
}

double beckmann(const Network& net, std::span<const double> flows) {
    double value = 0.0;
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const Link& link = net.links()[l];
        double x = flows[l];
        if (x < 0.0) throw std::invalid_argument("beckmann: negative flow");
        value += link.free_flow_time *
                 (x + link.vdf_alpha * std::pow(x, link.vdf_beta + 1.0) /
                          ((link.vdf_beta + 1.0) * std::pow(link.capacity, link.vdf_beta)));
    }
    return value;
}

namespace {

/// Total shortest-path cost of routing the OD table at the given link costs,
/// without loading it.
double shortest_path_total_cost(const Network& net, const Matrix& od,
                                std::span<const double> costs) {
    double total = 0.0;
    for (std::size_t o = 0; o < net.zone_count(); ++o) {
        bool any = false;
        for (std::size_t d = 0; d < net.zone_count(); ++d)
            if (od.at(o, d) > 0.0 && o != d) any = true;
        if (!any) continue;
        PathTree tree = shortest_path_tree(net, net.zone_ids()[o], costs);
        for (std::size_t d = 0; d < net.zone_count(); ++d) {
            double demand = od.at(o, d);
            if (demand <= 0.0 || o == d) continue;
            int node = net.node_index(net.zone_ids()[d]);
            if (!tree.reachable(node))
                throw std::invalid_argument("no path for OD pair " +
                                            std::to_string(net.zone_ids()[o]) + "->" +
                                            std::to_string(net.zone_ids()[d]));
            total += demand * tree.cost[node];
        }
    }
    return total;
}

}  // namespace

double relative_gap(const Network& net, std::span<const double> flows, const Matrix& od) {
    require_od_shape(net, od);
    std::vector<double> times = link_times(net, flows);
    double current = 0.0;
    for (std::size_t l = 0; l < net.link_count(); ++l) current += flows[l] * times[l];
    if (current <= 0.0) throw std::invalid_argument("relative_gap: zero total cost");
    double best = shortest_path_total_cost(net, od, times);
    return (current - best) / current;
}

FlowState frank_wolfe(const Network& net, const Matrix& od, const AssignmentOptions& opts) {
    require_od_shape(net, od);
    if (opts.max_iterations < 1) throw std::invalid_argument("frank_wolfe: max_iterations < 1");
    if (!(opts.relative_gap_target > 0.0))
        throw std::invalid_argument("frank_wolfe: gap target must be positive");

    FlowState state;
    if (od.total() == 0.0) {
        state.flow.assign(net.link_count(), 0.0);
        state.time = link_times(net, state.flow);
        state.beckmann_value = 0.0;
        state.gap_history = {0.0};
        state.objective_history = {0.0};
        state.iterations = 1;
        state.converged = true;
        return state;
    }

    std::vector<double> flows = all_or_nothing(net, od, link_times(net, std::vector<double>(net.link_count(), 0.0)));
    state.objective_history.push_back(beckmann(net, flows));

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        state.iterations = iter;
        std::vector<double> times = link_times(net, flows);
        double current_cost = 0.0;
        for (std::size_t l = 0; l < net.link_count(); ++l) current_cost += flows[l] * times[l];

        std::vector<double> target = all_or_nothing(net, od, times);
        double best_cost = 0.0;
        for (std::size_t l = 0; l < net.link_count(); ++l) best_cost += target[l] * times[l];
        double gap = (current_cost - best_cost) / current_cost;
        state.gap_history.push_back(gap);
        if (gap <= opts.relative_gap_target) {
            state.converged = true;
            break;
        }

        double step;
        if (opts.line_search == LineSearch::msa) {
            step = 1.0 / (iter + 1.0);
        } else {
            // Bisection on the Beckmann directional derivative
            // g(s) = sum (y - x) * t(x + s (y - x)); g(0) <= 0 by construction.
            auto derivative = [&](double s) {
                double g = 0.0;
                for (std::size_t l = 0; l < net.link_count(); ++l) {
                    double d = target[l] - flows[l];
                    if (d == 0.0) continue;
                    g += d * bpr_time(net.links()[l], flows[l] + s * d);
                }
                return g;
            };
            double lo = 0.0, hi = 1.0;
            if (derivative(1.0) <= 0.0) {
                step = 1.0;
            } else {
                for (int b = 0; b < opts.bisection_steps; ++b) {
                    double mid = 0.5 * (lo + hi);
                    if (derivative(mid) < 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                step = lo;
            }
        }

        for (std::size_t l = 0; l < net.link_count(); ++l)
            flows[l] += step * (target[l] - flows[l]);
        state.objective_history.push_back(beckmann(net, flows));
    }

    state.flow = std::move(flows);
    state.time = link_times(net, state.flow);
    state.beckmann_value = beckmann(net, state.flow);
    return state;
}

SkimResult skims(const Network& net, std::span<const double> flows) {
    std::vector<double> times = link_times(net, flows);
    std::size_t n = net.zone_count();
    SkimResult result{Matrix::square(n, kUnreachable), Matrix::square(n, kUnreachable)};
    for (std::size_t o = 0; o < n; ++o) {
        PathTree tree = shortest_path_tree(net, net.zone_ids()[o], times);
        for (std::size_t d = 0; d < n; ++d) {
            int node = net.node_index(net.zone_ids()[d]);
            if (!tree.reachable(node)) continue;
            result.time.at(o, d) = tree.cost[node];
            double dist = 0.0;
            int v = node;
            while (v != tree.origin_node) {
                int l = tree.pred_link[v];
                dist += net.links()[l].length;
                v = net.node_index(net.links()[l].from);
            }
            result.distance.at(o, d) = dist;
        }
    }
    return result;
}

}  // namespace uta
