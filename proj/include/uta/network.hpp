#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace uta {

struct Node {
    int id = 0;
    bool is_centroid = false;

    friend bool operator==(const Node&, const Node&) = default;
};

/// Directed road link with BPR volume-delay parameters.
/// Times are minutes, lengths km, capacities PCE/hour.
struct Link {
    int from = 0;
    int to = 0;
    double length = 0.0;
    double free_flow_time = 1.0;
    double capacity = 1.0;
    double vdf_alpha = 0.15;
    double vdf_beta = 4.0;
    double accident_rate_multiplier = 1.0;

    friend bool operator==(const Link&, const Link&) = default;
};

/// Immutable directed network over which scenarios are applied and flows
/// assigned. Adjacency indexes are built once at construction; shortest-path
/// queries for distinct origins are safe to run concurrently.
class Network {
public:
    Network() = default;
    Network(std::vector<Node> nodes, std::vector<Link> links, std::vector<int> zone_ids);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const std::vector<int>& zone_ids() const { return zone_ids_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }
    std::size_t zone_count() const { return zone_ids_.size(); }

    /// Node index for an id, or -1 when absent.
    int node_index(int node_id) const;
    /// Link index for an endpoint pair, or -1 when absent.
    int link_index(int from, int to) const;
    /// Position of a zone id in zone_ids(), or -1 when absent.
    int zone_index(int zone_id) const;

    /// Outgoing link indexes of a node (by node index), ascending.
    std::span<const int> out_links(int node_index) const;

    friend bool operator==(const Network& a, const Network& b) {
        return a.nodes_ == b.nodes_ && a.links_ == b.links_ && a.zone_ids_ == b.zone_ids_;
    }

private:
    void build_index();

    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::vector<int> zone_ids_;
    std::unordered_map<int, int> node_index_;
    std::unordered_map<int, int> zone_index_;
    std::map<std::pair<int, int>, int> link_index_;
    std::vector<std::vector<int>> out_links_;
};

/// A violated network invariant. Defects are data, not failures.
struct Defect {
    std::string invariant;
    std::string detail;
};

std::vector<Defect> validate_network(const Network& net);

/// BPR volume-delay time in minutes: fft * (1 + alpha * (flow/capacity)^beta).
double bpr_time(const Link& link, double flow);

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Shortest-path tree from one origin. Costs and predecessor links are
/// indexed by node index; unreachable nodes carry kUnreachable and pred -1.
struct PathTree {
    int origin_node = -1;
    std::vector<double> cost;
    std::vector<int> pred_link;

    bool reachable(int node_index) const { return cost[node_index] < kUnreachable; }
};

/// Dijkstra tree from a centroid. Equal-cost ties resolve to the lowest
/// predecessor link index, so repeated runs pick identical paths.
PathTree shortest_path_tree(const Network& net, int origin_zone_id,
                            std::span<const double> link_costs);

// --- scenario deltas ------------------------------------------------------

enum class LinkField {
    capacity,
    length,
    free_flow_time,
    vdf_alpha,
    vdf_beta,
    accident_rate_multiplier,
};

const char* to_string(LinkField field);
LinkField link_field_from_string(const std::string& name);

/// insert_at = -1 appends; inverse edits restore removed links in place.
struct AddLink {
    Link link;
    int insert_at = -1;
};
struct RemoveLink {
    int from = 0;
    int to = 0;
};
struct SetField {
    int from = 0;
    int to = 0;
    LinkField field = LinkField::capacity;
    double value = 0.0;
};
using Edit = std::variant<AddLink, RemoveLink, SetField>;

/// Direct scenario costs in currency units (Table-11 style ledger inputs).
struct DirectCosts {
    double construction = 0.0;
    double acquisition = 0.0;
    double annual_maintenance = 0.0;
};

enum class Phase { construction, operation };

/// A reversible interchange design: two edit lists plus its direct costs.
struct ScenarioDelta {
    std::string name;
    std::vector<Edit> construction_edits;
    std::vector<Edit> operation_edits;
    DirectCosts direct_costs;

    const std::vector<Edit>& edits(Phase phase) const {
        return phase == Phase::construction ? construction_edits : operation_edits;
    }
};

/// Applies edits to a copy; the input network is never mutated.
/// Throws std::invalid_argument naming the edit index when an edit targets a
/// missing link or would duplicate an endpoint pair.
Network apply_edits(const Network& net, std::span<const Edit> edits);

/// Edit list that exactly undoes `edits` when applied to apply_edits(net, edits).
std::vector<Edit> inverse_edits(const Network& net, std::span<const Edit> edits);

Network apply_scenario(const Network& net, const ScenarioDelta& delta, Phase phase);

}  // namespace uta
