#include "uta/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace uta {

Network::Network(std::vector<Node> nodes, std::vector<Link> links, std::vector<int> zone_ids)
    : nodes_(std::move(nodes)), links_(std::move(links)), zone_ids_(std::move(zone_ids)) {
    build_index();
}

void Network::build_index() {
    node_index_.clear();
    zone_index_.clear();
    link_index_.clear();
    out_links_.assign(nodes_.size(), {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) node_index_.emplace(nodes_[i].id, static_cast<int>(i));
    for (std::size_t i = 0; i < zone_ids_.size(); ++i) zone_index_.emplace(zone_ids_[i], static_cast<int>(i));
    for (std::size_t l = 0; l < links_.size(); ++l) {
        const Link& link = links_[l];
        link_index_.emplace(std::make_pair(link.from, link.to), static_cast<int>(l));
        auto it = node_index_.find(link.from);
        if (it != node_index_.end()) out_links_[it->second].push_back(static_cast<int>(l));
    }
    // out_links_ entries are ascending because links are scanned in order.
}

int Network::node_index(int node_id) const {
    auto it = node_index_.find(node_id);
    return it == node_index_.end() ? -1 : it->second;
}

int Network::link_index(int from, int to) const {
    auto it = link_index_.find({from, to});
    return it == link_index_.end() ? -1 : it->second;
}

int Network::zone_index(int zone_id) const {
    auto it = zone_index_.find(zone_id);
    return it == zone_index_.end() ? -1 : it->second;
}

std::span<const int> Network::out_links(int node_index) const {
    return out_links_[static_cast<std::size_t>(node_index)];
}

namespace {

std::string link_name(const Link& l) {
    std::ostringstream os;
    os << l.from << "->" << l.to;
    return os.str();
}

}  // namespace

std::vector<Defect> validate_network(const Network& net) {
    std::vector<Defect> defects;

    std::map<int, int> id_count;
    for (const Node& n : net.nodes()) ++id_count[n.id];
    for (const auto& [id, count] : id_count)
        if (count > 1)
            defects.push_back({"unique node ids", "node id " + std::to_string(id) + " appears " +
                                                      std::to_string(count) + " times"});

    std::size_t centroids = 0;
    for (const Node& n : net.nodes())
        if (n.is_centroid) ++centroids;
    if (centroids != net.zone_count())
        defects.push_back({"centroid count equals zone count",
                           std::to_string(centroids) + " centroids vs " +
                               std::to_string(net.zone_count()) + " zones"});
    for (int zid : net.zone_ids()) {
        int idx = net.node_index(zid);
        if (idx < 0)
            defects.push_back({"centroid count equals zone count",
                               "zone id " + std::to_string(zid) + " has no node"});
        else if (!net.nodes()[idx].is_centroid)
            defects.push_back({"centroid count equals zone count",
                               "zone node " + std::to_string(zid) + " is not a centroid"});
    }

    std::map<std::pair<int, int>, int> pair_count;
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const Link& link = net.links()[l];
        if (net.node_index(link.from) < 0 || net.node_index(link.to) < 0)
            defects.push_back({"dangling endpoint", "link " + link_name(link)});
        if (link.length < 0.0)
            defects.push_back({"length >= 0", "link " + link_name(link)});
        if (!(link.free_flow_time > 0.0))
            defects.push_back({"free_flow_time > 0", "link " + link_name(link)});
        if (!(link.capacity > 0.0))
            defects.push_back({"capacity > 0", "link " + link_name(link)});
        if (link.vdf_beta < 1.0)
            defects.push_back({"vdf_beta >= 1", "link " + link_name(link)});
        ++pair_count[{link.from, link.to}];
    }
    for (const auto& [pair, count] : pair_count)
        if (count > 1)
            defects.push_back({"unique endpoint pair",
                               "links " + std::to_string(pair.first) + "->" +
                                   std::to_string(pair.second) + " duplicated " +
                                   std::to_string(count) + " times"});

    // Zone-to-zone reachability over the directed graph. Skipped when the
    // graph is structurally broken, since indexes may be incomplete.
    if (defects.empty()) {
        std::vector<double> unit_costs(net.link_count(), 1.0);
        for (int origin : net.zone_ids()) {
            PathTree tree = shortest_path_tree(net, origin, unit_costs);
            for (int dest : net.zone_ids()) {
                int dest_node = net.node_index(dest);
                if (!tree.reachable(dest_node))
                    defects.push_back({"unreachable zone pair",
                                       std::to_string(origin) + " -> " + std::to_string(dest)});
            }
        }
    }
    return defects;
}

double bpr_time(const Link& link, double flow) {
    if (flow < 0.0) throw std::invalid_argument("bpr_time: negative flow");
    return link.free_flow_time *
           (1.0 + link.vdf_alpha * std::pow(flow / link.capacity, link.vdf_beta));
}

PathTree shortest_path_tree(const Network& net, int origin_zone_id,
                            std::span<const double> link_costs) {
    if (link_costs.size() != net.link_count())
        throw std::invalid_argument("shortest_path_tree: cost vector size mismatch");
    for (double c : link_costs)
        if (c < 0.0 || std::isnan(c))
            throw std::invalid_argument("shortest_path_tree: negative link cost");
    int origin = net.node_index(origin_zone_id);
    if (origin < 0 || !net.nodes()[origin].is_centroid)
        throw std::invalid_argument("shortest_path_tree: origin " +
                                    std::to_string(origin_zone_id) + " is not a centroid");

    PathTree tree;
    tree.origin_node = origin;
    tree.cost.assign(net.node_count(), kUnreachable);
    tree.pred_link.assign(net.node_count(), -1);
    tree.cost[origin] = 0.0;

    using Entry = std::pair<double, int>;  // (cost, node index): deterministic pop order
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::vector<bool> done(net.node_count(), false);
    queue.emplace(0.0, origin);
    while (!queue.empty()) {
        auto [cost, u] = queue.top();
        queue.pop();
        if (done[u]) continue;
        done[u] = true;
        for (int l : net.out_links(u)) {
            int v = net.node_index(net.links()[l].to);
            double candidate = cost + link_costs[l];
            if (candidate < tree.cost[v]) {
                tree.cost[v] = candidate;
                tree.pred_link[v] = l;
                queue.emplace(candidate, v);
            } else if (candidate == tree.cost[v] && !done[v] && l < tree.pred_link[v]) {
                tree.pred_link[v] = l;  // tie-break: lowest predecessor link index
            }
        }
    }
    return tree;
}

const char* to_string(LinkField field) {
    switch (field) {
        case LinkField::capacity: return "capacity";
        case LinkField::length: return "length";
        case LinkField::free_flow_time: return "free_flow_time";
        case LinkField::vdf_alpha: return "vdf_alpha";
        case LinkField::vdf_beta: return "vdf_beta";
        case LinkField::accident_rate_multiplier: return "accident_rate_multiplier";
    }
    return "?";
}

LinkField link_field_from_string(const std::string& name) {
    if (name == "capacity") return LinkField::capacity;
    if (name == "length") return LinkField::length;
    if (name == "free_flow_time") return LinkField::free_flow_time;
    if (name == "vdf_alpha") return LinkField::vdf_alpha;
    if (name == "vdf_beta") return LinkField::vdf_beta;
    if (name == "accident_rate_multiplier") return LinkField::accident_rate_multiplier;
    throw std::invalid_argument("unknown link field: " + name);
}

namespace {

double& field_ref(Link& link, LinkField field) {
    switch (field) {
        case LinkField::capacity: return link.capacity;
        case LinkField::length: return link.length;
        case LinkField::free_flow_time: return link.free_flow_time;
        case LinkField::vdf_alpha: return link.vdf_alpha;
        case LinkField::vdf_beta: return link.vdf_beta;
        case LinkField::accident_rate_multiplier: return link.accident_rate_multiplier;
    }
    throw std::invalid_argument("unknown link field");
}

[[noreturn]] void edit_error(std::size_t index, const std::string& what) {
    throw std::invalid_argument("edit " + std::to_string(index) + ": " + what);
}

}  // namespace

Network apply_edits(const Network& net, std::span<const Edit> edits) {
    std::vector<Node> nodes = net.nodes();
    std::vector<Link> links = net.links();
    std::vector<int> zones = net.zone_ids();

    auto find_link = [&links](int from, int to) -> int {
        for (std::size_t i = 0; i < links.size(); ++i)
            if (links[i].from == from && links[i].to == to) return static_cast<int>(i);
        return -1;
    };
    auto has_node = [&nodes](int id) {
        return std::any_of(nodes.begin(), nodes.end(), [id](const Node& n) { return n.id == id; });
    };

    for (std::size_t i = 0; i < edits.size(); ++i) {
        const Edit& edit = edits[i];
        if (const auto* add = std::get_if<AddLink>(&edit)) {
            if (!has_node(add->link.from) || !has_node(add->link.to))
                edit_error(i, "add-link endpoints must be existing nodes (" +
                                  link_name(add->link) + ")");
            if (find_link(add->link.from, add->link.to) >= 0)
                edit_error(i, "add-link duplicates existing link " + link_name(add->link));
            if (add->insert_at < 0 || add->insert_at > static_cast<int>(links.size()))
                links.push_back(add->link);
            else
                links.insert(links.begin() + add->insert_at, add->link);
        } else if (const auto* rem = std::get_if<RemoveLink>(&edit)) {
            int idx = find_link(rem->from, rem->to);
            if (idx < 0)
                edit_error(i, "remove targets missing link " + std::to_string(rem->from) + "->" +
                                  std::to_string(rem->to));
            links.erase(links.begin() + idx);
        } else {
            const auto& set = std::get<SetField>(edit);
            int idx = find_link(set.from, set.to);
            if (idx < 0)
                edit_error(i, "set-field targets missing link " + std::to_string(set.from) +
                                  "->" + std::to_string(set.to));
            field_ref(links[idx], set.field) = set.value;
        }
    }
    return Network(std::move(nodes), std::move(links), std::move(zones));
}

std::vector<Edit> inverse_edits(const Network& net, std::span<const Edit> edits) {
    std::vector<Link> links = net.links();
    auto find_link = [&links](int from, int to) -> int {
        for (std::size_t i = 0; i < links.size(); ++i)
            if (links[i].from == from && links[i].to == to) return static_cast<int>(i);
        return -1;
    };

    std::vector<Edit> inverse;
    inverse.reserve(edits.size());
    for (std::size_t i = 0; i < edits.size(); ++i) {
        const Edit& edit = edits[i];
        if (const auto* add = std::get_if<AddLink>(&edit)) {
            inverse.push_back(RemoveLink{add->link.from, add->link.to});
            if (add->insert_at < 0 || add->insert_at > static_cast<int>(links.size()))
                links.push_back(add->link);
            else
                links.insert(links.begin() + add->insert_at, add->link);
        } else if (const auto* rem = std::get_if<RemoveLink>(&edit)) {
            int idx = find_link(rem->from, rem->to);
            if (idx < 0) edit_error(i, "remove targets missing link");
            inverse.push_back(AddLink{links[idx], idx});
            links.erase(links.begin() + idx);
        } else {
            const auto& set = std::get<SetField>(edit);
            int idx = find_link(set.from, set.to);
            if (idx < 0) edit_error(i, "set-field targets missing link");
            inverse.push_back(SetField{set.from, set.to, set.field, field_ref(links[idx], set.field)});
            field_ref(links[idx], set.field) = set.value;
        }
    }
    std::reverse(inverse.begin(), inverse.end());
    return inverse;
}

Network apply_scenario(const Network& net, const ScenarioDelta& delta, Phase phase) {
    return apply_edits(net, delta.edits(phase));
}

}  // namespace uta
