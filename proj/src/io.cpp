#include "uta/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace uta {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    throw InputError(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_or_fail(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> tokens;
    std::string token;
    while (is >> token) tokens.push_back(token);
    return tokens;
}

}  // namespace

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == delim) {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw InputError(context + ": not a number: '" + text + "'");
    }
}

// --- network ---------------------------------------------------------------

Network read_network(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    std::string line;
    int line_no = 0;
    int n_zones = -1, n_nodes = -1, n_links = -1;
    std::vector<Link> links;

    auto metadata_value = [&](const std::string& text) {
        std::size_t close = text.find('>');
        if (close == std::string::npos) fail(path, line_no, "malformed metadata line");
        return static_cast<int>(parse_double(trim(text.substr(close + 1)),
                                             path + ":" + std::to_string(line_no)));
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '~') continue;
        if (t[0] == '<') {
            if (t.rfind("<NUMBER OF ZONES>", 0) == 0) n_zones = metadata_value(t);
            else if (t.rfind("<NUMBER OF NODES>", 0) == 0) n_nodes = metadata_value(t);
            else if (t.rfind("<NUMBER OF LINKS>", 0) == 0) n_links = metadata_value(t);
            else if (t.rfind("<END OF METADATA>", 0) == 0) continue;
            else fail(path, line_no, "unknown metadata key: " + t);
            continue;
        }
        if (!t.empty() && t.back() == ';') t.pop_back();
        std::vector<std::string> tokens = tokenize(t);
        if (tokens.empty()) continue;
        if (tokens.size() != 8)
            fail(path, line_no,
                 "expected 8 link fields (from to capacity length free_flow_time alpha beta "
                 "accident_mult), got " + std::to_string(tokens.size()));
        std::string ctx = path + ":" + std::to_string(line_no);
        Link link;
        link.from = static_cast<int>(parse_double(tokens[0], ctx));
        link.to = static_cast<int>(parse_double(tokens[1], ctx));
        link.capacity = parse_double(tokens[2], ctx);
        link.length = parse_double(tokens[3], ctx);
        link.free_flow_time = parse_double(tokens[4], ctx);
        link.vdf_alpha = parse_double(tokens[5], ctx);
        link.vdf_beta = parse_double(tokens[6], ctx);
        link.accident_rate_multiplier = parse_double(tokens[7], ctx);
        links.push_back(link);
    }
    if (n_zones < 0 || n_nodes < 0 || n_links < 0)
        throw InputError(path + ": missing <NUMBER OF ZONES/NODES/LINKS> metadata");
    if (static_cast<int>(links.size()) != n_links)
        throw InputError(path + ": header says " + std::to_string(n_links) + " links, file has " +
                         std::to_string(links.size()));

    std::vector<Node> nodes;
    nodes.reserve(n_nodes);
    for (int id = 1; id <= n_nodes; ++id) nodes.push_back({id, id <= n_zones});
    std::vector<int> zones;
    for (int id = 1; id <= n_zones; ++id) zones.push_back(id);
    return Network(std::move(nodes), std::move(links), std::move(zones));
}

void write_network(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "<NUMBER OF ZONES> " << net.zone_count() << "\n";
    out << "<NUMBER OF NODES> " << net.node_count() << "\n";
    out << "<NUMBER OF LINKS> " << net.link_count() << "\n";
    out << "<END OF METADATA>\n";
    out << "~ from to capacity length free_flow_time alpha beta accident_mult ;\n";
    for (const Link& l : net.links())
        out << l.from << " " << l.to << " " << format_number(l.capacity) << " "
            << format_number(l.length) << " " << format_number(l.free_flow_time) << " "
            << format_number(l.vdf_alpha) << " " << format_number(l.vdf_beta) << " "
            << format_number(l.accident_rate_multiplier) << " ;\n";
}

// --- zones -------------------------------------------------------------------

std::vector<ZoneAttributes> read_zones(const std::string& path, std::size_t zone_count) {
    std::ifstream in = open_or_fail(path);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty zones file");
    std::vector<std::string> header = split_fields(trim(line), ',');

    std::vector<ZoneVar> columns;
    std::vector<bool> seen(kAllZoneVars.size(), false);
    for (const std::string& name : header) {
        ZoneVar var;
        try {
            var = zone_var_from_string(name);
        } catch (const std::exception&) {
            throw InputError(path + ": unknown zone column '" + name + "'");
        }
        columns.push_back(var);
        seen[static_cast<std::size_t>(var)] = true;
    }
    for (ZoneVar var : kAllZoneVars)
        if (!seen[static_cast<std::size_t>(var)])
            throw InputError(path + ": missing zone column '" + std::string(to_string(var)) + "'");

    std::vector<ZoneAttributes> zones;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> fields = split_fields(t, ',');
        if (fields.size() != columns.size())
            fail(path, line_no, "expected " + std::to_string(columns.size()) + " fields");
        ZoneAttributes z;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            double value = parse_double(fields[c], path + ":" + std::to_string(line_no));
            switch (columns[c]) {
                case ZoneVar::P: z.P = value; break;
                case ZoneVar::VP: z.VP = value; break;
                case ZoneVar::ER: z.ER = value; break;
                case ZoneVar::STR: z.STR = value; break;
                case ZoneVar::STUR: z.STUR = value; break;
                case ZoneVar::EMPE: z.EMPE = value; break;
                case ZoneVar::SHOP: z.SHOP = value; break;
                case ZoneVar::ST: z.ST = value; break;
                case ZoneVar::STU: z.STU = value; break;
                case ZoneVar::HOSPB: z.HOSPB = value; break;
                case ZoneVar::PARK: z.PARK = value; break;
                case ZoneVar::DRA: z.DRA = value; break;
                case ZoneVar::DB: z.DB = value; break;
                case ZoneVar::DT: z.DT = value; break;
                case ZoneVar::DQ: z.DQ = value; break;
                case ZoneVar::DF: z.DF = value; break;
                case ZoneVar::DR: z.DR = value; break;
                case ZoneVar::D128: z.D128 = value; break;
                case ZoneVar::D444: z.D444 = value; break;
                case ZoneVar::DIST: z.DIST = value; break;
            }
        }
        std::vector<std::string> issues = validate_zone(z);
        if (!issues.empty()) fail(path, line_no, "invalid zone row: " + issues.front());
        zones.push_back(z);
    }
    if (zones.size() != zone_count)
        throw InputError(path + ": " + std::to_string(zones.size()) + " zone rows for " +
                         std::to_string(zone_count) + " network zones");
    return zones;
}

// --- skims ---------------------------------------------------------------------

SkimSet read_skims(const std::string& pair_path, const std::string& ownership_path,
                   const std::vector<int>& zone_ids) {
    std::size_t n = zone_ids.size();
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[zone_ids[i]] = i;

    SkimSet skims;
    skims.timcar = skims.timmot = skims.timtax = skims.timbin = skims.timbot = skims.dist =
        Matrix::square(n, -1.0);
    skims.owncar.assign(n, -1.0);
    skims.ownmot.assign(n, -1.0);
    skims.desflag.assign(n, -1.0);

    {
        std::ifstream in = open_or_fail(pair_path);
        std::string line;
        if (!std::getline(in, line)) throw InputError(pair_path + ": empty skims file");
        const std::string expected = "origin,dest,TIMCAR,TIMMOT,TIMTAX,TIMBIN,TIMBOT,DIST";
        std::string got;
        for (const std::string& f : split_fields(trim(line), ','))
            got += (got.empty() ? "" : ",") + f;
        if (got != expected)
            throw InputError(pair_path + ": header must be '" + expected + "'");
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::vector<std::string> fields = split_fields(t, ',');
            if (fields.size() != 8) fail(pair_path, line_no, "expected 8 fields");
            std::string ctx = pair_path + ":" + std::to_string(line_no);
            int origin = static_cast<int>(parse_double(fields[0], ctx));
            int dest = static_cast<int>(parse_double(fields[1], ctx));
            auto oi = index.find(origin);
            auto di = index.find(dest);
            if (oi == index.end() || di == index.end())
                fail(pair_path, line_no, "unknown zone id");
            std::size_t o = oi->second, d = di->second;
            skims.timcar.at(o, d) = parse_double(fields[2], ctx);
            skims.timmot.at(o, d) = parse_double(fields[3], ctx);
            skims.timtax.at(o, d) = parse_double(fields[4], ctx);
            skims.timbin.at(o, d) = parse_double(fields[5], ctx);
            skims.timbot.at(o, d) = parse_double(fields[6], ctx);
            skims.dist.at(o, d) = parse_double(fields[7], ctx);
        }
        for (std::size_t o = 0; o < n; ++o)
            for (std::size_t d = 0; d < n; ++d)
                if (skims.timcar.at(o, d) < 0.0)
                    throw InputError(pair_path + ": missing skim row for pair " +
                                     std::to_string(zone_ids[o]) + "," + std::to_string(zone_ids[d]));
    }

    {
        std::ifstream in = open_or_fail(ownership_path);
        std::string line;
        if (!std::getline(in, line)) throw InputError(ownership_path + ": empty ownership file");
        if (trim(line) != "zone,OWNCAR,OWNMOT,DESFLAG")
            throw InputError(ownership_path + ": header must be 'zone,OWNCAR,OWNMOT,DESFLAG'");
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            std::vector<std::string> fields = split_fields(t, ',');
            if (fields.size() != 4) fail(ownership_path, line_no, "expected 4 fields");
            std::string ctx = ownership_path + ":" + std::to_string(line_no);
            int zone = static_cast<int>(parse_double(fields[0], ctx));
            auto zi = index.find(zone);
            if (zi == index.end()) fail(ownership_path, line_no, "unknown zone id");
            skims.owncar[zi->second] = parse_double(fields[1], ctx);
            skims.ownmot[zi->second] = parse_double(fields[2], ctx);
            skims.desflag[zi->second] = parse_double(fields[3], ctx);
        }
        for (std::size_t i = 0; i < n; ++i)
            if (skims.owncar[i] < 0.0)
                throw InputError(ownership_path + ": missing ownership row for zone " +
                                 std::to_string(zone_ids[i]));
    }
    return skims;
}

// --- demand ---------------------------------------------------------------------

Matrix read_demand(const std::string& path, const std::vector<int>& zone_ids) {
    std::size_t n = zone_ids.size();
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[zone_ids[i]] = i;
    Matrix od = Matrix::square(n, 0.0);

    std::ifstream in = open_or_fail(path);
    std::string line;
    int line_no = 0;
    bool csv = false;
    int origin_idx = -1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '~' || t[0] == '<' || t[0] == '#') continue;
        if (line_no == 1 || (!csv && origin_idx < 0)) {
            if (t.rfind("origin,", 0) == 0) {
                csv = true;
                continue;
            }
        }
        std::string ctx = path + ":" + std::to_string(line_no);
        if (csv) {
            std::vector<std::string> fields = split_fields(t, ',');
            if (fields.size() != 3) fail(path, line_no, "expected origin,dest,pce_per_hour");
            int o = static_cast<int>(parse_double(fields[0], ctx));
            int d = static_cast<int>(parse_double(fields[1], ctx));
            auto oi = index.find(o);
            auto di = index.find(d);
            if (oi == index.end() || di == index.end()) fail(path, line_no, "unknown zone id");
            od.at(oi->second, di->second) = parse_double(fields[2], ctx);
            continue;
        }
        if (t.rfind("Origin", 0) == 0) {
            int o = static_cast<int>(parse_double(trim(t.substr(6)), ctx));
            auto oi = index.find(o);
            if (oi == index.end()) fail(path, line_no, "unknown origin zone id");
            origin_idx = static_cast<int>(oi->second);
            continue;
        }
        if (origin_idx < 0) fail(path, line_no, "demand row before any Origin header");
        // TNTP block rows: `dest : value ; dest : value ;`
        for (const std::string& cell : split_fields(t, ';')) {
            if (cell.empty()) continue;
            std::vector<std::string> kv = split_fields(cell, ':');
            if (kv.size() != 2) fail(path, line_no, "expected 'dest : value ;' cells");
            int d = static_cast<int>(parse_double(kv[0], ctx));
            auto di = index.find(d);
            if (di == index.end()) fail(path, line_no, "unknown destination zone id");
            od.at(origin_idx, di->second) = parse_double(kv[1], ctx);
        }
    }
    return od;
}

// --- scenarios ---------------------------------------------------------------------

ScenarioDelta read_scenario(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    ScenarioDelta delta;
    {
        // default name: file stem
        std::size_t slash = path.find_last_of("/\\");
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        std::size_t dot = base.find_last_of('.');
        delta.name = dot == std::string::npos ? base : base.substr(0, dot);
    }

    std::string line;
    int line_no = 0;
    std::string section;
    auto parse_edit = [&](const std::string& text) -> Edit {
        std::vector<std::string> tokens = tokenize(text);
        std::string ctx = path + ":" + std::to_string(line_no);
        if (tokens.empty()) fail(path, line_no, "empty edit");
        if (tokens[0] == "set") {
            if (tokens.size() != 5) fail(path, line_no, "set needs: set from to field value");
            SetField set;
            set.from = static_cast<int>(parse_double(tokens[1], ctx));
            set.to = static_cast<int>(parse_double(tokens[2], ctx));
            try {
                set.field = link_field_from_string(tokens[3]);
            } catch (const std::exception& e) {
                fail(path, line_no, e.what());
            }
            set.value = parse_double(tokens[4], ctx);
            return set;
        }
        if (tokens[0] == "remove") {
            if (tokens.size() != 3) fail(path, line_no, "remove needs: remove from to");
            return RemoveLink{static_cast<int>(parse_double(tokens[1], ctx)),
                              static_cast<int>(parse_double(tokens[2], ctx))};
        }
        if (tokens[0] == "add") {
            if (tokens.size() != 9)
                fail(path, line_no,
                     "add needs: add from to capacity length free_flow_time alpha beta "
                     "accident_mult");
            AddLink add;
            add.link.from = static_cast<int>(parse_double(tokens[1], ctx));
            add.link.to = static_cast<int>(parse_double(tokens[2], ctx));
            add.link.capacity = parse_double(tokens[3], ctx);
            add.link.length = parse_double(tokens[4], ctx);
            add.link.free_flow_time = parse_double(tokens[5], ctx);
            add.link.vdf_alpha = parse_double(tokens[6], ctx);
            add.link.vdf_beta = parse_double(tokens[7], ctx);
            add.link.accident_rate_multiplier = parse_double(tokens[8], ctx);
            return add;
        }
        fail(path, line_no, "unknown edit verb: " + tokens[0]);
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            if (section != "construction" && section != "operation" && section != "costs")
                fail(path, line_no, "unknown scenario section [" + section + "]");
            continue;
        }
        if (section.empty()) {
            std::size_t eq = t.find('=');
            if (eq != std::string::npos && trim(t.substr(0, eq)) == "name") {
                delta.name = trim(t.substr(eq + 1));
                continue;
            }
            fail(path, line_no, "content before any section");
        }
        if (section == "costs") {
            std::size_t eq = t.find('=');
            if (eq == std::string::npos) fail(path, line_no, "costs entries are 'key = value'");
            std::string key = trim(t.substr(0, eq));
            // cost entries are in millions of currency units
            double value =
                1e6 * parse_double(trim(t.substr(eq + 1)), path + ":" + std::to_string(line_no));
            if (key == "construction") delta.direct_costs.construction = value;
            else if (key == "acquisition") delta.direct_costs.acquisition = value;
            else if (key == "maintenance") delta.direct_costs.annual_maintenance = value;
            else fail(path, line_no, "unknown cost key: " + key);
            continue;
        }
        Edit edit = parse_edit(t);
        if (section == "construction")
            delta.construction_edits.push_back(edit);
        else
            delta.operation_edits.push_back(edit);
    }
    return delta;
}

void write_flows(const Network& net, const FlowState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "from,to,flow,time,v_over_c\n";
    for (std::size_t l = 0; l < net.link_count(); ++l) {
        const Link& link = net.links()[l];
        out << link.from << "," << link.to << "," << format_number(state.flow[l]) << ","
            << format_number(state.time[l]) << ","
            << format_number(state.flow[l] / link.capacity) << "\n";
    }
}

// --- ini ---------------------------------------------------------------------

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in = open_or_fail(path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str(), path);
}

IniFile IniFile::parse_text(const std::string& text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::string section;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail(origin, line_no, "empty key");
        ini.entries_.push_back({section, key, value});
    }
    return ini;
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.section == section && e.key == key) return e.value;
    return std::nullopt;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return get(section, key).value_or(fallback);
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    auto value = get(section, key);
    if (!value) return fallback;
    return parse_double(*value, origin_ + " [" + section + "] " + key);
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    return static_cast<int>(get_double(section, key, fallback));
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    auto value = get(section, key);
    if (!value) return fallback;
    if (*value == "true" || *value == "1" || *value == "yes") return true;
    if (*value == "false" || *value == "0" || *value == "no") return false;
    throw InputError(origin_ + " [" + section + "] " + key + ": expected a boolean, got '" +
                     *value + "'");
}

std::vector<IniFile::Entry> IniFile::section_entries(const std::string& section) const {
    std::vector<Entry> out;
    for (const Entry& e : entries_)
        if (e.section == section) out.push_back(e);
    return out;
}

bool IniFile::has_section(const std::string& section) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&section](const Entry& e) { return e.section == section; });
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    // Shortest representation that round-trips, stable across runs.
    char buffer[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
        if (std::stod(buffer) == value) break;
    }
    return buffer;
}

}  // namespace uta
