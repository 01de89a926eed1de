#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uta/assign.hpp"
#include "uta/demand.hpp"
#include "uta/matrix.hpp"
#include "uta/network.hpp"

namespace uta {

/// A rejected input file: message carries file, line and what went wrong.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// TNTP-flavored network file: `<NUMBER OF ZONES>` etc. headers, then one
/// row per link `from to capacity length free_flow_time alpha beta
/// accident_mult ;`. Nodes 1..N are implied, the first Z of them centroids.
Network read_network(const std::string& path);
void write_network(const Network& net, const std::string& path);

/// Zone attribute CSV with the exact header
/// P,VP,ER,STR,STUR,EMPE,SHOP,ST,STU,HOSPB,PARK,DRA,DB,DT,DQ,DF,DR,D128,D444,DIST.
std::vector<ZoneAttributes> read_zones(const std::string& path, std::size_t zone_count);

/// Skim CSV `origin,dest,TIMCAR,TIMMOT,TIMTAX,TIMBIN,TIMBOT,DIST` (all pairs)
/// plus per-zone ownership CSV `zone,OWNCAR,OWNMOT,DESFLAG`.
SkimSet read_skims(const std::string& pair_path, const std::string& ownership_path,
                   const std::vector<int>& zone_ids);

/// Demand matrix: TNTP-flavored `Origin` blocks or CSV `origin,dest,pce_per_hour`.
Matrix read_demand(const std::string& path, const std::vector<int>& zone_ids);

/// Scenario file with [construction] / [operation] edit sections and a
/// [costs] section (construction, acquisition, maintenance).
ScenarioDelta read_scenario(const std::string& path);

void write_flows(const Network& net, const FlowState& state, const std::string& path);

/// Flat INI-style file: `[section]` headers and `key = value` lines.
/// Repeated keys are preserved in order; `#` starts a comment.
class IniFile {
public:
    struct Entry {
        std::string section;
        std::string key;
        std::string value;
    };

    static IniFile parse_file(const std::string& path);
    static IniFile parse_text(const std::string& text, const std::string& origin = "<text>");

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<Entry> section_entries(const std::string& section) const;
    bool has_section(const std::string& section) const;

    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& origin() const { return origin_; }

private:
    std::vector<Entry> entries_;
    std::string origin_;
};

/// Deterministic shortest-round-trip formatting used by every report writer.
std::string format_number(double value);

std::vector<std::string> split_fields(const std::string& line, char delim);
double parse_double(const std::string& text, const std::string& context);

}  // namespace uta
