#pragma once
// "# key=value" echo of a GridSpec, written at the head of interpolant and data files.

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "dasg/format.hpp"
#include "dasg/grids.hpp"

namespace dasg {

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline KeyValues spec_to_keys(const GridSpec& spec) {
    return {
        {"family", std::string(to_string(spec.family))},
        {"nu", join_doubles(spec.nu)},
        {"sigma", join_doubles(spec.sigma)},
        {"kernel_p", join_ints(spec.kernel_p)},
        {"grid_p", join_ints(spec.grid_p)},
        {"omega", join_doubles(spec.omega)},
        {"level", std::to_string(spec.level)},
    };
}

inline std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    for (auto item : split(text, ',')) out.push_back(parse_double(trim(item)));
    return out;
}

inline std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    for (auto item : split(text, ',')) out.push_back(parse_int(trim(item)));
    return out;
}

inline const std::string& require_key(const KeyValues& kv, std::string_view key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParameterError("missing key '" + std::string(key) + "'");
    return it->second;
}

inline GridSpec spec_from_keys(const KeyValues& kv) {
    GridSpec s;
    s.family = parse_family(require_key(kv, "family"));
    s.nu = parse_double_list(require_key(kv, "nu"));
    s.sigma = parse_double_list(require_key(kv, "sigma"));
    s.kernel_p = parse_int_list(require_key(kv, "kernel_p"));
    s.grid_p = parse_int_list(require_key(kv, "grid_p"));
    s.omega = parse_double_list(require_key(kv, "omega"));
    s.level = parse_int(require_key(kv, "level"));
    s.validate();
    return s;
}

/// Writes one "# key=value" line per entry.
inline void write_echo(std::ostream& out, const KeyValues& kv) {
    for (const auto& [k, v] : kv) out << "# " << k << '=' << v << '\n';
}

/// Parses a "# key=value" line into kv; returns false for other lines.
inline bool parse_echo_line(std::string_view line, KeyValues& kv) {
    if (line.empty() || line.front() != '#') return false;
    const auto body = trim(line.substr(1));
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) return true;
    kv[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
    return true;
}

}  // namespace dasg
