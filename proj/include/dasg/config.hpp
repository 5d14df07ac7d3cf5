#pragma once
//
// Flat key=value run configuration for the command-line front end.
//
// Per-dimension lists are comma separated; an item "v*k" repeats v k times and
// values may be written as fractions, so "3/2*2,5/2*2" is (1.5, 1.5, 2.5, 2.5).
//

#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "dasg/bounds.hpp"
#include "dasg/errors.hpp"
#include "dasg/experiments.hpp"
#include "dasg/format.hpp"
#include "dasg/grids.hpp"
#include "dasg/spec_io.hpp"

namespace dasg {

/// "a/b", a decimal, or "inf".
inline double parse_scalar(std::string_view text) {
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_double(text);
    const double den = parse_double(trim(text.substr(slash + 1)));
    if (den == 0.0) throw ParameterError("zero denominator in '" + std::string(text) + "'");
    return parse_double(trim(text.substr(0, slash))) / den;
}

/// Expands "v*k" repetitions; items are returned as text.
inline std::vector<std::string> expand_list(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    for (auto item : split(text, ',')) {
        item = trim(item);
        const auto star = item.find('*');
        if (star == std::string_view::npos) {
            out.emplace_back(item);
            continue;
        }
        const int count = parse_int(trim(item.substr(star + 1)));
        if (count < 1) throw ParameterError("repeat count must be positive in '" + std::string(item) + "'");
        for (int i = 0; i < count; ++i) out.emplace_back(trim(item.substr(0, star)));
    }
    return out;
}

class RunConfig {
public:
    RunConfig() = default;
    explicit RunConfig(KeyValues values) : values_(std::move(values)) {}

    /// Reads "key=value" lines; '#' starts a comment line.
    static RunConfig from_text(std::istream& in) {
        KeyValues kv;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto body = trim(line);
            if (body.empty() || body.front() == '#') continue;
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                throw ParameterError("config line " + std::to_string(lineno) + " is not key=value");
            kv[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
        }
        return RunConfig(std::move(kv));
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
        return from_text(in);
    }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    void merge(const RunConfig& overrides) {
        for (const auto& [k, v] : overrides.values_) values_[k] = v;
    }

    bool has(std::string_view key) const { return values_.find(key) != values_.end(); }
    const KeyValues& values() const noexcept { return values_; }

    std::string get_string(std::string_view key, std::string fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    int get_int(std::string_view key, int fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : parse_int(trim(it->second));
    }

    double get_double(std::string_view key, double fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : parse_scalar(it->second);
    }

    bool get_bool(std::string_view key, bool fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const auto& v = it->second;
        if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
        if (v == "0" || v == "false" || v == "no" || v == "off") return false;
        throw ParameterError("'" + std::string(key) + "' expects a boolean, got '" + v + "'");
    }

    /// Dimension: explicit "d", otherwise the length of the expanded "nu" list.
    std::size_t dimension() const {
        if (has("d")) {
            const int d = get_int("d", 0);
            if (d < 1) throw ParameterError("d must be positive");
            return static_cast<std::size_t>(d);
        }
        if (has("nu")) return expand_list(get_string("nu", "")).size();
        throw ParameterError("dimension unknown: give d or nu");
    }

    /// Per-dimension real list; a single value broadcasts to all d dimensions.
    std::vector<double> get_doubles(std::string_view key, std::size_t d, std::optional<double> fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            if (!fallback) throw ParameterError("missing required key '" + std::string(key) + "'");
            return std::vector<double>(d, *fallback);
        }
        std::vector<double> out;
        for (const auto& item : expand_list(it->second)) out.push_back(parse_scalar(item));
        return broadcast(key, std::move(out), d);
    }

    std::vector<int> get_ints(std::string_view key, std::size_t d, std::optional<int> fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            if (!fallback) throw ParameterError("missing required key '" + std::string(key) + "'");
            return std::vector<int>(d, *fallback);
        }
        std::vector<int> out;
        for (const auto& item : expand_list(it->second)) out.push_back(parse_int(item));
        return broadcast(key, std::move(out), d);
    }

    /// "a..b" or a single level.
    std::pair<int, int> get_range(std::string_view key, std::pair<int, int> fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const std::string_view v = trim(it->second);
        const auto dots = v.find("..");
        if (dots == std::string_view::npos) {
            const int l = parse_int(v);
            return {l, l};
        }
        const int lo = parse_int(trim(v.substr(0, dots)));
        const int hi = parse_int(trim(v.substr(dots + 2)));
        if (lo > hi) throw ParameterError("empty range '" + std::string(v) + "'");
        return {lo, hi};
    }

private:
    template <class T>
    static std::vector<T> broadcast(std::string_view key, std::vector<T> v, std::size_t d) {
        if (v.size() == 1 && d > 1) v.assign(d, v.front());
        if (v.size() != d)
            throw ShapeError("'" + std::string(key) + "' has " + std::to_string(v.size()) + " entries, expected " +
                             std::to_string(d));
        return v;
    }

    KeyValues values_;
};

/// omega_j = nu_j - alpha_j + 1.
inline std::vector<double> weights_from_alpha(const std::vector<double>& nu, const std::vector<double>& alpha) {
    std::vector<double> w(nu.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = nu[j] - alpha[j] + 1.0;
    return w;
}

/// Grid spec for inspection/fitting: kernel lengthscales 2^p for every family,
/// grid penalty max(p - r, 0) for LISG/DASG and 0 for ISG/ASG, unit weights
/// for ISG/LISG. omega falls back to nu - alpha + 1 (alpha default 1/2).
inline GridSpec grid_spec_from(const RunConfig& cfg) {
    const auto d = cfg.dimension();
    const auto family = parse_family(cfg.get_string("family", "ISG"));
    const auto nu = cfg.get_doubles("nu", d, 1.5);
    const auto p = cfg.get_ints("p", d, 0);
    const auto r = cfg.get_ints("r", d, 0);
    std::vector<double> omega(d, 1.0);
    if (family == Family::ASG || family == Family::DASG) {
        omega = cfg.has("omega") ? cfg.get_doubles("omega", d, std::nullopt)
                                 : weights_from_alpha(nu, cfg.get_doubles("alpha", d, 0.5));
    }
    GridSpec s;
    s.family = family;
    s.nu = nu;
    s.sigma = cfg.get_doubles("sigma", d, 1.0);
    s.kernel_p = p;
    s.omega = omega;
    s.level = cfg.get_int("level", 0);
    s.grid_p.assign(d, 0);
    if (family == Family::LISG || family == Family::DASG)
        for (std::size_t j = 0; j < d; ++j) s.grid_p[j] = std::max(p[j] - r[j], 0);
    s.validate();
    return s;
}

inline constexpr std::size_t kDeskMaxNodes = 10000;
inline constexpr int kDeskRealisations = 3;
inline constexpr std::size_t kFullMaxNodes = 100000;
inline constexpr int kFullRealisations = 10;

/// Sweep configuration for one family; omega defaults to nu - alpha + 1.
inline SweepConfig sweep_config_from(const RunConfig& cfg, Family family) {
    const auto d = cfg.dimension();
    const bool full = cfg.get_bool("full_scale", false);
    SweepConfig c;
    c.family = family;
    c.nu = cfg.get_doubles("nu", d, std::nullopt);
    c.p = cfg.get_ints("p", d, 0);
    c.omega = cfg.has("omega") ? cfg.get_doubles("omega", d, std::nullopt)
                               : weights_from_alpha(c.nu, cfg.get_doubles("alpha", d, 0.5));
    c.r = cfg.get_ints("r", d, 0);
    c.realisations = cfg.get_int("realisations", full ? kFullRealisations : kDeskRealisations);
    c.seed = std::stoull(cfg.get_string("seed", "1"));
    c.max_nodes = std::stoull(cfg.get_string("max_nodes", std::to_string(full ? kFullMaxNodes : kDeskMaxNodes)));
    c.mc_samples = cfg.get_int("mc_samples", 100);
    c.n_terms = cfg.get_int("n_terms", kDefaultTerms);
    c.coefficient_variance = cfg.get_double("coefficient_variance", kDefaultCoefficientVariance);
    c.max_level = cfg.get_int("max_level", 200);
    c.threads = cfg.get_int("threads", 1);
    c.validate();
    return c;
}

inline BoundParams bound_params_from(const RunConfig& cfg) {
    const auto d = cfg.dimension();
    BoundParams b;
    b.nu = cfg.get_doubles("nu", d, std::nullopt);
    b.alpha = cfg.get_doubles("alpha", d, 0.5);
    b.omega = cfg.has("omega") ? cfg.get_doubles("omega", d, std::nullopt) : std::vector<double>(d, 1.0);
    b.p = cfg.get_ints("p", d, 0);
    b.level = cfg.get_int("level", 0);
    b.constants.c_lemma = cfg.get_string("c_lemma", "1") == "gamma" ? tensor_constant(b.nu, b.alpha)
                                                                      : cfg.get_double("c_lemma", 1.0);
    if (cfg.has("c_w")) b.constants.c_w = cfg.get_doubles("c_w", d, std::nullopt);
    const auto rule = cfg.get_string("zero_level", "clamp");
    if (rule == "clamp") b.zero_level = ZeroLevelRule::Clamp;
    else if (rule == "vanish") b.zero_level = ZeroLevelRule::Vanish;
    else throw ParameterError("zero_level must be 'clamp' or 'vanish'");
    b.validate();
    return b;
}

}  // namespace dasg
