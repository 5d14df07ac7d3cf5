#pragma once
//
// Exact dyadic point sets, multi-index sets and combination-technique
// coefficients for isotropic, anisotropic, lengthscale-informed and doubly
// anisotropic sparse grids.
//

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dasg/errors.hpp"
#include "dasg/kernels.hpp"

namespace dasg {

/// numerator / 2^level_log2, kept canonical (odd numerator, or zero as 0/2^0).
class DyadicPoint {
public:
    constexpr DyadicPoint() = default;

    constexpr DyadicPoint(std::int64_t numerator, int level_log2)
        : numerator_(numerator), level_log2_(level_log2) {
        if (level_log2 < 0 || level_log2 > 60)
            throw ParameterError("dyadic exponent out of range: " + std::to_string(level_log2));
        canonicalize();
    }

    constexpr std::int64_t numerator() const noexcept { return numerator_; }
    constexpr int level_log2() const noexcept { return level_log2_; }

    double value() const noexcept { return std::ldexp(static_cast<double>(numerator_), -level_log2_); }

    /// True when the value lies in the open interval (-1/2, 1/2).
    constexpr bool in_domain() const noexcept {
        if (numerator_ == 0) return true;
        if (level_log2_ < 1) return false;
        const std::int64_t half = std::int64_t{1} << (level_log2_ - 1);
        return numerator_ < half && -numerator_ < half;
    }

    constexpr bool operator==(const DyadicPoint&) const = default;

    constexpr std::strong_ordering operator<=>(const DyadicPoint& other) const noexcept {
        const int k = std::max(level_log2_, other.level_log2_);
        const __int128 a = static_cast<__int128>(numerator_) << (k - level_log2_);
        const __int128 b = static_cast<__int128>(other.numerator_) << (k - other.level_log2_);
        return a <=> b;
    }

    /// "n/2^k"
    std::string to_string() const {
        return std::to_string(numerator_) + "/2^" + std::to_string(level_log2_);
    }

    /// Parses "n/2^k" (or a bare integer "0"); the result is canonicalized.
    static DyadicPoint parse(std::string_view text) {
        const auto slash = text.find('/');
        try {
            if (slash == std::string_view::npos) return DyadicPoint(std::stoll(std::string(text)), 0);
            const auto num = std::string(text.substr(0, slash));
            auto den = text.substr(slash + 1);
            if (den.size() < 3 || den.substr(0, 2) != "2^")
                throw ParameterError("malformed dyadic coordinate '" + std::string(text) + "'");
            std::size_t used = 0;
            const auto n = std::stoll(num, &used);
            if (used != num.size()) throw ParameterError("malformed numerator in '" + std::string(text) + "'");
            const auto exp_text = std::string(den.substr(2));
            const auto k = std::stoi(exp_text, &used);
            if (used != exp_text.size()) throw ParameterError("malformed exponent in '" + std::string(text) + "'");
            return DyadicPoint(n, k);
        } catch (const std::logic_error&) {
            throw ParameterError("malformed dyadic coordinate '" + std::string(text) + "'");
        }
    }

private:
    constexpr void canonicalize() noexcept {
        if (numerator_ == 0) {
            level_log2_ = 0;
            return;
        }
        while (level_log2_ > 0 && numerator_ % 2 == 0) {
            numerator_ /= 2;
            --level_log2_;
        }
    }

    std::int64_t numerator_ = 0;
    int level_log2_ = 0;
};

/// A sparse-grid node: one dyadic coordinate per dimension.
using GridNode = std::vector<DyadicPoint>;

inline std::vector<double> to_values(const GridNode& node) {
    std::vector<double> x(node.size());
    std::transform(node.begin(), node.end(), x.begin(), [](const DyadicPoint& p) { return p.value(); });
    return x;
}

inline std::string to_string(const GridNode& node) {
    std::string out;
    for (std::size_t j = 0; j < node.size(); ++j) {
        if (j) out += ' ';
        out += node[j].to_string();
    }
    return out;
}

struct MultiIndex {
    std::vector<int> levels;

    std::size_t size() const noexcept { return levels.size(); }
    int operator[](std::size_t j) const { return levels[j]; }
    int& operator[](std::size_t j) { return levels[j]; }

    int l1() const noexcept {
        int s = 0;
        for (int l : levels) s += l;
        return s;
    }

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;
};

enum class Family { ISG, ASG, LISG, DASG };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::ISG: return "ISG";
        case Family::ASG: return "ASG";
        case Family::LISG: return "LISG";
        case Family::DASG: return "DASG";
    }
    return "?";
}

inline Family parse_family(std::string_view s) {
    if (s == "ISG" || s == "isg") return Family::ISG;
    if (s == "ASG" || s == "asg") return Family::ASG;
    if (s == "LISG" || s == "lisg") return Family::LISG;
    if (s == "DASG" || s == "dasg") return Family::DASG;
    throw ParameterError("unknown grid family '" + std::string(s) + "'");
}

/// Slack on weighted-level comparisons so non-integer weights enumerate consistently.
inline constexpr double kLevelSlack = 1e-9;

/// Full sparse-grid configuration. Kernel lengthscales are lambda_j = 2^{kernel_p_j};
/// point sets use the (possibly tuned-down) penalty grid_p.
struct GridSpec {
    Family family = Family::ISG;
    std::vector<double> nu;
    std::vector<double> sigma;
    std::vector<int> kernel_p;
    std::vector<int> grid_p;
    std::vector<double> omega;
    int level = 0;

    std::size_t dimension() const noexcept { return nu.size(); }

    /// Builds a spec with grid_p = max(kernel_p - r, 0) and sigma = 1.
    static GridSpec make(Family family, std::vector<double> nu, std::vector<int> kernel_p,
                         std::vector<double> omega, std::vector<int> r, int level) {
        GridSpec s;
        s.family = family;
        const auto d = nu.size();
        s.nu = std::move(nu);
        s.sigma.assign(d, 1.0);
        s.kernel_p = std::move(kernel_p);
        s.omega = std::move(omega);
        if (r.empty()) r.assign(d, 0);
        if (s.kernel_p.size() != d || r.size() != d)
            throw ShapeError("per-dimension lists must all have length d");
        s.grid_p.resize(d);
        for (std::size_t j = 0; j < d; ++j) s.grid_p[j] = std::max(s.kernel_p[j] - r[j], 0);
        s.level = level;
        s.validate();
        return s;
    }

    void validate() const {
        const auto d = dimension();
        if (d == 0) throw ParameterError("grid dimension must be at least 1");
        if (sigma.size() != d || kernel_p.size() != d || grid_p.size() != d || omega.size() != d)
            throw ShapeError("per-dimension lists must all have length d = " + std::to_string(d));
        if (level < 0) throw ParameterError("level must be nonnegative");
        for (std::size_t j = 0; j < d; ++j) {
            if (!(nu[j] > 0.0)) throw ParameterError("nu must be positive");
            if (!(sigma[j] > 0.0)) throw ParameterError("sigma must be positive");
            if (!(omega[j] > 0.0) || !std::isfinite(omega[j])) throw ParameterError("omega must be positive");
            if (kernel_p[j] < 0 || grid_p[j] < 0) throw ParameterError("penalties must be nonnegative");
            if (kernel_p[j] > 60) throw ParameterError("kernel penalty too large");
        }
        const bool unit_omega = std::all_of(omega.begin(), omega.end(), [](double w) { return w == 1.0; });
        const bool zero_grid_p = std::all_of(grid_p.begin(), grid_p.end(), [](int p) { return p == 0; });
        switch (family) {
            case Family::ISG:
                if (!unit_omega || !zero_grid_p)
                    throw ParameterError("ISG requires omega = 1 and zero grid penalty");
                break;
            case Family::ASG:
                if (!zero_grid_p) throw ParameterError("ASG requires zero grid penalty");
                break;
            case Family::LISG:
                if (!unit_omega) throw ParameterError("LISG requires omega = 1");
                break;
            case Family::DASG: break;
        }
    }

    SeparableKernel kernel() const {
        SeparableKernel k;
        k.dims.reserve(dimension());
        for (std::size_t j = 0; j < dimension(); ++j)
            k.dims.push_back({nu[j], std::ldexp(1.0, kernel_p[j]), sigma[j]});
        return k;
    }

    GridSpec with_level(int l) const {
        GridSpec s = *this;
        s.level = l;
        return s;
    }
};

/// omega . levels
inline double weighted_level(std::span<const double> omega, const MultiIndex& ell) {
    double s = 0.0;
    for (std::size_t j = 0; j < ell.size(); ++j) s += omega[j] * ell[j];
    return s;
}

/// The p-penalised point set X_level^penalty, sorted ascending.
inline std::vector<DyadicPoint> point_set_1d(int level, int penalty) {
    if (penalty < 0) throw ParameterError("penalty must be nonnegative");
    if (level < 0) return {};
    if (level <= penalty) return {DyadicPoint{}};
    const int m = level - penalty;
    if (m > 40) throw ParameterError("point-set level too large");
    const std::int64_t half = (std::int64_t{1} << m) - 1;
    std::vector<DyadicPoint> pts;
    pts.reserve(static_cast<std::size_t>(2 * half + 1));
    for (std::int64_t n = -half; n <= half; ++n) pts.emplace_back(n, m + 1);
    return pts;
}

namespace detail {

inline void enumerate_weighted(std::span<const double> omega, double budget, std::size_t j,
                               MultiIndex& current, std::vector<MultiIndex>& out) {
    if (j == omega.size()) {
        out.push_back(current);
        return;
    }
    for (int l = 0; omega[j] * l <= budget + kLevelSlack; ++l) {
        current[j] = l;
        enumerate_weighted(omega, budget - omega[j] * l, j + 1, current, out);
    }
    current[j] = 0;
}

}  // namespace detail

/// {l : omega . l <= level}, lexicographically sorted.
inline std::vector<MultiIndex> weighted_index_set(std::span<const double> omega, double level) {
    std::vector<MultiIndex> out;
    if (level < -kLevelSlack) return out;
    MultiIndex current{std::vector<int>(omega.size(), 0)};
    detail::enumerate_weighted(omega, level, 0, current, out);
    return out;
}

/// I_L when omega = 1, otherwise A_{L,omega}.
inline std::vector<MultiIndex> index_set(const GridSpec& spec) {
    return weighted_index_set(spec.omega, spec.level);
}

inline bool in_active_set(const GridSpec& spec, const MultiIndex& ell) {
    if (ell.size() != spec.dimension()) return false;
    for (std::size_t j = 0; j < ell.size(); ++j) {
        if (ell[j] < 0) return false;
        if (ell[j] != 0 && ell[j] <= spec.grid_p[j]) return false;
    }
    return weighted_level(spec.omega, ell) <= spec.level + kLevelSlack;
}

/// W: index-set members whose every coordinate is 0 or exceeds its grid penalty.
inline std::vector<MultiIndex> active_set_W(const GridSpec& spec) {
    auto all = index_set(spec);
    std::erase_if(all, [&](const MultiIndex& ell) { return !in_active_set(spec, ell); });
    return all;
}

/// Signed sum over subsets u whose upward shift stays inside the index set.
/// A coordinate at level 0 with grid penalty p shifts to level p + 1 (levels
/// 1..p repeat the point set {0}), any other coordinate shifts by one level.
inline int combination_coefficient(const GridSpec& spec, const MultiIndex& ell) {
    if (!in_active_set(spec, ell)) throw DomainError("multi-index is not in the active set W");
    const auto d = spec.dimension();
    if (d > 30) throw ParameterError("combination coefficient enumeration limited to d <= 30");
    const double base = weighted_level(spec.omega, ell);
    std::vector<double> step(d);
    for (std::size_t j = 0; j < d; ++j)
        step[j] = spec.omega[j] * (1.0 + (ell[j] == 0 ? spec.grid_p[j] : 0));
    int b = 0;
    const std::uint64_t subsets = std::uint64_t{1} << d;
    for (std::uint64_t u = 0; u < subsets; ++u) {
        double cost = base;
        int size = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (u >> j & 1U) {
                cost += step[j];
                ++size;
            }
        }
        if (cost <= spec.level + kLevelSlack) b += (size % 2 == 0) ? 1 : -1;
    }
    return b;
}

/// Per-dimension point lists of the tensor block for `ell`.
inline std::vector<std::vector<DyadicPoint>> block_points(const GridSpec& spec, const MultiIndex& ell) {
    std::vector<std::vector<DyadicPoint>> pts(spec.dimension());
    for (std::size_t j = 0; j < spec.dimension(); ++j) pts[j] = point_set_1d(ell[j], spec.grid_p[j]);
    return pts;
}

/// Visits every node of a tensor block in row-major order (last dimension fastest).
template <class Visitor>
void for_each_block_node(const std::vector<std::vector<DyadicPoint>>& pts, Visitor&& visit) {
    const auto d = pts.size();
    for (const auto& p : pts)
        if (p.empty()) return;
    std::vector<std::size_t> idx(d, 0);
    GridNode node(d);
    for (std::size_t j = 0; j < d; ++j) node[j] = pts[j][0];
    std::size_t flat = 0;
    while (true) {
        visit(flat, static_cast<const GridNode&>(node));
        ++flat;
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++idx[j] < pts[j].size()) {
                node[j] = pts[j][idx[j]];
                break;
            }
            idx[j] = 0;
            node[j] = pts[j][0];
            if (j == 0) return;
        }
        if (d == 0) return;
    }
}

/// Deduplicated union of all tensor blocks, lexicographically sorted.
inline std::vector<GridNode> sparse_grid_nodes(const GridSpec& spec) {
    spec.validate();
    std::vector<GridNode> nodes;
    // Blocks with a collapsed coordinate (1 <= l_j <= p_j) repeat the l_j = 0 block,
    // so the union over W equals the union over the full index set.
    for (const auto& ell : active_set_W(spec)) {
        for_each_block_node(block_points(spec, ell),
                            [&](std::size_t, const GridNode& node) { nodes.push_back(node); });
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

}  // namespace dasg
