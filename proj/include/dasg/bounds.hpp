#pragma once
//
// Computable error-bound diagnostics for sparse-grid Matérn interpolation.
//
// The multiplicative constants are not known numerically; they default to 1 and
// the results are shape diagnostics, not certified errors.
//

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dasg/errors.hpp"
#include "dasg/grids.hpp"

namespace dasg {

/// How a bound term treats a shifted level L - |p_u| - k <= 0.
enum class ZeroLevelRule {
    Clamp,   ///< evaluate the complement sum at level max(0, shift)
    Vanish,  ///< the term is zero
};

namespace detail {

inline void check_exponents(std::span<const double> c) {
    for (double cj : c)
        if (!(cj > 0.0)) throw ParameterError("divergent series: exponent " + std::to_string(cj) + " <= 0");
}

// Sum over l in N_0^{d-j} (coordinates j..d-1) with omega . l > budget of 2^{-c . l}.
inline double complement_tail(std::span<const double> c, std::span<const double> omega, std::size_t j,
                              double budget, std::span<const double> full_products) {
    if (j == c.size()) return budget < -kLevelSlack ? 1.0 : 0.0;
    if (budget < -kLevelSlack) return full_products[j];
    const double q = std::exp2(-c[j]);
    double sum = 0.0;
    double weight = 1.0;
    int m = 0;
    for (; omega[j] * m <= budget + kLevelSlack; ++m) {
        sum += weight * complement_tail(c, omega, j + 1, budget - omega[j] * m, full_products);
        weight *= q;
    }
    // every l_j >= m leaves the set regardless of the remaining coordinates
    return sum + std::exp2(-c[j] * m) / (1.0 - q) * full_products[j + 1];
}

}  // namespace detail

/// Sum over the complement of A_{L,omega} of 2^{-c . l}, for any L (no convention applied).
inline double complement_sum(std::span<const double> c, std::span<const double> omega, double level) {
    if (c.size() != omega.size()) throw ShapeError("exponent and weight vectors differ in length");
    detail::check_exponents(c);
    for (double w : omega)
        if (!(w > 0.0)) throw ParameterError("weights must be positive");
    std::vector<double> full(c.size() + 1, 1.0);
    for (std::size_t j = c.size(); j-- > 0;) full[j] = full[j + 1] / (1.0 - std::exp2(-c[j]));
    return detail::complement_tail(c, omega, 0, level, full);
}

/// Anisotropic epsilon without its constant; zero for L <= 0.
inline double epsilon_aniso(std::span<const double> c, std::span<const double> omega, double level) {
    detail::check_exponents(c);
    if (level <= 0.0) return 0.0;
    return complement_sum(c, omega, level);
}

/// Isotropic epsilon: scalar exponent c in d dimensions, unit weights.
inline double epsilon_iso(double c, double level, std::size_t d) {
    const std::vector<double> cs(d, c), ones(d, 1.0);
    return epsilon_aniso(cs, ones, level);
}

struct BoundConstants {
    double c_lemma = 1.0;          ///< overall tensor-product constant
    std::vector<double> c_w;       ///< per-dimension constants; empty means all 1
};

struct BoundParams {
    std::vector<double> nu;
    std::vector<double> alpha;
    std::vector<double> omega;
    std::vector<int> p;
    int level = 0;
    BoundConstants constants;
    ZeroLevelRule zero_level = ZeroLevelRule::Clamp;

    std::size_t dimension() const noexcept { return nu.size(); }

    std::vector<double> exponents() const {
        std::vector<double> c(nu.size());
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = nu[j] - alpha[j];
        return c;
    }

    double c_w(std::size_t j) const { return constants.c_w.empty() ? 1.0 : constants.c_w[j]; }

    void validate() const {
        const auto d = dimension();
        if (d == 0) throw ParameterError("bound dimension must be at least 1");
        if (alpha.size() != d || omega.size() != d || p.size() != d)
            throw ShapeError("bound parameter lists must all have length d");
        if (!constants.c_w.empty() && constants.c_w.size() != d)
            throw ShapeError("per-dimension constants must have length d");
        for (std::size_t j = 0; j < d; ++j) {
            if (!(alpha[j] >= 0.5)) throw ParameterError("alpha must be at least 1/2");
            if (!(alpha[j] < nu[j])) throw ParameterError("hypothesis alpha_j < nu_j violated");
            if (!(omega[j] > 0.0)) throw ParameterError("omega must be positive");
            if (p[j] < 0) throw ParameterError("penalties must be nonnegative");
        }
    }
};

struct BoundTerm {
    std::vector<int> subset;  ///< 0-based dimensions in u
    double shifted_level = 0.0;
    double factor = 0.0;      ///< 2^{-c_u.(p_u+1)} times the per-dimension constants
    double epsilon = 0.0;
    double contribution = 0.0;
};

struct BoundValue {
    double value = 0.0;
    std::vector<BoundTerm> terms;
};

namespace detail {

inline double shifted_epsilon(std::span<const double> c, std::span<const double> omega, double shift,
                              ZeroLevelRule rule) {
    if (rule == ZeroLevelRule::Vanish) return epsilon_aniso(c, omega, shift);
    return complement_sum(c, omega, std::max(0.0, shift));
}

}  // namespace detail

/// Doubly anisotropic bound: sum over nonempty u of
/// 2^{-(nu_u - alpha_u).(p_u + 1)} eps^{(k)}_{omega_u}(L - |p_u|_1 - k).
inline BoundValue dasg_bound(const BoundParams& params) {
    params.validate();
    const auto d = params.dimension();
    if (d > 20) throw ParameterError("subset enumeration limited to d <= 20");
    const auto c = params.exponents();
    BoundValue out;
    for (std::uint32_t mask = 1; mask < (1U << d); ++mask) {
        BoundTerm t;
        std::vector<double> cu, wu;
        int p_sum = 0;
        double log2_factor = 0.0;
        double consts = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (!(mask >> j & 1U)) continue;
            t.subset.push_back(static_cast<int>(j));
            cu.push_back(c[j]);
            wu.push_back(params.omega[j]);
            p_sum += params.p[j];
            log2_factor -= c[j] * (params.p[j] + 1);
            consts *= params.c_w(j);
        }
        const auto k = static_cast<int>(t.subset.size());
        t.shifted_level = params.level - p_sum - k;
        t.factor = std::exp2(log2_factor) * consts;
        t.epsilon = detail::shifted_epsilon(cu, wu, t.shifted_level, params.zero_level);
        t.contribution = params.constants.c_lemma * t.factor * t.epsilon;
        out.value += t.contribution;
        out.terms.push_back(std::move(t));
    }
    return out;
}

/// Lengthscale-informed bound for constant nu_j - alpha_j = c and unit weights:
/// sum_k 2^{-ck} sum_{|u|=k} 2^{-c|p_u|_1} eps^{(k)}(L - |p_u|_1 - k).
inline BoundValue lisg_bound(const BoundParams& params) {
    params.validate();
    const auto d = params.dimension();
    if (d > 20) throw ParameterError("subset enumeration limited to d <= 20");
    const auto cs = params.exponents();
    const double c = cs.front();
    for (double cj : cs)
        if (std::abs(cj - c) > 1e-12 * std::max(1.0, c))
            throw ParameterError("hypothesis violation: nu_j - alpha_j must be the same in every dimension");
    BoundValue out;
    for (std::uint32_t mask = 1; mask < (1U << d); ++mask) {
        BoundTerm t;
        int p_sum = 0;
        double consts = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (!(mask >> j & 1U)) continue;
            t.subset.push_back(static_cast<int>(j));
            p_sum += params.p[j];
            consts *= params.c_w(j);
        }
        const auto k = static_cast<int>(t.subset.size());
        t.shifted_level = params.level - p_sum - k;
        t.factor = std::exp2(-c * k) * std::exp2(-c * p_sum) * consts;
        const std::vector<double> cu(k, c), ones(k, 1.0);
        t.epsilon = detail::shifted_epsilon(cu, ones, t.shifted_level, params.zero_level);
        t.contribution = params.constants.c_lemma * t.factor * t.epsilon;
        out.value += t.contribution;
        out.terms.push_back(std::move(t));
    }
    return out;
}

/// prod_j sqrt(Gamma(alpha_j + 1/2) Gamma(nu_j) / (Gamma(alpha_j) Gamma(nu_j + 1/2))),
/// an optional source for BoundConstants::c_lemma.
inline double tensor_constant(std::span<const double> nu, std::span<const double> alpha) {
    if (nu.size() != alpha.size()) throw ShapeError("nu and alpha differ in length");
    double log_c = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j)
        log_c += 0.5 * (std::lgamma(alpha[j] + 0.5) + std::lgamma(nu[j]) - std::lgamma(alpha[j]) -
                        std::lgamma(nu[j] + 0.5));
    return std::exp(log_c);
}

}  // namespace dasg
