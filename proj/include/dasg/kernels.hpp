#pragma once
//
// One-dimensional and separable Matérn kernels on the unit cube (-1/2, 1/2)^d.
//
// Half-integer regularities 1/2 .. 7/2 use their closed forms, nu = +inf is the
// Gaussian limit, and every other nu goes through the modified Bessel function
// of the second kind, evaluated in log space.
//

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dasg/errors.hpp"

namespace dasg {

inline constexpr double kGaussianNu = std::numeric_limits<double>::infinity();

struct KernelParams1D {
    double nu = 1.5;
    double lambda = 1.0;
    double sigma = 1.0;

    void validate() const {
        if (!(nu > 0.0)) throw ParameterError("kernel regularity nu must be positive");
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw ParameterError("kernel lengthscale must be positive and finite");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw ParameterError("kernel scale sigma must be positive and finite");
    }

    bool operator==(const KernelParams1D&) const = default;
};

struct SeparableKernel {
    std::vector<KernelParams1D> dims;

    std::size_t dimension() const noexcept { return dims.size(); }

    /// Phi(x, x), the product of the per-dimension sigma^2.
    double diagonal() const noexcept {
        double v = 1.0;
        for (const auto& p : dims) v *= p.sigma * p.sigma;
        return v;
    }
};

namespace detail {

// log K_nu(z) via the Debye uniform asymptotic expansion, accurate to O(nu^-4).
inline double log_bessel_k_debye(double nu, double z) {
    const double t = z / nu;
    const double s = std::sqrt(1.0 + t * t);
    const double p = 1.0 / s;
    const double eta = s + std::log(t / (1.0 + s));
    const double p2 = p * p;
    const double u1 = p * (3.0 - 5.0 * p2) / 24.0;
    const double u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0;
    const double u3 = p * p2 *
                      (30375.0 - 369603.0 * p2 + 765765.0 * p2 * p2 - 425425.0 * p2 * p2 * p2) /
                      414720.0;
    const double series = 1.0 - u1 / nu + u2 / (nu * nu) - u3 / (nu * nu * nu);
    return 0.5 * std::log(std::numbers::pi / (2.0 * nu)) - nu * eta - 0.25 * std::log1p(t * t) +
           std::log(series);
}

inline double log_bessel_k(double nu, double z) {
    if (nu > 40.0) return log_bessel_k_debye(nu, z);
    const double k = std::cyl_bessel_k(nu, z);
    if (!std::isfinite(k) || k <= 0.0)
        throw EvaluationError("Bessel K_" + std::to_string(nu) + "(" + std::to_string(z) +
                              ") is not representable in double precision");
    return std::log(k);
}

}  // namespace detail

/// Matérn correlation 2^{1-nu}/Gamma(nu) z^nu K_nu(z), z = sqrt(2 nu) r / lambda,
/// evaluated through the Bessel function for any positive finite nu. r > 0.
inline double matern_bessel_correlation(double nu, double lambda, double r) {
    const double z = std::sqrt(2.0 * nu) * r / lambda;
    const double log_value = (1.0 - nu) * std::numbers::ln2 - std::lgamma(nu) +
                             nu * std::log(z) + detail::log_bessel_k(nu, z);
    const double v = std::exp(log_value);
    if (!std::isfinite(v)) throw EvaluationError("Matérn correlation overflowed");
    return v;
}

/// phi_{nu,lambda}(x, x') including the sigma^2 factor.
inline double eval_1d(const KernelParams1D& params, double x, double xp) {
    params.validate();
    const double s2 = params.sigma * params.sigma;
    const double r = std::abs(x - xp);
    if (r == 0.0) return s2;  // indeterminate 0 * inf form in the Bessel expression

    const double nu = params.nu;
    if (nu == kGaussianNu) return s2 * std::exp(-r * r / (2.0 * params.lambda * params.lambda));
    if (nu == 0.5) return s2 * std::exp(-r / params.lambda);
    if (nu == 1.5) {
        const double z = std::sqrt(3.0) * r / params.lambda;
        return s2 * (1.0 + z) * std::exp(-z);
    }
    if (nu == 2.5) {
        const double z = std::sqrt(5.0) * r / params.lambda;
        return s2 * (1.0 + z + z * z / 3.0) * std::exp(-z);
    }
    if (nu == 3.5) {
        const double z = std::sqrt(7.0) * r / params.lambda;
        return s2 * (1.0 + z + 0.4 * z * z + z * z * z / 15.0) * std::exp(-z);
    }
    return s2 * matern_bessel_correlation(nu, params.lambda, r);
}

/// Phi(x, x') = prod_j phi_j(x_j, x'_j).
inline double eval_separable(const SeparableKernel& kernel, std::span<const double> x,
                             std::span<const double> xp) {
    if (x.size() != kernel.dimension() || xp.size() != kernel.dimension())
        throw ShapeError("point dimension does not match kernel dimension " +
                         std::to_string(kernel.dimension()));
    double v = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) v *= eval_1d(kernel.dims[j], x[j], xp[j]);
    return v;
}

}  // namespace dasg
