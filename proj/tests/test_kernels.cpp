#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dasg/kernels.hpp"
#include "oracles.hpp"

namespace {

using dasg::KernelParams1D;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(Kernels, ExponentialKernelValue) {
    EXPECT_NEAR(dasg::eval_1d({0.5, 1.0, 1.0}, 0.25, 0.0), std::exp(-0.25), 1e-15);
    EXPECT_NEAR(dasg::eval_1d({0.5, 1.0, 1.0}, 0.25, 0.0), 0.7788007830714049, 1e-15);
}

TEST(Kernels, DiagonalIsSigmaSquaredExactly) {
    for (double nu : {0.5, 1.5, 2.5, 3.5, 0.8, 4.2, dasg::kGaussianNu}) {
        EXPECT_EQ(dasg::eval_1d({nu, 0.3, 1.0}, 0.1, 0.1), 1.0);
        EXPECT_EQ(dasg::eval_1d({nu, 2.0, 1.5}, -0.4, -0.4), 2.25);
    }
}

TEST(Kernels, Matern32MatchesBesselQuadrature) {
    const double closed = dasg::eval_1d({1.5, 1.0, 1.0}, 0.3, 0.0);
    const double z = std::sqrt(3.0) * 0.3;
    EXPECT_NEAR(closed, (1.0 + z) * std::exp(-z), 1e-15);
    EXPECT_LT(rel(closed, oracle::matern_quadrature(1.5, 1.0, 0.3)), 1e-12);
}

TEST(Kernels, HalfIntegerClosedFormsAgreeWithBesselPath) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> dist(1e-3, 0.999);
    for (double nu : {0.5, 1.5, 2.5, 3.5}) {
        for (double lambda : {0.25, 1.0, 8.0}) {
            for (int i = 0; i < 100; ++i) {
                const double r = dist(gen);
                const double closed = dasg::eval_1d({nu, lambda, 1.0}, r, 0.0);
                EXPECT_LT(rel(closed, dasg::matern_bessel_correlation(nu, lambda, r)), 1e-10) << nu << ' ' << r;
                EXPECT_LT(rel(closed, oracle::matern_quadrature(nu, lambda, r)), 1e-10) << nu << ' ' << r;
            }
        }
    }
}

TEST(Kernels, GeneralNuMatchesQuadrature) {
    for (double nu : {0.3, 0.8, 1.2, 2.0, 4.7}) {
        for (double r : {0.01, 0.2, 0.9}) {
            EXPECT_LT(rel(dasg::eval_1d({nu, 0.5, 1.0}, r, 0.0), oracle::matern_quadrature(nu, 0.5, r)), 1e-10)
                << nu << ' ' << r;
        }
    }
}

TEST(Kernels, GaussianLimit) {
    for (double r = 0.01; r <= 0.5; r += 0.01) {
        const double gauss = std::exp(-r * r / 2.0);
        EXPECT_EQ(dasg::eval_1d({dasg::kGaussianNu, 1.0, 1.0}, r, 0.0), gauss);
        EXPECT_LT(rel(dasg::eval_1d({1e4, 1.0, 1.0}, r, 0.0), gauss), 1e-2) << r;
    }
}

TEST(Kernels, DebyeBranchIsContinuousWithLibraryBranch) {
    // nu just below and above the switch-over should give nearly the same kernel
    for (double r : {0.05, 0.3}) {
        const double below = dasg::matern_bessel_correlation(39.999, 1.0, r);
        const double above = dasg::matern_bessel_correlation(40.001, 1.0, r);
        EXPECT_LT(rel(below, above), 1e-4);
    }
}

TEST(Kernels, SymmetryBoundednessAndDecay) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (double nu : {0.5, 1.5, 2.5, 3.5, 1.1, dasg::kGaussianNu}) {
        const KernelParams1D p{nu, 0.7, 1.3};
        for (int i = 0; i < 1000; ++i) {
            const double x = u(gen), y = u(gen);
            const double a = dasg::eval_1d(p, x, y);
            EXPECT_EQ(a, dasg::eval_1d(p, y, x));
            EXPECT_GT(a, 0.0);
            if (x != y) {
                EXPECT_LT(a, p.sigma * p.sigma);
            }
        }
        std::vector<double> dist(200);
        for (auto& d : dist) d = std::abs(u(gen));
        std::sort(dist.begin(), dist.end());
        for (std::size_t i = 1; i < dist.size(); ++i)
            EXPECT_LE(dasg::eval_1d(p, dist[i], 0.0), dasg::eval_1d(p, dist[i - 1], 0.0));
    }
}

TEST(Kernels, SeparableProduct) {
    dasg::SeparableKernel k{{{0.5, 1.0, 1.0}, {0.5, 1.0, 1.0}}};
    const std::vector<double> x{0.25, 0.25}, o{0.0, 0.0};
    EXPECT_NEAR(dasg::eval_separable(k, x, o), std::exp(-0.5), 1e-15);

    dasg::SeparableKernel mixed{{{1.5, 0.5, 2.0}, {2.5, 4.0, 0.5}, {0.5, 1.0, 3.0}}};
    const std::vector<double> a{0.1, -0.2, 0.3}, b{-0.4, 0.2, 0.0};
    double prod = 1.0;
    for (std::size_t j = 0; j < 3; ++j) prod *= dasg::eval_1d(mixed.dims[j], a[j], b[j]);
    EXPECT_DOUBLE_EQ(dasg::eval_separable(mixed, a, b), prod);
    EXPECT_DOUBLE_EQ(dasg::eval_separable(mixed, a, a), mixed.diagonal());
    EXPECT_DOUBLE_EQ(mixed.diagonal(), 4.0 * 0.25 * 9.0);

    dasg::SeparableKernel one{{{2.5, 0.3, 1.0}}};
    EXPECT_EQ(dasg::eval_separable(one, std::vector<double>{0.2}, std::vector<double>{-0.1}),
              dasg::eval_1d(one.dims[0], 0.2, -0.1));
}

TEST(Kernels, Errors) {
    EXPECT_THROW(dasg::eval_1d({1.5, 0.0, 1.0}, 0.1, 0.0), dasg::ParameterError);
    EXPECT_THROW(dasg::eval_1d({1.5, 1.0, -1.0}, 0.1, 0.0), dasg::ParameterError);
    EXPECT_THROW(dasg::eval_1d({0.0, 1.0, 1.0}, 0.1, 0.0), dasg::ParameterError);
    dasg::SeparableKernel k{{{0.5, 1.0, 1.0}, {0.5, 1.0, 1.0}}};
    EXPECT_THROW(dasg::eval_separable(k, std::vector<double>{0.1}, std::vector<double>{0.1, 0.2}),
                 dasg::ShapeError);
    // K_nu(z) overflows for tiny z at moderate nu
    EXPECT_THROW(dasg::matern_bessel_correlation(30.3, 1.0, 1e-300), dasg::EvaluationError);
}

}  // namespace
