#pragma once
// Brute-force reference: full N x N Gram system on the deduplicated sparse-grid nodes.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "dasg/errors.hpp"
#include "dasg/grids.hpp"
#include "dasg/kernels.hpp"

namespace dasg {

inline constexpr std::size_t kDenseNodeCap = 5000;

struct DenseInterpolant {
    std::vector<GridNode> nodes;
    std::vector<std::vector<double>> points;  // node coordinates as doubles
    Eigen::VectorXd weights;
    SeparableKernel kernel;
};

inline Eigen::MatrixXd dense_gram(const SeparableKernel& kernel, const std::vector<std::vector<double>>& pts) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) g(a, b) = g(b, a) = eval_separable(kernel, pts[a], pts[b]);
    return g;
}

template <class F>
DenseInterpolant dense_fit(const GridSpec& spec, F&& f) {
    DenseInterpolant out;
    out.kernel = spec.kernel();
    out.nodes = sparse_grid_nodes(spec);
    if (out.nodes.size() > kDenseNodeCap)
        throw SizeGuard("dense oracle refuses N = " + std::to_string(out.nodes.size()) + " > " +
                        std::to_string(kDenseNodeCap));
    const auto n = static_cast<Eigen::Index>(out.nodes.size());
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.points.push_back(to_values(out.nodes[i]));
        rhs[i] = f(out.nodes[i]);
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(dense_gram(out.kernel, out.points));
    if (llt.info() != Eigen::Success)
        throw PDFailure(-1, -1, "dense sparse-grid Gram matrix is not positive definite in double precision");
    out.weights = llt.solve(rhs);
    return out;
}

inline double dense_evaluate(const DenseInterpolant& interp, std::span<const double> x) {
    if (x.size() != interp.kernel.dimension()) throw ShapeError("dense_evaluate: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < interp.points.size(); ++i)
        s += interp.weights[static_cast<Eigen::Index>(i)] * eval_separable(interp.kernel, x, interp.points[i]);
    return s;
}

}  // namespace dasg
