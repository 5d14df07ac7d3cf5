#pragma once
//
// Fast sparse-grid inference: 1D Gram Cholesky factors, Kronecker-structured
// block solves and combination-technique weight accumulation.
//
// A block for multi-index l holds f on X_{l_1}^{p_1} x ... x X_{l_d}^{p_d} in
// row-major order (last dimension fastest). Its coefficients are
// [kron_j G_j^{-1}] f, applied as d successive mode-wise solves.
//

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dasg/errors.hpp"
#include "dasg/format.hpp"
#include "dasg/grids.hpp"
#include "dasg/kernels.hpp"
#include "dasg/spec_io.hpp"

namespace dasg {

struct GramFactor1D {
    int dim_index = 0;
    int level = 0;
    std::vector<DyadicPoint> nodes;
    Eigen::LLT<Eigen::MatrixXd> llt;

    Eigen::MatrixXd factor() const { return llt.matrixL(); }
    std::size_t size() const noexcept { return nodes.size(); }
};

/// Gram matrix phi(X, X) of one dimension's kernel on a 1D point list.
inline Eigen::MatrixXd gram_1d(const KernelParams1D& params, const std::vector<DyadicPoint>& pts) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        g(a, a) = eval_1d(params, pts[a].value(), pts[a].value());
        for (Eigen::Index b = 0; b < a; ++b) {
            g(a, b) = eval_1d(params, pts[a].value(), pts[b].value());
            g(b, a) = g(a, b);
        }
    }
    return g;
}

inline GramFactor1D factorize_1d(const GridSpec& spec, int dim, int level) {
    if (level < 0) throw ParameterError("factorize_1d needs a nonnegative level");
    if (dim < 0 || static_cast<std::size_t>(dim) >= spec.dimension())
        throw ShapeError("factorize_1d: dimension index out of range");
    GramFactor1D f;
    f.dim_index = dim;
    f.level = level;
    f.nodes = point_set_1d(level, spec.grid_p[dim]);
    const KernelParams1D params{spec.nu[dim], std::ldexp(1.0, spec.kernel_p[dim]), spec.sigma[dim]};
    f.llt.compute(gram_1d(params, f.nodes));
    if (f.llt.info() != Eigen::Success)
        throw PDFailure(dim, level,
                        "Gram matrix of dimension " + std::to_string(dim) + " at level " +
                            std::to_string(level) + " is not positive definite in double precision");
    return f;
}

/// Per-assembly cache of 1D factors keyed by (dimension, level).
class FactorCache {
public:
    explicit FactorCache(GridSpec spec) : spec_(std::move(spec)) {}

    const GramFactor1D& get(int dim, int level) {
        const auto key = std::pair{dim, level};
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, factorize_1d(spec_, dim, level)).first;
        return it->second;
    }

    const GridSpec& spec() const noexcept { return spec_; }

private:
    GridSpec spec_;
    std::map<std::pair<int, int>, GramFactor1D> cache_;
};

/// Coefficients of the tensor interpolant on block `ell` from its samples.
inline std::vector<double> block_solve(FactorCache& cache, const MultiIndex& ell,
                                       std::span<const double> samples) {
    const auto& spec = cache.spec();
    const auto d = spec.dimension();
    if (ell.size() != d) throw ShapeError("block_solve: multi-index has wrong dimension");

    std::vector<const GramFactor1D*> factors(d);
    std::vector<std::size_t> n(d);
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) {
        factors[j] = &cache.get(static_cast<int>(j), ell[j]);
        n[j] = factors[j]->size();
        total *= n[j];
    }
    if (samples.size() != total)
        throw ShapeError("block_solve: expected " + std::to_string(total) + " samples, got " +
                         std::to_string(samples.size()));

    std::vector<double> coef(samples.begin(), samples.end());
    Eigen::VectorXd fiber;
    std::size_t inner = total;
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t len = n[j];
        inner /= len;  // stride of mode j
        if (len == 1) {
            const double diag = factors[j]->llt.matrixLLT()(0, 0);
            const double scale = 1.0 / (diag * diag);
            for (double& c : coef) c *= scale;
            continue;
        }
        const std::size_t outer = total / (len * inner);
        fiber.resize(static_cast<Eigen::Index>(len));
        for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t base = o * len * inner;
            for (std::size_t i = 0; i < inner; ++i) {
                for (std::size_t a = 0; a < len; ++a) fiber[static_cast<Eigen::Index>(a)] = coef[base + a * inner + i];
                factors[j]->llt.solveInPlace(fiber);
                for (std::size_t a = 0; a < len; ++a) coef[base + a * inner + i] = fiber[static_cast<Eigen::Index>(a)];
            }
        }
    }
    return coef;
}

/// S(f)(x) = sum_i w_i Phi(x, x_i) over sparse-grid nodes in lexicographic order.
class SparseInterpolant {
public:
    SparseInterpolant(GridSpec spec, std::vector<GridNode> nodes, std::vector<double> weights)
        : spec_(std::move(spec)), kernel_(spec_.kernel()), nodes_(std::move(nodes)), weights_(std::move(weights)) {
        if (nodes_.size() != weights_.size()) throw ShapeError("node and weight counts differ");
        build_tables();
    }

    SparseInterpolant(GridSpec spec, const std::map<GridNode, double>& weights)
        : SparseInterpolant(std::move(spec), keys_of(weights), values_of(weights)) {}

    const GridSpec& spec() const noexcept { return spec_; }
    const SeparableKernel& kernel() const noexcept { return kernel_; }
    const std::vector<GridNode>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Weight stored at `node`, or 0 when the node carries none.
    double weight_at(const GridNode& node) const {
        const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
        return (it != nodes_.end() && *it == node) ? weights_[static_cast<std::size_t>(it - nodes_.begin())] : 0.0;
    }

    double evaluate(std::span<const double> x) const {
        const auto d = spec_.dimension();
        if (x.size() != d) throw ShapeError("evaluate: point has dimension " + std::to_string(x.size()) +
                                            ", interpolant has " + std::to_string(d));
        std::vector<std::vector<double>> kvals(d);
        for (std::size_t j = 0; j < d; ++j) {
            kvals[j].resize(coords_[j].size());
            for (std::size_t c = 0; c < coords_[j].size(); ++c)
                kvals[j][c] = eval_1d(kernel_.dims[j], x[j], coords_[j][c]);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            double k = weights_[i];
            const auto* idx = &coord_index_[i * d];
            for (std::size_t j = 0; j < d; ++j) k *= kvals[j][idx[j]];
            sum += k;
        }
        return sum;
    }

    double evaluate(const GridNode& node) const { return evaluate(to_values(node)); }

private:
    static std::vector<GridNode> keys_of(const std::map<GridNode, double>& m) {
        std::vector<GridNode> k;
        k.reserve(m.size());
        for (const auto& [node, w] : m) k.push_back(node);
        return k;
    }
    static std::vector<double> values_of(const std::map<GridNode, double>& m) {
        std::vector<double> v;
        v.reserve(m.size());
        for (const auto& [node, w] : m) v.push_back(w);
        return v;
    }

    void build_tables() {
        const auto d = spec_.dimension();
        for (const auto& node : nodes_)
            if (node.size() != d) throw ShapeError("interpolant node has wrong dimension");
        // sort nodes so weight_at can binary search
        if (!std::is_sorted(nodes_.begin(), nodes_.end())) {
            std::vector<std::size_t> perm(nodes_.size());
            for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
            std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return nodes_[a] < nodes_[b]; });
            std::vector<GridNode> n2;
            std::vector<double> w2;
            for (auto i : perm) {
                n2.push_back(nodes_[i]);
                w2.push_back(weights_[i]);
            }
            nodes_ = std::move(n2);
            weights_ = std::move(w2);
        }
        coords_.assign(d, {});
        coord_index_.resize(nodes_.size() * d);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<DyadicPoint> distinct;
            for (const auto& node : nodes_) distinct.push_back(node[j]);
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            for (const auto& p : distinct) coords_[j].push_back(p.value());
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                const auto it = std::lower_bound(distinct.begin(), distinct.end(), nodes_[i][j]);
                coord_index_[i * d + j] = static_cast<std::uint32_t>(it - distinct.begin());
            }
        }
    }

    GridSpec spec_;
    SeparableKernel kernel_;
    std::vector<GridNode> nodes_;
    std::vector<double> weights_;
    std::vector<std::vector<double>> coords_;
    std::vector<std::uint32_t> coord_index_;
};

namespace detail {

/// Memoized sampler: f is called at most once per distinct node.
template <class F>
class SampleCache {
public:
    explicit SampleCache(F& f) : f_(f) {}

    double operator()(const GridNode& node) {
        auto it = values_.find(node);
        if (it == values_.end()) it = values_.emplace(node, static_cast<double>(f_(node))).first;
        return it->second;
    }

private:
    F& f_;
    std::map<GridNode, double> values_;
};

template <class F>
void add_block(FactorCache& cache, SampleCache<F>& sampler, const MultiIndex& ell, double coefficient,
               std::map<GridNode, double>& weights) {
    const auto pts = block_points(cache.spec(), ell);
    std::vector<GridNode> nodes;
    std::vector<double> samples;
    for_each_block_node(pts, [&](std::size_t, const GridNode& node) {
        nodes.push_back(node);
        samples.push_back(sampler(node));
    });
    const auto coef = block_solve(cache, ell, samples);
    for (std::size_t i = 0; i < nodes.size(); ++i) weights[nodes[i]] += coefficient * coef[i];
}

}  // namespace detail

/// Combination-technique assembly over W with coefficients b(l).
template <class F>
SparseInterpolant assemble(const GridSpec& spec, F&& f) {
    spec.validate();
    FactorCache cache(spec);
    detail::SampleCache sampler(f);
    std::map<GridNode, double> weights;
    for (const auto& ell : active_set_W(spec)) {
        const int b = combination_coefficient(spec, ell);
        if (b == 0) continue;
        detail::add_block(cache, sampler, ell, static_cast<double>(b), weights);
    }
    return SparseInterpolant(spec, weights);
}

/// Reference assembly straight from the telescoping definition: every
/// l in the index set contributes its 2^d signed tensor terms.
template <class F>
SparseInterpolant assemble_telescoping(const GridSpec& spec, F&& f) {
    spec.validate();
    const auto d = spec.dimension();
    if (d > 20) throw ParameterError("telescoping expansion limited to d <= 20");
    FactorCache cache(spec);
    detail::SampleCache sampler(f);
    std::map<GridNode, double> weights;
    for (const auto& ell : index_set(spec)) {
        for (std::uint32_t tau = 0; tau < (1U << d); ++tau) {
            MultiIndex a = ell;
            int flips = 0;
            bool empty = false;
            for (std::size_t j = 0; j < d; ++j) {
                if (tau >> j & 1U) {
                    a[j] -= 1;
                    ++flips;
                    if (a[j] < 0) empty = true;
                }
            }
            if (empty) continue;  // X_{-1} is empty: the term is the zero operator
            detail::add_block(cache, sampler, a, flips % 2 == 0 ? 1.0 : -1.0, weights);
        }
    }
    return SparseInterpolant(spec, weights);
}

inline double evaluate(const SparseInterpolant& interp, std::span<const double> x) { return interp.evaluate(x); }

/// Writes the spec echo followed by one "n1/2^k1 ... nd/2^kd <hex weight>" line per node.
inline void write_interpolant(std::ostream& out, const SparseInterpolant& interp) {
    write_echo(out, spec_to_keys(interp.spec()));
    for (std::size_t i = 0; i < interp.size(); ++i)
        out << to_string(interp.nodes()[i]) << ' ' << format_hex(interp.weights()[i]) << '\n';
}

inline SparseInterpolant read_interpolant(std::istream& in) {
    KeyValues kv;
    std::vector<GridNode> nodes;
    std::vector<double> weights;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty() || parse_echo_line(line, kv)) continue;
        const auto fields = split_whitespace(line);
        if (fields.size() < 2) throw ParameterError("malformed interpolant line: " + line);
        GridNode node;
        for (std::size_t j = 0; j + 1 < fields.size(); ++j) node.push_back(DyadicPoint::parse(fields[j]));
        nodes.push_back(std::move(node));
        weights.push_back(parse_double(fields.back()));
    }
    return SparseInterpolant(spec_from_keys(kv), std::move(nodes), std::move(weights));
}

}  // namespace dasg
