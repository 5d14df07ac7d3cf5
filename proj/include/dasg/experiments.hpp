#pragma once
//
// Convergence-study harness: random kernel-combination targets, Monte Carlo
// relative L2 errors and level sweeps with node-count and positive-definiteness
// stopping rules.
//

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dasg/errors.hpp"
#include "dasg/format.hpp"
#include "dasg/grids.hpp"
#include "dasg/kernels.hpp"
#include "dasg/spec_io.hpp"
#include "dasg/tensor_solver.hpp"

namespace dasg {

// Counter-based generator: every draw is a pure function of (seed, stream, index),
// so realisation k reproduces independently of execution order.
namespace rng {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return mix(mix(mix(seed) ^ stream) ^ index);
}

/// Uniform on the open interval (0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return (static_cast<double>(bits(seed, stream, index) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on draws 2*index and 2*index + 1.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const double u1 = uniform(seed, stream, 2 * index);
    const double u2 = uniform(seed, stream, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Seed of realisation k derived from a sweep seed.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t k) { return mix(seed ^ mix(k + 0x51ed27ULL)); }

inline constexpr std::uint64_t kCoefficientStream = 1;
inline constexpr std::uint64_t kCenterStream = 2;
inline constexpr std::uint64_t kSampleStream = 3;

}  // namespace rng

/// f = sum_i xi_i Phi(., y_i) with xi_i ~ N(0, variance) and y_i ~ U(Gamma^d).
struct TestFunction {
    SeparableKernel kernel;
    std::vector<std::vector<double>> centers;
    std::vector<double> coeffs;
    std::uint64_t seed = 0;

    std::size_t dimension() const noexcept { return kernel.dimension(); }

    double operator()(std::span<const double> x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * eval_separable(kernel, x, centers[i]);
        return s;
    }

    double operator()(const GridNode& node) const { return (*this)(to_values(node)); }
};

inline constexpr int kDefaultTerms = 20;
inline constexpr double kDefaultCoefficientVariance = 5.0;

/// Target with per-dimension regularity nu and lengthscale 2^p.
inline TestFunction make_test_function(const std::vector<double>& nu, const std::vector<int>& p, std::uint64_t seed,
                                       int n_terms = kDefaultTerms,
                                       double coefficient_variance = kDefaultCoefficientVariance) {
    if (nu.size() != p.size()) throw ShapeError("nu and p differ in length");
    if (n_terms < 1) throw ParameterError("a test function needs at least one term");
    if (!(coefficient_variance > 0.0)) throw ParameterError("coefficient variance must be positive");
    TestFunction f;
    f.seed = seed;
    for (std::size_t j = 0; j < nu.size(); ++j) {
        if (p[j] < 0) throw ParameterError("penalties must be nonnegative");
        f.kernel.dims.push_back({nu[j], std::ldexp(1.0, p[j]), 1.0});
        f.kernel.dims.back().validate();
    }
    const double sd = std::sqrt(coefficient_variance);
    const auto d = nu.size();
    for (int i = 0; i < n_terms; ++i) {
        f.coeffs.push_back(sd * rng::normal(seed, rng::kCoefficientStream, static_cast<std::uint64_t>(i)));
        std::vector<double> y(d);
        for (std::size_t j = 0; j < d; ++j)
            y[j] = rng::uniform(seed, rng::kCenterStream, static_cast<std::uint64_t>(i) * d + j) - 0.5;
        f.centers.push_back(std::move(y));
    }
    return f;
}

/// n uniform points in Gamma^d, a pure function of the seed.
inline std::vector<std::vector<double>> monte_carlo_points(std::size_t d, int n, std::uint64_t seed) {
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(n), std::vector<double>(d));
    for (std::size_t k = 0; k < pts.size(); ++k)
        for (std::size_t j = 0; j < d; ++j) pts[k][j] = rng::uniform(seed, rng::kSampleStream, k * d + j) - 0.5;
    return pts;
}

/// sqrt(sum (f - s)^2) / sqrt(sum f^2) over the given points; `approx` is any
/// callable taking a span of coordinates.
template <class Target, class Approx>
double relative_l2_error(const Target& f, const Approx& approx, const std::vector<std::vector<double>>& points) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& x : points) {
        const double fx = f(std::span<const double>(x));
        const double diff = fx - approx(std::span<const double>(x));
        num += diff * diff;
        den += fx * fx;
    }
    if (!(den > 0.0)) throw DomainError("degenerate target: zero L2 norm on the Monte Carlo sample");
    return std::sqrt(num) / std::sqrt(den);
}

inline double relative_l2_error(const TestFunction& f, const SparseInterpolant& s, int n_samples, std::uint64_t seed) {
    if (s.spec().dimension() != f.dimension()) throw ShapeError("target and interpolant dimensions differ");
    const auto pts = monte_carlo_points(f.dimension(), n_samples, seed);
    return relative_l2_error(f, [&](std::span<const double> x) { return s.evaluate(x); }, pts);
}

enum class Termination { Completed, MaxN, PDFailure };

inline std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "COMPLETED";
        case Termination::MaxN: return "MAX_N";
        case Termination::PDFailure: return "PD_FAILURE";
    }
    return "?";
}

inline Termination parse_termination(std::string_view s) {
    if (s == "COMPLETED") return Termination::Completed;
    if (s == "MAX_N") return Termination::MaxN;
    if (s == "PD_FAILURE") return Termination::PDFailure;
    throw ParameterError("unknown termination '" + std::string(s) + "'");
}

struct ExperimentRecord {
    int level = 0;
    std::size_t nodes = 0;
    double error = 0.0;  ///< mean relative L2 error over realisations
    Termination termination = Termination::Completed;  ///< set on the last record when the sweep stopped early
};

struct SweepConfig {
    Family family = Family::DASG;
    std::vector<double> nu;        ///< regularity of target and interpolant kernel
    std::vector<int> p;            ///< target lengthscale exponents (lambda = 2^p)
    std::vector<double> omega;     ///< weights for ASG / DASG
    std::vector<int> r;            ///< DASG tuning, grid penalty = max(p - r, 0)
    int realisations = 3;
    std::uint64_t seed = 1;
    std::size_t max_nodes = 10000;
    int mc_samples = 100;
    int n_terms = kDefaultTerms;
    double coefficient_variance = kDefaultCoefficientVariance;
    int max_level = 200;
    int threads = 1;

    std::size_t dimension() const noexcept { return nu.size(); }

    void validate() const {
        const auto d = dimension();
        if (d == 0) throw ParameterError("sweep dimension must be at least 1");
        if (p.size() != d) throw ShapeError("p must have length d");
        if (!omega.empty() && omega.size() != d) throw ShapeError("omega must have length d");
        if (!r.empty() && r.size() != d) throw ShapeError("r must have length d");
        if (realisations < 1) throw ParameterError("realisations must be positive");
        if (mc_samples < 1) throw ParameterError("mc_samples must be positive");
        if (max_nodes < 1) throw ParameterError("max_nodes must be positive");
    }

    /// Grid for this family at `level`: ISG/ASG use unit lengthscales and no
    /// penalty, LISG/DASG use lambda = 2^p, DASG additionally applies r and omega.
    GridSpec grid_spec(int level) const {
        const auto d = dimension();
        const std::vector<double> ones(d, 1.0);
        const std::vector<double> w = omega.empty() ? ones : omega;
        const std::vector<int> zeros(d, 0);
        switch (family) {
            case Family::ISG: return GridSpec::make(family, nu, zeros, ones, zeros, level);
            case Family::ASG: return GridSpec::make(family, nu, zeros, w, zeros, level);
            case Family::LISG: return GridSpec::make(family, nu, p, ones, zeros, level);
            case Family::DASG: return GridSpec::make(family, nu, p, w, r.empty() ? zeros : r, level);
        }
        throw ParameterError("unknown family");
    }

    KeyValues to_keys() const {
        return {
            {"family", std::string(to_string(family))},
            {"nu", join_doubles(nu)},
            {"p", join_ints(p)},
            {"omega", omega.empty() ? join_doubles(std::vector<double>(dimension(), 1.0)) : join_doubles(omega)},
            {"r", r.empty() ? join_ints(std::vector<int>(dimension(), 0)) : join_ints(r)},
            {"realisations", std::to_string(realisations)},
            {"seed", std::to_string(seed)},
            {"max_nodes", std::to_string(max_nodes)},
            {"mc_samples", std::to_string(mc_samples)},
            {"n_terms", std::to_string(n_terms)},
            {"coefficient_variance", format_double(coefficient_variance)},
            {"max_level", std::to_string(max_level)},
        };
    }

    static SweepConfig from_keys(const KeyValues& kv) {
        SweepConfig c;
        c.family = parse_family(require_key(kv, "family"));
        c.nu = parse_double_list(require_key(kv, "nu"));
        c.p = parse_int_list(require_key(kv, "p"));
        c.omega = parse_double_list(require_key(kv, "omega"));
        c.r = parse_int_list(require_key(kv, "r"));
        c.realisations = parse_int(require_key(kv, "realisations"));
        c.seed = std::stoull(require_key(kv, "seed"));
        c.max_nodes = std::stoull(require_key(kv, "max_nodes"));
        c.mc_samples = parse_int(require_key(kv, "mc_samples"));
        c.n_terms = parse_int(require_key(kv, "n_terms"));
        c.coefficient_variance = parse_double(require_key(kv, "coefficient_variance"));
        c.max_level = parse_int(require_key(kv, "max_level"));
        c.validate();
        return c;
    }

    bool operator==(const SweepConfig&) const = default;
};

struct SweepResult {
    std::vector<ExperimentRecord> records;
    Termination termination = Termination::Completed;
    int stop_level = -1;           ///< level that triggered the stop (-1 when completed)
    std::size_t stop_nodes = 0;    ///< node count at that level
    std::string message;           ///< PDFailure detail, if any
};

namespace detail {

template <class Job>
void run_indexed(int count, int threads, Job&& job) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) job(i);
        return;
    }
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) job(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Levels 0, 1, 2, ... until N exceeds the cap or a Gram matrix loses positive
/// definiteness. Levels whose node count did not change are skipped.
inline SweepResult level_sweep(const SweepConfig& config) {
    config.validate();
    const auto d = config.dimension();
    std::vector<TestFunction> targets;
    for (int k = 0; k < config.realisations; ++k)
        targets.push_back(make_test_function(config.nu, config.p, rng::derive(config.seed, static_cast<std::uint64_t>(k)),
                                             config.n_terms, config.coefficient_variance));
    const auto points = monte_carlo_points(d, config.mc_samples, rng::derive(config.seed, ~std::uint64_t{0}));

    SweepResult result;
    std::size_t previous_n = 0;
    for (int level = 0; level <= config.max_level; ++level) {
        const auto spec = config.grid_spec(level);
        const auto n = sparse_grid_nodes(spec).size();
        if (n > config.max_nodes) {
            result.termination = Termination::MaxN;
            result.stop_level = level;
            result.stop_nodes = n;
            break;
        }
        if (n == previous_n) continue;

        std::vector<double> errors(targets.size());
        try {
            detail::run_indexed(static_cast<int>(targets.size()), config.threads, [&](int k) {
                const auto& f = targets[static_cast<std::size_t>(k)];
                const auto s = assemble(spec, f);
                errors[static_cast<std::size_t>(k)] =
                    relative_l2_error(f, [&](std::span<const double> x) { return s.evaluate(x); }, points);
            });
        } catch (const PDFailure& e) {
            result.termination = Termination::PDFailure;
            result.stop_level = level;
            result.stop_nodes = n;
            result.message = e.what();
            break;
        }
        double mean = 0.0;
        for (double e : errors) mean += e;
        mean /= static_cast<double>(errors.size());
        result.records.push_back({level, n, mean, Termination::Completed});
        previous_n = n;
    }
    if (!result.records.empty()) result.records.back().termination = result.termination;
    return result;
}

/// Data file: "# key=value" configuration echo, one "error N" line per record,
/// then "# termination=..." trailer lines.
inline void write_sweep(std::ostream& out, const SweepConfig& config, const SweepResult& result) {
    write_echo(out, config.to_keys());
    out << "# columns=error N\n";
    for (const auto& rec : result.records) out << format_double(rec.error) << ' ' << rec.nodes << '\n';
    out << "# levels=" << join(result.records, [](const ExperimentRecord& r) { return std::to_string(r.level); }) << '\n';
    out << "# termination=" << to_string(result.termination) << '\n';
    if (result.stop_level >= 0) {
        out << "# stop_level=" << result.stop_level << '\n';
        out << "# stop_nodes=" << result.stop_nodes << '\n';
    }
}

struct SweepFile {
    SweepConfig config;
    SweepResult result;
};

inline SweepFile read_sweep(std::istream& in) {
    KeyValues kv;
    SweepFile file;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty() || parse_echo_line(line, kv)) continue;
        const auto fields = split_whitespace(line);
        if (fields.size() != 2) throw ParameterError("malformed data line: " + line);
        ExperimentRecord rec;
        rec.error = parse_double(fields[0]);
        rec.nodes = std::stoull(std::string(fields[1]));
        file.result.records.push_back(rec);
    }
    file.config = SweepConfig::from_keys(kv);
    file.result.termination = parse_termination(require_key(kv, "termination"));
    if (const auto it = kv.find("levels"); it != kv.end() && !it->second.empty()) {
        const auto levels = parse_int_list(it->second);
        if (levels.size() != file.result.records.size()) throw ParameterError("levels echo does not match records");
        for (std::size_t i = 0; i < levels.size(); ++i) file.result.records[i].level = levels[i];
    }
    if (const auto it = kv.find("stop_level"); it != kv.end()) file.result.stop_level = parse_int(it->second);
    if (const auto it = kv.find("stop_nodes"); it != kv.end()) file.result.stop_nodes = std::stoull(it->second);
    if (!file.result.records.empty()) file.result.records.back().termination = file.result.termination;
    return file;
}

}  // namespace dasg
