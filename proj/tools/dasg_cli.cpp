// Command-line front end: grid-info, sweep, bound, fit, eval.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "dasg/config.hpp"
#include "dasg/dasg.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNoRecords = 3;
constexpr int kExitIo = 4;

struct Options {
    std::string config_path;
    std::map<std::string, std::string> flags;
};

// Registers "--name" as an override for config key `key`.
void add_key(CLI::App* app, Options& opts, const std::string& name, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        "--" + name, [&opts, key](const std::string& v) { opts.flags[key] = v; }, help);
}

void add_common(CLI::App* app, Options& opts) {
    app->add_option("--config", opts.config_path, "key=value configuration file (flags override it)");
    add_key(app, opts, "d", "d", "dimension (defaults to the length of --nu)");
    add_key(app, opts, "nu", "nu", "per-dimension regularity, e.g. 3/2*2,5/2*2");
    add_key(app, opts, "p", "p", "per-dimension lengthscale exponents (lambda = 2^p)");
    add_key(app, opts, "omega", "omega", "per-dimension weights");
    add_key(app, opts, "alpha", "alpha", "target smoothness used for omega = nu - alpha + 1 (default 1/2)");
}

dasg::RunConfig load(const Options& opts) {
    dasg::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = dasg::RunConfig::from_file(opts.config_path);
    for (const auto& [k, v] : opts.flags) cfg.set(k, v);
    return cfg;
}

int cmd_grid_info(const dasg::RunConfig& cfg, bool print_nodes) {
    const auto spec = dasg::grid_spec_from(cfg);
    const auto nodes = dasg::sparse_grid_nodes(spec);
    const auto w = dasg::active_set_W(spec);
    std::size_t nonzero = 0;
    for (const auto& ell : w)
        if (dasg::combination_coefficient(spec, ell) != 0) ++nonzero;
    std::cout << "N=" << nodes.size() << '\n'
              << "index_set_size=" << dasg::index_set(spec).size() << '\n'
              << "active_set_size=" << w.size() << '\n'
              << "nonzero_coefficients=" << nonzero << '\n';
    if (print_nodes)
        for (const auto& n : nodes) std::cout << dasg::to_string(n) << '\n';
    return 0;
}

int cmd_sweep(const dasg::RunConfig& cfg, const std::string& out_dir) {
    std::vector<dasg::Family> families;
    for (const auto& f : dasg::expand_list(cfg.get_string("families", "ISG,ASG,LISG,DASG")))
        families.push_back(dasg::parse_family(f));
    const auto prefix = cfg.get_string("prefix", "L2_error");
    std::filesystem::create_directories(out_dir);
    bool all_recorded = true;
    for (const auto family : families) {
        const auto config = dasg::sweep_config_from(cfg, family);
        const auto result = dasg::level_sweep(config);
        const auto path = std::filesystem::path(out_dir) / (prefix + "_" + std::string(dasg::to_string(family)) + ".txt");
        std::ofstream out(path);
        if (!out) throw std::ios_base::failure("cannot write '" + path.string() + "'");
        dasg::write_sweep(out, config, result);
        if (!out) throw std::ios_base::failure("write failed for '" + path.string() + "'");
        std::cerr << dasg::to_string(family) << ": " << result.records.size() << " records, "
                  << dasg::to_string(result.termination) << " -> " << path.string() << '\n';
        if (result.records.empty()) {
            std::cerr << dasg::to_string(family) << ": no level could be built"
                      << (result.message.empty() ? "" : ": " + result.message) << '\n';
            all_recorded = false;
        }
    }
    return all_recorded ? 0 : kExitNoRecords;
}

int cmd_bound(const dasg::RunConfig& cfg) {
    const auto [lo, hi] = cfg.get_range("levels", {0, 10});
    const auto kind = cfg.get_string("bound", "dasg");
    if (kind != "dasg" && kind != "lisg") throw dasg::ParameterError("bound must be 'dasg' or 'lisg'");
    auto params = dasg::bound_params_from(cfg);
    for (int level = lo; level <= hi; ++level) {
        params.level = level;
        const auto v = kind == "dasg" ? dasg::dasg_bound(params) : dasg::lisg_bound(params);
        std::cout << level << ' ' << dasg::format_double(v.value) << '\n';
    }
    return 0;
}

// Sample file: one node per line, "n1/2^k1 ... nd/2^kd value".
std::map<dasg::GridNode, double> read_samples(std::istream& in) {
    std::map<dasg::GridNode, double> samples;
    std::string line;
    while (std::getline(in, line)) {
        const auto body = dasg::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto fields = dasg::split_whitespace(body);
        if (fields.size() < 2) throw dasg::ParameterError("malformed sample line: " + line);
        dasg::GridNode node;
        for (std::size_t j = 0; j + 1 < fields.size(); ++j) node.push_back(dasg::DyadicPoint::parse(fields[j]));
        samples[node] = dasg::parse_double(fields.back());
    }
    return samples;
}

int cmd_fit(const dasg::RunConfig& cfg, const std::string& samples_path, const std::string& out_path) {
    const auto spec = dasg::grid_spec_from(cfg);
    std::ifstream in(samples_path);
    if (!in) throw std::ios_base::failure("cannot open samples file '" + samples_path + "'");
    const auto samples = read_samples(in);
    const auto interp = dasg::assemble(spec, [&](const dasg::GridNode& node) {
        const auto it = samples.find(node);
        if (it == samples.end()) throw dasg::DomainError("no sample for node " + dasg::to_string(node));
        return it->second;
    });
    if (out_path.empty() || out_path == "-") {
        dasg::write_interpolant(std::cout, interp);
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) throw std::ios_base::failure("cannot write '" + out_path + "'");
    dasg::write_interpolant(out, interp);
    return 0;
}

int cmd_eval(const std::string& interp_path) {
    std::ifstream in(interp_path);
    if (!in) throw std::ios_base::failure("cannot open interpolant file '" + interp_path + "'");
    const auto interp = dasg::read_interpolant(in);
    std::string line;
    while (std::getline(std::cin, line)) {
        const auto body = dasg::trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<double> x;
        for (auto f : dasg::split_whitespace(body)) x.push_back(dasg::parse_scalar(f));
        std::cout << dasg::format_double(interp.evaluate(x)) << '\n';
    }
    return 0;
}

int default_threads() {
    if (const char* env = std::getenv("DASG_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matérn-kernel sparse-grid interpolation (ISG, ASG, LISG, DASG)"};
    app.require_subcommand(1);

    Options opts;

    auto* grid = app.add_subcommand("grid-info", "node count, index-set sizes and optional node list");
    add_common(grid, opts);
    add_key(grid, opts, "family", "family", "ISG, ASG, LISG or DASG");
    add_key(grid, opts, "level", "level", "sparse-grid level L");
    add_key(grid, opts, "r", "r", "tuning vector, grid penalty = max(p - r, 0)");
    bool print_nodes = false;
    grid->add_flag("--nodes", print_nodes, "print every node as exact fractions n/2^k");

    auto* sweep = app.add_subcommand("sweep", "level sweeps writing one 'error N' data file per family");
    add_common(sweep, opts);
    add_key(sweep, opts, "families", "families", "comma list of families (default all four)");
    add_key(sweep, opts, "r", "r", "DASG tuning vector");
    add_key(sweep, opts, "seed", "seed", "sweep seed");
    add_key(sweep, opts, "realisations", "realisations", "target realisations per level");
    add_key(sweep, opts, "mc-samples", "mc_samples", "Monte Carlo samples per error");
    add_key(sweep, opts, "max-nodes", "max_nodes", "stop once N exceeds this");
    add_key(sweep, opts, "prefix", "prefix", "data file name prefix");
    add_key(sweep, opts, "coefficient-variance", "coefficient_variance", "variance of the target coefficients (default 5)");
    add_key(sweep, opts, "threads", "threads", "worker threads (default $DASG_THREADS or all cores)");
    bool full_scale = false;
    sweep->add_flag("--full-scale", full_scale, "N cap 1e5 and 10 realisations");
    std::string out_dir = ".";
    sweep->add_option("--out", out_dir, "output directory");

    auto* bound = app.add_subcommand("bound", "print 'L value' lines of an error bound");
    add_common(bound, opts);
    add_key(bound, opts, "bound", "bound", "dasg or lisg");
    add_key(bound, opts, "levels", "levels", "level range a..b (default 0..10)");
    add_key(bound, opts, "c-lemma", "c_lemma", "overall constant, or 'gamma' for the Gamma-function product");
    add_key(bound, opts, "c-w", "c_w", "per-dimension constants");
    add_key(bound, opts, "zero-level", "zero_level", "clamp (default) or vanish for shifted levels <= 0");

    auto* fit = app.add_subcommand("fit", "assemble an interpolant from sampled node values");
    add_common(fit, opts);
    add_key(fit, opts, "family", "family", "ISG, ASG, LISG or DASG");
    add_key(fit, opts, "level", "level", "sparse-grid level L");
    add_key(fit, opts, "r", "r", "tuning vector");
    add_key(fit, opts, "sigma", "sigma", "per-dimension kernel scale");
    std::string samples_path;
    fit->add_option("--samples", samples_path, "lines 'n1/2^k1 ... nd/2^kd value'")->required();
    std::string fit_out;
    fit->add_option("--out", fit_out, "interpolant file (default stdout)");

    auto* eval = app.add_subcommand("eval", "evaluate a stored interpolant at points read from stdin");
    std::string interp_path;
    eval->add_option("--interpolant", interp_path, "file written by fit")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        auto cfg = load(opts);
        if (grid->parsed()) return cmd_grid_info(cfg, print_nodes);
        if (sweep->parsed()) {
            if (full_scale) cfg.set("full_scale", "true");
            if (!cfg.has("threads")) cfg.set("threads", std::to_string(default_threads()));
            return cmd_sweep(cfg, out_dir);
        }
        if (bound->parsed()) return cmd_bound(cfg);
        if (fit->parsed()) return cmd_fit(cfg, samples_path, fit_out);
        if (eval->parsed()) return cmd_eval(interp_path);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const dasg::PDFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoRecords;
    } catch (const dasg::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
