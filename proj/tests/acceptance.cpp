// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dasg/config.hpp"
#include "dasg/dasg.hpp"
#include "oracles.hpp"

namespace {

using dasg::Family;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    return ok;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// max_i |a_i - b_i| / max_i |b_i|
struct RelMax {
    double diff = 0.0;
    double scale = 0.0;
    void add(double a, double b) {
        diff = std::max(diff, std::abs(a - b));
        scale = std::max(scale, std::abs(b));
    }
    double value() const { return scale > 0.0 ? diff / scale : diff; }
};

struct SweepStats {
    int configs = 0;
    int fits = 0;
    int dense_skipped = 0;  // dense Gram not PD in double precision
    double oracle = 0.0;
    double telescoping = 0.0;
    double interpolation = 0.0;
    double seconds = 0.0;
};

// Families x d in {1,2,3} x L in {0..5} x omega in {(1,..), (2,1,..)}, with
// 5 draws of per-dimension nu from {1/2,3/2,5/2} and p from {0,1,2} per cell;
// 5 targets each.
SweepStats oracle_sweep() {
    const auto t0 = Clock::now();
    SweepStats st;
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> nu_pick(0, 2), p_pick(0, 2);
    const double nus[] = {0.5, 1.5, 2.5};
    for (const auto family : {Family::ISG, Family::ASG, Family::LISG, Family::DASG}) {
        for (std::size_t d = 1; d <= 3; ++d) {
            for (int L = 0; L <= 5; ++L) {
                for (int cell = 0; cell < 10; ++cell) {
                    const int w = cell % 2;
                    std::vector<double> nu(d), omega(d, 1.0);
                    std::vector<int> p(d);
                    for (auto& v : nu) v = nus[nu_pick(gen)];
                    for (auto& v : p) v = p_pick(gen);
                    if (w == 1) omega[0] = 2.0;
                    const bool weighted = family == Family::ASG || family == Family::DASG;
                    const bool penalised = family == Family::LISG || family == Family::DASG;
                    if (w == 1 && !weighted) continue;  // same grid as w == 0
                    const auto spec = dasg::GridSpec::make(family, nu, penalised ? p : std::vector<int>(d, 0),
                                                           weighted ? omega : std::vector<double>(d, 1.0), {}, L);
                    ++st.configs;
                    const auto nodes = dasg::sparse_grid_nodes(spec);
                    for (int k = 0; k < 5; ++k) {
                        const auto f = dasg::make_test_function(nu, p, gen());
                        const auto points = dasg::monte_carlo_points(d, 100, gen());
                        const auto fast = dasg::assemble(spec, f);
                        const auto slow = dasg::assemble_telescoping(spec, f);
                        ++st.fits;
                        RelMax tele, interp;
                        for (const auto& x : points) tele.add(fast.evaluate(x), slow.evaluate(x));
                        for (const auto& n : nodes) interp.add(fast.evaluate(n), f(n));
                        st.telescoping = std::max(st.telescoping, tele.value());
                        st.interpolation = std::max(st.interpolation, interp.value());
                        try {
                            const auto dense = dasg::dense_fit(spec, f);
                            RelMax orc;
                            for (const auto& x : points) orc.add(fast.evaluate(x), dasg::dense_evaluate(dense, x));
                            st.oracle = std::max(st.oracle, orc.value());
                        } catch (const dasg::PDFailure&) {
                            ++st.dense_skipped;
                        }
                    }
                }
            }
        }
    }
    st.seconds = seconds_since(t0);
    return st;
}

bool smolyak_identity() {
    for (int d = 1; d <= 4; ++d)
        for (int L = 0; L <= 8; ++L) {
            const auto spec = dasg::GridSpec::make(Family::ISG, std::vector<double>(d, 1.5), std::vector<int>(d, 0),
                                                   std::vector<double>(d, 1.0), {}, L);
            for (const auto& ell : dasg::index_set(spec))
                if (dasg::combination_coefficient(spec, ell) != oracle::smolyak_coefficient(d, L, ell.l1()))
                    return false;
        }
    return true;
}

bool criterion4(std::string& detail) {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> cd(0.5, 3.0), wd(0.5, 3.0);
    std::uniform_int_distribution<int> dd(1, 3), ld(1, 10);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = static_cast<std::size_t>(dd(gen));
        std::vector<double> c(d), w(d);
        for (auto& v : c) v = cd(gen);
        for (auto& v : w) v = wd(gen);
        const int L = ld(gen);
        const double ref = oracle::complement_enumeration(c, w, L);
        worst = std::max(worst, std::abs(dasg::epsilon_aniso(c, w, L) - ref) / ref);
    }

    // monotonicity in L and each p_j, L <= 12; weights >= 1
    std::uniform_real_distribution<double> w1(1.0, 3.0);
    std::uniform_int_distribution<int> pd(0, 3);
    int violations = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = static_cast<std::size_t>(dd(gen));
        dasg::BoundParams b;
        b.alpha.assign(d, 0.5);
        const double c_iso = cd(gen);
        for (std::size_t j = 0; j < d; ++j) {
            b.nu.push_back(cd(gen) + 0.5);
            b.omega.push_back(w1(gen));
            b.p.push_back(pd(gen));
        }
        dasg::BoundParams iso = b;
        iso.nu.assign(d, c_iso + 0.5);
        iso.omega.assign(d, 1.0);
        double prev = INFINITY, prev_iso = INFINITY;
        for (int L = 0; L <= 12; ++L) {
            b.level = iso.level = L;
            const double v = dasg::dasg_bound(b).value, vi = dasg::lisg_bound(iso).value;
            if (v > prev * (1 + 1e-14) || vi > prev_iso * (1 + 1e-14)) ++violations;
            prev = v;
            prev_iso = vi;
            for (std::size_t j = 0; j < d; ++j) {
                auto bj = b, ij = iso;
                ++bj.p[j];
                ++ij.p[j];
                if (dasg::dasg_bound(bj).value > v * (1 + 1e-14)) ++violations;
                if (dasg::lisg_bound(ij).value > vi * (1 + 1e-14)) ++violations;
            }
        }
    }
    detail = "max rel epsilon error " + fmt("%.2e", worst) + " (<= 1e-12), monotonicity violations " +
             std::to_string(violations);
    return worst <= 1e-12 && violations == 0;
}

dasg::SweepConfig fig4_config(Family family) {
    dasg::SweepConfig c;
    c.family = family;
    c.nu = {1.5, 1.5, 2.5, 2.5};
    c.p = {0, 1, 2, 3};
    c.omega = dasg::weights_from_alpha(c.nu, {0.5, 0.5, 0.5, 0.5});
    c.r = {0, 0, 2, 2};
    c.realisations = 3;
    c.max_nodes = 10000;
    c.mc_samples = 100;
    c.threads = 1;
    return c;
}

// Error at node count n by log-log interpolation between bracketing records.
double error_at(const std::vector<dasg::ExperimentRecord>& recs, double n) {
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const double ni = static_cast<double>(recs[i].nodes);
        if (ni == n) return recs[i].error;
        if (ni > n && i > 0) {
            const double n0 = std::log(static_cast<double>(recs[i - 1].nodes)), n1 = std::log(ni);
            const double t = (std::log(n) - n0) / (n1 - n0);
            return std::exp((1 - t) * std::log(recs[i - 1].error) + t * std::log(recs[i].error));
        }
    }
    return recs.back().error;
}

std::string run_fig4(const std::filesystem::path& dir, std::vector<dasg::SweepResult>& results) {
    std::filesystem::create_directories(dir);
    std::string all;
    results.clear();
    for (const auto family : {Family::ISG, Family::ASG, Family::LISG, Family::DASG}) {
        const auto cfg = fig4_config(family);
        results.push_back(dasg::level_sweep(cfg));
        const auto path = dir / ("L2_error_" + std::string(dasg::to_string(family)) + ".txt");
        {
            std::ofstream out(path);
            dasg::write_sweep(out, cfg, results.back());
        }
        std::ifstream in(path, std::ios::binary);
        all.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return all;
}

bool criterion5(const std::vector<dasg::SweepResult>& res, double seconds, std::string& detail) {
    // (a) compare at N* = the smallest of the families' largest N
    double n_star = INFINITY;
    for (const auto& r : res) {
        if (r.records.empty()) {
            detail = "a family produced no records";
            return false;
        }
        n_star = std::min(n_star, static_cast<double>(r.records.back().nodes));
    }
    std::vector<double> e;
    for (const auto& r : res) e.push_back(error_at(r.records, n_star));
    const double worst_aniso = std::max(e[2], e[3]);
    const double best_iso = std::min(e[0], e[1]);
    const bool a = best_iso >= 10.0 * worst_aniso;

    // (b) every record within 2x of the best error seen so far
    bool b = true;
    for (const auto& r : res) {
        double best = INFINITY;
        for (const auto& rec : r.records) {
            if (rec.error > 2.0 * best) b = false;
            best = std::min(best, rec.error);
        }
    }

    // (c) DASG never uses more nodes than LISG at a level both build within the cap
    bool c = true;
    int common = 0;
    const auto lisg = fig4_config(Family::LISG), dasg_cfg = fig4_config(Family::DASG);
    for (int L = 0; L <= 60; ++L) {
        const auto nl = dasg::sparse_grid_nodes(lisg.grid_spec(L)).size();
        const auto nd = dasg::sparse_grid_nodes(dasg_cfg.grid_spec(L)).size();
        if (nl > lisg.max_nodes || nd > dasg_cfg.max_nodes) break;
        ++common;
        if (nd > nl) c = false;
    }

    detail = "N*=" + fmt("%.0f", n_star) + " errors ISG " + fmt("%.2e", e[0]) + " ASG " + fmt("%.2e", e[1]) +
             " LISG " + fmt("%.2e", e[2]) + " DASG " + fmt("%.2e", e[3]) + " ratio " +
             fmt("%.1f", best_iso / worst_aniso) + (a ? " (a ok)" : " (a FAIL)") + (b ? " (b ok)" : " (b FAIL)") +
             (c ? " (c ok, " : " (c FAIL, ") + std::to_string(common) + " levels) " + fmt("%.1fs", seconds);
    return a && b && c && seconds < 600.0;
}

bool criterion6(std::string& detail) {
    dasg::SweepConfig c;
    c.family = Family::LISG;
    c.nu = {2.5};
    c.p = {5};
    c.max_nodes = 1000000;
    c.max_level = 14;
    try {
        const auto r = dasg::level_sweep(c);
        std::ostringstream out;
        dasg::write_sweep(out, c, r);
        const bool ok = r.termination == dasg::Termination::PDFailure && r.stop_level <= 14 && !r.records.empty() &&
                        r.records.back().termination == dasg::Termination::PDFailure &&
                        out.str().find("# termination=PD_FAILURE") != std::string::npos;
        detail = "PD failure at L=" + std::to_string(r.stop_level) + " (N=" + std::to_string(r.stop_nodes) + "), " +
                 std::to_string(r.records.size()) + " records kept";
        return ok;
    } catch (const std::exception& e) {
        detail = std::string("sweep threw: ") + e.what();
        return false;
    }
}

}  // namespace

int main() {
    bool all = true;

    const auto sweep = oracle_sweep();
    const std::string counts = std::to_string(sweep.configs) + " configs, " + std::to_string(sweep.fits) + " fits";
    all &= report(1, sweep.oracle <= 1e-8 && sweep.seconds < 120.0 && sweep.dense_skipped < sweep.fits,
                  "max rel deviation from dense oracle " + fmt("%.2e", sweep.oracle) + " (<= 1e-8), " + counts +
                      ", dense non-PD skipped " + std::to_string(sweep.dense_skipped) + ", " +
                      fmt("%.1fs", sweep.seconds) + " (< 120s)");
    const bool smolyak = smolyak_identity();
    all &= report(2, sweep.telescoping <= 1e-10 && smolyak,
                  "max rel fast vs telescoping " + fmt("%.2e", sweep.telescoping) + " (<= 1e-10), Smolyak identity " +
                      (smolyak ? "exact" : "MISMATCH"));
    all &= report(3, sweep.interpolation <= 1e-8,
                  "max rel residual at nodes " + fmt("%.2e", sweep.interpolation) + " (<= 1e-8)");

    std::string d4;
    all &= report(4, criterion4(d4), d4);

    const auto work = std::filesystem::temp_directory_path() / "dasg_acceptance";
    std::filesystem::remove_all(work);
    std::vector<dasg::SweepResult> first, second;
    auto t0 = Clock::now();
    const auto bytes_a = run_fig4(work / "run_a", first);
    const double secs = seconds_since(t0);
    std::string d5;
    all &= report(5, criterion5(first, secs, d5), d5);

    std::string d6;
    all &= report(6, criterion6(d6), d6);

    const auto bytes_b = run_fig4(work / "run_b", second);
    all &= report(7, !bytes_a.empty() && bytes_a == bytes_b,
                  "two serial runs: " + std::to_string(bytes_a.size()) + " bytes, " +
                      (bytes_a == bytes_b ? "identical" : "DIFFERENT"));

    std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
    return all ? 0 : 1;
}
