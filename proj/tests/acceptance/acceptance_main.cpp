// Acceptance gates: the checks a build must clear before release, one
// verdict line each. Everything is pinned here -- seeds, sizes,
// thresholds -- so a run is reproducible and a regression is a diff.
// Gates mix exact identities (bit-level), closed-form targets hit by
// quadrature, and Monte Carlo estimates at fixed seeds whose tolerances
// were sized to the estimator noise. Exit status: 0 only if every gate
// passes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sstream>
#include <vector>

#include "rwrs/brownian.hpp"
#include "rwrs/config.hpp"
#include "rwrs/couple.hpp"
#include "rwrs/dist.hpp"
#include "rwrs/embed.hpp"
#include "rwrs/experiments.hpp"
#include "rwrs/io.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/stats.hpp"
#include "rwrs/varsolve.hpp"
#include "rwrs/walk.hpp"

#include "oracles.hpp"

namespace {

using namespace rwrs;

std::string num(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

struct Verdict {
    int checks = 0;
    int failures = 0;

    void gate(bool ok, const std::string& label, const std::string& detail) {
        ++checks;
        if (!ok) ++failures;
        std::printf("[%s] %s  (%s)\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
        std::fflush(stdout);
    }

    static void info(const std::string& label, const std::string& detail) {
        std::printf("[info] %s  (%s)\n", label.c_str(), detail.c_str());
        std::fflush(stdout);
    }
};

// ---- 1: variational constants ----------------------------------------

double variational_gates(Verdict& v) {
    const VarGrid g = VarGrid::make(5.0, 0.005);
    const VarSolution sol = solve_variational(g, gaussian_bump_init(g));
    const double zeta = zeta_from_objective(sol.objective);
    const double c0 = c0_from_zeta(zeta);
    const double c0_target = std::pow(2.0, 1.25) / 3.0;
    const double dist = sup_distance_to_closed_form(g, recenter(g, sol.phi));
    v.gate(std::abs(sol.objective - 2.0 / 3.0) <= 1e-3, "1a solver objective = 2/3 +- 1e-3",
           "F " + num(sol.objective) + ", " + std::to_string(sol.iterations) + " iterations" +
               (sol.converged ? "" : ", NOT converged"));
    v.gate(std::abs(zeta - 1.5) <= 3e-3, "1b tail rate zeta = 3/2 +- 3e-3", "zeta " + num(zeta));
    v.gate(std::abs(c0 - c0_target) <= 2e-3, "1c growth constant c0 = 2^{5/4}/3 +- 2e-3",
           "c0 " + num(c0) + " vs " + num(c0_target));
    v.gate(sol.el_residual_sup <= 1e-3, "1d stationarity 4 phi^3 + phi''/2 = 2 phi, sup <= 1e-3",
           "sup residual " + num(sol.el_residual_sup) + ", multiplier " + num(sol.multiplier));
    v.gate(dist <= 1e-2, "1e recentered profile within 1e-2 of 1/cosh(2x)",
           "sup distance " + num(dist));
    return zeta;
}

// ---- 2: closed-form profile integrals by independent quadrature ------

void quadrature_gates(Verdict& v) {
    const auto sq = [](double x) {
        const double c = std::cosh(2.0 * x);
        return 1.0 / (c * c);
    };
    const auto qt = [](double x) {
        const double c = std::cosh(2.0 * x);
        return 1.0 / (c * c * c * c);
    };
    const auto dsq = [](double x) {
        const double d = -2.0 * std::tanh(2.0 * x) / std::cosh(2.0 * x);
        return d * d;
    };
    // default grid geometry: [-5, 5] in steps of 0.005
    const double i2 = oracle::simpson(sq, -5.0, 5.0, 2000);
    const double i4 = oracle::simpson(qt, -5.0, 5.0, 2000);
    const double id = oracle::simpson(dsq, -5.0, 5.0, 2000);
    v.gate(std::abs(i2 - 1.0) <= 1e-6, "2a int sech^2(2x) dx = 1 +- 1e-6", "value " + num(i2));
    v.gate(std::abs(i4 - 2.0 / 3.0) <= 1e-6, "2b int sech^4(2x) dx = 2/3 +- 1e-6",
           "value " + num(i4));
    v.gate(std::abs(id - 4.0 / 3.0) <= 1e-6, "2c int (d/dx sech(2x))^2 dx = 4/3 +- 1e-6",
           "value " + num(id));
}

// ---- 3: mean of the scaled self-intersection at t = 1 ----------------

void self_intersection_gate(Verdict& v) {
    const std::uint64_t R = 10000;
    RunningStat xs;
    for (std::uint64_t r = 0; r < R; ++r) {
        const FinePath p = simulate_fine_bm(Seed{11}, 1.0, 4096, stream_label("a3-bm", r));
        xs.add(self_intersection(bm_local_time(p, 1.0)));
    }
    const double target = oracle::mean_sisq_t1();
    const double rel = std::abs(xs.mean() - target) / target;
    v.gate(rel <= 0.05, "3 mean X_1 within 5% of 8/(3 sqrt(2 pi)), m 4096, 10000 replicas",
           "mean " + num(xs.mean()) + " vs " + num(target) + ", rel err " + num(rel) +
               ", stderr " + num(xs.stderr_mean()));
}

// ---- 4: variance of the scaled payoff sum ----------------------------

void variance_gate(Verdict& v) {
    const std::uint64_t n = 1ull << 16;
    const std::size_t R = 500;
    const DistSpec d = parse_dist("rademacher");
    const double scale = std::pow(static_cast<double>(n), 0.75);
    RunningStat ys;
    for (std::size_t r = 0; r < R; ++r) {
        const WalkPath w = simulate_walk(Seed{12}, n, stream_label("a4-walk", r));
        const WalkLocalTime lt = walk_local_time(w, n);
        const Scenery sc(Seed{12}, stream_label("a4-scenery", r), d);
        ys.add(rwrs_site_sum(lt, [&](std::int64_t x) { return sc.value(x); }) / scale);
    }
    const double target = mean_self_intersection_target();
    const double rel = std::abs(ys.variance() - target) / target;
    v.gate(rel <= 0.10, "4 Var(n^{-3/4} K(n)) within 10% of the X_1 mean, n 2^16, 500 replicas",
           "variance " + num(ys.variance()) + " vs " + num(target) + ", rel err " + num(rel));
}

// ---- 5: growth exponents of the coupled discrepancies ----------------

double coupling_gates(Verdict& v) {
    CouplingConfig cc;
    cc.n_max = 1ull << 18;
    cc.m = 64;
    cc.dist = parse_dist("rademacher");
    cc.exit_refine = 4096;
    cc.chk_lo_log2 = 8;
    Verdict::info("5 running the coupled construction",
                  "20 replicas at n_max 262144, m 64, exit grid 1/4096");
    const SuiteReport rep = exponent_suite(Seed{5}, cc, 20, 1);
    const auto show = [&](double med, std::pair<double, double> ci) {
        return "median " + num(med) + ", CI upper " + num(ci.second);
    };
    v.gate(rep.pass_D, "5a slope of max|K - G| below 0.72", show(rep.med_D, rep.ci_D));
    v.gate(rep.pass_I, "5b slope of max|K - IL| below 0.60", show(rep.med_I, rep.ci_I));
    v.gate(rep.pass_J, "5c slope of max|IL - G| below 0.72", show(rep.med_J, rep.ci_J));
    v.gate(rep.pass_gap, "5d slope of the walker local-time gap below 0.35",
           show(rep.med_gap, rep.ci_gap));
    return rep.med_Kmax;
}

// ---- 6: embedded scenery law, duration, drift ------------------------

void embedding_gates(Verdict& v) {
    // gaussian target at exit grid 1e-4
    const std::size_t N = 100000;
    Verdict::info("6 building the embedded scenery",
                  "100000 gaussian values at exit step 1e-4");
    SceneryBM w(RandomStream(Seed{8}, "a6-w+"), RandomStream(Seed{8}, "a6-w-"), 4, 5000, true);
    const double dx = w.exit_step();
    SkorokhodEmbedding emb(w, parse_dist("gaussian"), RandomStream(Seed{8}, "a6-pairs"));
    emb.ensure_pos(N);
    const auto& sig = emb.sigmas_pos();
    const auto& dur = emb.durations_pos();
    const auto& rho = emb.rhos_pos();

    const double ks = ks_statistic(std::vector<double>(sig.begin(), sig.end()), normal_cdf);
    v.gate(ks <= 0.02, "6a embedded values vs standard normal: K-S <= 0.02",
           "K-S " + num(ks) + " at exit step " + num(dx));

    RunningStat ts;
    for (double t : dur) ts.add(t);
    const double gap = std::abs(ts.mean() - 1.0);
    v.gate(gap <= 3.0 * ts.stderr_mean(), "6b mean embedding duration = 1 within 3 stderr",
           "mean " + num(ts.mean()) + ", stderr " + num(ts.stderr_mean()) + ", gap " + num(gap));

    std::vector<double> dn, dv;
    for (std::uint64_t nn : {1000ull, 2000ull, 5000ull, 10000ull, 20000ull, 50000ull, 100000ull}) {
        dn.push_back(static_cast<double>(nn));
        dv.push_back(std::abs(rho[nn - 1] - static_cast<double>(nn)) /
                     std::sqrt(static_cast<double>(nn)));
    }
    const double slope = fit_exponent(dn, dv).slope;
    v.gate(slope <= 0.30, "6c drift |rho_n - n|/sqrt(n) shows no growth trend",
           "fitted slope " + num(slope) + " across n = 1e3 .. 1e5");

    // two-valued targets: every embedded value sits on the support, up to
    // the exit-grid overshoot (one increment of the scanning field)
    const char* tags[2] = {"6d", "6e"};
    const char* laws[2] = {"rademacher", "twopoint:a=2,p=0.2"};
    for (int i = 0; i < 2; ++i) {
        const DistSpec d = parse_dist(laws[i]);
        const std::string role = std::string("a6-") + tags[i];
        SceneryBM w2(RandomStream(Seed{8}, role + "-w+"), RandomStream(Seed{8}, role + "-w-"), 4,
                     5000, true);
        SkorokhodEmbedding e2(w2, d, RandomStream(Seed{8}, role + "-pairs"));
        e2.ensure_pos(10000);
        const auto sp = d.support();
        double worst = 0.0;
        for (double s : e2.sigmas_pos())
            worst = std::max(worst, std::min(std::abs(s - sp.hi), std::abs(s - sp.lo)));
        v.gate(worst <= 8.0 * std::sqrt(dx),
               std::string(tags[i]) + " embedded " + laws[i] + " values on the support",
               "max distance " + num(worst) + ", allowance " + num(8.0 * std::sqrt(dx)));
    }
}

// ---- 7: pathwise identities ------------------------------------------

void identity_gates(Verdict& v) {
    // time-ordered vs site-grouped payoff sums, and the visit-count total
    bool totals_ok = true, sums_equal = true;
    for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
        const std::uint64_t n = 5000;
        const WalkPath wp = simulate_walk(Seed{seed}, n, "a7-walk");
        const WalkLocalTime lt = walk_local_time(wp, n);
        std::int64_t tot = 0;
        for (const auto& [x, c] : lt.counts) tot += c;
        totals_ok = totals_ok && tot == static_cast<std::int64_t>(n) + 1;
        const Scenery sc(Seed{seed}, "a7-scenery", parse_dist("gaussian"));
        const auto f = [&](std::int64_t x) { return sc.value(x); };
        sums_equal = sums_equal && rwrs_series(wp, f, n)[n] == rwrs_site_sum(lt, f);
    }
    v.gate(totals_ok, "7a visit counts sum to n + 1, exact", "3 seeds, n 5000");
    v.gate(sums_equal, "7b time-ordered sum equals site-grouped sum, bit-exact",
           "3 seeds, gaussian scenery");

    // occupation identity and monotone self-intersection on one fine path
    const FinePath p = simulate_fine_bm(Seed{77}, 2.0, 64, "a7-bm");
    bool occ_ok = true, mono_ok = true;
    double prev = -1.0;
    for (int i = 1; i <= 16; ++i) {
        const double t = 0.125 * i;
        const LocalTimeField f = bm_local_time(p, t);
        occ_ok = occ_ok &&
                 f.total_count() == static_cast<std::int64_t>(std::floor(t * 64.0 + 1e-9));
        const double x = self_intersection(f);
        mono_ok = mono_ok && x >= prev;
        prev = x;
    }
    v.gate(occ_ok, "7c occupation identity sum L dx = floor(t m)/m, exact", "16 times, m 64");
    v.gate(mono_ok, "7d X_t nondecreasing in t", "16 times, m 64");

    // bridge rescaling: last zero tau, X_tau <= X_1, the exact per-path
    // identity, and the independence factorization of the means
    const std::size_t R = 2000;
    bool xtau_ok = true, resc_ok = true;
    RunningStat xt, t15, xb;
    std::size_t usable = 0;
    for (std::size_t r = 0; r < R; ++r) {
        const FinePath q = simulate_fine_bm(Seed{78}, 1.0, 4096, stream_label("a7-bridge", r));
        const BridgePair b = bridge_identity(q, 1.0);
        xtau_ok = xtau_ok && b.x_tau <= self_intersection(bm_local_time(q, 1.0));
        if (!b.usable) continue;
        ++usable;
        resc_ok = resc_ok && std::abs(b.rescaled - b.x_tau) <= 1e-12 * std::max(1.0, b.x_tau);
        xt.add(b.x_tau);
        t15.add(std::pow(b.tau, 1.5));
        xb.add(b.x_bridge);
    }
    v.gate(xtau_ok, "7e X_tau <= X_1", "2000 paths, m 4096");
    v.gate(resc_ok, "7f per-path rescaling tau^{3/2} X-bridge = X_tau to 1e-12",
           std::to_string(usable) + " usable paths");
    const double lhs = xt.mean();
    const double rhs = t15.mean() * xb.mean();
    const double rel = std::abs(lhs - rhs) / lhs;
    v.gate(rel <= 0.05, "7g factorization E X_tau = E tau^{3/2} E X-bridge within 5%",
           "E X_tau " + num(lhs) + ", product " + num(rhs) + ", rel gap " + num(rel));

    // triangle split of the coupled discrepancy
    CouplingConfig cc;
    cc.n_max = 4096;
    cc.m = 16;
    cc.dist = parse_dist("rademacher");
    cc.exit_refine = 64;
    cc.chk_lo_log2 = 8;
    const CouplingTrace tr = run_coupling(Seed{79}, cc, 0);
    bool tri_ok = true;
    for (std::size_t i = 0; i < tr.checkpoints.size(); ++i)
        tri_ok = tri_ok && tr.D_at[i] <= tr.Imax_at[i] + tr.Jmax_at[i] + 1e-12;
    v.gate(tri_ok, "7h triangle bound max|K-G| <= max|K-IL| + max|IL-G|",
           std::to_string(tr.checkpoints.size()) + " checkpoints, n_max 4096");
}

// ---- 8: constants beyond desk scale, reported without a gate ---------

void declared_limits(double zeta, double kmax_slope) {
    const LilConstants c = lil_constant_report(zeta);
    Verdict::info("8 limsup regimes are beyond simulation reach; constants implied by the solved rate",
                  "zeta " + num(c.zeta) + " -> c0 " + num(c.c0) +
                      ", iterated-log coefficient sqrt(1/zeta) " + num(c.x_lil));
    Verdict::info("8 exponential-moment growth rate 1/(4 zeta)",
                  num(c.exp_moment_rate) + ", closed form 1/6");
    Verdict::info("8 payoff growth, natural scale 0.75",
                  "median fitted slope of max K " + num(kmax_slope));
}

// ---- 9: byte-identical reruns ----------------------------------------

void determinism_gate(Verdict& v) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "rwrs-acceptance";
    ExperimentConfig cfg;
    cfg.command = "couple";
    cfg.seed = 9;
    cfg.workers = 1;
    cfg.n_max = 4096;
    cfg.m = 16;
    cfg.exit_refine = 64;
    cfg.first_checkpoint = 256;
    cfg.replicas = 4;
    cfg.dist_text = "rademacher";
    cfg.dist = parse_dist("rademacher");
    std::ostringstream quiet;
    cfg.out_dir = (base / "w1").string();
    run_experiment(cfg, quiet);  // gate verdicts at this small scale are not the point
    cfg.out_dir = (base / "w3").string();
    cfg.workers = 3;
    run_experiment(cfg, quiet);
    const bool csv_same = read_text_file(base / "w1" / "couple.csv") ==
                          read_text_file(base / "w3" / "couple.csv");
    const bool sum_same = read_text_file(base / "w1" / "couple_summary.json") ==
                          read_text_file(base / "w3" / "couple_summary.json");
    v.gate(csv_same && sum_same, "9 rerun with 1 vs 3 workers is byte-identical",
           std::string("CSV ") + (csv_same ? "identical" : "DIFFERS") + ", summary " +
               (sum_same ? "identical" : "DIFFERS"));
}

}  // namespace

int main() {
    std::printf("acceptance gates, fixed seeds, pinned thresholds\n");
    Verdict v;
    try {
        const double zeta = variational_gates(v);
        quadrature_gates(v);
        self_intersection_gate(v);
        variance_gate(v);
        const double kmax_slope = coupling_gates(v);
        embedding_gates(v);
        identity_gates(v);
        declared_limits(zeta, kmax_slope);
        determinism_gate(v);
    } catch (const std::exception& e) {
        std::printf("[FAIL] aborted by exception: %s\n", e.what());
        return 2;
    }
    std::printf("%d gates, %d failed\n", v.checks, v.failures);
    return v.failures == 0 ? 0 : 1;
}
