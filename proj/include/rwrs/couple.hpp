#pragma once
// The coupled construction: one fine path carries the walker (through its
// unit exit times) while one spatial field carries both the embedded
// scenery and the scenery integral. A single pass produces
//   K(c)  = sum of scenery values along the walker (exact accumulator),
//   IL(t) = sum_x sigma_x L(t, x)   (scenery paired with field local time),
//   G(t)  = sum_j L(t, x_j) dW_j    (the field integral),
// from which the discrepancy series and their empirical growth exponents
// follow. I = |K - IL| and J = |IL - G| split D = max |K - G| exactly.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwrs/brownian.hpp"
#include "rwrs/dist.hpp"
#include "rwrs/embed.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

struct CouplingConfig {
    std::uint64_t n_max = 1ull << 12;
    std::uint32_t m = 64;            // walker lattice refinement (perfect square)
    DistSpec dist{};                 // scenery law
    std::uint32_t exit_refine = 4096;  // internal exit grid cells per lattice step
    std::uint32_t chk_lo_log2 = 8;   // first dyadic checkpoint
    double horizon_margin = 1.3;     // initial fine horizon, times n_max
};

// Growth-exponent gates on the discrepancy series, in log-log slope.
struct SuiteThresholds {
    double D = 0.72;
    double I = 0.60;
    double J = 0.72;
    double gap = 0.35;
};

inline std::vector<std::uint64_t> dyadic_checkpoints(std::uint64_t n_max, std::uint32_t lo_log2) {
    std::vector<std::uint64_t> ck;
    for (std::uint64_t v = 1ull << lo_log2; v <= n_max; v <<= 1) ck.push_back(v);
    return ck;
}

struct CouplingTrace {
    std::uint64_t n_max = 0;
    std::uint32_t m = 0;
    double T_used = 0.0;
    std::uint32_t attempts = 0;
    std::vector<double> K, G, IL;  // full series, index 0..n_max
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> K_at, G_at, Kmax_at, Gmax_at;
    std::vector<double> D_at, I_at, J_at, Imax_at, Jmax_at, IJmax_at, gap_at;
    std::vector<std::string> streams;  // labels drawn from, for audit
};

inline CouplingTrace run_coupling(Seed seed, const CouplingConfig& cfg, std::uint64_t replica = 0) {
    const std::uint64_t n = cfg.n_max;
    const std::uint32_t m = cfg.m;
    if (n < 1) throw std::invalid_argument("run_coupling: n_max must be >= 1");
    const std::string lab_bm = stream_label("bm", replica);
    const std::string lab_wp = stream_label("w+", replica);
    const std::string lab_wn = stream_label("w-", replica);
    const std::string lab_pair = stream_label("pairs", replica);

    CouplingTrace tr;
    tr.n_max = n;
    tr.m = m;
    tr.checkpoints = dyadic_checkpoints(n, cfg.chk_lo_log2);

    // Fine path long enough for n walker exits; extend and retry if the
    // realized path runs out early. Streams are counter-based, so a longer
    // horizon reproduces the shorter path as a prefix.
    double T = cfg.horizon_margin * static_cast<double>(n);
    FinePath path;
    EmbeddedWalk ew;
    for (std::uint32_t attempts = 1;; ++attempts) {
        path = simulate_fine_bm(seed, T, m, lab_bm);
        try {
            ew = embed_walk(path, n);
            tr.attempts = attempts;
            break;
        } catch (const PathExhausted&) {
            if (attempts >= 8) throw;
            T *= 1.5;
        }
    }
    tr.T_used = T;

    const std::uint64_t kmax = std::max(ew.tau[n], n * static_cast<std::uint64_t>(m));
    const auto span = static_cast<std::int32_t>(path.sqrt_m);

    // Spatial ranges: fine lattice nodes visited, and scenery sites wide
    // enough to cover both the walker support and the occupied nodes.
    std::int32_t jlo = 0, jhi = 0;
    {
        std::int32_t j = 0;
        for (std::uint64_t k = 0; k < kmax; ++k) {
            j += path.steps[k];
            jlo = std::min(jlo, j);
            jhi = std::max(jhi, j);
        }
    }
    auto floor_div = [](std::int32_t a, std::int32_t b) {
        return a >= 0 ? a / b : -((-a + b - 1) / b);
    };
    const std::int64_t x_lo = floor_div(jlo, span) - 1;
    const std::int64_t x_hi = floor_div(jhi, span) + 2;

    // Scenery field and embedded scenery. Exits are consumed before any
    // lattice read, so the exit scan never replays buffered nodes.
    SceneryBM w(RandomStream(seed, lab_wp), RandomStream(seed, lab_wn), m, cfg.exit_refine,
                /*with_exits=*/true);
    SkorokhodEmbedding emb(w, cfg.dist, RandomStream(seed, lab_pair));
    emb.ensure_site(x_hi);
    emb.ensure_site(x_lo);
    std::vector<double> sig(static_cast<std::size_t>(x_hi - x_lo + 1));
    for (std::int64_t x = x_lo; x <= x_hi; ++x)
        sig[static_cast<std::size_t>(x - x_lo)] = emb.sigma(x);
    std::vector<double> inc(static_cast<std::size_t>(jhi - jlo + 1));
    for (std::int32_t j = jlo; j <= jhi; ++j)
        inc[static_cast<std::size_t>(j - jlo)] = w.increment(j);

    // Single merged pass. Walker events happen at their exit fine-times
    // and advance K; every fine interval advances G (and IL on scenery
    // sites); coarse instants t = 1, 2, ... are fine-index multiples of m.
    tr.K.assign(n + 1, 0.0);
    tr.G.assign(n + 1, 0.0);
    tr.IL.assign(n + 1, 0.0);
    ExactAcc accK;
    CompensatedSum accG, accIL;
    accK.add(sig[static_cast<std::size_t>(-x_lo)]);
    tr.K[0] = accK.value();

    const std::size_t n_chk = tr.checkpoints.size();
    std::vector<std::vector<std::int64_t>> xi_snap(n_chk), cnt_snap(n_chk);
    std::vector<std::int64_t> xi(sig.size(), 0);
    xi[static_cast<std::size_t>(-x_lo)] = 1;
    std::vector<std::int64_t> fine_cnt(inc.size(), 0);
    std::size_t chk_walker = 0, chk_field = 0;

    const double inv_span = 1.0 / static_cast<double>(span);
    std::uint64_t c = 0;
    std::int32_t j = 0;
    for (std::uint64_t k = 0; k < kmax; ++k) {
        if (c < n && ew.tau[c + 1] == k) {
            ++c;
            const std::int64_t x = ew.coarse.positions[c];
            accK.add(sig[static_cast<std::size_t>(x - x_lo)]);
            tr.K[c] = accK.value();
            ++xi[static_cast<std::size_t>(x - x_lo)];
            if (chk_walker < n_chk && c == tr.checkpoints[chk_walker])
                xi_snap[chk_walker++] = xi;
        }
        const auto ji = static_cast<std::size_t>(j - jlo);
        accG.add(inc[ji] * inv_span);
        ++fine_cnt[ji];
        if (j % span == 0)
            accIL.add(sig[static_cast<std::size_t>(j / span - x_lo)] * inv_span);
        if ((k + 1) % m == 0) {
            const std::uint64_t mc = (k + 1) / m;
            if (mc <= n) {
                tr.G[mc] = accG.value();
                tr.IL[mc] = accIL.value();
                if (chk_field < n_chk && mc == tr.checkpoints[chk_field])
                    cnt_snap[chk_field++] = fine_cnt;
            }
        }
        j += path.steps[k];
    }
    while (c < n && ew.tau[c + 1] <= kmax) {  // exit exactly at the horizon
        ++c;
        const std::int64_t x = ew.coarse.positions[c];
        accK.add(sig[static_cast<std::size_t>(x - x_lo)]);
        tr.K[c] = accK.value();
        ++xi[static_cast<std::size_t>(x - x_lo)];
        if (chk_walker < n_chk && c == tr.checkpoints[chk_walker]) xi_snap[chk_walker++] = xi;
    }
    if (c != n || chk_walker != n_chk || chk_field != n_chk)
        throw std::logic_error("run_coupling: event bookkeeping out of balance");

    // Discrepancy series and running maxima, sampled at the checkpoints.
    tr.K_at.resize(n_chk);
    tr.G_at.resize(n_chk);
    tr.Kmax_at.resize(n_chk);
    tr.Gmax_at.resize(n_chk);
    tr.D_at.resize(n_chk);
    tr.I_at.resize(n_chk);
    tr.J_at.resize(n_chk);
    tr.Imax_at.resize(n_chk);
    tr.Jmax_at.resize(n_chk);
    tr.IJmax_at.resize(n_chk);
    double Dmax = 0, Imax = 0, Jmax = 0, IJmax = 0, Kmax = 0, Gmax = 0;
    std::size_t ci = 0;
    for (std::uint64_t mc = 0; mc <= n; ++mc) {
        const double I = std::abs(tr.K[mc] - tr.IL[mc]);
        const double J = std::abs(tr.IL[mc] - tr.G[mc]);
        const double d = std::abs(tr.K[mc] - tr.G[mc]);
        Dmax = std::max(Dmax, d);
        Imax = std::max(Imax, I);
        Jmax = std::max(Jmax, J);
        IJmax = std::max(IJmax, I + J);
        Kmax = std::max(Kmax, std::abs(tr.K[mc]));
        Gmax = std::max(Gmax, std::abs(tr.G[mc]));
        if (ci < n_chk && mc == tr.checkpoints[ci]) {
            tr.K_at[ci] = tr.K[mc];
            tr.G_at[ci] = tr.G[mc];
            tr.Kmax_at[ci] = Kmax;
            tr.Gmax_at[ci] = Gmax;
            tr.D_at[ci] = Dmax;
            tr.I_at[ci] = I;
            tr.J_at[ci] = J;
            tr.Imax_at[ci] = Imax;
            tr.Jmax_at[ci] = Jmax;
            tr.IJmax_at[ci] = IJmax;
            ++ci;
        }
    }

    // Walker/field occupation gap sup_x |xi(n,x) - L(n,x)| per checkpoint.
    tr.gap_at.resize(n_chk);
    for (std::size_t i = 0; i < n_chk; ++i) {
        double gap = 0.0;
        for (std::int64_t x = x_lo; x <= x_hi; ++x) {
            const auto xiv = static_cast<double>(xi_snap[i][static_cast<std::size_t>(x - x_lo)]);
            const std::int64_t node = x * span;
            double lv = 0.0;
            if (node >= jlo && node <= jhi)
                lv = static_cast<double>(cnt_snap[i][static_cast<std::size_t>(node - jlo)]) *
                     inv_span;
            gap = std::max(gap, std::abs(xiv - lv));
        }
        tr.gap_at[i] = gap;
    }

    tr.streams = {lab_bm, lab_wp, lab_wn, lab_pair};
    return tr;
}

// Per-replica reduced record kept by the suite.
struct ReplicaSlopes {
    std::uint64_t replica = 0;
    double D = 0.0, I = 0.0, J = 0.0, gap = 0.0, Kmax = 0.0;
    bool zero_replaced = false;
    double T_used = 0.0;
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> Kmax_at, Gmax_at, D_at, Imax_at, Jmax_at, gap_at;
};

struct SuiteReport {
    CouplingConfig config;
    SuiteThresholds thresholds;
    std::vector<ReplicaSlopes> replicas;
    double med_D = 0, med_I = 0, med_J = 0, med_gap = 0, med_Kmax = 0;
    std::pair<double, double> ci_D, ci_I, ci_J, ci_gap;
    bool pass_D = false, pass_I = false, pass_J = false, pass_gap = false, pass_all = false;
};

inline SuiteReport exponent_suite(Seed seed, const CouplingConfig& cfg, std::size_t replicas,
                                  unsigned workers, SuiteThresholds th = {}) {
    if (replicas < 3) throw std::invalid_argument("exponent_suite: need >= 3 replicas");
    SuiteReport rep;
    rep.config = cfg;
    rep.thresholds = th;
    rep.replicas.resize(replicas);
    parallel_for_ordered(replicas, workers, [&](std::size_t r) {
        CouplingTrace t = run_coupling(seed, cfg, r);
        ReplicaSlopes& out = rep.replicas[r];
        out.replica = r;
        out.T_used = t.T_used;
        std::vector<double> ns(t.checkpoints.begin(), t.checkpoints.end());
        auto fit = [&](const std::vector<double>& vs) {
            const ExponentFit f = fit_exponent(ns, vs);
            out.zero_replaced = out.zero_replaced || f.zero_replaced;
            return f.slope;
        };
        out.D = fit(t.D_at);
        out.I = fit(t.Imax_at);
        out.J = fit(t.Jmax_at);
        out.gap = fit(t.gap_at);
        out.Kmax = fit(t.Kmax_at);
        out.checkpoints = std::move(t.checkpoints);
        out.Kmax_at = std::move(t.Kmax_at);
        out.Gmax_at = std::move(t.Gmax_at);
        out.D_at = std::move(t.D_at);
        out.Imax_at = std::move(t.Imax_at);
        out.Jmax_at = std::move(t.Jmax_at);
        out.gap_at = std::move(t.gap_at);
    });

    auto collect = [&](double ReplicaSlopes::* f) {
        std::vector<double> v;
        v.reserve(replicas);
        for (const auto& r : rep.replicas) v.push_back(r.*f);
        return v;
    };
    const auto med = [](const std::vector<double>& v) { return median(v); };
    const RandomStream boot(seed, "suite-boot");
    const auto ci = [&](const std::vector<double>& v, std::uint64_t sub) {
        return bootstrap_ci(v, med, 2000, boot.substream(sub));
    };
    const auto vD = collect(&ReplicaSlopes::D), vI = collect(&ReplicaSlopes::I),
               vJ = collect(&ReplicaSlopes::J), vG = collect(&ReplicaSlopes::gap),
               vK = collect(&ReplicaSlopes::Kmax);
    rep.med_D = med(vD);
    rep.med_I = med(vI);
    rep.med_J = med(vJ);
    rep.med_gap = med(vG);
    rep.med_Kmax = med(vK);
    rep.ci_D = ci(vD, 1);
    rep.ci_I = ci(vI, 2);
    rep.ci_J = ci(vJ, 3);
    rep.ci_gap = ci(vG, 4);
    rep.pass_D = rep.ci_D.second < th.D;
    rep.pass_I = rep.ci_I.second < th.I;
    rep.pass_J = rep.ci_J.second < th.J;
    rep.pass_gap = rep.ci_gap.second < th.gap;
    rep.pass_all = rep.pass_D && rep.pass_I && rep.pass_J && rep.pass_gap;
    return rep;
}

}  // namespace rwrs
