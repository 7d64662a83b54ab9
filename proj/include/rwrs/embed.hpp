#pragma once
// The two halves of the coupling. embed_walk reads a simple random walk
// off a fine lattice path through its unit-exit times. SkorokhodEmbedding
// carves a two-sided i.i.d. scenery out of the spatial field W by first
// exits from randomized intervals (U, V) with U < 0 < V distributed as
// (v-u) mu(du) mu(dv): then sigma_x = W(rho_x) - W(rho_{x-1}) has law mu
// and E T_x = E sigma^2 = 1. The negative axis embeds the reflected law
// into the reflected field, so scenery sums match field increments with
// the correct orientation.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwrs/brownian.hpp"
#include "rwrs/dist.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

// Walker read off the fine path: tau[c] is the fine index of the c-th
// unit exit, coarse.positions the embedded simple random walk.
struct EmbeddedWalk {
    std::uint32_t m = 4;
    std::uint32_t sqrt_m = 2;
    std::vector<std::uint64_t> tau;  // tau[0] = 0
    WalkPath coarse;
    std::uint64_t source = 0;
};

inline EmbeddedWalk embed_walk(const FinePath& p, std::uint64_t n) {
    EmbeddedWalk e;
    e.m = p.m;
    e.sqrt_m = p.sqrt_m;
    e.source = p.fingerprint();
    e.tau.reserve(n + 1);
    e.tau.push_back(0);
    e.coarse.positions.reserve(n + 1);
    e.coarse.steps.reserve(n);
    e.coarse.positions.push_back(0);
    const auto span = static_cast<std::int32_t>(p.sqrt_m);
    std::int32_t j = 0, level = 0;
    const std::uint64_t len = p.fine_count();
    for (std::uint64_t k = 0; k < len && e.coarse.steps.size() < n; ++k) {
        j += p.steps[k];
        if (j - level == span || level - j == span) {
            e.tau.push_back(k + 1);
            e.coarse.steps.push_back(j > level ? 1 : -1);
            e.coarse.positions.push_back(j / span);
            level = j;
        }
    }
    if (e.coarse.steps.size() < n)
        throw PathExhausted("embed_walk: path ended after " +
                            std::to_string(e.coarse.steps.size()) + " of " + std::to_string(n) +
                            " exits; extend the horizon");
    return e;
}

// sup_x |xi(n, x) - L(tau, x)| for a field taken from the same fine path.
inline double embedding_gap(const EmbeddedWalk& e, const LocalTimeField& f, std::uint64_t n) {
    if (f.source != e.source || f.m != e.m)
        throw std::invalid_argument("embedding_gap: field from a different path or lattice");
    if (n >= e.coarse.positions.size())
        throw std::invalid_argument("embedding_gap: n beyond the embedded walk");
    const auto lt = walk_local_time(e.coarse, n);
    const auto span = static_cast<std::int32_t>(e.sqrt_m);
    std::int32_t xlo = f.j_min >= 0 ? f.j_min / span : -((-f.j_min + span - 1) / span);
    std::int32_t xhi = f.j_max() >= 0 ? (f.j_max() + span - 1) / span : -((-f.j_max()) / span);
    for (const auto& [x, c] : lt.counts) {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
    }
    double gap = 0.0;
    for (std::int32_t x = xlo; x <= xhi; ++x)
        gap = std::max(gap, std::abs(static_cast<double>(lt.at(x)) - f.value(x * span)));
    return gap;
}

// Randomized exit intervals for the scenery embedding. The joint density
// (v - u) mu(du) mu(dv) on u < 0 < v is sampled exactly by a two-part
// mixture: tilt one side by its magnitude (size-biased marginal), draw the
// other from mu conditioned to the opposite sign. Two-valued laws admit a
// single deterministic interval. reflected=true samples for the mirror
// law x -> -x (used on the negative axis).
class PairSampler {
  public:
    struct Pair {
        double lo, hi;  // lo < 0 < hi
    };

    PairSampler(DistSpec d, RandomStream s, bool reflected)
        : d_(d), cur_(s), reflected_(reflected) {}

    bool deterministic() const { return d_.two_valued(); }

    Pair next() {
        switch (d_.kind) {
            case DistKind::Rademacher:
                return {-1.0, 1.0};
            case DistKind::TwoPoint: {
                const auto sp = d_.support();
                return reflected_ ? Pair{-sp.hi, -sp.lo} : Pair{sp.lo, sp.hi};
            }
            case DistKind::StandardGaussian: {
                // size-biased half-normal is sqrt(2 Exp); plain side |N|
                const bool bias_hi = cur_.next_word() >> 63;
                const double sb = std::sqrt(-2.0 * std::log(cur_.next_uniform()));
                const double plain = std::abs(cur_.next_normal());
                return bias_hi ? Pair{-plain, sb} : Pair{-sb, plain};
            }
            case DistKind::UniformSym: {
                const bool bias_hi = cur_.next_word() >> 63;
                const double r3 = std::sqrt(3.0);
                const double sb = r3 * std::sqrt(cur_.next_uniform());
                const double plain = r3 * cur_.next_uniform();
                return bias_hi ? Pair{-plain, sb} : Pair{-sb, plain};
            }
        }
        throw std::logic_error("PairSampler: bad kind");
    }

  private:
    DistSpec d_;
    StreamCursor cur_;
    bool reflected_;
};

// Two-sided scenery carved from a SceneryBM by sequential first exits.
// Positive sites x >= 1 live on the forward sweep; sites x <= 0 embed the
// reflected law into the backward sweep and negate, which orients the
// increments so that sum_x sigma_x L(x) tracks the field integral on both
// axes. rho is the cumulative exit position: rho(x) - rho(x-1) = T_x with
// E T_x = 1, and sigma(x) = W(rho(x)) - W(rho(x-1)) exactly (overshoot
// inherited from the exit grid).
class SkorokhodEmbedding {
  public:
    SkorokhodEmbedding(SceneryBM& w, DistSpec d, RandomStream pair_base)
        : w_(&w),
          d_(d),
          sp_pos_(d, pair_base.substream(1), false),
          sp_neg_(d, pair_base.substream(2), true) {}

    void ensure_pos(std::size_t count) {
        while (sig_p_.size() < count) grow(+1);
    }
    void ensure_neg(std::size_t count) {
        while (sig_n_.size() < count) grow(-1);
    }
    void ensure_site(std::int64_t x) {
        if (x >= 1)
            ensure_pos(static_cast<std::size_t>(x));
        else
            ensure_neg(static_cast<std::size_t>(1 - x));
    }

    double sigma(std::int64_t x) {
        ensure_site(x);
        if (x >= 1) return sig_p_[static_cast<std::size_t>(x - 1)];
        return -sig_n_[static_cast<std::size_t>(-x)];
    }

    // Cumulative embedding position; rho(0) = 0, increasing in x. Site x
    // occupies the field interval [rho(x-1), rho(x)].
    double rho(std::int64_t x) {
        if (x == 0) return 0.0;
        ensure_site(x);
        if (x >= 1) return rho_p_[static_cast<std::size_t>(x - 1)];
        return -rho_n_[static_cast<std::size_t>(-x - 1)];
    }

    double duration(std::int64_t x) {
        ensure_site(x);
        if (x >= 1) return dur_p_[static_cast<std::size_t>(x - 1)];
        return dur_n_[static_cast<std::size_t>(-x)];
    }

    std::size_t pos_count() const { return sig_p_.size(); }
    std::size_t neg_count() const { return sig_n_.size(); }
    // Field value at the newest exit of each side (telescoping anchor).
    double last_w_pos() const { return w_prev_p_; }
    double last_w_neg() const { return w_prev_n_; }
    const std::vector<double>& sigmas_pos() const { return sig_p_; }
    const std::vector<double>& durations_pos() const { return dur_p_; }
    const std::vector<double>& rhos_pos() const { return rho_p_; }
    double exit_step() const { return w_->exit_step(); }
    const DistSpec& dist() const { return d_; }

  private:
    void grow(int side) {
        auto& sig = side > 0 ? sig_p_ : sig_n_;
        auto& rho = side > 0 ? rho_p_ : rho_n_;
        auto& dur = side > 0 ? dur_p_ : dur_n_;
        auto& w_prev = side > 0 ? w_prev_p_ : w_prev_n_;
        auto& sampler = side > 0 ? sp_pos_ : sp_neg_;
        const auto pair = sampler.next();
        const double prev_rho = rho.empty() ? 0.0 : rho.back();
        const auto ex = w_->next_exit(side, w_prev, pair.lo, pair.hi);
        sig.push_back(ex.w - w_prev);
        rho.push_back(ex.distance);
        dur.push_back(ex.distance - prev_rho);
        w_prev = ex.w;
    }

    SceneryBM* w_;
    DistSpec d_;
    PairSampler sp_pos_, sp_neg_;
    std::vector<double> sig_p_, rho_p_, dur_p_;
    std::vector<double> sig_n_, rho_n_, dur_n_;
    double w_prev_p_ = 0.0, w_prev_n_ = 0.0;
};

}  // namespace rwrs
