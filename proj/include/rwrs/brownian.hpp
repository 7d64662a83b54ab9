#pragma once
// Lattice Brownian motion at refinement m: time step 1/m, space step
// 1/sqrt(m). Includes the occupation (local time) field, the scenery
// integral G(t) = sum_x L(t,x) dW(x), self-intersection X_t, and the
// last-zero / bridge identities. SceneryBM is the spatial Brownian field:
// a lattice of step 1/sqrt(m) on each side of the origin, internally
// generated on a finer grid so first-exit levels are located accurately.

#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PathExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::uint32_t integer_sqrt_of_square(std::uint32_t m) {
    if (m < 4) throw std::invalid_argument("refinement m must be >= 4");
    const auto r = static_cast<std::uint32_t>(std::lround(std::sqrt(double(m))));
    if (r * r != m) throw std::invalid_argument("refinement m must be a perfect square");
    return r;
}
}  // namespace detail

constexpr std::uint64_t kMaxFineSteps = 1ull << 32;

// Scaled lattice walk approximating Brownian motion on [0, T].
struct FinePath {
    std::uint32_t m = 4;
    std::uint32_t sqrt_m = 2;
    double T = 0.0;
    std::vector<std::int8_t> steps;  // +-1 lattice moves

    std::uint64_t fine_count() const { return steps.size(); }

    std::uint64_t fingerprint() const {
        std::uint64_t h = 0xCBF29CE484222325ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001B3ull;
        };
        mix(m);
        mix(steps.size());
        const std::size_t n = steps.size();
        for (std::size_t i = 0; i < n && i < 256; ++i) mix(static_cast<std::uint8_t>(steps[i]));
        for (std::size_t i = n > 256 ? n - 256 : 0; i < n; ++i)
            mix(static_cast<std::uint8_t>(steps[i]));
        return h;
    }
};

inline FinePath simulate_fine_bm(Seed seed, double T, std::uint32_t m,
                                 std::string_view label = "bm") {
    if (!(T >= 0.0)) throw std::invalid_argument("simulate_fine_bm: T must be >= 0");
    FinePath p;
    p.m = m;
    p.sqrt_m = detail::integer_sqrt_of_square(m);
    p.T = T;
    const double want = std::floor(T * static_cast<double>(m) + 1e-9);
    if (want > static_cast<double>(kMaxFineSteps))
        throw BudgetError("simulate_fine_bm: T*m exceeds the fine-step budget");
    const auto n = static_cast<std::uint64_t>(want);
    p.steps.resize(n);
    RandomStream s(seed, label);
    for (std::uint64_t k = 0; k < n; ++k)
        p.steps[k] = (s.word_at(k) >> 63) ? std::int8_t(1) : std::int8_t(-1);
    return p;
}

// Occupation density of a FinePath at time t: counts fine intervals
// [k/m, (k+1)/m) with k < floor(t*m) at the lattice site occupied during
// the interval. L(t, j/sqrt(m)) = count_j / sqrt(m). The first fine
// interval is charged at the origin, so at t = 1/m the field is
// {0 -> 1/sqrt(m)}; at t = 0 it is empty. The exact form of the
// occupation identity is sum_j count_j = floor(t*m).
struct LocalTimeField {
    std::uint32_t m = 4;
    double t = 0.0;
    std::uint64_t fine_used = 0;
    std::int32_t j_min = 0;
    std::vector<std::int64_t> counts;  // index j - j_min
    std::uint64_t source = 0;          // fingerprint of the originating path

    std::int64_t count_at(std::int32_t j) const {
        const std::int64_t i = static_cast<std::int64_t>(j) - j_min;
        if (i < 0 || i >= static_cast<std::int64_t>(counts.size())) return 0;
        return counts[static_cast<std::size_t>(i)];
    }
    std::int32_t j_max() const {
        return j_min + static_cast<std::int32_t>(counts.size()) - 1;
    }
    double value(std::int32_t j) const {
        return static_cast<double>(count_at(j)) / std::sqrt(static_cast<double>(m));
    }
    double value_at(double x) const {
        return value(static_cast<std::int32_t>(std::llround(x * std::sqrt(double(m)))));
    }
    std::int64_t total_count() const {
        std::int64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
    // sum_j L * dx, equal to floor(t*m)/m up to one division.
    double occupation() const {
        return static_cast<double>(total_count()) / static_cast<double>(m);
    }
};

inline LocalTimeField bm_local_time(const FinePath& p, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("bm_local_time: t must be >= 0");
    const double want = std::floor(t * static_cast<double>(p.m) + 1e-9);
    const auto k_count = static_cast<std::uint64_t>(want);
    if (k_count > p.fine_count())
        throw std::invalid_argument("bm_local_time: t beyond the simulated horizon");
    LocalTimeField f;
    f.m = p.m;
    f.t = t;
    f.fine_used = k_count;
    f.source = p.fingerprint();
    std::int32_t j = 0, lo = 0, hi = 0;
    for (std::uint64_t k = 0; k < k_count; ++k) {
        j += p.steps[k];
        lo = std::min(lo, j);
        hi = std::max(hi, j);
    }
    f.j_min = lo;
    f.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    j = 0;
    for (std::uint64_t k = 0; k < k_count; ++k) {
        ++f.counts[static_cast<std::size_t>(j - lo)];
        j += p.steps[k];
    }
    return f;
}

// X_t = sum_j L(t, x_j)^2 dx, via the integer visit counts.
inline double self_intersection(const LocalTimeField& f) {
    unsigned __int128 q = 0;
    for (auto c : f.counts) q += static_cast<unsigned __int128>(c) * static_cast<unsigned __int128>(c);
    const double md = static_cast<double>(f.m);
    return static_cast<double>(static_cast<long double>(q)) / (md * std::sqrt(md));
}

// Last lattice zero at or before time t.
inline double last_zero(const FinePath& p, double t) {
    const double want = std::floor(t * static_cast<double>(p.m) + 1e-9);
    auto k_count = static_cast<std::uint64_t>(want);
    if (k_count > p.fine_count())
        throw std::invalid_argument("last_zero: t beyond the simulated horizon");
    std::int64_t j = 0;
    std::uint64_t last = 0;
    for (std::uint64_t k = 1; k <= k_count; ++k) {
        j += p.steps[k - 1];
        if (j == 0) last = k;
    }
    return static_cast<double>(last) / static_cast<double>(p.m);
}

// Spatial Brownian field W. Public interface: values on the lattice
// x = j / sqrt(m), j in Z, lazily extended on both sides, plus sequential
// first-exit scans used by the embedding. Internally each side is a
// single forward sweep on a grid of step spatial_step/exit_refine; lattice
// values are the sweep sampled every exit_refine cells, so exit scans and
// field values describe one and the same W.
class SceneryBM {
  public:
    // with_exits: keep nodes realized ahead of the exit cursor so later
    // exit scans can replay them. Costs memory proportional to how far
    // field reads outrun the exits; leave it off for field-only use.
    SceneryBM(Seed seed, std::uint32_t m, std::uint32_t exit_refine = 1, bool with_exits = true,
              std::string_view label_pos = "w+", std::string_view label_neg = "w-")
        : SceneryBM(RandomStream(seed, label_pos), RandomStream(seed, label_neg), m, exit_refine,
                    with_exits) {}

    SceneryBM(RandomStream pos, RandomStream neg, std::uint32_t m, std::uint32_t exit_refine,
              bool with_exits = true)
        : m_(m),
          sqrt_m_(detail::integer_sqrt_of_square(m)),
          refine_(exit_refine),
          with_exits_(with_exits),
          pos_(pos),
          neg_(neg) {
        if (refine_ == 0) throw std::invalid_argument("SceneryBM: exit_refine must be >= 1");
        dx_fine_ = 1.0 / (static_cast<double>(sqrt_m_) * static_cast<double>(refine_));
        sd_fine_ = std::sqrt(dx_fine_);
        pos_.lattice.push_back(0.0);
        neg_.lattice.push_back(0.0);
    }

    std::uint32_t refinement() const { return m_; }
    double spatial_step() const { return 1.0 / static_cast<double>(sqrt_m_); }
    double exit_step() const { return dx_fine_; }

    // W at lattice site j / sqrt(m).
    double lattice_value(std::int64_t j) {
        Side& s = j >= 0 ? pos_ : neg_;
        const auto idx = static_cast<std::uint64_t>(j >= 0 ? j : -j);
        if (idx >= s.lattice.size()) materialize(s, idx);
        return s.lattice[static_cast<std::size_t>(idx)];
    }

    // W((j+1) dx) - W(j dx).
    double increment(std::int64_t j) { return lattice_value(j + 1) - lattice_value(j); }

    struct Exit {
        double distance;  // |x| at the exit, in spatial units
        double w;         // W there
    };

    // Scan a side from its exit cursor until W - w_ref leaves (lo, hi).
    // Consecutive calls continue where the previous exit ended.
    Exit next_exit(int side, double w_ref, double lo, double hi) {
        if (!(lo < 0.0 && hi > 0.0)) throw std::invalid_argument("next_exit: need lo < 0 < hi");
        if (!with_exits_) throw std::logic_error("next_exit: field built without exit tracking");
        Side& s = side >= 0 ? pos_ : neg_;
        for (;;) {
            double w;
            if (!s.pending.empty()) {
                w = s.pending.front();
                s.pending.pop_front();
            } else {
                advance_one(s, /*buffer=*/false);
                w = s.w_head;
            }
            ++s.exit_cursor;
            const double d = w - w_ref;
            if (d <= lo || d >= hi)
                return {static_cast<double>(s.exit_cursor) * dx_fine_, w};
        }
    }

    double side_extent(int side) const {
        const Side& s = side >= 0 ? pos_ : neg_;
        return static_cast<double>(s.head) * dx_fine_;
    }

  private:
    struct Side {
        explicit Side(RandomStream s) : cur(s) {}
        StreamCursor cur;
        std::uint64_t head = 0;         // fine cells realized
        double w_head = 0.0;            // W at the sweep head
        std::uint64_t exit_cursor = 0;  // fine node where the next exit scan resumes
        std::vector<double> lattice;    // W at lattice sites, every refine-th node
        std::deque<double> pending;     // nodes realized ahead of the exit cursor
    };

    void advance_one(Side& s, bool buffer) {
        s.w_head += sd_fine_ * s.cur.next_normal();
        ++s.head;
        if (s.head % refine_ == 0) s.lattice.push_back(s.w_head);
        if (buffer) {
            s.pending.push_back(s.w_head);
            if (s.pending.size() > (1ull << 26))
                throw BudgetError("SceneryBM: exit scan lags the field by too much");
        }
    }

    void materialize(Side& s, std::uint64_t lattice_idx) {
        const std::uint64_t target = lattice_idx * refine_;
        if (target > (kMaxFineSteps << 3))
            throw BudgetError("SceneryBM: requested extent exceeds the budget");
        while (s.head < target) advance_one(s, with_exits_);
    }

    std::uint32_t m_, sqrt_m_, refine_;
    bool with_exits_;
    double dx_fine_ = 0.0, sd_fine_ = 0.0;
    Side pos_, neg_;
};

// G(t) = sum over lattice sites of L(t, x) (W(x + dx) - W(x)).
inline double bmbs(const LocalTimeField& f, SceneryBM& w) {
    if (w.refinement() != f.m)
        throw std::invalid_argument("bmbs: field and scenery use different lattices");
    CompensatedSum g;
    for (std::int32_t j = f.j_min; j <= f.j_max(); ++j) {
        const std::int64_t c = f.count_at(j);
        if (c != 0) g.add(f.value(j) * w.increment(j));
    }
    return g.value();
}

// Bridge rescaling: tau the last zero before 1; the path on [0, tau],
// viewed as a lattice path in its own right with K = tau*m fine steps,
// has self-intersection X^bridge computed with refinement K. On the
// lattice X_tau = tau^{3/2} X^bridge holds exactly (same visit counts).
struct BridgePair {
    bool usable = false;   // enough fine steps before the last zero
    double tau = 0.0;
    double x_tau = 0.0;       // X at tau, refinement m
    double x_bridge = 0.0;    // segment self-intersection at refinement K
    double rescaled = 0.0;    // tau^{3/2} * x_bridge
    std::uint64_t fine_steps = 0;
};

inline BridgePair bridge_identity(const FinePath& p, double t, std::uint64_t min_steps = 100) {
    BridgePair b;
    b.tau = last_zero(p, t);
    const auto K = static_cast<std::uint64_t>(std::llround(b.tau * static_cast<double>(p.m)));
    b.fine_steps = K;
    b.x_tau = self_intersection(bm_local_time(p, b.tau));
    if (K < min_steps) return b;  // too short for a meaningful rescaling
    // Independent tally over the segment, no LocalTimeField involved.
    std::int64_t j = 0;
    std::int64_t lo = 0, hi = 0;
    for (std::uint64_t k = 0; k < K; ++k) {
        j += p.steps[k];
        lo = std::min(lo, j);
        hi = std::max(hi, j);
    }
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(hi - lo + 1), 0);
    j = 0;
    for (std::uint64_t k = 0; k < K; ++k) {
        ++cnt[static_cast<std::size_t>(j - lo)];
        j += p.steps[k];
    }
    unsigned __int128 q = 0;
    for (auto c : cnt) q += static_cast<unsigned __int128>(c) * static_cast<unsigned __int128>(c);
    const double Kd = static_cast<double>(K);
    b.x_bridge = static_cast<double>(static_cast<long double>(q)) / (Kd * std::sqrt(Kd));
    b.rescaled = std::pow(b.tau, 1.5) * b.x_bridge;
    b.usable = true;
    return b;
}

}  // namespace rwrs
