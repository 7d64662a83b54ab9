#pragma once
// Simple random walk on Z, its site occupation counts, and the walk-in-
// scenery functional K(n) = sum_{k<=n} sigma(S_k). K is computed with an
// exact accumulator, so the time-ordered sum and the site-grouped sum
// sum_x sigma(x) xi(n,x) agree bit for bit.

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

struct WalkPath {
    std::vector<std::int8_t> steps;     // +-1, steps[k] = S_{k+1} - S_k
    std::vector<std::int32_t> positions;  // S_0..S_n
    std::uint64_t length() const { return steps.size(); }
};

inline WalkPath simulate_walk(Seed seed, std::uint64_t n, std::string_view label = "walk") {
    if (n >= (1ull << 31)) throw std::invalid_argument("simulate_walk: n too large");
    WalkPath p;
    p.steps.resize(n);
    p.positions.resize(n + 1);
    p.positions[0] = 0;
    RandomStream s(seed, label);
    std::int32_t pos = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        const std::int8_t st = (s.word_at(k) >> 63) ? 1 : -1;
        p.steps[k] = st;
        pos += st;
        p.positions[k + 1] = pos;
    }
    return p;
}

// xi(n, x) = #{0 <= k <= n : S_k = x}; counts the n+1 visited epochs.
struct WalkLocalTime {
    std::uint64_t horizon = 0;
    std::unordered_map<std::int32_t, std::int64_t> counts;

    std::int64_t at(std::int32_t x) const {
        const auto it = counts.find(x);
        return it == counts.end() ? 0 : it->second;
    }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& [x, c] : counts) t += c;
        return t;
    }
};

inline WalkLocalTime walk_local_time(const WalkPath& p, std::uint64_t n) {
    if (n > p.length()) throw std::invalid_argument("walk_local_time: horizon beyond path");
    WalkLocalTime lt;
    lt.horizon = n;
    lt.counts.reserve(2 * static_cast<std::size_t>(3 * std::sqrt(double(n + 1))) + 8);
    for (std::uint64_t k = 0; k <= n; ++k) ++lt.counts[p.positions[k]];
    return lt;
}

// K(0..n) in time order; each prefix is the correctly rounded exact sum.
template <class SceneryFn>
std::vector<double> rwrs_series(const WalkPath& p, SceneryFn&& sigma, std::uint64_t n) {
    if (n > p.length()) throw std::invalid_argument("rwrs_series: horizon beyond path");
    std::vector<double> k_series(n + 1);
    ExactAcc acc;
    for (std::uint64_t k = 0; k <= n; ++k) {
        acc.add(sigma(p.positions[k]));
        k_series[k] = acc.value();
    }
    return k_series;
}

// Site-grouped form sum_x sigma(x) xi(n,x), exact.
template <class SceneryFn>
double rwrs_site_sum(const WalkLocalTime& lt, SceneryFn&& sigma) {
    ExactAcc acc;
    for (const auto& [x, c] : lt.counts) acc.add_product(sigma(x), c);
    return acc.value();
}

// sum_x xi(n,x)^2: self-intersection count of the discrete path.
inline std::int64_t walk_self_intersections(const WalkLocalTime& lt) {
    std::int64_t q = 0;
    for (const auto& [x, c] : lt.counts) q += c * c;
    return q;
}

}  // namespace rwrs
