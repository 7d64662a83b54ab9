#pragma once
// Numerics used everywhere: an exact (error-free) accumulator for sums of
// doubles, compensated summation, running moments, least squares on log-log
// points, percentile bootstrap, and Kolmogorov-Smirnov statistics.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "rwrs/rng.hpp"

namespace rwrs {

// Fixed-point superaccumulator over the full double range. Sums are exact:
// the result is the correctly rounded (nearest-even) value of the true sum,
// so it is independent of addend order. add_product(a, c) adds a*c exactly
// for integer c with |c| < 2^53 by splitting the product with an FMA.
class ExactAcc {
  public:
    ExactAcc() { clear(); }

    void clear() {
        pos_.assign(kLimbs, 0);
        neg_.assign(kLimbs, 0);
    }

    void add(double x) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
        const std::uint64_t e = (bits >> 52) & 0x7FFull;
        std::uint64_t sig = bits & ((1ull << 52) - 1);
        if (e == 0x7FFull) throw std::domain_error("ExactAcc: non-finite addend");
        if (e == 0 && sig == 0) return;
        std::uint64_t bitpos = 0;
        if (e != 0) {
            sig |= 1ull << 52;
            bitpos = e - 1;  // exponent 2^(e-1075), offset by 2^-1074
        }
        add_raw((bits >> 63) ? neg_ : pos_, sig, bitpos);
    }

    // Adds a*c exactly (c integral, |c| < 2^53).
    void add_product(double a, std::int64_t c) {
        const double dc = static_cast<double>(c);
        const double p = a * dc;
        if (!std::isfinite(p)) throw std::domain_error("ExactAcc: product overflow");
        const double err = std::fma(a, dc, -p);
        add(p);
        add(err);
    }

    void merge(const ExactAcc& other) {
        merge_raw(pos_, other.pos_);
        merge_raw(neg_, other.neg_);
    }

    // Correctly rounded value of the accumulated sum.
    double value() const {
        int cmp = 0;
        for (int i = kLimbs - 1; i >= 0 && cmp == 0; --i)
            cmp = pos_[i] > neg_[i] ? 1 : (pos_[i] < neg_[i] ? -1 : 0);
        if (cmp == 0) return 0.0;
        const auto& hi = cmp > 0 ? pos_ : neg_;
        const auto& lo = cmp > 0 ? neg_ : pos_;
        std::vector<std::uint64_t> diff(kLimbs, 0);
        std::uint64_t borrow = 0;
        for (int i = 0; i < kLimbs; ++i) {
            const std::uint64_t a = hi[i];
            const std::uint64_t b = lo[i];
            std::uint64_t d = a - b - borrow;
            borrow = (a < b + borrow || (b + borrow < b)) ? 1 : 0;
            diff[i] = d;
        }
        int top = kLimbs - 1;
        while (top >= 0 && diff[top] == 0) --top;
        const int p_top = 64 * top + (63 - std::countl_zero(diff[top]));
        const double sign = cmp > 0 ? 1.0 : -1.0;
        if (p_top <= 52) {  // fits in one mantissa at the bottom of the range
            const std::uint64_t mant = read_bits(diff, 0);
            return sign * std::ldexp(static_cast<double>(mant & mask_below(p_top + 1)), -1074);
        }
        const int start = p_top - 52;
        std::uint64_t mant = read_bits(diff, start) & ((1ull << 53) - 1);
        const bool guard = bit_at(diff, start - 1);
        const bool sticky = any_below(diff, start - 1);
        if (guard && (sticky || (mant & 1))) ++mant;
        int e2 = start - 1074;
        if (mant == (1ull << 53)) {
            mant >>= 1;
            ++e2;
        }
        if (e2 > 971) throw std::overflow_error("ExactAcc: sum exceeds double range");
        return sign * std::ldexp(static_cast<double>(mant), e2);
    }

  private:
    // 35*64 = 2240 bits: positions 0..2097 hold any double, the rest is
    // carry headroom for astronomically many addends.
    static constexpr int kLimbs = 35;

    static std::uint64_t mask_below(int nbits) {
        return nbits >= 64 ? ~0ull : ((1ull << nbits) - 1);
    }

    static void add_raw(std::vector<std::uint64_t>& acc, std::uint64_t sig, std::uint64_t bitpos) {
        std::size_t limb = bitpos >> 6;
        const unsigned sh = static_cast<unsigned>(bitpos & 63);
        unsigned __int128 v = static_cast<unsigned __int128>(sig) << sh;
        while (v != 0) {
            if (limb >= kLimbs) throw std::overflow_error("ExactAcc: limb overflow");
            const std::uint64_t add = static_cast<std::uint64_t>(v);
            const std::uint64_t old = acc[limb];
            acc[limb] = old + add;
            v >>= 64;
            if (acc[limb] < old) v += 1;  // carry
            ++limb;
        }
    }

    static void merge_raw(std::vector<std::uint64_t>& acc, const std::vector<std::uint64_t>& other) {
        std::uint64_t carry = 0;
        for (int i = 0; i < kLimbs; ++i) {
            const std::uint64_t a = acc[i];
            const std::uint64_t b = other[i];
            const std::uint64_t s1 = a + b;
            const std::uint64_t s2 = s1 + carry;
            carry = (s1 < a) + (s2 < s1);
            acc[i] = s2;
        }
        if (carry) throw std::overflow_error("ExactAcc: merge overflow");
    }

    // 64 bits of the magnitude starting at bit position pos (zero padded).
    static std::uint64_t read_bits(const std::vector<std::uint64_t>& a, int pos) {
        const std::size_t limb = static_cast<std::size_t>(pos) >> 6;
        const unsigned sh = static_cast<unsigned>(pos & 63);
        std::uint64_t v = limb < kLimbs ? (a[limb] >> sh) : 0;
        if (sh != 0 && limb + 1 < kLimbs) v |= a[limb + 1] << (64 - sh);
        return v;
    }

    static bool bit_at(const std::vector<std::uint64_t>& a, int pos) {
        return (a[static_cast<std::size_t>(pos) >> 6] >> (pos & 63)) & 1ull;
    }

    static bool any_below(const std::vector<std::uint64_t>& a, int pos) {
        const std::size_t limb = static_cast<std::size_t>(pos) >> 6;
        for (std::size_t i = 0; i < limb; ++i)
            if (a[i] != 0) return true;
        const unsigned sh = static_cast<unsigned>(pos & 63);
        return sh != 0 && (a[limb] & mask_below(sh)) != 0;
    }

    std::vector<std::uint64_t> pos_, neg_;
};

// Neumaier compensated summation; cheap and ~exact for well-scaled series.
class CompensatedSum {
  public:
    void add(double x) noexcept {
        const double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const noexcept { return s_ + c_; }
    void clear() noexcept { s_ = c_ = 0.0; }

  private:
    double s_ = 0.0, c_ = 0.0;
};

// Welford running moments.
class RunningStat {
  public:
    void add(double x) noexcept {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept {  // sample variance
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    double sd() const noexcept { return std::sqrt(variance()); }
    double stderr_mean() const noexcept {
        return n_ > 0 ? sd() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("ols_fit: need >= 2 paired points");
    const double n = static_cast<double>(xs.size());
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx.add(xs[i]);
        sy.add(ys[i]);
    }
    const double mx = sx.value() / n, my = sy.value() / n;
    CompensatedSum sxx, sxy, syy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    if (sxx.value() == 0.0) throw std::invalid_argument("ols_fit: degenerate abscissae");
    OlsFit f;
    f.slope = sxy.value() / sxx.value();
    f.intercept = my - f.slope * mx;
    f.r2 = syy.value() > 0.0 ? (sxy.value() * sxy.value()) / (sxx.value() * syy.value()) : 1.0;
    return f;
}

inline double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("percentile: empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(xs.begin(), xs.end());
    return percentile_sorted(xs, 0.5);
}

// Percentile bootstrap over scalar observations; counter-based resampling
// keeps the interval reproducible.
template <class Stat>
std::pair<double, double> bootstrap_ci(const std::vector<double>& xs, Stat&& stat,
                                       std::size_t replicates, RandomStream stream,
                                       double confidence = 0.95) {
    if (xs.empty()) throw std::invalid_argument("bootstrap_ci: empty sample");
    std::vector<double> resample(xs.size());
    std::vector<double> stats;
    stats.reserve(replicates);
    std::uint64_t ctr = 0;
    for (std::size_t b = 0; b < replicates; ++b) {
        for (std::size_t i = 0; i < xs.size(); ++i)
            resample[i] = xs[stream.word_at(ctr++) % xs.size()];
        stats.push_back(stat(resample));
    }
    std::sort(stats.begin(), stats.end());
    const double a = (1.0 - confidence) / 2.0;
    return {percentile_sorted(stats, a), percentile_sorted(stats, 1.0 - a)};
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Power-law fit v ~ c n^s by least squares on log-log points, with a
// percentile-bootstrap interval for the slope from resampling the points.
// Zero magnitudes are replaced by the smallest positive one (flagged): a
// vanishing discrepancy is fine, log of it is not.
struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool zero_replaced = false;
    std::size_t points = 0;
};

inline ExponentFit fit_exponent(std::span<const double> ns, std::span<const double> vs,
                                std::size_t boot_replicates = 0,
                                RandomStream boot_stream = RandomStream(Seed{1}, "exponent-boot")) {
    if (ns.size() != vs.size()) throw std::invalid_argument("fit_exponent: size mismatch");
    if (ns.size() < 5) throw std::invalid_argument("fit_exponent: need >= 5 checkpoints");
    double smallest_pos = std::numeric_limits<double>::infinity();
    for (double v : vs)
        if (v > 0.0) smallest_pos = std::min(smallest_pos, v);
    if (!std::isfinite(smallest_pos))
        throw std::invalid_argument("fit_exponent: all magnitudes vanish");
    ExponentFit out;
    out.points = ns.size();
    std::vector<double> xs(ns.size()), ys(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(ns[i] > 0.0)) throw std::invalid_argument("fit_exponent: abscissae must be > 0");
        double v = vs[i];
        if (v <= 0.0) {
            v = smallest_pos;
            out.zero_replaced = true;
        }
        xs[i] = std::log(ns[i]);
        ys[i] = std::log(v);
    }
    const OlsFit f = ols_fit(xs, ys);
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.r2 = f.r2;
    out.ci_lo = out.ci_hi = f.slope;
    if (boot_replicates > 0) {
        std::vector<double> slopes;
        slopes.reserve(boot_replicates);
        std::vector<double> rx(xs.size()), ry(xs.size());
        std::uint64_t ctr = 0;
        for (std::size_t b = 0; b < boot_replicates; ++b) {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const std::size_t k = boot_stream.word_at(ctr++) % xs.size();
                rx[i] = xs[k];
                ry[i] = ys[k];
            }
            try {
                slopes.push_back(ols_fit(rx, ry).slope);
            } catch (const std::invalid_argument&) {
                // all resampled abscissae equal; drop this replicate
            }
        }
        if (slopes.size() >= 16) {
            std::sort(slopes.begin(), slopes.end());
            out.ci_lo = percentile_sorted(slopes, 0.025);
            out.ci_hi = percentile_sorted(slopes, 0.975);
        }
    }
    return out;
}

// One-sample Kolmogorov-Smirnov statistic against a cdf.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    const OlsFit f = ols_fit(xs, ys);
    return (f.slope >= 0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, f.r2));
}

}  // namespace rwrs
