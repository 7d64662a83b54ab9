#pragma once
// Counter-based randomness. Every draw is a pure function of
// (seed, stream label, counter), so any value can be regenerated at any
// time without replaying a sequence. This is what makes sceneries
// random-access at arbitrary sites and lazy path extension reproducible.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rwrs {

struct Seed {
    std::uint64_t value = 1;
};

namespace detail {

// splitmix64 finalizer (Vigna); bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;  // golden-ratio step
constexpr std::uint64_t kSubstreamSalt = 0x632BE59BD9B4E019ull;

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Injective fold of Z into the counter space (zigzag encoding).
constexpr std::uint64_t fold_site(std::int64_t x) noexcept {
    return x >= 0 ? 2ull * static_cast<std::uint64_t>(x)
                  : 2ull * static_cast<std::uint64_t>(-(x + 1)) + 1ull;
}

}  // namespace detail

// A keyed counter stream. Distinct labels (or substream indices) give
// streams that are independent for all statistical purposes here.
class RandomStream {
  public:
    RandomStream(Seed seed, std::string_view label)
        : key_(detail::mix64(seed.value ^ detail::mix64(detail::fnv1a64(label)))) {}

    RandomStream substream(std::uint64_t index) const {
        RandomStream s(*this);
        s.key_ = detail::mix64(key_ ^ detail::mix64(index * detail::kGamma + detail::kSubstreamSalt));
        return s;
    }

    std::uint64_t word_at(std::uint64_t counter) const noexcept {
        return detail::mix64(key_ + (counter + 1) * detail::kGamma);
    }

    // Uniform on the open interval (0,1); never returns an endpoint.
    double uniform_at(std::uint64_t counter) const noexcept {
        return (static_cast<double>(word_at(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller pair; consumes words 2i and 2i+1.
    void normal_pair_at(std::uint64_t pair_index, double& z0, double& z1) const noexcept {
        const double u1 = uniform_at(2 * pair_index);
        const double u2 = uniform_at(2 * pair_index + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
    }

    // Standard normal addressable by index.
    double normal_at(std::uint64_t index) const noexcept {
        double z0, z1;
        normal_pair_at(index / 2, z0, z1);
        return (index % 2 == 0) ? z0 : z1;
    }

    std::uint64_t key() const noexcept { return key_; }

  private:
    std::uint64_t key_;
};

// Sequential view of a stream. All draw kinds advance the same counter:
// signs/words/uniforms consume one slot, a normal pair consumes two (the
// second value is cached as a spare), so mixed use never reuses a slot.
class StreamCursor {
  public:
    explicit StreamCursor(RandomStream s) : stream_(s) {}

    std::uint64_t next_word() noexcept { return stream_.word_at(counter_++); }
    double next_uniform() noexcept { return stream_.uniform_at(counter_++); }
    int next_sign() noexcept { return (next_word() >> 63) ? 1 : -1; }

    // Box-Muller over the next two counter slots, one spare cached.
    double next_normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = stream_.uniform_at(counter_);
        const double u2 = stream_.uniform_at(counter_ + 1);
        counter_ += 2;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    const RandomStream& stream() const noexcept { return stream_; }
    std::uint64_t counter() const noexcept { return counter_; }

  private:
    RandomStream stream_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// n i.i.d. centered Gaussians with the given variance, keyed by
// (seed, stream label). Indexable generation: value i never depends on
// how many were asked for before.
inline std::vector<double> gaussian_increments(Seed seed, std::string_view stream_label,
                                               std::size_t count, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian_increments: variance must be > 0");
    RandomStream s(seed, stream_label);
    const double sd = std::sqrt(variance);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = sd * s.normal_at(i);
    return out;
}

// Conventional label composition for per-replica streams.
inline std::string stream_label(std::string_view role, std::uint64_t replica) {
    std::string s(role);
    s += '/';
    s += std::to_string(replica);
    return s;
}

}  // namespace rwrs
