#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "rwrs/rng.hpp"

using rwrs::RandomStream;
using rwrs::Seed;
using rwrs::StreamCursor;

namespace {
// independent copy of the splitmix64 finalizer used as a known-answer check
std::uint64_t ref_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}
}  // namespace

TEST_CASE("finalizer matches the published splitmix64 sequence from state 0") {
  // splitmix64 at state 0 emits mix(gamma), mix(2 gamma), mix(3 gamma)
  const std::uint64_t gamma = 0x9E3779B97F4A7C15ull;
  CHECK(rwrs::detail::mix64(gamma) == 0xE220A8397B1DCDAFull);
  CHECK(rwrs::detail::mix64(2 * gamma) == 0x6E789E6AA1B965F4ull);
  CHECK(rwrs::detail::mix64(3 * gamma) == 0x06C45D188009454Full);
}

TEST_CASE("word_at is the splitmix64 stream seeded by the key") {
  RandomStream s(Seed{42}, "check");
  const std::uint64_t gamma = 0x9E3779B97F4A7C15ull;
  for (std::uint64_t c = 0; c < 64; ++c) {
    CHECK(s.word_at(c) == ref_mix(s.key() + (c + 1) * gamma));
  }
}

TEST_CASE("streams are reproducible and label-sensitive") {
  RandomStream a(Seed{7}, "walk/0");
  RandomStream b(Seed{7}, "walk/0");
  RandomStream c(Seed{7}, "walk/1");
  RandomStream d(Seed{8}, "walk/0");
  CHECK(a.key() == b.key());
  CHECK(a.key() != c.key());
  CHECK(a.key() != d.key());
  for (std::uint64_t i = 0; i < 16; ++i) {
    CHECK(a.word_at(i) == b.word_at(i));
  }
  // labels with the same concatenation but different boundaries differ
  CHECK(RandomStream(Seed{7}, "ab/c").key() != RandomStream(Seed{7}, "a/bc").key());
}

TEST_CASE("substreams differ from the parent and from each other") {
  RandomStream s(Seed{3}, "base");
  std::set<std::uint64_t> keys{s.key()};
  for (std::uint64_t i = 0; i < 100; ++i) keys.insert(s.substream(i).key());
  CHECK(keys.size() == 101);
  CHECK(s.substream(5).key() == s.substream(5).key());
}

TEST_CASE("uniforms live strictly inside (0,1) and have the right mean") {
  RandomStream s(Seed{11}, "unif");
  const std::size_t n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = s.uniform_at(i);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  // sd of the mean is 1/sqrt(12 n) ~ 6.5e-4
  CHECK(std::fabs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::fabs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal draws have the expected first four moments") {
  RandomStream s(Seed{12}, "norm");
  const std::size_t n = 400000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = s.normal_at(i);
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::fabs(m1) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::fabs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("normal_at agrees with the underlying pair") {
  RandomStream s(Seed{9}, "pairs");
  for (std::uint64_t p = 0; p < 50; ++p) {
    double z0, z1;
    s.normal_pair_at(p, z0, z1);
    CHECK(s.normal_at(2 * p) == z0);
    CHECK(s.normal_at(2 * p + 1) == z1);
  }
}

TEST_CASE("cursor draws are pure functions of the consumed counter slots") {
  RandomStream s(Seed{21}, "cursor");
  StreamCursor cur(s);
  // interleave kinds; verify against random access on the same stream
  const std::uint64_t w0 = cur.next_word();
  CHECK(w0 == s.word_at(0));
  const double u1 = cur.next_uniform();
  CHECK(u1 == s.uniform_at(1));
  // normal consumes slots 2 and 3
  const double z0 = cur.next_normal();
  const double u1v = s.uniform_at(2);
  const double u2v = s.uniform_at(3);
  const double r = std::sqrt(-2.0 * std::log(u1v));
  const double a = 6.283185307179586476925286766559 * u2v;
  CHECK(z0 == r * std::cos(a));
  CHECK(cur.counter() == 4);
  // spare comes out next without consuming a slot
  const double z1 = cur.next_normal();
  CHECK(z1 == r * std::sin(a));
  CHECK(cur.counter() == 4);
  const std::uint64_t w4 = cur.next_word();
  CHECK(w4 == s.word_at(4));
}

TEST_CASE("signs are balanced") {
  RandomStream s(Seed{31}, "signs");
  StreamCursor cur(s);
  long tot = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) tot += cur.next_sign();
  CHECK(std::labs(tot) < 4 * static_cast<long>(std::sqrt(static_cast<double>(n))));
}

TEST_CASE("gaussian_increments is prefix-stable and validates variance") {
  auto a = rwrs::gaussian_increments(Seed{5}, "inc", 10, 0.25);
  auto b = rwrs::gaussian_increments(Seed{5}, "inc", 1000, 0.25);
  REQUIRE(a.size() == 10);
  REQUIRE(b.size() == 1000);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK_THROWS_AS(rwrs::gaussian_increments(Seed{5}, "inc", 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rwrs::gaussian_increments(Seed{5}, "inc", 4, -1.0), std::invalid_argument);
  // variance scaling: values are sd * normal
  auto c = rwrs::gaussian_increments(Seed{5}, "inc", 10, 4.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(c[i] == Catch::Approx(4.0 * a[i]).epsilon(1e-15));
  }
}

TEST_CASE("site folding is injective over a window of both signs") {
  std::set<std::uint64_t> seen;
  for (std::int64_t x = -1000; x <= 1000; ++x) seen.insert(rwrs::detail::fold_site(x));
  CHECK(seen.size() == 2001);
  CHECK(rwrs::detail::fold_site(0) == 0);
  CHECK(rwrs::detail::fold_site(-1) == 1);
  CHECK(rwrs::detail::fold_site(1) == 2);
}

TEST_CASE("stream_label composes role and replica") {
  CHECK(rwrs::stream_label("bm", 0) == "bm/0");
  CHECK(rwrs::stream_label("w+", 17) == "w+/17");
}
