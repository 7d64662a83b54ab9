#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "oracles.hpp"
#include "rwrs/scenery.hpp"

using rwrs::DistKind;
using rwrs::DistSpec;
using rwrs::parse_dist;
using rwrs::RandomStream;
using rwrs::Scenery;
using rwrs::Seed;

TEST_CASE("distribution grammar accepts the four kinds") {
  CHECK(parse_dist("rademacher").kind == DistKind::Rademacher);
  CHECK(parse_dist("gaussian").kind == DistKind::StandardGaussian);
  CHECK(parse_dist("uniform").kind == DistKind::UniformSym);
  const auto tp = parse_dist("twopoint:a=2,p=0.2");
  CHECK(tp.kind == DistKind::TwoPoint);
  CHECK(tp.a == 2.0);
  CHECK(tp.p == 0.2);
  CHECK(tp.name() == "twopoint:a=2,p=0.2");
}

TEST_CASE("distribution grammar rejects malformed input") {
  CHECK_THROWS_AS(parse_dist("cauchy"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("twopoint:a"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("twopoint:a=x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("twopoint:a=2junk"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("twopoint:a=-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("twopoint:p=0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("twopoint:p=1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("twopoint:q=3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dist("rademacher:a=1"), std::invalid_argument);
}

TEST_CASE("two-valued support is centered with unit variance") {
  const auto tp = parse_dist("twopoint:a=2,p=0.2");
  const auto s = tp.support();
  const auto ref = oracle::two_point_moments(0.2);
  CHECK(s.hi == Catch::Approx(ref.hi).margin(1e-14));   // sqrt(4) = 2
  CHECK(s.lo == Catch::Approx(ref.lo).margin(1e-14));   // -0.5
  CHECK(s.p_hi == 0.2);
  CHECK(ref.mean == Catch::Approx(0.0).margin(1e-14));
  CHECK(ref.var == Catch::Approx(1.0).margin(1e-14));

  const auto rad = DistSpec{DistKind::Rademacher}.support();
  CHECK(rad.hi == 1.0);
  CHECK(rad.lo == -1.0);
  CHECK(rad.p_hi == 0.5);

  CHECK_THROWS_AS(DistSpec{DistKind::StandardGaussian}.support(), std::logic_error);
  CHECK(DistSpec{DistKind::Rademacher}.two_valued());
  CHECK_FALSE(DistSpec{DistKind::UniformSym}.two_valued());
  CHECK(DistSpec{DistKind::UniformSym}.bounded());
  CHECK_FALSE(DistSpec{DistKind::StandardGaussian}.bounded());
}

TEST_CASE("fourth moments match quadrature and enumeration") {
  CHECK(DistSpec{DistKind::Rademacher}.fourth_moment() == 1.0);
  CHECK(DistSpec{DistKind::StandardGaussian}.fourth_moment() ==
        Catch::Approx(oracle::gaussian_fourth_moment()).margin(1e-8));
  CHECK(DistSpec{DistKind::UniformSym}.fourth_moment() ==
        Catch::Approx(oracle::uniform_sym_fourth_moment()).margin(1e-10));
  const auto tp = parse_dist("twopoint:a=2,p=0.2");
  CHECK(tp.fourth_moment() == Catch::Approx(oracle::two_point_moments(0.2).fourth).margin(1e-12));
}

TEST_CASE("sampled sceneries have the declared moments") {
  const std::int64_t N = 100000;
  for (const char* text : {"rademacher", "gaussian", "uniform", "twopoint:a=2,p=0.2"}) {
    const auto d = parse_dist(text);
    Scenery sc(Seed{77}, "moments", d);
    double m1 = 0, m2 = 0, m4 = 0;
    for (std::int64_t x = -N / 2; x < N / 2; ++x) {
      const double v = sc.value(x);
      m1 += v;
      m2 += v * v;
      m4 += v * v * v * v;
    }
    const double n = static_cast<double>(N);
    m1 /= n;
    m2 /= n;
    m4 /= n;
    INFO(text);
    const double sd4 = std::sqrt(std::max(1.0, d.fourth_moment()) / n);
    CHECK(std::fabs(m1) < 5.0 / std::sqrt(n));
    CHECK(std::fabs(m2 - 1.0) < 5.0 * std::sqrt(d.fourth_moment() / n) + 5e-3);
    CHECK(std::fabs(m4 - d.fourth_moment()) < 50.0 * sd4 + 0.05);
  }
}

TEST_CASE("two-valued samples land exactly on the support") {
  const auto d = parse_dist("twopoint:a=2,p=0.2");
  const auto s = d.support();
  Scenery sc(Seed{13}, "support", d);
  std::int64_t hits_hi = 0;
  const std::int64_t N = 50000;
  for (std::int64_t x = 0; x < N; ++x) {
    const double v = sc.value(x);
    const bool is_hi = v == s.hi;
    const bool is_lo = v == s.lo;
    REQUIRE((is_hi || is_lo));
    hits_hi += is_hi;
  }
  const double phat = static_cast<double>(hits_hi) / static_cast<double>(N);
  CHECK(std::fabs(phat - s.p_hi) < 5.0 * std::sqrt(0.2 * 0.8 / static_cast<double>(N)));
}

TEST_CASE("sceneries are site-addressable and label-keyed") {
  const auto d = parse_dist("gaussian");
  Scenery a(Seed{5}, "field", d);
  Scenery b(Seed{5}, "field", d);
  Scenery c(Seed{5}, "other", d);
  CHECK(a.value(12345) == b.value(12345));
  CHECK(a.value(-67) == b.value(-67));
  CHECK(a.value(3) != c.value(3));
  const auto w = a.window(-4, 4);
  REQUIRE(w.size() == 9);
  for (std::int64_t x = -4; x <= 4; ++x)
    CHECK(w[static_cast<std::size_t>(x + 4)] == a.value(x));
  CHECK_THROWS_AS(a.window(2, 1), std::invalid_argument);
}

TEST_CASE("neighbouring sites are uncorrelated in aggregate") {
  const auto d = parse_dist("gaussian");
  Scenery sc(Seed{23}, "corr", d);
  double cross = 0;
  const std::int64_t N = 100000;
  for (std::int64_t x = 0; x < N; ++x) cross += sc.value(x) * sc.value(x + 1);
  cross /= static_cast<double>(N);
  CHECK(std::fabs(cross) < 5.0 / std::sqrt(static_cast<double>(N)));
}
