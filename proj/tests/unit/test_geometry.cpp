#include <doctest.h>

#include <cmath>
#include <limits>

#include "grushin/geometry.hpp"
#include "oracles/generators.hpp"
#include "oracles/monte_carlo.hpp"
#include "oracles/reference.hpp"

using namespace grushin;

TEST_CASE("rho closed values") {
  CHECK(rho({1, 0}, {1, 0}) == 0.0);
  CHECK(std::abs(rho({0, 1}, {0, 0}) - std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(rho({2, 0}, {1, 0}) - std::sqrt(3.0)) <= 1e-12);
  // the second zero sits at the mirror point
  CHECK(rho({-1, 0}, {1, 0}) == 0.0);
}

TEST_CASE("quasi-distance closed values") {
  CHECK(std::abs(quasi_distance({0, 0}, {1, 0}) - 1.0) <= 1e-12);
  CHECK(std::abs(quasi_distance({0, 0}, {0, 1}) - 2.0) <= 1e-12);
  CHECK(std::abs(quasi_distance({1, 0}, {1, 1}) - (std::sqrt(6.0) - std::sqrt(2.0))) <= 1e-12);
}

TEST_CASE("box functions and their inverse") {
  CHECK(box_halfwidth(2, {3, 0}, 2) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(std::abs(box_inverse(2, {1, 0}, 2) - 1.0) <= 1e-12);
  CHECK(box_halfwidth(1, {7, 1}, 0.3) == 0.3);
  CHECK_THROWS_AS(box_halfwidth(3, {0, 0}, 1), DomainError);
  CHECK_THROWS_AS(box_halfwidth(1, {0, 0}, -1), DomainError);

  oracle::Gen gen(11);
  for (int n = 0; n < 10000; ++n) {
    const Point x = gen.point(5);
    const double r = gen.log_uniform(1e-4, 1e3);
    for (int j : {1, 2}) {
      const double F = box_halfwidth(j, x, r);
      CHECK(std::abs(box_inverse(j, x, F) - r) <= 1e-12 * r);
      CHECK(box_halfwidth(j, x, 2 * r) <= 4.0 * F);
      CHECK(box_halfwidth(j, x, 1.001 * r) > F);
    }
    CHECK(std::abs(box_halfwidth(2, x, r) - oracle::F2(x.x1, r)) <= 1e-13 * oracle::F2(x.x1, r));
  }
}

TEST_CASE("set membership") {
  CHECK(QuasiBallSpec({0, 0}, 1, SetKind::B).contains({0.4, 0}));
  CHECK_FALSE(QuasiBallSpec({2, 0}, 1, SetKind::G).contains({-2, 0}));
  CHECK(QuasiBallSpec({2, 0}, 1, SetKind::GTilde).contains({-2, 0}));
  // open sets: the boundary point d~ = r is excluded
  CHECK_FALSE(QuasiBallSpec({0, 0}, 1, SetKind::B).contains({1, 0}));
  CHECK_FALSE(BoxSpec({0, 0}, 1).contains({1, 0}));
  // B~ is B(y, r) together with its mirror
  CHECK(QuasiBallSpec({2, 0}, 1, SetKind::BTilde).contains({-2.1, 0}));
  CHECK_FALSE(QuasiBallSpec({2, 0}, 1, SetKind::B).contains({-2.1, 0}));
}

TEST_CASE("G equals G~ restricted to the half-plane when |y1| >= r") {
  oracle::Gen gen(12);
  for (int n = 0; n < 20000; ++n) {
    const Point y = gen.point(4);
    const double r = gen.log_uniform(0.05, 5);
    const Point x{y.x1 + gen.uniform(-3 * r - 2 * std::abs(y.x1), 3 * r + 2 * std::abs(y.x1)),
                  y.x2 + gen.uniform(-3, 3) * box_halfwidth(2, y, r)};
    const bool g = QuasiBallSpec(y, r, SetKind::G).contains(x);
    const bool gt = QuasiBallSpec(y, r, SetKind::GTilde).contains(x);
    if (std::abs(y.x1) >= r) {
      CHECK(g == (gt && x.x1 * y.x1 >= 0.0));
    } else {
      CHECK(g == gt);
    }
  }
}

TEST_CASE("quasi-distance is symmetric and vanishes only on the diagonal") {
  oracle::Gen gen(13);
  for (int n = 0; n < 100000; ++n) {
    const Point x = gen.point(10), y = gen.point(10);
    const double d = quasi_distance(x, y);
    REQUIRE(d == quasi_distance(y, x));
    REQUIRE(d > 0.0);
    REQUIRE(quasi_distance(x, x) == 0.0);
  }
}

TEST_CASE("homogeneity under dilations") {
  oracle::Gen gen(14);
  for (int n = 0; n < 10000; ++n) {
    const Point x = gen.point(5), y = gen.point(5);
    const double t = gen.log_uniform(1e-2, 1e2);
    const Point tx = dilate(t, x), ty = dilate(t, y);
    REQUIRE(std::abs(rho(tx, ty) - t * rho(x, y)) <= 1e-12 * t * rho(x, y));
    REQUIRE(std::abs(quasi_distance(tx, ty) - t * quasi_distance(x, y)) <= 1e-12 * t * quasi_distance(x, y));
  }
}

TEST_CASE("coordinate maps") {
  CHECK(dilate(2, {1, 1}) == Point{2, 4});
  CHECK(translate_scale(2, 5, {1, 1}) == Point{2, 9});
  CHECK(reflect({-3, 7}) == Point{3, 7});
  CHECK_THROWS_AS(dilate(0, {1, 1}), DomainError);
  CHECK_THROWS_AS(translate_scale(-1, 0, {1, 1}), DomainError);
  oracle::Gen gen(15);
  for (int n = 0; n < 1000; ++n) {
    const Point x = gen.point(100);
    CHECK(dilate(1, x) == x);
    CHECK(reflect(reflect(x)) == x);
    const DiagonalMap m = DiagonalMap::translate_scale(3, -2);
    const Point back = m.inverse(m(x));
    CHECK(std::abs(back.x1 - x.x1) <= 1e-12 * (1 + std::abs(x.x1)));
    CHECK(std::abs(back.x2 - x.x2) <= 1e-12 * (1 + std::abs(x.x2)));
  }
}

TEST_CASE("ball volume on the axis") {
  CHECK(std::abs(ball_volume({0, 0}, 1) / (2.0 / 3.0) - 1) <= 1e-8);
  CHECK(std::abs(ball_volume({0, 5}, 1) / (2.0 / 3.0) - 1) <= 1e-8);
  CHECK(std::abs(ball_volume({0, 0}, 2) / (16.0 / 3.0) - 1) <= 1e-8);
  CHECK_THROWS_AS(ball_volume({0, 0}, 0), DomainError);
}

TEST_CASE("ball volume against Monte Carlo off the axis") {
  for (double y1 : {0.0, 0.7, 3.0}) {
    const auto mc = oracle::ball_volume_mc(y1, 0.4, 1.0, 1000000, 77);
    CHECK(std::abs(ball_volume({y1, 0.4}, 1.0) - mc.value) <= 3 * mc.stderr_);
  }
}

TEST_CASE("volume is comparable to r^2 (r + |y1|) and doubling holds with one constant") {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, doubling = 0.0;
  for (double q = -3; q <= 3.0001; q += 0.25) {
    const double y1 = std::pow(10.0, q);
    const Point y{y1, 0};
    const double f = ball_volume(y, 1.0);
    lo = std::min(lo, f / (1.0 + y1));
    hi = std::max(hi, f / (1.0 + y1));
    doubling = std::max(doubling, ball_volume(y, 2.0) / f);
  }
  MESSAGE("volume ratio in [" << lo << ", " << hi << "], doubling constant " << doubling);
  CHECK(lo > 0.0);
  CHECK(hi / lo < 10.0);
  CHECK(doubling <= 8.0 + 1e-9);  // homogeneous dimension 3 on the axis, 4 far away
}

TEST_CASE("ring deficit") {
  CHECK(std::abs(ring_deficit({0, 0}, 1, 0.1) - 0.271) <= 1e-10);
  CHECK_THROWS_AS(ring_deficit({0, 0}, 1, 0.0), DomainError);
  CHECK_THROWS_AS(ring_deficit({0, 0}, 1, 1.0), DomainError);
  oracle::Gen gen(16);
  for (int n = 0; n < 200; ++n) {
    const Point y{gen.log_uniform(1e-3, 1e3), 0};
    const double r = gen.log_uniform(0.1, 10);
    const double eps = gen.log_uniform(1e-4, 0.5);
    CHECK(ring_deficit(y, r, eps) / eps <= ring_deficit_bound(y, r) * (1 + 1e-9));
  }
  // small-eps limit equals f'(r) r / f(r)
  const Point y{0.8, 0};
  const double limit = ball_volume_derivative(y, 1.0) / ball_volume(y, 1.0);
  CHECK(std::abs(ring_deficit(y, 1.0, 1e-5) / 1e-5 - limit) <= 1e-3 * limit);
}

TEST_CASE("lattice CC distance") {
  const CCLattice lattice(BoxSpec({0, 0}, 2), 0.05);
  CHECK(std::abs(cc_distance({0, 0}, {1, 0}, lattice) - 1.0) <= 1e-12);
  CHECK(std::abs(cc_distance({0, 0}, {-1.5, 0}, lattice) - 1.5) <= 1e-12);
  const double v = cc_distance({0, 0}, {0, 1}, lattice);
  MESSAGE("lattice d_CC((0,0),(0,1)) = " << v);
  CHECK(v > 0.25);
  CHECK(v < 4.0);
  CHECK_THROWS_AS(cc_distance({0, 0}, {5, 0}, lattice), DomainError);
  CHECK_THROWS_AS(CCLattice(BoxSpec({0, 0}, 1), 0.1, 0.2), DomainError);

  // refinement: value at h/2 <= value at h + O(h)
  for (double h : {0.1, 0.05}) {
    const double coarse = cc_distance({0, 0}, {0.5, 1}, CCLattice(BoxSpec({0, 0}, 2), h));
    const double fine = cc_distance({0, 0}, {0.5, 1}, CCLattice(BoxSpec({0, 0}, 2), h / 2));
    CHECK(fine <= coarse + 2 * h);
  }
}

TEST_CASE("structure checks") {
  for (double q : {0.0, 0.5, 1.0, 1.5, 2.0, 4.0}) {
    for (StructureKind kind : {StructureKind::Charact, StructureKind::Equiv}) {
      const auto rep = structure_check(kind, {q, 0.3}, 1.0, 10000, 5);
      CHECK(rep.value("violations") == 0.0);
      CHECK(rep.value("inner_hits") > 0.0);
      CHECK(rep.passed());
    }
  }
  CHECK(structure_check(StructureKind::Equiv, {5, 0}, 1, 10000).value("violations") == 0.0);
  // r -> 0: the only sample is y itself
  CHECK(structure_check(StructureKind::Charact, {1, 2}, 1e-300, 1).value("violations") == 0.0);
  CHECK_THROWS_AS(structure_check(StructureKind::Charact, {0, 0}, 1, 0), DomainError);

  const auto frla = structure_check(StructureKind::Frla, {0.5, 0}, 1.0, 500);
  MESSAGE("lattice comparison constants " << frla.value("sum_constant") << " "
                                          << frla.value("quasi_constant"));
  CHECK(frla.passed());
}

TEST_CASE("string round trips") {
  for (SetKind k : {SetKind::B, SetKind::BTilde, SetKind::G, SetKind::GTilde}) {
    CHECK(set_kind_from_string(to_string(k)) == k);
  }
  for (StructureKind k : {StructureKind::Charact, StructureKind::Equiv, StructureKind::Frla}) {
    CHECK(structure_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(set_kind_from_string("ball"), DomainError);
}
