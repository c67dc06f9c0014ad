#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "grushin/discrete_operator.hpp"
#include "grushin/fields.hpp"
#include "grushin/geometry.hpp"
#include "grushin/grid.hpp"
#include "oracles/generators.hpp"

using namespace grushin;

namespace {

Jet quadratic(double c11, double c12, double c22, Point x) {
  // u = c11 x1^2 / 2 + c12 x1 x2 + c22 x2^2 / 2 + x1 - 2 x2
  return {c11 * x.x1 * x.x1 / 2 + c12 * x.x1 * x.x2 + c22 * x.x2 * x.x2 / 2 + x.x1 - 2 * x.x2,
          c11 * x.x1 + c12 * x.x2 + 1,
          c12 * x.x1 + c22 * x.x2 - 2,
          c11,
          c12,
          c22};
}

// u = sin(x1) cos(x2) with exact partials
Jet trig(Point x) {
  const double s1 = std::sin(x.x1), c1 = std::cos(x.x1), s2 = std::sin(x.x2), c2 = std::cos(x.x2);
  return {s1 * c2, c1 * c2, -s1 * s2, -s1 * c2, -c1 * s2, -s1 * c2};
}

// jet of u o F for F(x) = (s x1, s^2 x2 + b2)
Jet compose(const SmoothFunction& u, double s, double b2, Point x) {
  const Jet j = u({s * x.x1, s * s * x.x2 + b2});
  return {j.value, s * j.d1, s * s * j.d2, s * s * j.d11, s * s * s * j.d12, s * s * s * s * j.d22};
}

CoefficientField fixed(Coefficients a) {
  return CoefficientField([a](Point) { return a; }, EllipticityConstants(1e-9, 4.0));
}

double max_error(const GridFunction& u, const std::function<double(Point)>& exact) {
  double e = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.tags[k] == NodeTag::Interior) e = std::max(e, std::abs(u.values[k] - exact(u.grid.node(k))));
  }
  return e;
}

}  // namespace

TEST_CASE("ellipticity constants validate") {
  CHECK_THROWS_AS(EllipticityConstants(0, 1), DomainError);
  CHECK_THROWS_AS(EllipticityConstants(2, 1), DomainError);
  CHECK(EllipticityConstants(0.5, 2).ratio() == 0.25);
}

TEST_CASE("apply_L closed values") {
  const CoefficientField id = identity_field();
  oracle::Gen gen(21);
  for (int n = 0; n < 100; ++n) {
    const Point x = gen.point(4);
    const CoefficientField f = make_field(gen.field());
    CHECK(apply_L(f, [](Point p) { return Jet{3 + p.x1 - 2 * p.x2, 1, -2, 0, 0, 0}; }, x) == 0.0);
  }
  CHECK(apply_L(id, [](Point p) { return Jet{p.x1 * p.x1, 2 * p.x1, 0, 2, 0, 0}; }, {0.3, 1}) == 2.0);
  CHECK(apply_L(id, [](Point p) { return Jet{p.x2 * p.x2, 0, 2 * p.x2, 0, 0, 2}; }, {3, 5}) == 18.0);
}

TEST_CASE("horizontal Hessian and its determinant identity") {
  oracle::Gen gen(22);
  for (int n = 0; n < 1000; ++n) {
    const Point x = gen.point(3);
    // u = x1^2 x2
    const Jet u{x.x1 * x.x1 * x.x2, 2 * x.x1 * x.x2, x.x1 * x.x1, 2 * x.x2, 2 * x.x1, 0};
    const Sym2 h = horizontal_hessian(u, x);
    const double det_d2 = u.d11 * u.d22 - u.d12 * u.d12;
    CHECK(std::abs(det_d2 + 4 * x.x1 * x.x1) <= 1e-12 * (1 + x.x1 * x.x1));
    CHECK(std::abs(h.det() - x.x1 * x.x1 * det_d2) <= 1e-12 * (1 + std::pow(x.x1, 4)));
  }
  const Sym2 h = horizontal_hessian(Jet{0, 0, 0, 1, 0, 1}, {2, 0});
  CHECK(h.a == 1.0);
  CHECK(h.b == 0.0);
  CHECK(h.c == 4.0);
  CHECK(h.positive_semidefinite());
  const Sym2 axis = horizontal_hessian(Jet{0, 0, 0, 3, 5, 7}, {0, 1});
  CHECK(axis.det() == 0.0);
  CHECK(axis.c == 0.0);
}

TEST_CASE("check_ellipticity") {
  std::vector<Point> pts;
  oracle::Gen gen(23);
  for (int n = 0; n < 500; ++n) pts.push_back(gen.point(5));
  const auto id = check_ellipticity(identity_field(), pts);
  CHECK(id.passed());
  CHECK(id.value("lower_margin") == 0.0);
  CHECK(id.value("upper_margin") == 0.0);

  const CoefficientField wrong([](Point) { return Coefficients{1, 0, 3}; }, EllipticityConstants(1, 2));
  const auto bad = check_ellipticity(wrong, pts);
  CHECK_FALSE(bad.passed());
  CHECK(bad.value("violating_points") == static_cast<double>(pts.size()));

  for (FieldKind k : {FieldKind::Rotating, FieldKind::Checkerboard, FieldKind::RandomSmooth}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      FieldParams p;
      p.lambda = 0.25;
      p.Lambda = 1.0;
      CHECK(check_ellipticity(make_field(k, p, seed), pts).passed());
    }
  }
}

TEST_CASE("field generators") {
  const Coefficients a = make_field(FieldKind::Identity, {})({1, 2});
  CHECK(a.a11 == 1.0);
  CHECK(a.a12 == 0.0);
  CHECK(a.a22 == 1.0);

  FieldParams p;
  p.explicit_matrix = true;
  p.matrix = {2, 0.5, 1};
  const CoefficientField c = make_field(FieldKind::Constant, p);
  CHECK(std::abs(c.declared().lambda - (1.5 - std::sqrt(0.5))) <= 1e-12);
  CHECK(std::abs(c.declared().Lambda - (1.5 + std::sqrt(0.5))) <= 1e-12);

  FieldParams q;
  q.lambda = 0.5;
  q.Lambda = 2.0;
  const CoefficientField board = make_field(FieldKind::Checkerboard, q, 3);
  CHECK(board.declared().lambda == 0.5);
  CHECK(board.declared().Lambda == 2.0);
  std::vector<Point> pts;
  oracle::Gen gen(24);
  for (int n = 0; n < 200; ++n) pts.push_back(gen.point(3));
  for (const Point& x : pts) {
    const auto [lo, hi] = board(x).matrix().eigenvalues();
    CHECK(std::abs(lo - 0.5) <= 1e-12);
    CHECK(std::abs(hi - 2.0) <= 1e-12);
  }
  // deterministic in the seed
  const CoefficientField r1 = make_field(FieldKind::RandomSmooth, q, 9), r2 = make_field(FieldKind::RandomSmooth, q, 9);
  for (const Point& x : pts) CHECK(r1(x).a12 == r2(x).a12);
  CHECK_THROWS_AS(field_kind_from_string("spiral"), DomainError);
}

TEST_CASE("dilation and translation-scaling covariance") {
  oracle::Gen gen(25);
  for (int n = 0; n < 2000; ++n) {
    const CoefficientField a = make_field(gen.field());
    const Point x = gen.point(2);
    const double t = gen.log_uniform(0.1, 10);
    const double b2 = gen.uniform(-3, 3);
    const CoefficientField at = a.pullback(DiagonalMap::dilation(t));
    const double lhs = apply_L(at, [&](Point p) { return compose(trig, t, 0, p); }, x);
    const Point tx = dilate(t, x);
    const double rhs = t * t * apply_L(a(tx), trig(tx), tx);
    const double scale = t * t * (1 + std::abs(tx.x1) * std::abs(tx.x1)) * 4;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);

    const CoefficientField aT = a.pullback(DiagonalMap::translate_scale(t, b2));
    auto poly = [](Point p) { return quadratic(1.5, -0.7, 2.0, p); };
    const double l2 = apply_L(aT, [&](Point p) { return compose(poly, t, b2, p); }, x);
    const Point Tx = translate_scale(t, b2, x);
    const double r2 = t * t * apply_L(a(Tx), poly(Tx), Tx);
    CHECK(std::abs(l2 - r2) <= 1e-12 * (1 + std::abs(r2)));
  }
}

TEST_CASE("grid layout and CSV") {
  const Grid g(-1, 1, 0, 2, 5, 3);
  CHECK(g.h1() == 0.5);
  CHECK(g.h2() == 1.0);
  CHECK(g.node(4, 2) == Point{1, 2});
  CHECK(Grid::centered({0, 0}, 1, 1, 9, 9).node(4, 4) == Point{0, 0});
  CHECK_THROWS_AS(Grid(0, 1, 0, 1, 2, 5), DomainError);
  const auto tags = rectangle_tags(g);
  CHECK(tags[g.index(0, 1)] == NodeTag::Boundary);
  CHECK(tags[g.index(2, 1)] == NodeTag::Interior);

  const GridFunction u = GridFunction::sample(g, [](Point p) { return p.x1 * 0.1 + p.x2 / 3.0; });
  std::stringstream ss;
  write_csv(ss, u);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "x1,x2,value");
  ss.seekg(0);
  const GridFunction back = read_csv(ss);
  CHECK(back.grid == g);
  for (std::size_t k = 0; k < u.size(); ++k) CHECK(back.values[k] == u.values[k]);
}

TEST_CASE("stencil rows") {
  const Grid g = Grid::centered({0, 0}, 1, 1, 9, 9);
  const DiscreteOperator op = discretize_L(g, identity_field());
  // node on the axis: only the x1 second difference survives
  const std::size_t k = g.index(4, 3);
  const double h1 = g.h1();
  std::size_t count = 0;
  for (std::size_t p = op.matrix.row_ptr[k]; p < op.matrix.row_ptr[k + 1]; ++p) ++count;
  CHECK(count == 3);
  CHECK(op.matrix.at(k, k) == doctest::Approx(-2 / (h1 * h1)));
  CHECK(op.matrix.at(k, k - 1) == doctest::Approx(1 / (h1 * h1)));
  CHECK(op.matrix.at(k, k + g.n1()) == 0.0);
  CHECK(op.diagnostics.monotone());

  oracle::Gen gen(26);
  for (int trial = 0; trial < 20; ++trial) {
    const CoefficientField f = make_field(gen.field());
    const Grid gg(gen.uniform(-2, -0.5), gen.uniform(0.5, 2), gen.uniform(-2, -0.5), gen.uniform(0.5, 2), 13, 17);
    const DiscreteOperator o = discretize_L(gg, f);
    std::vector<double> affine(gg.size());
    for (std::size_t n = 0; n < gg.size(); ++n) affine[n] = 1.5 - gg.node(n).x1 + 0.25 * gg.node(n).x2;
    for (double v : apply_discrete(o, affine)) CHECK(std::abs(v) <= 1e-10);
  }

  // bilinear data under a12 = 1: discrete L (x1 x2) = 2 x1
  const Grid gb(-1, 1, -1, 1, 11, 11);
  const DiscreteOperator ob = discretize_L(gb, fixed({1, 1, 1}));
  std::vector<double> bil(gb.size());
  for (std::size_t n = 0; n < gb.size(); ++n) bil[n] = gb.node(n).x1 * gb.node(n).x2;
  const auto lu = apply_discrete(ob, bil);
  for (std::size_t n = 0; n < gb.size(); ++n) {
    if (ob.tags[n] == NodeTag::Interior) CHECK(std::abs(lu[n] - 2 * gb.node(n).x1) <= 1e-12);
  }
  // a cross term away from the axis breaks dominance, which is flagged
  CHECK(ob.diagnostics.flagged_rows() > 0);
  CHECK(ob.diagnostics.flagged.size() <= 32);
}

TEST_CASE("Dirichlet solves") {
  oracle::Gen gen(27);
  auto affine = [](Point p) { return 2 + 3 * p.x1 - p.x2; };
  for (int trial = 0; trial < 10; ++trial) {
    const CoefficientField f = make_field(gen.field());
    const Grid g(-1.2, 0.9, -0.7, 1.3, 21, 25);
    const DirichletSolve s = solve_dirichlet(f, GridFunction::sample(g, affine));
    CHECK(max_error(s.solution, affine) <= 1e-9);
    CHECK(s.residual <= 1e-10 * s.scale);
  }
  const Grid g(-1, 1, -1, 1, 17, 17);
  const DirichletSolve c = solve_dirichlet(identity_field(), GridFunction(g, 3.5));
  CHECK(max_error(c.solution, [](Point) { return 3.5; }) <= 1e-12);

  // a masked region: stencils may not reach exterior nodes
  auto disk = [](Point p) { return p.x1 * p.x1 + p.x2 * p.x2 < 0.8; };
  const GridFunction masked = GridFunction::sample(g, affine, region_tags(g, disk));
  CHECK(max_error(solve_dirichlet(identity_field(), masked).solution, affine) <= 1e-9);
  GridFunction broken = masked;
  broken.tags[g.index(8, 8)] = NodeTag::Interior;
  broken.tags[g.index(8, 16)] = NodeTag::Interior;
  CHECK_THROWS_AS(solve_dirichlet(identity_field(), broken), DomainError);

  // vanishing coefficients: singular system reported with a condition estimate
  const CoefficientField zero([](Point) { return Coefficients{0, 0, 0}; }, EllipticityConstants(1e-9, 1));
  try {
    solve_dirichlet(zero, GridFunction(g, 1.0));
    FAIL("singular system accepted");
  } catch (const SolverError& e) {
    CHECK(!(e.condition_estimate() < 1e12));
  }
}

TEST_CASE("manufactured solution converges at second order") {
  std::vector<double> errors;
  for (std::size_t n : {17, 33, 65}) {
    const Grid g(-1, 1, -1, 1, n, n);
    GridFunction rhs = GridFunction::sample(g, [](Point p) { return apply_L(Coefficients{1, 0, 1}, trig(p), p); });
    const GridFunction data = GridFunction::sample(g, [](Point p) { return trig(p).value; });
    const DirichletSolve s = solve_dirichlet(identity_field(), data, rhs);
    errors.push_back(max_error(s.solution, [](Point p) { return trig(p).value; }));
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double ratio = errors[k - 1] / errors[k];
    MESSAGE("error ratio " << ratio);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
}

TEST_CASE("fundamental solution with data on a gauge annulus") {
  // 1 / rho(., 0) solves L u = 0 for the identity field away from the pole
  auto gamma = [](Point x) {
    const double r = rho(x, {0, 0});
    return r > 0 ? 1 / r : 0.0;
  };
  auto annulus = [](Point x) {
    const double r = rho(x, {0, 0});
    return r > 0.5 && r < 2;
  };
  for (std::size_t n : {33, 65, 129}) {
    const Grid g(-2.2, 2.2, -2.2, 2.2, n, n);
    const GridFunction data = GridFunction::sample(g, gamma, region_tags(g, annulus));
    const DirichletSolve s = solve_dirichlet(identity_field(), data);
    double norm = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (data.tags[k] != NodeTag::Exterior) norm = std::max(norm, std::abs(data.values[k]));
    }
    const double e = max_error(s.solution, gamma);
    MESSAGE("n " << n << ": error / (h^2 |Gamma|) = " << e / (g.h1() * g.h1() * norm));
    CHECK(e <= 5 * g.h1() * g.h1() * norm);
  }
}
