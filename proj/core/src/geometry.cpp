#include "grushin/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "grushin/random.hpp"

namespace grushin {

namespace {

void require_positive(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

void require_index(int j) {
  if (j != 1 && j != 2) throw DomainError("direction index must be 1 or 2");
}

template <class F>
double integrate(F f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13);
}

// sqrt((y1 + t)^2 + y1^2) integrated over [-r, r]; the integrand has a kink
// at t = 0 only when y1 = 0.
double sqrt_term_integral(double y1, double r) {
  auto g = [y1](double t) { return std::hypot(y1 + t, y1); };
  return integrate(g, -r, 0.0) + integrate(g, 0.0, r);
}

}  // namespace

bool Point::finite() const { return std::isfinite(x1) && std::isfinite(x2); }

double rho(Point x, Point y) {
  const double a = (x.x1 - y.x1) * (x.x1 + y.x1);
  const double b = 2.0 * (x.x2 - y.x2);
  return std::sqrt(std::hypot(a, b));
}

double quasi_distance(Point x, Point y) {
  const double s = x.x1 * x.x1 + y.x1 * y.x1;
  const double v = 4.0 * std::abs(x.x2 - y.x2);
  // sqrt(s + v) - sqrt(s) rewritten to avoid cancellation
  const double lift = v == 0.0 ? 0.0 : v / (std::sqrt(s + v) + std::sqrt(s));
  return std::abs(x.x1 - y.x1) + lift;
}

double box_halfwidth(int j, Point x, double r) {
  require_index(j);
  if (r < 0.0) throw DomainError("radius must be nonnegative");
  return j == 1 ? r : r * (std::abs(x.x1) + r);
}

double box_inverse(int j, Point x, double r) {
  require_index(j);
  if (r < 0.0) throw DomainError("radius must be nonnegative");
  if (j == 1) return r;
  const double a = std::abs(x.x1);
  // (-a + sqrt(a^2 + 4r)) / 2 without cancellation
  return 2.0 * r / (a + std::sqrt(a * a + 4.0 * r));
}

double frla_sum(Point x, Point y) {
  return box_inverse(1, x, std::abs(y.x1 - x.x1)) + box_inverse(2, x, std::abs(y.x2 - x.x2));
}

BoxSpec::BoxSpec(Point c, double r) : center(c), radius(r) { require_positive(r, "box radius"); }

bool BoxSpec::contains(Point x) const {
  return std::abs(x.x1 - center.x1) < halfwidth(1) && std::abs(x.x2 - center.x2) < halfwidth(2);
}

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::B: return "B";
    case SetKind::BTilde: return "B_tilde";
    case SetKind::G: return "G";
    case SetKind::GTilde: return "G_tilde";
  }
  return "B";
}

SetKind set_kind_from_string(const std::string& text) {
  if (text == "B") return SetKind::B;
  if (text == "B_tilde") return SetKind::BTilde;
  if (text == "G") return SetKind::G;
  if (text == "G_tilde") return SetKind::GTilde;
  throw DomainError("unknown set kind '" + text + "'");
}

double gauge_tilde(Point x, Point y, double r) {
  const double p = rho(x, y);
  const double a = std::abs(y.x1);
  return a < r ? p : p * p / a;
}

double gauge(Point x, Point y, double r) {
  if (std::abs(y.x1) >= r && x.x1 * y.x1 < 0.0) return std::numeric_limits<double>::infinity();
  return gauge_tilde(x, y, r);
}

double level_radius(Point y, double s) {
  require_positive(s, "level");
  return std::max(s, std::sqrt(s * std::abs(y.x1)));
}

QuasiBallSpec::QuasiBallSpec(Point c, double r, SetKind k) : center(c), radius(r), kind(k) {
  require_positive(r, "ball radius");
}

bool QuasiBallSpec::contains(Point x) const {
  switch (kind) {
    case SetKind::B: return quasi_distance(x, center) < radius;
    case SetKind::BTilde:
      return quasi_distance(x, center) < radius || quasi_distance(x, reflect(center)) < radius;
    case SetKind::G: return gauge(x, center, radius) < radius;
    case SetKind::GTilde: return gauge_tilde(x, center, radius) < radius;
  }
  return false;
}

double ball_volume(Point y, double r) {
  require_positive(r, "ball radius");
  const double y1 = y.x1;
  auto f = [y1, r](double t) {
    const double s = r - std::abs(t);
    return 0.5 * (s * s + 2.0 * s * std::hypot(y1 + t, y1));
  };
  return integrate(f, -r, 0.0) + integrate(f, 0.0, r);
}

double ball_volume_derivative(Point y, double r) {
  require_positive(r, "ball radius");
  return r * r + sqrt_term_integral(y.x1, r);
}

double ring_deficit(Point y, double r, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("ring width must lie in (0, 1)");
  const double outer = ball_volume(y, r);
  return (outer - ball_volume(y, (1.0 - eps) * r)) / outer;
}

double ring_deficit_bound(Point y, double r) {
  return 4.0 * r * r * (r + std::abs(y.x1)) / ball_volume(y, r);
}

DiagonalMap DiagonalMap::dilation(double t) {
  require_positive(t, "dilation factor");
  return {t, t * t, 0.0, 0.0};
}

DiagonalMap DiagonalMap::translate_scale(double r, double y2) {
  require_positive(r, "scale");
  return {r, r * r, 0.0, y2};
}

Point dilate(double t, Point x) { return DiagonalMap::dilation(t)(x); }
Point translate_scale(double r, double y2, Point x) { return DiagonalMap::translate_scale(r, y2)(x); }
Point reflect(Point x) { return {-x.x1, x.x2}; }

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Charact: return "charact";
    case StructureKind::Equiv: return "equiv";
    case StructureKind::Frla: return "frla";
  }
  return "charact";
}

StructureKind structure_kind_from_string(const std::string& text) {
  if (text == "charact") return StructureKind::Charact;
  if (text == "equiv") return StructureKind::Equiv;
  if (text == "frla") return StructureKind::Frla;
  throw DomainError("unknown structure check '" + text + "'");
}

namespace {

Point sample_box(Rng& rng, const BoxSpec& box) {
  const double a = box.halfwidth(1);
  const double b = box.halfwidth(2);
  return {box.center.x1 + rng.uniform(-a, a), box.center.x2 + rng.uniform(-b, b)};
}

void inclusion_check(ExperimentReport& rep, StructureKind kind, Point y, double r,
                     std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const std::array<double, 4> scales{6.0, 3.0, 1.0, 0.2};
  std::size_t violations = 0, inner = 0, middle = 0, outer = 0;
  for (std::size_t n = 0; n < samples; ++n) {
    const Point x = n == 0 ? y : sample_box(rng, BoxSpec(y, scales[n % 4] * r));
    bool a = false, b = false, c = false;
    if (kind == StructureKind::Charact) {
      a = QuasiBallSpec(y, r, SetKind::B).contains(x);
      b = BoxSpec(y, r).contains(x);
      c = QuasiBallSpec(y, 3.0 * r, SetKind::B).contains(x);
    } else {
      a = BoxSpec(y, r / 5.0).contains(x);
      b = QuasiBallSpec(y, r, SetKind::G).contains(x);
      c = BoxSpec(y, 3.0 * r).contains(x);
    }
    inner += a;
    middle += b;
    outer += c;
    if ((a && !b) || (b && !c)) ++violations;
  }
  rep.check("violations", static_cast<double>(violations), Relation::LessEqual, 0.0);
  rep.record("samples", static_cast<double>(samples));
  rep.record("inner_hits", static_cast<double>(inner));
  rep.record("middle_hits", static_cast<double>(middle));
  rep.record("outer_hits", static_cast<double>(outer));
}

void frla_check(ExperimentReport& rep, Point y, double r, std::size_t samples,
                std::uint64_t seed) {
  const BoxSpec region(y, 4.0 * r);
  const double h = std::min(r / 20.0, region.halfwidth(2) / 40.0);
  const CCLattice lattice(region, h);
  const CCDistanceField field(lattice, y);
  const BoxSpec probe(y, 3.0 * r);

  Rng rng(seed);
  double lo_sum = INFINITY, hi_sum = 0.0, lo_qd = INFINITY, hi_qd = 0.0;
  std::size_t used = 0;
  for (std::size_t n = 0; n < samples; ++n) {
    const Point x = sample_box(rng, probe);
    const double d = field.at(x);
    if (!(d > 0.0)) continue;
    // compare at the snapped node, where the lattice distance lives
    const double i = std::round((x.x1 - y.x1) / h), j = std::round((x.x2 - y.x2) / h);
    const Point node{y.x1 + i * h, y.x2 + j * h};
    const double s = frla_sum(y, node) / d;
    const double q = quasi_distance(y, node) / d;
    lo_sum = std::min(lo_sum, s);
    hi_sum = std::max(hi_sum, s);
    lo_qd = std::min(lo_qd, q);
    hi_qd = std::max(hi_qd, q);
    ++used;
  }
  rep.record("lattice_spacing", h);
  rep.check("pairs", static_cast<double>(used), Relation::Greater, 0.0);
  rep.record("sum_ratio_min", lo_sum);
  rep.record("sum_ratio_max", hi_sum);
  rep.record("quasi_ratio_min", lo_qd);
  rep.record("quasi_ratio_max", hi_qd);
  const double c_sum = std::max(hi_sum, 1.0 / lo_sum);
  const double c_qd = std::max(hi_qd, 1.0 / lo_qd);
  rep.check("sum_constant", c_sum, Relation::Less, INFINITY);
  rep.check("quasi_constant", c_qd, Relation::Less, INFINITY);
}

}  // namespace

ExperimentReport structure_check(StructureKind kind, Point y, double r, std::size_t samples,
                                 std::uint64_t seed) {
  require_positive(r, "radius");
  if (samples == 0) throw DomainError("structure check needs at least one sample");
  if (!y.finite()) throw DomainError("center must be finite");
  ExperimentReport rep;
  rep.name = "structure_" + to_string(kind);
  rep.seed = seed;
  rep.config = {{"kind", to_string(kind)}, {"center", {y.x1, y.x2}}, {"radius", r},
                {"samples", samples}};
  if (kind == StructureKind::Frla) {
    frla_check(rep, y, r, samples, seed);
  } else {
    inclusion_check(rep, kind, y, r, samples, seed);
  }
  return rep;
}

}  // namespace grushin
