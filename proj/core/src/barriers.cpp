#include "grushin/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "grushin/random.hpp"

namespace grushin {

double barrier_exponent(const EllipticityConstants& e) { return 2.0 - 3.0 * e.Lambda / e.lambda; }

Jet rho_jet(Point y, Point x) {
  const double d = x.x1 * x.x1 - y.x1 * y.x1;
  const double v = x.x2 - y.x2;
  const double p = rho(x, y);
  if (!(p > 0.0)) throw DomainError("rho vanishes at the evaluation point");
  const double p4 = p * p * p * p;
  const double inv3 = 1.0 / (p * p * p);
  const double inv7 = inv3 / p4;
  Jet j;
  j.value = p;
  j.d1 = inv3 * d * x.x1;
  j.d2 = 2.0 * inv3 * v;
  j.d11 = inv7 * (12.0 * v * v * x.x1 * x.x1 - y.x1 * y.x1 * p4);
  j.d12 = inv7 * (-6.0 * v * x.x1 * d);
  j.d22 = inv7 * (3.0 * d * d - p4);
  return j;
}

Jet power_barrier(Point y, double a, Point x) {
  const Jet r = rho_jet(y, x);
  const double pa1 = a * std::pow(r.value, a - 1.0);
  const double pa2 = a * (a - 1.0) * std::pow(r.value, a - 2.0);
  Jet j;
  j.value = std::pow(r.value, a);
  j.d1 = pa1 * r.d1;
  j.d2 = pa1 * r.d2;
  j.d11 = pa2 * r.d1 * r.d1 + pa1 * r.d11;
  j.d12 = pa2 * r.d1 * r.d2 + pa1 * r.d12;
  j.d22 = pa2 * r.d2 * r.d2 + pa1 * r.d22;
  return j;
}

std::string to_string(Lemma41Case c) {
  switch (c) {
    case Lemma41Case::Far: return "far";
    case Lemma41Case::Small: return "small";
    case Lemma41Case::Mid: return "mid";
    case Lemma41Case::Near: return "near";
  }
  return "small";
}

Lemma41Case lemma41_case(Point y, double r) {
  const double a = std::abs(y.x1);
  if (a >= 2.0 * r) return Lemma41Case::Far;
  if (a < 0.5 * r) return Lemma41Case::Small;
  if (a < r) return Lemma41Case::Mid;
  return Lemma41Case::Near;
}

Lemma41Constants lemma41_constants(Point y, double r, double alpha) {
  if (!(r > 0.0)) throw DomainError("barrier radius must be positive");
  if (!(alpha < 0.0)) throw DomainError("barrier exponent must be negative");
  const double outer = std::pow(level_radius(y, 2.0 * r), alpha);
  const double inner = std::pow(level_radius(y, r), alpha);
  const double half = std::pow(level_radius(y, 0.5 * r), alpha);
  Lemma41Constants c;
  c.M2 = 2.0 / (inner - outer);
  c.M1 = c.M2 * outer;
  c.m = -(c.M1 - c.M2 * half);
  c.which = lemma41_case(y, r);
  return c;
}

int smoothing_exponent(double alpha) {
  if (!(alpha < 0.0)) throw DomainError("barrier exponent must be negative");
  const double bound = std::max(1.0, 1.0 - 4.0 / alpha);
  int beta = 1;
  while (!(2.0 * beta > bound)) ++beta;
  return beta;
}

double smoothing_tail_integral(int beta) {
  if (beta < 1) throw DomainError("smoothing exponent must be at least 1");
  const double q = 2.0 * beta;
  return std::numbers::pi / (q * std::sin(std::numbers::pi / q));
}

SmoothingFunction::SmoothingFunction(double m, int beta)
    : m_(m), beta_(beta), tail_(smoothing_tail_integral(beta)) {}

namespace {

double power_even(double u, int beta) { return std::pow(u * u, beta); }

// Alternating series sum_k (-1)^k x^(q k + p) / (q k + p), used where x^q <= 1/4.
double alternating_series(double x, double q, double p) {
  const double xq = std::pow(x, q);
  double term = std::pow(x, p), sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double add = term / (q * k + p);
    sum += (k % 2 == 0) ? add : -add;
    if (add <= 1e-17 * std::abs(sum)) break;
    term *= xq;
  }
  return sum;
}

// integral over [0, w] of 1 / (1 + s^(2 beta))
double partial_integral(double w, int beta, double tail) {
  using boost::math::quadrature::gauss_kronrod;
  const double q = 2.0 * beta;
  if (w == 0.0) return 0.0;
  if (q * std::log(w) <= -std::log(4.0)) return alternating_series(w, q, 1.0);
  if (q * std::log(w) >= std::log(4.0)) return tail - alternating_series(1.0 / w, q, q - 1.0);
  // moderate w: the integrand is analytic within distance sin(pi / q) of [0, w]
  auto f = [beta](double s) { return 1.0 / (1.0 + power_even(s, beta)); };
  constexpr int kPanels = 8;
  double sum = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    sum += gauss_kronrod<double, 61>::integrate(f, w * k / kPanels, w * (k + 1) / kPanels, 0);
  }
  return sum;
}

}  // namespace

double SmoothingFunction::value(double t) const {
  if (t >= -m_) return t;
  return -partial_integral(-(t + m_), beta_, tail_) - m_;
}

double SmoothingFunction::d1(double t) const {
  if (t >= -m_) return 1.0;
  return 1.0 / (1.0 + power_even(t + m_, beta_));
}

double SmoothingFunction::d2(double t) const {
  if (t >= -m_) return 0.0;
  const double u = t + m_;
  const double denom = 1.0 + power_even(u, beta_);
  return -2.0 * beta_ * std::pow(u, 2 * beta_ - 1) / (denom * denom);
}

CutoffFunction::CutoffFunction(Point y, double r)
    : y_(y), inner_(level_radius(y, 0.5 * r)), outer_(level_radius(y, 2.0 * r / 3.0)) {}

double CutoffFunction::operator()(Point x) const {
  const double p = rho(x, y_);
  if (p <= inner_) return 1.0;
  if (p >= outer_) return 0.0;
  const double s = (p - inner_) / (outer_ - inner_);
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

nlohmann::json BarrierSpec::to_json() const {
  const char* fam = family == BarrierFamily::Power      ? "power"
                    : family == BarrierFamily::Smoothed ? "smoothed"
                                                        : "ring";
  return {{"family", fam},        {"alpha", alpha}, {"center", {y.x1, y.x2}},
          {"radius", r},          {"case", case_label}, {"M1", M1},
          {"M2", M2},             {"M3_or_m", M3_or_m}, {"beta", beta},
          {"gamma", gamma}};
}

BarrierSpec power_spec(Point y, double alpha) {
  BarrierSpec s;
  s.family = BarrierFamily::Power;
  s.alpha = alpha;
  s.y = y;
  s.case_label = "power";
  s.M1 = 0.0;
  s.M2 = 1.0;
  return s;
}

Lemma41Barrier::Lemma41Barrier(Point y, double r, double alpha)
    : y_(y),
      r_(r),
      alpha_(alpha),
      constants_(lemma41_constants(y, r, alpha)),
      h_(constants_.m, smoothing_exponent(alpha)),
      zeta_(y, r) {}

Jet Lemma41Barrier::operator()(Point x) const {
  Jet out;
  if (!(rho(x, y_) > 0.0)) {
    out.value = h_.lower_bound();
    return out;
  }
  const Jet p = power_barrier(y_, alpha_, x);
  const double M1 = constants_.M1, M2 = constants_.M2;
  const double phi = M1 - M2 * p.value;
  const double g1 = -M2 * p.d1, g2 = -M2 * p.d2;
  const double h1 = h_.d1(phi), h2 = h_.d2(phi);
  out.value = h_.value(phi);
  out.d1 = h1 * g1;
  out.d2 = h1 * g2;
  out.d11 = h2 * g1 * g1 - h1 * M2 * p.d11;
  out.d12 = h2 * g1 * g2 - h1 * M2 * p.d12;
  out.d22 = h2 * g2 * g2 - h1 * M2 * p.d22;
  return out;
}

BarrierSpec Lemma41Barrier::spec() const {
  BarrierSpec s;
  s.family = BarrierFamily::Smoothed;
  s.alpha = alpha_;
  s.y = y_;
  s.r = r_;
  s.case_label = to_string(constants_.which);
  s.M1 = constants_.M1;
  s.M2 = constants_.M2;
  s.M3_or_m = constants_.m;
  s.beta = h_.beta();
  return s;
}

Lemma41Barrier lemma41_barrier(Point y, double r, const EllipticityConstants& e) {
  return Lemma41Barrier(y, r, barrier_exponent(e));
}

std::string to_string(RingCase c) {
  switch (c) {
    case RingCase::I: return "I";
    case RingCase::II: return "II";
    case RingCase::III: return "III";
    case RingCase::IV: return "IV";
  }
  return "I";
}

double ring_gamma(double alpha) {
  if (!(alpha < 0.0)) throw DomainError("barrier exponent must be negative");
  const double a2 = std::pow(2.0, alpha), a3 = std::pow(3.0, alpha);
  const double h2 = std::pow(2.0, alpha / 2.0), h3 = std::pow(3.0, alpha / 2.0);
  const double h6 = std::pow(6.0, alpha / 2.0);
  return std::min({(a2 - a3) / (1.0 - a3), (h2 - h3) / (1.0 - h3), (h6 - a3) / (h2 - a3)});
}

RingBarrier::RingBarrier(Point y, double r, double alpha) : y_(y), r_(r), alpha_(alpha) {
  if (!(r > 0.0)) throw DomainError("barrier radius must be positive");
  const double outer = std::pow(level_radius(y, 3.0 * r), alpha);
  const double inner = std::pow(level_radius(y, r), alpha);
  const double mid = std::pow(level_radius(y, 2.0 * r), alpha);
  M2_ = 1.0 / (inner - outer);
  M1_ = M2_ * outer;
  M3_ = M2_ * mid - M1_;
  gamma_ = ring_gamma(alpha);
  const double a = std::abs(y.x1);
  case_ = a < r ? RingCase::I : a < 2.0 * r ? RingCase::III : a < 3.0 * r ? RingCase::IV
                                                                          : RingCase::II;
}

Jet RingBarrier::operator()(Point x) const {
  Jet p = power_barrier(y_, alpha_, x);
  p.value = M2_ * p.value - M1_;
  p.d1 *= M2_;
  p.d2 *= M2_;
  p.d11 *= M2_;
  p.d12 *= M2_;
  p.d22 *= M2_;
  return p;
}

BarrierSpec RingBarrier::spec() const {
  BarrierSpec s;
  s.family = BarrierFamily::Ring;
  s.alpha = alpha_;
  s.y = y_;
  s.r = r_;
  s.case_label = to_string(case_);
  s.M1 = M1_;
  s.M2 = M2_;
  s.M3_or_m = M3_;
  s.gamma = gamma_;
  return s;
}

RingBarrier ring_barrier(Point y, double r, const EllipticityConstants& e) {
  return RingBarrier(y, r, barrier_exponent(e));
}

namespace {

// Point on {rho(., y) = R} at angle psi, x1 = side * sqrt(y1^2 + R^2 cos psi).
Point level_point(Point y, double R, double psi, double side) {
  const double R2 = R * R;
  const double x1 = side * std::sqrt(std::max(0.0, y.x1 * y.x1 + R2 * std::cos(psi)));
  return {x1, y.x2 + 0.5 * R2 * std::sin(psi)};
}

double max_angle(Point y, double R) {
  const double R2 = R * R, y2 = y.x1 * y.x1;
  return R2 <= y2 ? std::numbers::pi : std::acos(-y2 / R2);
}

}  // namespace

std::vector<Point> level_set_samples(Point y, double R, std::size_t count, std::uint64_t seed) {
  if (!(R > 0.0)) throw DomainError("level must be positive");
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  const double top = max_angle(y, R);
  for (std::size_t n = 0; n < count; ++n) {
    // the extreme angles come first: they touch the axis when the set does
    const double psi = n < 2 ? (n == 0 ? top : -top) : rng.uniform(-top, top);
    const double side = rng.unit() < 0.5 ? -1.0 : 1.0;
    out.push_back(level_point(y, R, psi, side));
  }
  return out;
}

std::vector<Point> log_radial_samples(Point y, double rho_min, double rho_max, std::size_t count,
                                      std::uint64_t seed) {
  if (!(rho_min > 0.0) || !(rho_max >= rho_min)) throw DomainError("bad radial range");
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  const double a = std::log(rho_min), b = std::log(rho_max);
  for (std::size_t n = 0; n < count; ++n) {
    const double R = std::exp(rng.uniform(a, b));
    const double top = max_angle(y, R);
    const double psi = rng.uniform(-top, top);
    const double side = rng.unit() < 0.5 ? -1.0 : 1.0;
    const Point x = level_point(y, R, psi, side);
    if (rho(x, y) > 0.0) out.push_back(x);
  }
  return out;
}

std::vector<Point> splice_shell_samples(const Lemma41Barrier& barrier, std::size_t count,
                                        std::uint64_t seed, double u_min, double u_max) {
  if (!(u_min > 0.0) || !(u_max >= u_min)) throw DomainError("bad splice range");
  const Lemma41Constants& c = barrier.constants();
  const Point y = barrier.center();
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  const double a = std::log(u_min), b = std::log(u_max);
  for (std::size_t n = 0; n < count; ++n) {
    const double t = -std::exp(rng.uniform(a, b)) - c.m;
    const double R = std::pow((c.M1 - t) / c.M2, 1.0 / barrier.alpha());
    const double top = max_angle(y, R);
    const double psi = rng.uniform(-top, top);
    const double side = rng.unit() < 0.5 ? -1.0 : 1.0;
    const Point x = level_point(y, R, psi, side);
    if (rho(x, y) > 0.0) out.push_back(x);
  }
  return out;
}

namespace {

double term_scale(const Coefficients& a, const Jet& u, Point x) {
  return std::abs(a.a11 * u.d11) + std::abs(2.0 * a.a12 * x.x1 * u.d12) +
         std::abs(a.a22 * x.x1 * x.x1 * u.d22);
}

std::string describe(Point x) {
  std::ostringstream s;
  s.precision(17);
  s << "(" << x.x1 << ", " << x.x2 << ")";
  return s.str();
}

}  // namespace

ExperimentReport verify_subsolution(const CoefficientField& field, const SmoothFunction& phi,
                                    const std::vector<Point>& samples, const std::string& name) {
  ExperimentReport rep;
  rep.name = name;
  rep.config = {{"field", field.label()}, {"samples", samples.size()}};
  std::size_t bad = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const Point& x : samples) {
    const Coefficients a = field(x);
    const Jet u = phi(x);
    const double lu = apply_L(a, u, x);
    const double scale = term_scale(a, u, x);
    const double rel = scale > 0.0 ? lu / scale : 0.0;
    worst = std::min(worst, rel);
    if (lu < -1e-10 * scale) {
      if (bad == 0) rep.note("first witness " + describe(x) + " with L phi = " + std::to_string(lu));
      ++bad;
    }
  }
  rep.record("worst_relative_value", samples.empty() ? 0.0 : worst);
  rep.check("violations", static_cast<double>(bad), Relation::LessEqual, 0.0);
  return rep;
}

ExperimentReport verify_subsolution(const CoefficientField& field, const BarrierSpec& spec,
                                    const std::vector<Point>& samples) {
  SmoothFunction phi;
  if (spec.family == BarrierFamily::Power) {
    const Point y = spec.y;
    const double a = spec.alpha;
    phi = [y, a](Point x) { return power_barrier(y, a, x); };
  } else if (spec.family == BarrierFamily::Ring) {
    const RingBarrier ring(spec.y, spec.r, spec.alpha);
    phi = [ring](Point x) { return ring(x); };
  } else {
    throw DomainError("the smoothed barrier is checked with verify_lemma41");
  }
  ExperimentReport rep = verify_subsolution(field, phi, samples,
                                            spec.family == BarrierFamily::Power ? "power_subsolution"
                                                                                : "ring_subsolution");
  rep.config["barrier"] = spec.to_json();
  rep.config["lambda"] = field.declared().lambda;
  rep.config["big_lambda"] = field.declared().Lambda;
  return rep;
}

ExperimentReport verify_lemma41(const CoefficientField& field, const Lemma41Barrier& barrier,
                                const std::vector<Point>& samples) {
  ExperimentReport rep;
  rep.name = "smoothed_barrier";
  rep.config = {{"field", field.label()},
                {"barrier", barrier.spec().to_json()},
                {"samples", samples.size()}};
  const Point y = barrier.center();
  const double r = barrier.radius();
  const double rho_outer = level_radius(y, 2.0 * r);
  const double rho_inner = level_radius(y, r);
  const double floor = barrier.smoothing().lower_bound();
  const double norm = r * r * (r + std::abs(y.x1)) * (r + std::abs(y.x1));
  std::size_t outside_bad = 0, inside_bad = 0, floor_bad = 0, cut_bad = 0;
  double constant = 0.0;
  for (const Point& x : samples) {
    const double p = rho(x, y);
    const Jet u = barrier(x);
    const double tol = 1e-10 * std::max(1.0, std::abs(u.value));
    if (p >= rho_outer && u.value < -tol) ++outside_bad;
    if (p < rho_inner && u.value > -2.0 + tol) ++inside_bad;
    if (u.value < floor - tol) ++floor_bad;
    if (!(p > 0.0)) continue;
    const Coefficients a = field(x);
    const double lu = apply_L(a, u, x);
    const double slack = 1e-10 * term_scale(a, u, x);
    const double z = barrier.cutoff()(x);
    if (z == 0.0 || x.x1 == 0.0) {
      if (lu > slack) ++cut_bad;
      continue;
    }
    constant = std::max(constant, lu * norm / (x.x1 * x.x1 * z));
  }
  rep.check("nonnegative_outside_violations", static_cast<double>(outside_bad), Relation::LessEqual,
            0.0);
  rep.check("inner_bound_violations", static_cast<double>(inside_bad), Relation::LessEqual, 0.0);
  rep.check("lower_bound_violations", static_cast<double>(floor_bad), Relation::LessEqual, 0.0);
  rep.check("cutoff_violations", static_cast<double>(cut_bad), Relation::LessEqual, 0.0);
  rep.check("measured_constant", constant, Relation::Less, std::numeric_limits<double>::infinity());
  rep.record("lower_bound", floor);
  return rep;
}

}  // namespace grushin
