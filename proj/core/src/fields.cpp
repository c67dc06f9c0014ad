#include "grushin/fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "grushin/random.hpp"

namespace grushin {

EllipticityConstants::EllipticityConstants(double lo, double hi) : lambda(lo), Lambda(hi) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw DomainError("ellipticity constants need 0 < lambda <= Lambda");
  }
}

std::pair<double, double> Sym2::eigenvalues() const {
  const double m = 0.5 * (a + c);
  const double d = std::hypot(0.5 * (a - c), b);
  return {m - d, m + d};
}

bool Sym2::positive_semidefinite(double tol) const { return eigenvalues().first >= -tol; }

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Identity: return "identity";
    case FieldKind::Constant: return "constant";
    case FieldKind::Rotating: return "rotating";
    case FieldKind::Checkerboard: return "checkerboard";
    case FieldKind::RandomSmooth: return "random_smooth";
  }
  return "identity";
}

FieldKind field_kind_from_string(const std::string& text) {
  if (text == "identity") return FieldKind::Identity;
  if (text == "constant") return FieldKind::Constant;
  if (text == "rotating") return FieldKind::Rotating;
  if (text == "checkerboard") return FieldKind::Checkerboard;
  if (text == "random_smooth") return FieldKind::RandomSmooth;
  throw DomainError("unknown field kind '" + text + "'");
}

nlohmann::json FieldParams::to_json() const {
  nlohmann::json j{{"lambda", lambda}, {"big_lambda", Lambda},     {"angle", angle},
                   {"theta_max", theta_max}, {"frequency", frequency}, {"cell", cell}};
  if (explicit_matrix) j["matrix"] = {matrix.a11, matrix.a12, matrix.a22};
  return j;
}

FieldParams FieldParams::from_json(const nlohmann::json& j) {
  FieldParams p;
  p.lambda = j.value("lambda", p.lambda);
  p.Lambda = j.value("big_lambda", p.Lambda);
  p.angle = j.value("angle", p.angle);
  p.theta_max = j.value("theta_max", p.theta_max);
  p.frequency = j.value("frequency", p.frequency);
  p.cell = j.value("cell", p.cell);
  if (j.contains("matrix")) {
    const auto m = j.at("matrix").get<std::vector<double>>();
    if (m.size() != 3) throw DomainError("field matrix needs three entries a11, a12, a22");
    p.explicit_matrix = true;
    p.matrix = {m[0], m[1], m[2]};
  }
  return p;
}

nlohmann::json FieldDescriptor::to_json() const {
  return {{"kind", to_string(kind)}, {"params", params.to_json()}, {"seed", seed}};
}

FieldDescriptor FieldDescriptor::from_json(const nlohmann::json& j) {
  FieldDescriptor d;
  d.kind = field_kind_from_string(j.value("kind", std::string("identity")));
  if (j.contains("params")) d.params = FieldParams::from_json(j.at("params"));
  d.seed = j.value("seed", d.seed);
  return d;
}

CoefficientField::CoefficientField(Evaluator eval, EllipticityConstants declared, std::string label)
    : eval_(std::move(eval)), declared_(declared), label_(std::move(label)) {
  if (!eval_) throw DomainError("coefficient field needs an evaluator");
}

CoefficientField CoefficientField::pullback(const DiagonalMap& map) const {
  if (map.is_identity()) return *this;
  auto inner = eval_;
  return CoefficientField([inner, map](Point x) { return inner(map(x)); }, declared_,
                          label_ + "@pullback");
}

CoefficientField identity_field() {
  return CoefficientField([](Point) { return Coefficients{1.0, 0.0, 1.0}; },
                          EllipticityConstants(1.0, 1.0), "identity");
}

namespace {

Coefficients rotated(double lo, double hi, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {lo * c * c + hi * s * s, (lo - hi) * c * s, lo * s * s + hi * c * c};
}

// Smooth bounded function in [-1, 1]: normalized sum of three random Fourier
// modes.
struct Modes {
  std::array<double, 3> k1{}, k2{}, phase{};

  Modes(Rng& rng, double frequency) {
    for (int m = 0; m < 3; ++m) {
      k1[m] = frequency * rng.uniform(-1.0, 1.0);
      k2[m] = frequency * rng.uniform(-1.0, 1.0);
      phase[m] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
  }

  double operator()(Point x) const {
    double s = 0.0;
    for (int m = 0; m < 3; ++m) s += std::sin(k1[m] * x.x1 + k2[m] * x.x2 + phase[m]);
    return s / 3.0;
  }
};

}  // namespace

CoefficientField make_field(FieldKind kind, const FieldParams& p, std::uint64_t seed) {
  return make_field(FieldDescriptor{kind, p, seed});
}

CoefficientField make_field(const FieldDescriptor& d) {
  const FieldParams& p = d.params;
  Rng rng(d.seed);
  const std::string label = to_string(d.kind);
  switch (d.kind) {
    case FieldKind::Identity: {
      // any declared pair bracketing 1 is admissible
      const EllipticityConstants e(p.lambda, p.Lambda);
      if (e.lambda > 1.0 || e.Lambda < 1.0) {
        throw DomainError("identity field needs lambda <= 1 <= Lambda");
      }
      return CoefficientField([](Point) { return Coefficients{1.0, 0.0, 1.0}; }, e, label);
    }
    case FieldKind::Constant: {
      Coefficients a = p.explicit_matrix ? p.matrix : rotated(p.lambda, p.Lambda, p.angle);
      const auto [lo, hi] = a.matrix().eigenvalues();
      if (!(lo > 0.0)) throw DomainError("constant field matrix is not positive definite");
      return CoefficientField([a](Point) { return a; }, EllipticityConstants(lo, hi), label);
    }
    case FieldKind::Rotating: {
      const EllipticityConstants e(p.lambda, p.Lambda);
      const double w = p.frequency, tm = p.theta_max;
      const double f1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double f2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
      return CoefficientField(
          [e, w, tm, f1, f2](Point x) {
            const double theta = tm * std::sin(w * x.x1 + f1) * std::cos(w * x.x2 + f2);
            return rotated(e.lambda, e.Lambda, theta);
          },
          e, label);
    }
    case FieldKind::Checkerboard: {
      const EllipticityConstants e(p.lambda, p.Lambda);
      if (!(p.cell > 0.0)) throw DomainError("checkerboard cell must be positive");
      const double cell = p.cell;
      const double o1 = rng.uniform(0.0, cell), o2 = rng.uniform(0.0, cell);
      return CoefficientField(
          [e, cell, o1, o2](Point x) {
            const auto i = static_cast<long long>(std::floor((x.x1 + o1) / cell));
            const auto j = static_cast<long long>(std::floor((x.x2 + o2) / cell));
            return ((i + j) & 1) == 0 ? Coefficients{e.lambda, 0.0, e.Lambda}
                                      : Coefficients{e.Lambda, 0.0, e.lambda};
          },
          e, label);
    }
    case FieldKind::RandomSmooth: {
      const EllipticityConstants e(p.lambda, p.Lambda);
      const auto angle = std::make_shared<Modes>(rng, p.frequency);
      const auto lo_mode = std::make_shared<Modes>(rng, p.frequency);
      const auto hi_mode = std::make_shared<Modes>(rng, p.frequency);
      const double tm = p.theta_max;
      return CoefficientField(
          [e, angle, lo_mode, hi_mode, tm](Point x) {
            const double span = e.Lambda - e.lambda;
            double l1 = e.lambda + span * 0.5 * (1.0 + (*lo_mode)(x));
            double l2 = e.lambda + span * 0.5 * (1.0 + (*hi_mode)(x));
            l1 = std::clamp(l1, e.lambda, e.Lambda);
            l2 = std::clamp(l2, e.lambda, e.Lambda);
            return rotated(l1, l2, tm * (*angle)(x));
          },
          e, label);
    }
  }
  throw DomainError("unknown field kind");
}

double apply_L(const Coefficients& a, const Jet& u, Point x) {
  return a.a11 * u.d11 + 2.0 * a.a12 * x.x1 * u.d12 + a.a22 * x.x1 * x.x1 * u.d22;
}

double apply_L(const CoefficientField& field, const SmoothFunction& u, Point x) {
  return apply_L(field(x), u(x), x);
}

Sym2 horizontal_hessian(const Jet& u, Point x) {
  return {u.d11, x.x1 * u.d12, x.x1 * x.x1 * u.d22};
}

Sym2 horizontal_hessian(const SmoothFunction& u, Point x) { return horizontal_hessian(u(x), x); }

ExperimentReport check_ellipticity(const CoefficientField& field, std::span<const Point> points) {
  ExperimentReport rep;
  rep.name = "ellipticity";
  rep.config = {{"field", field.label()},
                {"lambda", field.declared().lambda},
                {"big_lambda", field.declared().Lambda},
                {"points", points.size()}};
  const auto& e = field.declared();
  // relative slack for the eigenvalue round-off of a rotated diagonal matrix
  const double tol = 1e-12 * e.Lambda;
  double lower = std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::size_t bad = 0;
  for (const Point& x : points) {
    const auto [lo, hi] = field(x).matrix().eigenvalues();
    const double ml = lo - e.lambda, mu = e.Lambda - hi;
    lower = std::min(lower, ml);
    upper = std::min(upper, mu);
    if (ml < -tol || mu < -tol) ++bad;
  }
  rep.record("lower_margin", points.empty() ? 0.0 : lower);
  rep.record("upper_margin", points.empty() ? 0.0 : upper);
  rep.check("violating_points", static_cast<double>(bad), Relation::LessEqual, 0.0);
  return rep;
}

}  // namespace grushin
