#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "grushin/geometry.hpp"
#include "grushin/report.hpp"

namespace grushin {

/// Bounds 0 < lambda <= Lambda on the coefficient eigenvalues.
struct EllipticityConstants {
  double lambda = 1.0;
  double Lambda = 1.0;

  EllipticityConstants() = default;
  EllipticityConstants(double lo, double hi);

  double ratio() const { return lambda / Lambda; }
};

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct Sym2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double det() const { return a * c - b * b; }
  double trace() const { return a + c; }
  /// Eigenvalues in increasing order.
  std::pair<double, double> eigenvalues() const;
  bool positive_semidefinite(double tol = 0.0) const;
};

/// Coefficient matrix of the operator at one point.
struct Coefficients {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;

  Sym2 matrix() const { return {a11, a12, a22}; }
};

/// Value and partial derivatives up to order two at a point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d12 = 0.0;
  double d22 = 0.0;
};

using SmoothFunction = std::function<Jet(Point)>;

enum class FieldKind { Identity, Constant, Rotating, Checkerboard, RandomSmooth };

std::string to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& text);

/// Generator parameters. Unused entries are ignored by a given kind.
struct FieldParams {
  double lambda = 1.0;
  double Lambda = 1.0;
  /// Explicit matrix for the constant kind; when `explicit_matrix` is false
  /// the constant field is diag(lambda, Lambda) rotated by `angle`.
  bool explicit_matrix = false;
  Coefficients matrix;
  double angle = std::numbers::pi / 6.0;
  /// Largest rotation angle of the rotating and random kinds.
  double theta_max = std::numbers::pi / 12.0;
  /// Spatial frequency of the rotating and random kinds.
  double frequency = 1.0;
  /// Cell side of the checkerboard.
  double cell = 0.5;

  nlohmann::json to_json() const;
  static FieldParams from_json(const nlohmann::json& j);
};

/// Generator name, parameters and seed: enough to rebuild the field.
struct FieldDescriptor {
  FieldKind kind = FieldKind::Identity;
  FieldParams params;
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
  static FieldDescriptor from_json(const nlohmann::json& j);
};

/// Point evaluator for the coefficient matrix with declared ellipticity
/// constants. Copies share the evaluator, which must be safe for concurrent
/// reads.
class CoefficientField {
 public:
  using Evaluator = std::function<Coefficients(Point)>;

  CoefficientField(Evaluator eval, EllipticityConstants declared, std::string label = "custom");

  Coefficients operator()(Point x) const { return eval_(x); }
  const EllipticityConstants& declared() const { return declared_; }
  const std::string& label() const { return label_; }

  /// x -> a(F(x)). For maps with b1 = 0 and s2 = s1^2 the pulled-back
  /// operator acts on u o F as s1^2 (L u) o F.
  CoefficientField pullback(const DiagonalMap& map) const;

 private:
  Evaluator eval_;
  EllipticityConstants declared_;
  std::string label_;
};

CoefficientField identity_field();

/// Builds a field of the given family. Deterministic in the seed; the
/// declared constants bound the spectrum everywhere.
CoefficientField make_field(const FieldDescriptor& descriptor);
CoefficientField make_field(FieldKind kind, const FieldParams& params, std::uint64_t seed = 1);

/// a11 u11 + 2 a12 x1 u12 + a22 x1^2 u22.
double apply_L(const Coefficients& a, const Jet& u, Point x);
double apply_L(const CoefficientField& field, const SmoothFunction& u, Point x);

/// [[u11, x1 u12], [x1 u12, x1^2 u22]].
Sym2 horizontal_hessian(const Jet& u, Point x);
Sym2 horizontal_hessian(const SmoothFunction& u, Point x);

/// Eigenvalue bounds at each sample point against the declared constants.
ExperimentReport check_ellipticity(const CoefficientField& field, std::span<const Point> points);

}  // namespace grushin
