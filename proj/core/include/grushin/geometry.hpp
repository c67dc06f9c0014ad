#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushin/report.hpp"

namespace grushin {

/// A location in the plane.
struct Point {
  double x1 = 0.0;
  double x2 = 0.0;

  bool finite() const;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Raised for arguments outside an operation's domain: nonpositive radii,
/// points off a lattice, non-finite coordinates.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent of volume growth under the anisotropic dilations.
inline constexpr int kHomogeneousDimension = 3;

/// ((x1^2 - y1^2)^2 + 4 (x2 - y2)^2)^{1/4}. Vanishes at y and at its mirror
/// image (-y1, y2).
double rho(Point x, Point y);

/// Closed-form quasi-distance comparable with the control distance.
double quasi_distance(Point x, Point y);

/// Box half-width in direction j (1 or 2) at x for radius r.
double box_halfwidth(int j, Point x, double r);

/// Inverse of `box_halfwidth` in its radius argument.
double box_inverse(int j, Point x, double r);

/// Sum of the inverse half-widths evaluated on |y - x| componentwise; the
/// explicit surrogate for the control distance.
double frla_sum(Point x, Point y);

/// Open box {x + h : |h1| < r, |h2| < r (|x1| + r)}.
struct BoxSpec {
  Point center;
  double radius = 1.0;

  BoxSpec() = default;
  BoxSpec(Point c, double r);

  double halfwidth(int j) const { return box_halfwidth(j, center, radius); }
  bool contains(Point x) const;
};

/// B: quasi-distance ball. BTilde: union of B around y and its mirror.
/// G / GTilde: sublevel sets of the one- and two-sided gauges.
enum class SetKind { B, BTilde, G, GTilde };

std::string to_string(SetKind kind);
SetKind set_kind_from_string(const std::string& text);

/// Two-sided gauge: rho when |y1| < r, rho^2 / |y1| otherwise.
double gauge_tilde(Point x, Point y, double r);

/// One-sided gauge: as `gauge_tilde` but +inf on the half plane x1 y1 < 0
/// when |y1| >= r.
double gauge(Point x, Point y, double r);

/// Radius in rho of the boundary of the two-sided sublevel set at level s;
/// strictly increasing in s.
double level_radius(Point y, double s);

struct QuasiBallSpec {
  Point center;
  double radius = 1.0;
  SetKind kind = SetKind::B;

  QuasiBallSpec() = default;
  QuasiBallSpec(Point c, double r, SetKind k);

  bool contains(Point x) const;
};

/// Area of the quasi-distance ball, by adaptive quadrature of the reduced
/// one-dimensional integral. Independent of y2.
double ball_volume(Point y, double r);

/// Radial derivative of `ball_volume`.
double ball_volume_derivative(Point y, double r);

/// Relative area of the ring between radii (1 - eps) r and r.
double ring_deficit(Point y, double r, double eps);

/// Upper bound for ring_deficit / eps from the volume derivative estimate.
double ring_deficit_bound(Point y, double r);

/// Axis-aligned lattice on a box used to approximate the control distance.
struct CCLattice {
  BoxSpec bounds;
  double h = 0.05;
  /// Floor on |x1| in the vertical edge cost; 0 selects h.
  double eps_cc = 0.0;

  CCLattice() = default;
  CCLattice(BoxSpec b, double spacing, double floor = 0.0);

  double floor() const { return eps_cc > 0.0 ? eps_cc : h; }
};

/// Single-source shortest-path times on a `CCLattice`. Horizontal edges cost
/// h, vertical edges h / max(|x1|, floor).
class CCDistanceField {
 public:
  CCDistanceField(const CCLattice& lattice, Point source);

  /// Distance to the node nearest to x; DomainError when x is off the box.
  double at(Point x) const;
  double at_node(std::size_t i, std::size_t j) const { return dist_[j * n1_ + i]; }
  Point node(std::size_t i, std::size_t j) const;
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }

 private:
  std::pair<std::size_t, std::size_t> snap(Point x) const;

  CCLattice lattice_;
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::ptrdiff_t k1_ = 0;  // nodes each side of the center column
  std::ptrdiff_t k2_ = 0;
  std::vector<double> dist_;
};

double cc_distance(Point x, Point y, const CCLattice& lattice);

/// x -> (s1 x1 + b1, s2 x2 + b2). Covers the dilations, the translation-
/// scaling onto unit radius, and the mirror in the vertical axis.
struct DiagonalMap {
  double s1 = 1.0;
  double s2 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;

  Point operator()(Point x) const { return {s1 * x.x1 + b1, s2 * x.x2 + b2}; }
  Point inverse(Point x) const { return {(x.x1 - b1) / s1, (x.x2 - b2) / s2}; }
  bool is_identity() const { return s1 == 1.0 && s2 == 1.0 && b1 == 0.0 && b2 == 0.0; }

  static DiagonalMap identity() { return {}; }
  static DiagonalMap dilation(double t);
  static DiagonalMap translate_scale(double r, double y2);
  static DiagonalMap reflection() { return {-1.0, 1.0, 0.0, 0.0}; }
};

Point dilate(double t, Point x);
Point translate_scale(double r, double y2, Point x);
Point reflect(Point x);

enum class StructureKind { Charact, Equiv, Frla };

std::string to_string(StructureKind kind);
StructureKind structure_kind_from_string(const std::string& text);

/// Samples boxes around y and counts violations of the inclusion chains
/// between balls, boxes and gauge sublevel sets. Samples are stratified over
/// Box(y, s) for s in {6r, 3r, r, r/5} so that both the innermost set and the
/// complement of the outermost one are populated. The Frla kind
/// measures the comparison constants between the lattice distance, the
/// inverse half-width sum and the quasi-distance instead.
ExperimentReport structure_check(StructureKind kind, Point y, double r, std::size_t samples,
                                 std::uint64_t seed = 1);

}  // namespace grushin
