#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grushin/fields.hpp"
#include "grushin/geometry.hpp"
#include "grushin/report.hpp"

namespace grushin {

/// 2 - 3 Lambda / lambda: the largest exponent for which rho^alpha is a
/// subsolution for every field with these constants.
double barrier_exponent(const EllipticityConstants& e);

/// Exact jet of rho(., y) at x. Throws DomainError where rho vanishes.
Jet rho_jet(Point y, Point x);

/// Exact jet of rho(., y)^a at x by the chain rule.
Jet power_barrier(Point y, double a, Point x);

/// Offset regimes of the smoothed barrier, by |y1| against r.
enum class Lemma41Case { Far, Small, Mid, Near };

std::string to_string(Lemma41Case c);
Lemma41Case lemma41_case(Point y, double r);

struct Lemma41Constants {
  double M1 = 0.0;
  double M2 = 0.0;
  /// minus the barrier value on the boundary of the half-level set
  double m = 0.0;
  Lemma41Case which = Lemma41Case::Small;
};

/// M1 - M2 rho^alpha vanishes on the boundary of the two-sided level set at
/// 2r and equals -2 on the one at r.
Lemma41Constants lemma41_constants(Point y, double r, double alpha);

/// Smallest integer beta with 2 beta > max(1, 1 - 4 / alpha).
int smoothing_exponent(double alpha);

/// integral over [0, inf) of 1 / (1 + s^(2 beta)).
double smoothing_tail_integral(int beta);

/// C^2 monotone splice: identity on [-m, inf), bounded below for t < -m.
class SmoothingFunction {
 public:
  SmoothingFunction(double m, int beta);

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  /// Infimum, attained as t -> -inf.
  double lower_bound() const { return -tail_ - m_; }
  double m() const { return m_; }
  int beta() const { return beta_; }

 private:
  double m_;
  int beta_;
  double tail_;
};

/// Even C^1 cutoff: 1 inside the closed half-level set, 0 outside the
/// two-thirds-level set, cubic in rho between.
class CutoffFunction {
 public:
  CutoffFunction(Point y, double r);

  double operator()(Point x) const;
  double inner_radius() const { return inner_; }
  double outer_radius() const { return outer_; }

 private:
  Point y_;
  double inner_;
  double outer_;
};

enum class BarrierFamily { Power, Smoothed, Ring };

/// Exponent and case-resolved constants of one closed-form barrier.
struct BarrierSpec {
  BarrierFamily family = BarrierFamily::Power;
  double alpha = -1.0;
  Point y;
  double r = 1.0;
  std::string case_label;
  double M1 = 0.0;
  double M2 = 1.0;
  /// m for the smoothed barrier, the value on the doubled level set for the ring one
  double M3_or_m = 0.0;
  int beta = 0;
  double gamma = 0.0;

  nlohmann::json to_json() const;
};

BarrierSpec power_spec(Point y, double alpha);

/// h(M1 - M2 rho^alpha) with its cutoff.
class Lemma41Barrier {
 public:
  Lemma41Barrier(Point y, double r, double alpha);

  /// Exact jet. At the zeros of rho the value is the lower bound and all
  /// derivatives vanish.
  Jet operator()(Point x) const;
  const Lemma41Constants& constants() const { return constants_; }
  const SmoothingFunction& smoothing() const { return h_; }
  const CutoffFunction& cutoff() const { return zeta_; }
  double alpha() const { return alpha_; }
  Point center() const { return y_; }
  double radius() const { return r_; }
  BarrierSpec spec() const;

 private:
  Point y_;
  double r_;
  double alpha_;
  Lemma41Constants constants_;
  SmoothingFunction h_;
  CutoffFunction zeta_;
};

Lemma41Barrier lemma41_barrier(Point y, double r, const EllipticityConstants& e);

/// Four offset cases of the ring barrier.
enum class RingCase { I, II, III, IV };

std::string to_string(RingCase c);

/// Smallest of the three closed-form values on the doubled level set.
double ring_gamma(double alpha);

/// M2 rho^alpha - M1: 0 on the boundary of the level-3r set, 1 on the level-r
/// set, at least gamma on the level-2r set.
class RingBarrier {
 public:
  RingBarrier(Point y, double r, double alpha);

  Jet operator()(Point x) const;
  double M1() const { return M1_; }
  double M2() const { return M2_; }
  double M3() const { return M3_; }
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  RingCase which() const { return case_; }
  BarrierSpec spec() const;

 private:
  Point y_;
  double r_;
  double alpha_;
  double M1_, M2_, M3_, gamma_;
  RingCase case_;
};

RingBarrier ring_barrier(Point y, double r, const EllipticityConstants& e);

/// Points on the level set {rho(., y) = R}, parametrized by angle; includes
/// points on the axis when the level set reaches it.
std::vector<Point> level_set_samples(Point y, double R, std::size_t count, std::uint64_t seed);

/// Points with rho(., y) log-uniform in [rho_min, rho_max], each on its level
/// set at a random admissible angle and side.
std::vector<Point> log_radial_samples(Point y, double rho_min, double rho_max, std::size_t count,
                                      std::uint64_t seed);

/// Points on level sets of rho(., y) where the smoothing variable
/// u = M1 - M2 rho^alpha + m is log-uniform in [-u_max, -u_min]. The barrier
/// is most curved there, in a shell too thin for radial sampling.
std::vector<Point> splice_shell_samples(const Lemma41Barrier& barrier, std::size_t count,
                                        std::uint64_t seed, double u_min = 1e-3,
                                        double u_max = 1e3);

/// Checks L phi >= -1e-10 * scale at each sample, scale being the sum of the
/// magnitudes of the three operator terms. Records the first witness.
ExperimentReport verify_subsolution(const CoefficientField& field, const SmoothFunction& phi,
                                    const std::vector<Point>& samples,
                                    const std::string& name = "subsolution");
ExperimentReport verify_subsolution(const CoefficientField& field, const BarrierSpec& spec,
                                    const std::vector<Point>& samples);

/// Checks the sign conditions of the smoothed barrier and measures the
/// constant C in L phi <= C x1^2 zeta / (r^2 (r + |y1|)^2).
ExperimentReport verify_lemma41(const CoefficientField& field, const Lemma41Barrier& barrier,
                                const std::vector<Point>& samples);

}  // namespace grushin
