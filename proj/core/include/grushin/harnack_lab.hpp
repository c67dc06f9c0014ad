#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "grushin/discrete_operator.hpp"
#include "grushin/lab_config.hpp"
#include "grushin/report.hpp"

namespace grushin::lab {

/// A solved lab problem: grid, solution and the lab-coordinate field.
struct LabSolution {
  GridFunction u;
  RowDiagnostics rows;
  double residual = 0.0;
};

/// Largest |x2 - c2| over the closure of B(c, R).
double ball_halfheight(Point c, double R);

/// Grid holding the quasi-distance ball B(c, R) with a three-node margin.
Grid ball_grid(Point c, double R, std::size_t n);

/// Grid holding the two-sided level set at s around c, symmetric in x1.
Grid level_set_grid(Point c, double s, std::size_t n);

/// Physical Dirichlet data of the configuration, as a function of lab points.
std::function<double(Point)> boundary_data(const ExperimentConfig& cfg);

/// Solves L u = 0 on B(center, eta r) with the configured data, or
/// L u = source when `with_source` is set and the amplitude is nonzero.
LabSolution solve_ball_problem(const ExperimentConfig& cfg, bool with_source = false);

/// Fraction of nodes in B(y, r) with u <= M after normalizing by the
/// infimum over B(y, theta r).
ExperimentReport critical_density_experiment(const ExperimentConfig& cfg);

/// Ring problem between the level-r and level-eta r sets with u = 1 inside;
/// gamma-hat is the minimum over the level-2r set, compared with 0.95 of the
/// ring-barrier constant.
ExperimentReport double_ball_experiment(const ExperimentConfig& cfg);

/// Superlevel fractions of {u >= M^k} on the half-radius two-sided ball for
/// k = 1..k_max, and the largest ratio of consecutive fractions.
ExperimentReport power_decay_experiment(const ExperimentConfig& cfg);

/// sup / inf of u over B(y, r). Rejected when the infimum falls below 1e-6
/// of the largest boundary value.
ExperimentReport harnack_experiment(const ExperimentConfig& cfg);

/// Dispatches on `cfg.experiment`; exceptions become error reports.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Name of the headline measurement of each experiment.
const char* headline(Experiment e);

struct SweepResult {
  std::vector<ExperimentReport> runs;
  ExperimentReport aggregate;
};

/// Runs the plan on up to `jobs` threads; results keep plan order.
SweepResult sweep(const std::vector<ExperimentConfig>& plan, std::size_t jobs = 1);

/// min / max / median of each headline measurement per experiment, with a
/// verdict per experiment family.
ExperimentReport aggregate(const std::vector<ExperimentReport>& runs);

}  // namespace grushin::lab
