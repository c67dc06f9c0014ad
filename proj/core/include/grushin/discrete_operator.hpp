#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushin/fields.hpp"
#include "grushin/grid.hpp"

namespace grushin {

/// Compressed sparse rows over grid node indices.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;

  double at(std::size_t r, std::size_t c) const;
  std::size_t nonzeros() const { return val.size(); }
  /// Largest absolute row sum.
  double norm_inf() const;
};

/// Monotonicity diagnostics of the assembled rows. A row is monotone when
/// its diagonal is negative, all off-diagonal entries are nonnegative and the
/// diagonal dominates their sum.
struct RowDiagnostics {
  std::size_t rows = 0;
  std::size_t monotone_rows = 0;
  std::size_t dominance_failures = 0;
  std::size_t sign_failures = 0;
  /// min over rows of (|diag| - sum |offdiag|) / |diag|
  double worst_margin = 1.0;
  /// First flagged node indices, capped in length.
  std::vector<std::size_t> flagged;

  std::size_t flagged_rows() const { return rows - monotone_rows; }
  bool monotone() const { return monotone_rows == rows; }
};

/// Discrete operator: one row per interior node, indexed by grid node.
/// Non-interior rows are empty.
struct DiscreteOperator {
  Grid grid;
  std::vector<NodeTag> tags;
  SparseMatrix matrix;
  RowDiagnostics diagnostics;
};

/// Centered second differences for u11 and u22 and the four-point cross
/// stencil for u12, with coefficients and x1 weights evaluated at the node.
DiscreteOperator discretize_L(const Grid& grid, const CoefficientField& field,
                              const std::vector<NodeTag>& tags);
DiscreteOperator discretize_L(const Grid& grid, const CoefficientField& field);

/// Discrete L u at interior nodes; zero elsewhere.
std::vector<double> apply_discrete(const DiscreteOperator& op, const std::vector<double>& u);

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  /// 1-norm condition estimate of the reduced system (inf if singular).
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

struct DirichletSolve {
  GridFunction solution;
  /// inf-norm of the interior residual
  double residual = 0.0;
  /// tolerance scale the residual was compared against
  double scale = 0.0;
  RowDiagnostics rows;
};

/// Solves L u = rhs at the interior nodes of `boundary.tags`, with u equal to
/// `boundary` elsewhere. Throws SolverError when the factorization fails or
/// the residual exceeds 1e-10 of the backward-error scale.
DirichletSolve solve_dirichlet(const CoefficientField& field, const GridFunction& boundary,
                               const GridFunction& rhs);
DirichletSolve solve_dirichlet(const CoefficientField& field, const GridFunction& boundary);

}  // namespace grushin
