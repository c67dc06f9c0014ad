#include "grushin/discrete_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace grushin {

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
    if (col[p] == c) return val[p];
  }
  return 0.0;
}

double SparseMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += std::abs(val[p]);
    best = std::max(best, s);
  }
  return best;
}

DiscreteOperator discretize_L(const Grid& grid, const CoefficientField& field) {
  return discretize_L(grid, field, rectangle_tags(grid));
}

DiscreteOperator discretize_L(const Grid& grid, const CoefficientField& field,
                              const std::vector<NodeTag>& tags) {
  if (tags.size() != grid.size()) throw DomainError("tag count does not match grid");
  DiscreteOperator op{grid, tags, {}, {}};
  SparseMatrix& m = op.matrix;
  m.rows = m.cols = grid.size();
  m.row_ptr.assign(1, 0);
  const double h1 = grid.h1(), h2 = grid.h2();
  RowDiagnostics& diag = op.diagnostics;

  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (tags[k] == NodeTag::Interior) {
      const std::size_t i = grid.column(k), j = grid.row(k);
      if (grid.on_edge(i, j)) throw DomainError("interior node on the grid edge");
      const Point x = grid.node(i, j);
      const Coefficients a = field(x);
      const double w11 = a.a11 / (h1 * h1);
      const double w22 = a.a22 * x.x1 * x.x1 / (h2 * h2);
      const double w12 = 2.0 * a.a12 * x.x1 / (4.0 * h1 * h2);
      const double center = -2.0 * w11 - 2.0 * w22;
      // entries in increasing column order
      const std::array<std::pair<std::size_t, double>, 9> entries{{
          {grid.index(i - 1, j - 1), w12},
          {grid.index(i, j - 1), w22},
          {grid.index(i + 1, j - 1), -w12},
          {grid.index(i - 1, j), w11},
          {k, center},
          {grid.index(i + 1, j), w11},
          {grid.index(i - 1, j + 1), -w12},
          {grid.index(i, j + 1), w22},
          {grid.index(i + 1, j + 1), w12},
      }};
      double off = 0.0;
      bool signs = true;
      for (const auto& [c, v] : entries) {
        if (v == 0.0) continue;
        m.col.push_back(c);
        m.val.push_back(v);
        if (c != k) {
          off += std::abs(v);
          if (v < 0.0) signs = false;
        }
      }
      ++diag.rows;
      const double margin = (std::abs(center) - off) / std::abs(center);
      diag.worst_margin = std::min(diag.worst_margin, margin);
      const bool dominant = margin >= -1e-12;
      if (!dominant) ++diag.dominance_failures;
      if (!signs) ++diag.sign_failures;
      if (dominant && signs) {
        ++diag.monotone_rows;
      } else if (diag.flagged.size() < 32) {
        diag.flagged.push_back(k);
      }
    }
    m.row_ptr.push_back(m.val.size());
  }
  return op;
}

std::vector<double> apply_discrete(const DiscreteOperator& op, const std::vector<double>& u) {
  const SparseMatrix& m = op.matrix;
  if (u.size() != m.cols) throw DomainError("vector size does not match operator");
  std::vector<double> out(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double s = 0.0;
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) s += m.val[p] * u[m.col[p]];
    out[r] = s;
  }
  return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Solver = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

// Hager's estimate of ||A^{-1}||_1 from solves with A and A^T.
double inverse_norm_estimate(const SpMat& a) {
  Solver lu, lut;
  lu.compute(a);
  const SpMat at = a.transpose();
  lut.compute(at);
  if (lu.info() != Eigen::Success || lut.info() != Eigen::Success) {
    return std::numeric_limits<double>::infinity();
  }
  const Eigen::Index n = a.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    est = y.lpNorm<1>();
    const Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = lut.solve(xi);
    Eigen::Index jmax = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&jmax);
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x(jmax) = 1.0;
  }
  return est;
}

double condition_estimate(const SpMat& a) {
  double norm1 = 0.0;
  for (int c = 0; c < a.outerSize(); ++c) {
    double s = 0.0;
    for (SpMat::InnerIterator it(a, c); it; ++it) s += std::abs(it.value());
    norm1 = std::max(norm1, s);
  }
  return norm1 * inverse_norm_estimate(a);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

DirichletSolve solve_dirichlet(const CoefficientField& field, const GridFunction& boundary) {
  return solve_dirichlet(field, boundary, GridFunction(boundary.grid, 0.0));
}

DirichletSolve solve_dirichlet(const CoefficientField& field, const GridFunction& boundary,
                               const GridFunction& rhs) {
  const Grid& grid = boundary.grid;
  if (!(rhs.grid == grid)) throw DomainError("rhs and boundary data live on different grids");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (boundary.tags[k] == NodeTag::Boundary && !std::isfinite(boundary.values[k])) {
      throw DomainError("boundary data must be finite");
    }
    if (boundary.tags[k] == NodeTag::Interior && !std::isfinite(rhs.values[k])) {
      throw DomainError("right-hand side must be finite");
    }
  }
  const DiscreteOperator op = discretize_L(grid, field, boundary.tags);
  const SparseMatrix& m = op.matrix;

  // interior nodes are the unknowns
  std::vector<int> unknown(grid.size(), -1);
  int n = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (boundary.tags[k] == NodeTag::Interior) unknown[k] = n++;
  }

  std::vector<double> u = boundary.values;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (unknown[k] >= 0) u[k] = 0.0;
  }

  SpMat a(n, n);
  if (n > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(m.nonzeros());
    Eigen::VectorXd b(n);
    for (std::size_t r = 0; r < grid.size(); ++r) {
      if (unknown[r] < 0) continue;
      double rhs_row = rhs.values[r];
      for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
        const std::size_t c = m.col[p];
        if (unknown[c] >= 0) {
          triplets.emplace_back(unknown[r], unknown[c], m.val[p]);
        } else {
          if (boundary.tags[c] == NodeTag::Exterior) {
            throw DomainError("stencil of an interior node reaches an exterior node");
          }
          rhs_row -= m.val[p] * boundary.values[c];
        }
      }
      b(unknown[r]) = rhs_row;
    }
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.prune(0.0);
    a.makeCompressed();
    // a zero row or column is singular; SparseLU does not terminate on it
    std::vector<bool> row_hit(static_cast<std::size_t>(n), false);
    for (int c = 0; c < a.outerSize(); ++c) {
      bool col_hit = false;
      for (SpMat::InnerIterator it(a, c); it; ++it) {
        col_hit = true;
        row_hit[static_cast<std::size_t>(it.row())] = true;
      }
      if (!col_hit) {
        throw SolverError("singular system: empty column", std::numeric_limits<double>::infinity());
      }
    }
    for (bool hit : row_hit) {
      if (!hit) throw SolverError("singular system: empty row", std::numeric_limits<double>::infinity());
    }
    Solver lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      throw SolverError("sparse factorization failed: " + lu.lastErrorMessage(),
                        std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
      throw SolverError("sparse solve failed", condition_estimate(a));
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (unknown[k] >= 0) u[k] = x(unknown[k]);
    }
  }

  // residual of the full stencil against the original right-hand side
  const std::vector<double> lu_values = apply_discrete(op, u);
  double residual = 0.0, rhs_norm = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (unknown[k] < 0) continue;
    residual = std::max(residual, std::abs(lu_values[k] - rhs.values[k]));
    rhs_norm = std::max(rhs_norm, std::abs(rhs.values[k]));
  }
  const double scale = m.norm_inf() * max_abs(u) + rhs_norm;
  if (residual > 1e-10 * scale) {
    throw SolverError("residual " + std::to_string(residual) + " exceeds tolerance",
                      condition_estimate(a));
  }

  DirichletSolve out{GridFunction(grid, std::move(u), boundary.tags), residual, scale,
                     op.diagnostics};
  return out;
}

}  // namespace grushin
