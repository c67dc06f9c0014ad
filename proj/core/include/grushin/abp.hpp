#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "grushin/fields.hpp"
#include "grushin/grid.hpp"
#include "grushin/report.hpp"

namespace grushin {

using NodeMask = std::vector<bool>;

/// Largest convex function below the grid data, evaluated at the nodes. The
/// lower hull of the graph is built exactly, so the result is the convex
/// envelope of the piecewise-linear interpolant on the hull's faces.
std::vector<double> lower_convex_envelope(const Grid& grid, const std::vector<double>& f);

struct EnvelopeResult {
  /// -u^- at every node
  GridFunction source;
  GridFunction envelope;
  NodeMask contact;
  double tolerance = 0.0;
};

/// Envelope of -u^- with the contact set {|-u^- - envelope| <= tolerance}.
/// A negative tolerance selects 10 h^2 with h the larger spacing.
EnvelopeResult convex_envelope(const GridFunction& u, double tolerance = -1.0);

/// Second differences at a node, with one-sided shifted stencils on the
/// grid edge. Exact for quadratics.
Sym2 discrete_hessian(const GridFunction& u, std::size_t i, std::size_t j);

/// [[D11, x1 D12], [x1 D12, x1^2 D22]] from the same differences.
Sym2 discrete_horizontal_hessian(const GridFunction& u, std::size_t i, std::size_t j);

/// Discrete det D^2 u at every node.
std::vector<double> hessian_determinants(const GridFunction& u);

/// Sum over masked nodes of max(det D^2 u, 0) times the trapezoid cell
/// weight. An empty mask selects every node.
double monge_ampere_mass(const GridFunction& u, const NodeMask& mask = {});

/// Nonnegative second differences along both axes and both diagonals.
bool is_discretely_convex(const GridFunction& u, double tol = 1e-12);

double euclidean_diameter(const GridFunction& u);

/// Re-embeds the closure of the tagged domain in a lattice with the same
/// spacing covering a square of side `factor` times its diameter, extending
/// by zero. Domain tags are kept, new nodes are exterior.
GridFunction embed_in_hull_square(const GridFunction& u, double factor = 4.0);

/// Round-off tolerance 1e-12 (1 + max |u|) that selects the nodes where the
/// lower hull meets -u^-. The ABP checks judge their constants on this contact
/// set and also report the constants on the wider 10 h^2 mask.
double hull_contact_tolerance(const GridFunction& u);

/// sup u^- against (diam / c) (Monge-Ampere mass of the envelope on the
/// contact set)^(1/2); reports the realized c.
ExperimentReport classical_abp_check(const GridFunction& u);

/// sup u^- against C diam (sum over the contact set of (f^+)^2 x1^2)^(1/2)
/// under L u <= f x1^2; reports the realized C. Rejected when the discrete
/// hypotheses fail.
ExperimentReport weighted_abp_check(const GridFunction& u, const GridFunction& f,
                                    const CoefficientField& field);

/// u <= v + 10 h^2 given u <= v on the boundary and L v <= L u inside, both
/// within 10 h^2.
ExperimentReport wmp_check(const GridFunction& u, const GridFunction& v,
                           const CoefficientField& field);

/// Node coordinates, source, envelope and contact flag.
void write_envelope_csv(const std::string& path, const EnvelopeResult& e);

}  // namespace grushin
