#include "grushin/abp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "grushin/discrete_operator.hpp"

namespace grushin {

namespace {

double spacing(const Grid& g) { return std::max(g.h1(), g.h2()); }

bool in_closure(const GridFunction& u, std::size_t k) { return u.tags[k] != NodeTag::Exterior; }

double trapezoid_weight(const Grid& g, std::size_t i, std::size_t j) {
  double w = g.cell_area();
  if (i == 0 || i + 1 == g.n1()) w *= 0.5;
  if (j == 0 || j + 1 == g.n2()) w *= 0.5;
  return w;
}

// (lo, hi, divisor) of the first-difference pair used at index i of n
struct Pair {
  std::size_t lo, hi;
  double span;
};

Pair diff_pair(std::size_t i, std::size_t n, double h) {
  if (i == 0) return {0, 1, h};
  if (i + 1 == n) return {n - 2, n - 1, h};
  return {i - 1, i + 1, 2.0 * h};
}

// center of the three-point second difference at index i of n
std::size_t second_center(std::size_t i, std::size_t n) {
  if (i == 0) return 1;
  if (i + 1 == n) return n - 2;
  return i;
}

struct Embedding {
  GridFunction g;
  std::ptrdiff_t off1 = 0;
  std::ptrdiff_t off2 = 0;
};

Embedding embed(const GridFunction& u, double factor) {
  const Grid& src = u.grid;
  const double d = euclidean_diameter(u);
  const double side = factor * d;
  // center of the domain's bounding box, in node units
  std::size_t imin = src.n1(), imax = 0, jmin = src.n2(), jmax = 0;
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (!in_closure(u, k)) continue;
    imin = std::min(imin, src.column(k));
    imax = std::max(imax, src.column(k));
    jmin = std::min(jmin, src.row(k));
    jmax = std::max(jmax, src.row(k));
  }
  if (imin > imax) throw DomainError("grid function has no domain nodes");
  const double h1 = src.h1(), h2 = src.h2();
  const double w1 = (imax - imin) * h1, w2 = (jmax - jmin) * h2;
  const auto ext1 = static_cast<std::size_t>(std::ceil(std::max(0.0, side - w1) / (2.0 * h1)));
  const auto ext2 = static_cast<std::size_t>(std::ceil(std::max(0.0, side - w2) / (2.0 * h2)));
  const std::size_t n1 = imax - imin + 1 + 2 * ext1;
  const std::size_t n2 = jmax - jmin + 1 + 2 * ext2;
  const Point lo = src.node(imin, jmin);
  const Grid grid(lo.x1 - ext1 * h1, lo.x1 + (n1 - 1 - ext1) * h1, lo.x2 - ext2 * h2,
                  lo.x2 + (n2 - 1 - ext2) * h2, std::max<std::size_t>(n1, 3),
                  std::max<std::size_t>(n2, 3));
  GridFunction out(grid, std::vector<double>(grid.size(), 0.0),
                   std::vector<NodeTag>(grid.size(), NodeTag::Exterior));
  // source (i, j) lands at (i + off1, j + off2)
  Embedding e{std::move(out), static_cast<std::ptrdiff_t>(ext1) - static_cast<std::ptrdiff_t>(imin),
              static_cast<std::ptrdiff_t>(ext2) - static_cast<std::ptrdiff_t>(jmin)};
  for (std::size_t j = jmin; j <= jmax; ++j) {
    for (std::size_t i = imin; i <= imax; ++i) {
      const std::size_t k = src.index(i, j);
      if (!in_closure(u, k)) continue;
      const std::size_t t = grid.index(i - imin + ext1, j - jmin + ext2);
      e.g.values[t] = u.values[k];
      e.g.tags[t] = u.tags[k];
    }
  }
  return e;
}

double sup_negative_part(const GridFunction& u) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (in_closure(u, k)) s = std::max(s, -u.values[k]);
  }
  return s;
}

}  // namespace

EnvelopeResult convex_envelope(const GridFunction& u, double tolerance) {
  const double tau = tolerance >= 0.0 ? tolerance : 10.0 * spacing(u.grid) * spacing(u.grid);
  std::vector<double> src(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) src[k] = std::min(u.values[k], 0.0);
  std::vector<double> env = lower_convex_envelope(u.grid, src);
  NodeMask contact(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) contact[k] = std::abs(src[k] - env[k]) <= tau;
  return {GridFunction(u.grid, std::move(src), u.tags), GridFunction(u.grid, std::move(env), u.tags),
          std::move(contact), tau};
}

Sym2 discrete_hessian(const GridFunction& u, std::size_t i, std::size_t j) {
  const Grid& g = u.grid;
  const double h1 = g.h1(), h2 = g.h2();
  const std::size_t ci = second_center(i, g.n1()), cj = second_center(j, g.n2());
  const double d11 = (u(ci - 1, j) - 2.0 * u(ci, j) + u(ci + 1, j)) / (h1 * h1);
  const double d22 = (u(i, cj - 1) - 2.0 * u(i, cj) + u(i, cj + 1)) / (h2 * h2);
  const Pair p = diff_pair(i, g.n1(), h1), q = diff_pair(j, g.n2(), h2);
  const double d12 = (u(p.hi, q.hi) - u(p.hi, q.lo) - u(p.lo, q.hi) + u(p.lo, q.lo)) / (p.span * q.span);
  return {d11, d12, d22};
}

Sym2 discrete_horizontal_hessian(const GridFunction& u, std::size_t i, std::size_t j) {
  const Sym2 d = discrete_hessian(u, i, j);
  const double x1 = u.grid.node(i, j).x1;
  return {d.a, x1 * d.b, x1 * x1 * d.c};
}

std::vector<double> hessian_determinants(const GridFunction& u) {
  std::vector<double> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    out[k] = discrete_hessian(u, u.grid.column(k), u.grid.row(k)).det();
  }
  return out;
}

double monge_ampere_mass(const GridFunction& u, const NodeMask& mask) {
  if (!mask.empty() && mask.size() != u.size()) throw DomainError("mask size does not match grid");
  double mass = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!mask.empty() && !mask[k]) continue;
    const std::size_t i = u.grid.column(k), j = u.grid.row(k);
    mass += std::max(0.0, discrete_hessian(u, i, j).det()) * trapezoid_weight(u.grid, i, j);
  }
  return mass;
}

bool is_discretely_convex(const GridFunction& u, double tol) {
  const Grid& g = u.grid;
  for (std::size_t j = 0; j < g.n2(); ++j) {
    for (std::size_t i = 0; i < g.n1(); ++i) {
      const double c = 2.0 * u(i, j);
      const bool in1 = i > 0 && i + 1 < g.n1(), in2 = j > 0 && j + 1 < g.n2();
      if (in1 && u(i - 1, j) + u(i + 1, j) - c < -tol) return false;
      if (in2 && u(i, j - 1) + u(i, j + 1) - c < -tol) return false;
      if (in1 && in2) {
        if (u(i - 1, j - 1) + u(i + 1, j + 1) - c < -tol) return false;
        if (u(i - 1, j + 1) + u(i + 1, j - 1) - c < -tol) return false;
      }
    }
  }
  return true;
}

double euclidean_diameter(const GridFunction& u) {
  // extreme points of the domain lie among its boundary-tagged nodes
  std::vector<Point> pts;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.tags[k] == NodeTag::Boundary) pts.push_back(u.grid.node(k));
  }
  if (pts.empty()) {
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (in_closure(u, k)) pts.push_back(u.grid.node(k));
    }
  }
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      best = std::max(best, std::hypot(pts[a].x1 - pts[b].x1, pts[a].x2 - pts[b].x2));
    }
  }
  return best;
}

GridFunction embed_in_hull_square(const GridFunction& u, double factor) {
  if (!(factor >= 1.0)) throw DomainError("hull square factor must be at least 1");
  return embed(u, factor).g;
}

double hull_contact_tolerance(const GridFunction& u) {
  double m = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (in_closure(u, k)) m = std::max(m, std::abs(u.values[k]));
  }
  return 1e-12 * (1.0 + m);
}

ExperimentReport classical_abp_check(const GridFunction& u) {
  ExperimentReport rep;
  rep.name = "classical_abp";
  rep.config = {{"n1", u.grid.n1()}, {"n2", u.grid.n2()}};
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.tags[k] == NodeTag::Boundary && u.values[k] < 0.0) {
      rep.status = ReportStatus::Rejected;
      rep.note("negative boundary values");
      return rep;
    }
  }
  const double lhs = sup_negative_part(u);
  const double diam = euclidean_diameter(u);
  rep.record("sup_negative_part", lhs);
  rep.record("diameter", diam);
  if (lhs == 0.0) {
    rep.check("inequality_holds", 1.0, Relation::GreaterEqual, 1.0);
    rep.note("trivial: no negative part");
    return rep;
  }
  const Embedding e = embed(u, 4.0);
  const double tau = 10.0 * spacing(u.grid) * spacing(u.grid);
  const EnvelopeResult env = convex_envelope(e.g, hull_contact_tolerance(u));
  NodeMask mask(e.g.size()), wide(e.g.size());
  std::size_t contact = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    mask[k] = env.contact[k] && in_closure(e.g, k);
    wide[k] = std::abs(env.source.values[k] - env.envelope.values[k]) <= tau && in_closure(e.g, k);
    contact += mask[k];
  }
  const double mass = monge_ampere_mass(env.envelope, mask);
  const double wide_mass = monge_ampere_mass(env.envelope, wide);
  rep.record("contact_nodes", static_cast<double>(contact));
  rep.record("envelope_mass", mass);
  rep.record("realized_constant_10h2", diam * std::sqrt(wide_mass) / lhs);
  rep.check("realized_constant", diam * std::sqrt(mass) / lhs, Relation::Greater, 0.0);
  return rep;
}

ExperimentReport weighted_abp_check(const GridFunction& u, const GridFunction& f,
                                    const CoefficientField& field) {
  ExperimentReport rep;
  rep.name = "weighted_abp";
  rep.config = {{"n1", u.grid.n1()}, {"n2", u.grid.n2()}, {"field", field.label()}};
  if (!(f.grid == u.grid)) throw DomainError("f and u live on different grids");
  const double h = spacing(u.grid);
  const double slack = 10.0 * h * h;

  const DiscreteOperator op = discretize_L(u.grid, field, u.tags);
  const std::vector<double> lu = apply_discrete(op, u.values);
  double excess = -std::numeric_limits<double>::infinity();
  double boundary_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Point x = u.grid.node(k);
    if (u.tags[k] == NodeTag::Interior) excess = std::max(excess, lu[k] - f.values[k] * x.x1 * x.x1);
    if (u.tags[k] == NodeTag::Boundary) boundary_min = std::min(boundary_min, u.values[k]);
  }
  rep.record("hypothesis_excess", excess);
  rep.record("boundary_min", boundary_min);
  if (excess > slack || boundary_min < -1e-12) {
    rep.status = ReportStatus::Rejected;
    rep.note("discrete hypotheses fail: L u <= f x1^2 or u >= 0 on the boundary");
    return rep;
  }

  const double lhs = sup_negative_part(u);
  const double diam = euclidean_diameter(u);
  rep.record("sup_negative_part", lhs);
  rep.record("diameter", diam);
  if (lhs == 0.0) {
    rep.check("inequality_holds", 1.0, Relation::GreaterEqual, 1.0);
    rep.note("trivial: no negative part");
    return rep;
  }
  const Embedding e = embed(u, 4.0);
  const EnvelopeResult env = convex_envelope(e.g, hull_contact_tolerance(u));
  double integral = 0.0, wide_integral = 0.0;
  std::size_t contact = 0, on_axis = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!in_closure(u, k)) continue;
    const std::size_t i = u.grid.column(k), j = u.grid.row(k);
    const std::size_t t = e.g.grid.index(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + e.off1),
                                         static_cast<std::size_t>(static_cast<std::ptrdiff_t>(j) + e.off2));
    const Point x = u.grid.node(k);
    const double fp = std::max(f.values[k], 0.0);
    const double w = fp * fp * x.x1 * x.x1 * trapezoid_weight(u.grid, i, j);
    if (std::abs(env.source.values[t] - env.envelope.values[t]) <= slack) wide_integral += w;
    if (!env.contact[t]) continue;
    ++contact;
    if (x.x1 == 0.0) ++on_axis;
    integral += w;
  }
  auto constant = [&](double v) {
    return v > 0.0 ? lhs / (diam * std::sqrt(v)) : std::numeric_limits<double>::infinity();
  };
  rep.record("contact_nodes", static_cast<double>(contact));
  rep.record("contact_nodes_on_axis", static_cast<double>(on_axis));
  rep.record("weighted_integral", std::sqrt(integral));
  rep.record("realized_constant_10h2", constant(wide_integral));
  rep.check("realized_constant", constant(integral), Relation::Less,
            std::numeric_limits<double>::infinity());
  return rep;
}

ExperimentReport wmp_check(const GridFunction& u, const GridFunction& v,
                           const CoefficientField& field) {
  ExperimentReport rep;
  rep.name = "weak_maximum_principle";
  rep.config = {{"n1", u.grid.n1()}, {"n2", u.grid.n2()}, {"field", field.label()}};
  if (!(u.grid == v.grid)) throw DomainError("u and v live on different grids");
  const double h = spacing(u.grid);
  const double slack = 10.0 * h * h;
  const DiscreteOperator op = discretize_L(u.grid, field, u.tags);
  const std::vector<double> lu = apply_discrete(op, u.values);
  const std::vector<double> lv = apply_discrete(op, v.values);
  double boundary_gap = -std::numeric_limits<double>::infinity();
  double operator_gap = -std::numeric_limits<double>::infinity();
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.tags[k] == NodeTag::Exterior) continue;
    const double d = u.values[k] - v.values[k];
    gap = std::max(gap, d);
    if (u.tags[k] == NodeTag::Boundary) boundary_gap = std::max(boundary_gap, d);
    if (u.tags[k] == NodeTag::Interior) operator_gap = std::max(operator_gap, lv[k] - lu[k]);
  }
  rep.record("boundary_gap", boundary_gap);
  rep.record("operator_gap", operator_gap);
  if (boundary_gap > slack || operator_gap > slack) {
    rep.status = ReportStatus::Rejected;
    rep.note("hypotheses fail: u <= v on the boundary or L v <= L u inside");
    return rep;
  }
  rep.check("max_excess", gap, Relation::LessEqual, slack);
  return rep;
}

void write_envelope_csv(const std::string& path, const EnvelopeResult& e) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x1,x2,u,envelope,contact\n" << std::setprecision(17);
  const Grid& g = e.source.grid;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    out << x.x1 << ',' << x.x2 << ',' << e.source.values[k] << ',' << e.envelope.values[k] << ','
        << (e.contact[k] ? 1 : 0) << '\n';
  }
}

}  // namespace grushin
