#include "grushin/harnack_lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <thread>

#include "grushin/barriers.hpp"
#include "grushin/random.hpp"

namespace grushin::lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double margin_pad(std::size_t n) { return 1.0 + 3.0 / static_cast<double>(n - 1); }

ExperimentReport start_report(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.name = to_string(cfg.experiment);
  rep.config = cfg.to_json();
  rep.seed = cfg.seed;
  return rep;
}

// Point of the boundary of B(c, R) on the ray from c in direction phi,
// measured in the coordinates of Box(c, R), which contains the ball.
Point boundary_point(Point c, double R, double phi) {
  const QuasiBallSpec ball(c, R, SetKind::B);
  const BoxSpec box(c, R);
  const double d1 = box.halfwidth(1) * std::cos(phi), d2 = box.halfwidth(2) * std::sin(phi);
  auto at = [&](double t) { return Point{c.x1 + t * d1, c.x2 + t * d2}; };
  // last inside point of a coarse scan, then bisection to the crossing
  double lo = 0.0;
  for (int k = 1; k <= 256; ++k) {
    if (ball.contains(at(k / 256.0))) lo = k / 256.0;
  }
  double hi = std::min(1.0, lo + 1.0 / 256.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ball.contains(at(mid)) ? lo : hi) = mid;
  }
  return at(lo);
}

LabSolution solve_region(const ExperimentConfig& cfg, const Grid& grid,
                         const std::function<bool(Point)>& inside,
                         const std::function<double(Point)>& data,
                         const std::function<double(Point)>& rhs = {}) {
  std::vector<NodeTag> tags = region_tags(grid, inside);
  GridFunction g = GridFunction::sample(grid, data);
  g.tags = tags;
  GridFunction f = rhs ? GridFunction::sample(grid, rhs) : GridFunction(grid);
  f.tags = std::move(tags);
  DirichletSolve s = solve_dirichlet(cfg.lab_field(), g, f);
  return {std::move(s.solution), s.rows, s.residual};
}

// Lab-coordinate right-hand side of the supersolution variant; the lab
// operator is s1^2 times the physical one composed with the frame.
std::function<double(Point)> source_term(const ExperimentConfig& cfg) {
  if (cfg.source_amplitude == 0.0) return {};
  const DiagonalMap f = cfg.frame;
  const Point pc = f(cfg.center);
  const BoxSpec width(pc, 0.125 * std::abs(f.s1) * cfg.radius);
  const double w1 = width.halfwidth(1), w2 = width.halfwidth(2);
  const double amp = cfg.source_amplitude * cfg.boundary_scale * f.s1 * f.s1;
  return [f, pc, w1, w2, amp](Point x) {
    const Point y = f(x);
    const double d1 = (y.x1 - pc.x1) / w1, d2 = (y.x2 - pc.x2) / w2;
    return -amp * std::exp(-(d1 * d1 + d2 * d2));
  };
}

// Extremes of u over the nodes of a set; only non-exterior nodes count.
struct Extremes {
  double lo = kInf;
  double hi = -kInf;
  std::size_t count = 0;
};

Extremes extremes(const GridFunction& u, const std::function<bool(Point)>& in_set) {
  Extremes e;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.tags[k] == NodeTag::Exterior) continue;
    if (!in_set(u.grid.node(k))) continue;
    e.lo = std::min(e.lo, u.values[k]);
    e.hi = std::max(e.hi, u.values[k]);
    ++e.count;
  }
  return e;
}

void record_rows(ExperimentReport& rep, const LabSolution& s) {
  rep.record("solver_residual", s.residual);
  rep.record("rows_flagged", static_cast<double>(s.rows.flagged_rows()));
  rep.record("rows_total", static_cast<double>(s.rows.rows));
}

void require_nodes(const Extremes& e, const char* what) {
  if (e.count == 0) throw DomainError(std::string("no grid nodes in ") + what);
}

}  // namespace

double ball_halfheight(Point c, double R) {
  // for fixed x1, d~ grows with |x2 - c2|; the crossing solves a quadratic
  double best = 0.0;
  constexpr int kSteps = 4096;
  for (int k = 0; k <= kSteps; ++k) {
    const double x1 = c.x1 - R + 2.0 * R * k / kSteps;
    const double a = x1 * x1 + c.x1 * c.x1;
    const double s = R - std::abs(x1 - c.x1) + std::sqrt(a);
    best = std::max(best, 0.25 * (s * s - a));
  }
  return best;
}

Grid ball_grid(Point c, double R, std::size_t n) {
  const double pad = margin_pad(n);
  // the sampled maximum can miss the true one by O(R / kSteps); 1% covers it
  return Grid::centered(c, R * pad, 1.01 * ball_halfheight(c, R) * pad, n, n);
}

Grid level_set_grid(Point c, double s, std::size_t n) {
  const double p = level_radius(c, s);
  const double pad = 1.02 + 3.0 / static_cast<double>(n - 1);
  return Grid::centered({0.0, c.x2}, std::sqrt(c.x1 * c.x1 + p * p) * pad, 0.5 * p * p * pad, n, n);
}

std::function<double(Point)> boundary_data(const ExperimentConfig& cfg) {
  const double s = cfg.boundary_scale;
  const DiagonalMap f = cfg.frame;
  switch (cfg.boundary) {
    case BoundaryKind::Constant: return [s](Point) { return s; };
    case BoundaryKind::Zero: return [](Point) { return 0.0; };
    case BoundaryKind::Pole: {
      const Point pole = cfg.pole;
      return [s, f, pole](Point x) {
        const double p = rho(f(x), pole);
        if (!(p > 0.0)) throw DomainError("boundary node sits on the pole");
        return s / p;
      };
    }
    case BoundaryKind::Bump: {
      const Point pc = f(cfg.center);
      const double R = std::abs(f.s1) * cfg.eta * cfg.radius;
      Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
      const Point p = boundary_point(pc, R, rng.uniform(0.0, 2.0 * std::numbers::pi));
      const BoxSpec width(pc, std::abs(f.s1) * cfg.radius);
      const double w1 = width.halfwidth(1), w2 = width.halfwidth(2), a = cfg.bump_amplitude;
      return [s, f, p, w1, w2, a](Point x) {
        const Point y = f(x);
        const double d1 = (y.x1 - p.x1) / w1, d2 = (y.x2 - p.x2) / w2;
        return s * (1.0 + a * std::exp(-(d1 * d1 + d2 * d2)));
      };
    }
  }
  throw DomainError("unknown boundary kind");
}

LabSolution solve_ball_problem(const ExperimentConfig& cfg, bool with_source) {
  const QuasiBallSpec domain(cfg.center, cfg.eta * cfg.radius, SetKind::B);
  const Grid grid = ball_grid(cfg.center, cfg.eta * cfg.radius, cfg.grid_n);
  return solve_region(cfg, grid, [domain](Point x) { return domain.contains(x); },
                      boundary_data(cfg), with_source ? source_term(cfg) : nullptr);
}

ExperimentReport critical_density_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const LabSolution s = solve_ball_problem(cfg, true);
  record_rows(rep, s);
  const QuasiBallSpec inner(cfg.center, cfg.theta * cfg.radius, SetKind::B);
  const QuasiBallSpec ball(cfg.center, cfg.radius, SetKind::B);
  const Extremes e = extremes(s.u, [&](Point x) { return inner.contains(x); });
  require_nodes(e, "the inner ball");
  if (!(e.lo > 0.0)) {
    rep.status = ReportStatus::Rejected;
    rep.note("solution is not positive on the inner ball");
    return rep;
  }
  std::size_t total = 0, below = 0;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const Point x = s.u.grid.node(k);
    if (s.u.tags[k] == NodeTag::Exterior || !ball.contains(x)) continue;
    ++total;
    if (s.u.values[k] / e.lo <= cfg.M) ++below;
  }
  const double nu = static_cast<double>(below) / static_cast<double>(total);
  const double offset = cfg.radius + std::abs(cfg.center.x1);
  rep.record("normalizer", e.lo);
  rep.record("ball_nodes", static_cast<double>(total));
  rep.record("non_uniform_factor", std::max(offset, 1.0 / offset));
  rep.check("nu_hat", nu, Relation::Greater, 0.0);
  return rep;
}

ExperimentReport double_ball_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const Point c = cfg.center;
  const double r = cfg.radius;
  const double rho_outer = level_radius(c, cfg.eta * r);
  const double rho_inner = level_radius(c, r);
  const double rho_double = level_radius(c, 2.0 * r);
  const Grid grid = level_set_grid(c, cfg.eta * r, cfg.grid_n);
  auto ring = [=](Point x) {
    const double p = rho(x, c);
    return p < rho_outer && p > rho_inner;
  };
  const auto outer = cfg.boundary == BoundaryKind::Bump ? boundary_data(cfg)
                     : cfg.boundary == BoundaryKind::Constant
                         ? std::function<double(Point)>([s = cfg.boundary_scale](Point) { return s; })
                         : boundary_data(cfg);
  const double s = cfg.boundary_scale;
  auto data = [=](Point x) { return rho(x, c) <= rho_inner ? s : outer(x); };
  const LabSolution sol = solve_region(cfg, grid, ring, data);
  record_rows(rep, sol);
  const Extremes e = extremes(sol.u, [=](Point x) { return rho(x, c) < rho_double; });
  require_nodes(e, "the doubled set");
  const double alpha = barrier_exponent(cfg.ellipticity());
  const double gamma = ring_gamma(alpha);
  rep.record("alpha", alpha);
  rep.record("gamma_barrier", gamma);
  rep.check("gamma_hat", e.lo / s, Relation::GreaterEqual, 0.95 * gamma);
  return rep;
}

ExperimentReport power_decay_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const LabSolution s = solve_ball_problem(cfg, true);
  record_rows(rep, s);
  const double r = cfg.radius;
  const QuasiBallSpec big(cfg.center, cfg.eta * r, SetKind::B);
  const QuasiBallSpec norm_set(cfg.center, r, SetKind::BTilde);
  const QuasiBallSpec half_set(cfg.center, 0.5 * r, SetKind::BTilde);
  const Extremes e =
      extremes(s.u, [&](Point x) { return norm_set.contains(x) && big.contains(x); });
  require_nodes(e, "the normalization set");
  if (!(e.lo > 0.0)) {
    rep.status = ReportStatus::Rejected;
    rep.note("solution is not positive on the normalization set");
    return rep;
  }
  std::vector<double> values;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const Point x = s.u.grid.node(k);
    if (s.u.tags[k] == NodeTag::Exterior) continue;
    if (half_set.contains(x) && big.contains(x)) values.push_back(s.u.values[k] / e.lo);
  }
  if (values.empty()) throw DomainError("no grid nodes in the half-radius set");
  double prev = 1.0, eps = 0.0, level = 1.0;
  bool nonincreasing = true, any = false;
  for (int k = 1; k <= cfg.k_max; ++k) {
    level *= cfg.M;
    const auto hits = std::count_if(values.begin(), values.end(), [&](double v) { return v >= level; });
    const double frac = static_cast<double>(hits) / static_cast<double>(values.size());
    rep.record("fraction_k" + std::to_string(k), frac);
    if (frac > prev) nonincreasing = false;
    if (prev > 0.0) eps = std::max(eps, frac / prev);
    any = any || frac > 0.0;
    prev = frac;
  }
  // smallest k with 1 <= 2^k theta < eta, the chain length of the doubling argument
  int chain = 0;
  while (std::ldexp(cfg.theta, chain) < 1.0) ++chain;
  rep.record("chain_k", std::ldexp(cfg.theta, chain) < cfg.eta ? chain : -1.0);
  rep.record("eta", cfg.eta);
  rep.record("theta", cfg.theta);
  rep.record("exact_decay", any ? 0.0 : 1.0);
  rep.record("half_set_nodes", static_cast<double>(values.size()));
  rep.verdict("fractions_nonincreasing", nonincreasing);
  rep.check("epsilon_hat", eps, Relation::Less, 1.0);
  return rep;
}

ExperimentReport harnack_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep = start_report(cfg);
  const LabSolution s = solve_ball_problem(cfg, false);
  if (cfg.source_amplitude != 0.0) rep.note("source ignored: the Harnack run solves L u = 0");
  record_rows(rep, s);
  double data_max = 0.0;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    if (s.u.tags[k] == NodeTag::Boundary) data_max = std::max(data_max, std::abs(s.u.values[k]));
  }
  const QuasiBallSpec ball(cfg.center, cfg.radius, SetKind::B);
  const Extremes e = extremes(s.u, [&](Point x) { return ball.contains(x); });
  require_nodes(e, "the ball");
  rep.record("sup", e.hi);
  rep.record("inf", e.lo);
  if (!(e.lo >= 1e-6 * data_max) || data_max == 0.0) {
    rep.status = ReportStatus::Rejected;
    rep.note("infimum below the positivity floor");
    return rep;
  }
  rep.check("C_hat", e.hi / e.lo, Relation::Less, kInf);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  try {
    switch (cfg.experiment) {
      case Experiment::CriticalDensity: rep = critical_density_experiment(cfg); break;
      case Experiment::DoubleBall: rep = double_ball_experiment(cfg); break;
      case Experiment::PowerDecay: rep = power_decay_experiment(cfg); break;
      case Experiment::Harnack: rep = harnack_experiment(cfg); break;
    }
  } catch (const std::exception& ex) {
    rep = ExperimentReport{};
    rep.name = to_string(cfg.experiment);
    rep.config = cfg.to_json();
    rep.seed = cfg.seed;
    rep.status = ReportStatus::Error;
    rep.note(ex.what());
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

const char* headline(Experiment e) {
  switch (e) {
    case Experiment::CriticalDensity: return "nu_hat";
    case Experiment::DoubleBall: return "gamma_hat";
    case Experiment::PowerDecay: return "epsilon_hat";
    case Experiment::Harnack: return "C_hat";
  }
  return "";
}

SweepResult sweep(const std::vector<ExperimentConfig>& plan, std::size_t jobs) {
  SweepResult out;
  out.runs.resize(plan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) out.runs[i] = run_experiment(plan[i]);
  };
  const std::size_t n = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(plan.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  out.aggregate = aggregate(out.runs);
  for (const auto& r : out.runs) out.aggregate.wall_seconds += r.wall_seconds;
  return out;
}

ExperimentReport aggregate(const std::vector<ExperimentReport>& runs) {
  ExperimentReport agg;
  agg.name = "sweep";
  agg.config = {{"runs", runs.size()}};
  if (runs.empty()) {
    agg.note("no data");
    return agg;
  }
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::size_t> ok, rejected, errors, failed;
  for (const auto& r : runs) {
    const std::string& fam = r.name;
    if (r.status == ReportStatus::Error) {
      ++errors[fam];
      continue;
    }
    if (r.status == ReportStatus::Rejected) {
      ++rejected[fam];
      continue;
    }
    ++ok[fam];
    if (!r.passed()) ++failed[fam];
    const std::string key = headline(experiment_from_string(fam));
    if (!r.has(key)) continue;
    // runs with exact decay carry no ratio information
    if (r.has("exact_decay") && r.value("exact_decay") == 1.0) continue;
    values[fam].push_back(r.value(key));
  }
  std::set<std::string> families;
  for (const auto& r : runs) families.insert(r.name);
  for (const auto& fam : families) {
    agg.record(fam + ".runs_ok", static_cast<double>(ok[fam]));
    agg.record(fam + ".runs_rejected", static_cast<double>(rejected[fam]));
    agg.record(fam + ".runs_error", static_cast<double>(errors[fam]));
    agg.record(fam + ".runs_failed", static_cast<double>(failed[fam]));
    const std::string key = headline(experiment_from_string(fam));
    auto& v = values[fam];
    if (!v.empty()) {
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size();
      const double median = m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
      agg.record(fam + "." + key + ".min", v.front());
      agg.record(fam + "." + key + ".max", v.back());
      agg.record(fam + "." + key + ".median", median);
      const double spread = v.front() > 0.0 ? v.back() / v.front() : kInf;
      agg.check(fam + "." + key + ".spread", spread, Relation::LessEqual, 10.0);
    }
    if (ok[fam] == 0) {
      agg.note(fam + ": no data");
      continue;
    }
    agg.verdict(fam, failed[fam] == 0 && errors[fam] == 0);
  }
  return agg;
}

}  // namespace grushin::lab
