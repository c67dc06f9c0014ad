#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "grushin/abp.hpp"
#include "grushin/barriers.hpp"
#include "grushin/discrete_operator.hpp"
#include "grushin/geometry.hpp"
#include "grushin/harnack_lab.hpp"

namespace grushin::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Error in flags, configuration or output location.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  double lambda = 1.0;
  double big_lambda = 1.0;
  double radius = 1.0;
  double eta = 3.0;
  double theta = 0.5;
  std::string center;
  std::string field;
  std::string config;
  std::string out;
  std::size_t grid_n = 97;
  std::size_t samples = 10000;
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
  /// Every subcommand registers its own copy of each flag.
  std::multimap<std::string, CLI::Option*> options;

  bool given(const std::string& name) const {
    const auto [lo, hi] = options.equal_range(name);
    return std::any_of(lo, hi, [](const auto& kv) { return kv.second->count() > 0; });
  }
};

void add_flags(CLI::App* app, Flags& f) {
  f.options.emplace("lambda", app->add_option("--lambda", f.lambda, "lower ellipticity constant"));
  f.options.emplace("big-lambda", app->add_option("--big-lambda", f.big_lambda, "upper ellipticity constant"));
  f.options.emplace("center", app->add_option("--center", f.center, "center as x1,x2"));
  f.options.emplace("radius", app->add_option("--radius", f.radius, "radius r"));
  f.options.emplace("eta", app->add_option("--eta", f.eta, "domain factor eta"));
  f.options.emplace("theta", app->add_option("--theta", f.theta, "inner factor theta"));
  f.options.emplace("grid-n", app->add_option("--grid-n", f.grid_n, "nodes per grid axis"));
  f.options.emplace("seed", app->add_option("--seed", f.seed, "random seed"));
  f.options.emplace("field", app->add_option("--field", f.field, "coefficient field kind"));
  f.options.emplace("samples", app->add_option("--samples", f.samples, "sample count"));
  f.options.emplace("config", app->add_option("--config", f.config, "JSON configuration"));
  f.options.emplace("out", app->add_option("--out", f.out, "run directory"));
  f.options.emplace("jobs", app->add_option("--jobs", f.jobs, "concurrent sweep items"));
}

Point parse_center(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--center expects x1,x2");
  try {
    std::size_t a = 0, b = 0;
    const std::string s1 = text.substr(0, comma), s2 = text.substr(comma + 1);
    const Point p{std::stod(s1, &a), std::stod(s2, &b)};
    if (a != s1.size() || b != s2.size() || !p.finite()) throw UsageError("bad number");
    return p;
  } catch (const std::exception&) {
    throw UsageError("--center expects x1,x2, got '" + text + "'");
  }
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw UsageError("malformed config '" + path + "': " + ex.what());
  }
}

// Top-level "samples", "jobs", "out" of a config are the file equivalents of
// the flags of the same name; flags win.
void resolve_run_keys(const json& doc, Flags& f) {
  if (!doc.is_object()) return;
  if (!f.given("samples") && doc.contains("samples")) f.samples = doc.at("samples").get<std::size_t>();
  if (!f.given("jobs") && doc.contains("jobs")) f.jobs = doc.at("jobs").get<std::size_t>();
  if (!f.given("out") && doc.contains("out")) f.out = doc.at("out").get<std::string>();
}

void apply_flags(const Flags& f, lab::ExperimentConfig& cfg) {
  if (f.given("lambda")) cfg.field_params.lambda = f.lambda;
  if (f.given("big-lambda")) cfg.field_params.Lambda = f.big_lambda;
  if (f.given("center")) cfg.center = parse_center(f.center);
  if (f.given("radius")) cfg.radius = f.radius;
  if (f.given("eta")) cfg.eta = f.eta;
  if (f.given("theta")) cfg.theta = f.theta;
  if (f.given("grid-n")) cfg.grid_n = f.grid_n;
  if (f.given("seed")) cfg.seed = f.seed;
  if (f.given("field")) cfg.field = field_kind_from_string(f.field);
}

lab::ExperimentConfig single_config(const json& doc, const Flags& f) {
  lab::ExperimentConfig cfg = doc.is_null() ? lab::ExperimentConfig{} : lab::ExperimentConfig::from_json(doc);
  apply_flags(f, cfg);
  cfg.validate();
  return cfg;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
}

fs::path run_directory(const Flags& f, const std::string& command, std::uint64_t hash) {
  fs::path dir;
  if (!f.out.empty()) {
    dir = f.out;
  } else {
    const char* root = std::getenv("GRUSHIN_LAB_OUT");
    std::string name = command;
    for (char& c : name) if (c == ' ') c = '-';
    dir = fs::path(root && *root ? root : "grushin_runs") / (name + "-" + hex64(hash));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::string summary_csv(const std::vector<const ExperimentReport*>& reports) {
  std::ostringstream out;
  out << "report,status,passed,key,value,relation,bound\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ExperimentReport& r = *reports[i];
    const std::string label = std::to_string(i) + ":" + r.name;
    const std::string head = label + "," + to_string(r.status) + "," + (r.passed() ? "1" : "0") + ",";
    if (r.measurements.empty()) out << head << ",,,\n";
    for (const auto& [key, m] : r.measurements) {
      out << head << key << "," << number(m.value) << "," << to_string(m.relation) << ","
          << (m.relation == Relation::Info ? "" : number(m.bound)) << "\n";
    }
  }
  return out.str();
}

/// Writes manifest, report, summary and timing files; returns the exit code.
int finish(const Flags& f, const std::string& command, const json& resolved, std::uint64_t seed,
           const std::vector<ExperimentReport>& reports, const ExperimentReport* aggregate,
           const std::function<void(const fs::path&)>& extra = {}) {
  const std::uint64_t hash = lab::fnv1a(resolved.dump());
  const fs::path dir = run_directory(f, command, hash);

  json manifest = {{"command", command},
                   {"config_path", f.config},
                   {"config_hash", hex64(hash)},
                   {"seed", seed},
                   {"output_dir", dir.string()},
                   {"tool_version", GRUSHIN_VERSION},
                   {"resolved_config", resolved}};
  json body = {{"command", command}, {"config_hash", hex64(hash)}, {"reports", json::array()}};
  json timing = {{"reports", json::array()}};
  std::vector<const ExperimentReport*> all;
  bool ok = true;
  double total = 0.0;
  for (const auto& r : reports) {
    body["reports"].push_back(r.to_json());
    timing["reports"].push_back(r.timing_json());
    total += r.wall_seconds;
    all.push_back(&r);
    ok = ok && r.passed();
  }
  if (aggregate) {
    body["aggregate"] = aggregate->to_json();
    all.push_back(aggregate);
    ok = ok && aggregate->passed();
  }
  body["passed"] = ok;
  timing["total_seconds"] = total;

  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(dir / "report.json", body.dump(2) + "\n");
  write_text(dir / "summary.csv", summary_csv(all));
  write_text(dir / "timing.json", timing.dump(2) + "\n");
  if (extra) extra(dir);

  for (const auto* r : all) {
    std::cout << r->name << " " << to_string(r->status) << " " << (r->passed() ? "PASS" : "FAIL") << "\n";
  }
  std::cout << "run directory: " << dir.string() << "\n";
  return ok ? kExitOk : kExitVerdict;
}

/// Runs `make`, stamping wall time and the configuration seed on the report.
template <class Make>
ExperimentReport timed(std::uint64_t seed, Make&& make) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep = make();
  rep.seed = seed;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

int geom_verify(const Flags& f, const json& doc) {
  const lab::ExperimentConfig cfg = single_config(doc, f);
  std::vector<ExperimentReport> reports;
  for (StructureKind kind : {StructureKind::Charact, StructureKind::Equiv, StructureKind::Frla}) {
    // the lattice check runs a shortest-path solve per call; cap its sample count
    const std::size_t n = kind == StructureKind::Frla ? std::min<std::size_t>(f.samples, 2000) : f.samples;
    reports.push_back(timed(cfg.seed, [&] { return structure_check(kind, cfg.center, cfg.radius, n, cfg.seed); }));
  }
  json resolved = {{"config", cfg.to_json()}, {"samples", f.samples}};
  return finish(f, "geom verify", resolved, cfg.seed, reports, nullptr);
}

ExperimentReport ring_boundary_check(const RingBarrier& phi, Point y, double r, std::size_t count,
                                     std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "ring_boundary_values";
  rep.seed = seed;
  double err_outer = 0.0, err_inner = 0.0, min_middle = std::numeric_limits<double>::infinity();
  for (const Point& x : level_set_samples(y, level_radius(y, 3.0 * r), count, seed)) {
    err_outer = std::max(err_outer, std::abs(phi(x).value));
  }
  for (const Point& x : level_set_samples(y, level_radius(y, r), count, seed + 1)) {
    err_inner = std::max(err_inner, std::abs(phi(x).value - 1.0));
  }
  for (const Point& x : level_set_samples(y, level_radius(y, 2.0 * r), count, seed + 2)) {
    min_middle = std::min(min_middle, phi(x).value);
  }
  rep.record("gamma", phi.gamma());
  rep.check("outer_error", err_outer, Relation::LessEqual, 1e-10);
  rep.check("inner_error", err_inner, Relation::LessEqual, 1e-10);
  rep.check("middle_min_minus_gamma", min_middle - phi.gamma(), Relation::GreaterEqual, -1e-10);
  return rep;
}

int barrier_verify(const Flags& f, const json& doc) {
  const lab::ExperimentConfig cfg = single_config(doc, f);
  const CoefficientField field = make_field(cfg.field_descriptor());
  const EllipticityConstants e = cfg.ellipticity();
  const double alpha = barrier_exponent(e);
  const Point y = cfg.center;
  const double r = cfg.radius;
  const auto samples = log_radial_samples(y, 1e-3 * r, 10.0 * r, f.samples, cfg.seed);

  const RingBarrier ring(y, r, alpha);
  std::vector<ExperimentReport> reports;
  reports.push_back(timed(cfg.seed, [&] { return verify_subsolution(field, power_spec(y, alpha), samples); }));
  reports.push_back(timed(cfg.seed, [&] { return verify_subsolution(field, ring.spec(), samples); }));
  reports.push_back(timed(cfg.seed, [&] {
    return ring_boundary_check(ring, y, r, std::max<std::size_t>(f.samples / 10, 16), cfg.seed);
  }));
  reports.push_back(timed(cfg.seed, [&] {
    const Lemma41Barrier smoothed = lemma41_barrier(y, r, e);
    auto mixed = samples;
    const auto shell = splice_shell_samples(smoothed, f.samples, cfg.seed + 1);
    mixed.insert(mixed.end(), shell.begin(), shell.end());
    return verify_lemma41(field, smoothed, mixed);
  }));
  json resolved = {{"config", cfg.to_json()}, {"samples", f.samples}};
  return finish(f, "barrier verify", resolved, cfg.seed, reports, nullptr);
}

std::string field_csv(const GridFunction& u, const CoefficientField& field) {
  std::ostringstream out;
  out << "x1,x2,a11,a12,a22\n";
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Point x = u.grid.node(k);
    const Coefficients a = field(x);
    out << number(x.x1) << "," << number(x.x2) << "," << number(a.a11) << "," << number(a.a12) << ","
        << number(a.a22) << "\n";
  }
  return out.str();
}

int solve_run(const Flags& f, const json& doc) {
  const lab::ExperimentConfig cfg = single_config(doc, f);
  const auto t0 = std::chrono::steady_clock::now();
  const lab::LabSolution s = lab::solve_ball_problem(cfg);
  ExperimentReport rep;
  rep.name = "solve";
  rep.config = cfg.to_json();
  rep.seed = cfg.seed;
  double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin, imin = bmin, imax = -bmin;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const double v = s.u.values[k];
    if (s.u.tags[k] == NodeTag::Boundary) bmin = std::min(bmin, v), bmax = std::max(bmax, v);
    if (s.u.tags[k] == NodeTag::Interior) imin = std::min(imin, v), imax = std::max(imax, v);
  }
  const double tol = 1e-10 * std::max(std::abs(bmin), std::abs(bmax));
  rep.record("solver_residual", s.residual);
  rep.record("rows_total", static_cast<double>(s.rows.rows));
  rep.record("rows_flagged", static_cast<double>(s.rows.flagged_rows()));
  rep.record("boundary_min", bmin);
  rep.record("boundary_max", bmax);
  rep.check("interior_min_minus_boundary_min", imin - bmin, Relation::GreaterEqual, -tol);
  rep.check("interior_max_minus_boundary_max", imax - bmax, Relation::LessEqual, tol);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const CoefficientField field = cfg.lab_field();
  return finish(f, "solve run", cfg.to_json(), cfg.seed, {rep}, nullptr, [&](const fs::path& dir) {
    write_text(dir / "field.csv", field_csv(s.u, field));
    std::ostringstream sol;
    write_csv(sol, s.u);
    write_text(dir / "solution.csv", sol.str());
  });
}

// Subsolution with zero data on B(center, eta r): L u = f x1^2 with f a
// nonnegative bump, so u <= 0 inside and the weighted estimate is exercised.
int abp_check(const Flags& f, const json& doc) {
  const lab::ExperimentConfig cfg = single_config(doc, f);
  const CoefficientField field = cfg.lab_field();
  const double R = cfg.eta * cfg.radius;
  const QuasiBallSpec domain(cfg.center, R, SetKind::B);
  const Grid grid = lab::ball_grid(cfg.center, R, cfg.grid_n);
  const auto tags = region_tags(grid, [&](Point x) { return domain.contains(x); });
  const BoxSpec box(cfg.center, cfg.radius);
  auto bump = [&](Point x) {
    const double d1 = (x.x1 - cfg.center.x1) / box.halfwidth(1);
    const double d2 = (x.x2 - cfg.center.x2) / box.halfwidth(2);
    return std::exp(-(d1 * d1 + d2 * d2));
  };
  GridFunction fgrid = GridFunction::sample(grid, bump);
  fgrid.tags = tags;
  GridFunction rhs(grid);
  rhs.tags = tags;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x1 = grid.node(k).x1;
    rhs.values[k] = fgrid.values[k] * x1 * x1;
  }
  GridFunction boundary(grid, std::vector<double>(grid.size(), 0.0), tags);
  const DirichletSolve s = solve_dirichlet(field, boundary, rhs);
  std::vector<ExperimentReport> reports;
  reports.push_back(timed(cfg.seed, [&] { return classical_abp_check(s.solution); }));
  reports.push_back(timed(cfg.seed, [&] { return weighted_abp_check(s.solution, fgrid, field); }));
  return finish(f, "abp check", cfg.to_json(), cfg.seed, reports, nullptr, [&](const fs::path& dir) {
    write_envelope_csv((dir / "envelope.csv").string(), convex_envelope(s.solution));
  });
}

int lab_run(const Flags& f, const json& doc, const std::string& which) {
  std::vector<lab::ExperimentConfig> plan =
      doc.is_null() ? std::vector<lab::ExperimentConfig>{lab::ExperimentConfig{}} : lab::parse_plan(doc);
  if (which == "sweep" && doc.is_null()) throw UsageError("lab sweep needs --config");
  for (auto& cfg : plan) {
    if (which != "sweep") cfg.experiment = lab::experiment_from_string(which);
    apply_flags(f, cfg);
    cfg.validate();
  }
  const lab::SweepResult result = lab::sweep(plan, f.jobs);
  json resolved = json::array();
  for (const auto& cfg : plan) resolved.push_back(cfg.to_json());
  const std::uint64_t seed = plan.empty() ? 0 : plan.front().seed;
  return finish(f, "lab " + which, resolved, seed, result.runs, &result.aggregate);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Grushin-type operator laboratory"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                  const std::string& id) {
    CLI::App* sub = parent->add_subcommand(name, help);
    add_flags(sub, flags);
    sub->callback([&chosen, id] { chosen = id; });
    return sub;
  };
  auto* geom = app.add_subcommand("geom", "geometry checks")->require_subcommand(1);
  leaf(geom, "verify", "structure checks of boxes and quasi-balls", "geom");
  auto* barrier = app.add_subcommand("barrier", "barrier checks")->require_subcommand(1);
  leaf(barrier, "verify", "subsolution and ring-barrier checks", "barrier");
  auto* solve = app.add_subcommand("solve", "Dirichlet solves")->require_subcommand(1);
  leaf(solve, "run", "solve L u = 0 on a quasi-distance ball", "solve");
  auto* abp = app.add_subcommand("abp", "ABP checks")->require_subcommand(1);
  leaf(abp, "check", "classical and weighted ABP estimates", "abp");
  auto* labapp = app.add_subcommand("lab", "lab experiments")->require_subcommand(1);
  for (const char* e : {"critical-density", "double-ball", "power-decay", "harnack", "sweep"}) {
    leaf(labapp, e, std::string("lab experiment ") + e, std::string("lab:") + e);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    json doc;
    if (!flags.config.empty()) doc = read_config(flags.config);
    resolve_run_keys(doc, flags);
    if (chosen == "geom") return geom_verify(flags, doc);
    if (chosen == "barrier") return barrier_verify(flags, doc);
    if (chosen == "solve") return solve_run(flags, doc);
    if (chosen == "abp") return abp_check(flags, doc);
    if (chosen.rfind("lab:", 0) == 0) return lab_run(flags, doc, chosen.substr(4));
    std::cerr << "unknown command\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitVerdict;
  }
}

}  // namespace grushin::cli
