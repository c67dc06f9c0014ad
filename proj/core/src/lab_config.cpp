#include "grushin/lab_config.hpp"

#include <cmath>
#include <set>

namespace grushin::lab {

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::CriticalDensity: return "critical-density";
    case Experiment::DoubleBall: return "double-ball";
    case Experiment::PowerDecay: return "power-decay";
    case Experiment::Harnack: return "harnack";
  }
  return "harnack";
}

Experiment experiment_from_string(const std::string& text) {
  if (text == "critical-density") return Experiment::CriticalDensity;
  if (text == "double-ball") return Experiment::DoubleBall;
  if (text == "power-decay") return Experiment::PowerDecay;
  if (text == "harnack") return Experiment::Harnack;
  throw DomainError("unknown experiment '" + text + "'");
}

std::string to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Constant: return "constant";
    case BoundaryKind::Bump: return "bump";
    case BoundaryKind::Pole: return "pole";
    case BoundaryKind::Zero: return "zero";
  }
  return "bump";
}

BoundaryKind boundary_kind_from_string(const std::string& text) {
  if (text == "constant") return BoundaryKind::Constant;
  if (text == "bump") return BoundaryKind::Bump;
  if (text == "pole") return BoundaryKind::Pole;
  if (text == "zero") return BoundaryKind::Zero;
  throw DomainError("unknown boundary kind '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (!center.finite()) throw DomainError("center must be finite");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("radius must be positive");
  if (!(eta > 2.0)) throw DomainError("eta must exceed 2");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0, 1)");
  if (!(M > 1.0)) throw DomainError("M must exceed 1");
  if (k_max < 1) throw DomainError("k_max must be at least 1");
  if (grid_n < 9) throw DomainError("grid_n must be at least 9");
  if (!(boundary_scale > 0.0)) throw DomainError("boundary_scale must be positive");
  if (!(bump_amplitude >= 0.0)) throw DomainError("bump_amplitude must be nonnegative");
  if (!(source_amplitude >= 0.0)) throw DomainError("source_amplitude must be nonnegative");
  if (frame.s1 == 0.0 || frame.s2 == 0.0) throw DomainError("frame must be invertible");
  if (frame.b1 != 0.0 || std::abs(frame.s2 - frame.s1 * frame.s1) > 1e-12 * frame.s2) {
    throw DomainError("frame must satisfy b1 = 0 and s2 = s1^2 to preserve the operator");
  }
  EllipticityConstants(field_params.lambda, field_params.Lambda);
}

CoefficientField ExperimentConfig::lab_field() const {
  return make_field(field_descriptor()).pullback(frame);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json fp = field_params.to_json();
  fp.erase("lambda");
  fp.erase("big_lambda");
  return {{"experiment", to_string(experiment)},
          {"field", to_string(field)},
          {"lambda", field_params.lambda},
          {"big_lambda", field_params.Lambda},
          {"field_params", fp},
          {"seed", seed},
          {"center", {center.x1, center.x2}},
          {"radius", radius},
          {"eta", eta},
          {"theta", theta},
          {"M", M},
          {"k_max", k_max},
          {"grid_n", grid_n},
          {"boundary", to_string(boundary)},
          {"boundary_scale", boundary_scale},
          {"bump_amplitude", bump_amplitude},
          {"source_amplitude", source_amplitude},
          {"pole", {pole.x1, pole.x2}},
          {"frame", {frame.s1, frame.s2, frame.b1, frame.b2}}};
}

namespace {

Point read_point(const nlohmann::json& j, const char* key) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw DomainError(std::string(key) + " needs two coordinates");
  return {v[0], v[1]};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const ExperimentConfig& base) {
  if (!j.is_object()) throw DomainError("configuration must be a JSON object");
  static const std::set<std::string> known{
      "experiment", "field",  "lambda",   "big_lambda",     "field_params",   "seed",
      "center",     "radius", "eta",      "theta",          "M",              "k_max",
      "grid_n",     "boundary", "boundary_scale", "bump_amplitude", "source_amplitude", "pole", "frame",
      "samples",    "out",    "jobs"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw DomainError("unknown configuration key '" + key + "'");
  }
  ExperimentConfig c = base;
  try {
    if (j.contains("experiment")) c.experiment = experiment_from_string(j.at("experiment"));
    if (j.contains("field")) c.field = field_kind_from_string(j.at("field"));
    if (j.contains("field_params")) {
      nlohmann::json merged = c.field_params.to_json();
      for (const auto& [key, value] : j.at("field_params").items()) merged[key] = value;
      c.field_params = FieldParams::from_json(merged);
    }
    if (j.contains("lambda")) c.field_params.lambda = j.at("lambda").get<double>();
    if (j.contains("big_lambda")) c.field_params.Lambda = j.at("big_lambda").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("center")) c.center = read_point(j.at("center"), "center");
    if (j.contains("radius")) c.radius = j.at("radius").get<double>();
    if (j.contains("eta")) c.eta = j.at("eta").get<double>();
    if (j.contains("theta")) c.theta = j.at("theta").get<double>();
    if (j.contains("M")) c.M = j.at("M").get<double>();
    if (j.contains("k_max")) c.k_max = j.at("k_max").get<int>();
    if (j.contains("grid_n")) c.grid_n = j.at("grid_n").get<std::size_t>();
    if (j.contains("boundary")) c.boundary = boundary_kind_from_string(j.at("boundary"));
    if (j.contains("boundary_scale")) c.boundary_scale = j.at("boundary_scale").get<double>();
    if (j.contains("bump_amplitude")) c.bump_amplitude = j.at("bump_amplitude").get<double>();
    if (j.contains("source_amplitude")) c.source_amplitude = j.at("source_amplitude").get<double>();
    if (j.contains("pole")) c.pole = read_point(j.at("pole"), "pole");
    if (j.contains("frame")) {
      const auto f = j.at("frame").get<std::vector<double>>();
      if (f.size() != 4) throw DomainError("frame needs s1, s2, b1, b2");
      c.frame = {f[0], f[1], f[2], f[3]};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed configuration: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  return from_json(j, ExperimentConfig{});
}

std::vector<ExperimentConfig> parse_plan(const nlohmann::json& doc, const ExperimentConfig& base) {
  if (!doc.is_object()) throw DomainError("plan document must be a JSON object");
  ExperimentConfig b = base;
  if (doc.contains("base")) b = ExperimentConfig::from_json(doc.at("base"), base);
  std::vector<ExperimentConfig> out;
  if (doc.contains("plan")) {
    for (const auto& item : doc.at("plan")) out.push_back(ExperimentConfig::from_json(item, b));
    return out;
  }
  static const std::set<std::string> axes{"experiments",        "fields", "ellipticity_ratios",
                                          "offsets",            "seeds",  "scales"};
  bool grid = false;
  for (const auto& [key, value] : doc.items()) grid = grid || axes.count(key) != 0;
  if (!grid) {
    if (doc.contains("base") && doc.size() == 1) return {b};
    return {ExperimentConfig::from_json(doc, base)};
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "base" && !axes.count(key)) throw DomainError("unknown sweep key '" + key + "'");
  }
  auto list = [&](const char* key, nlohmann::json fallback) {
    return doc.contains(key) ? doc.at(key) : fallback;
  };
  const auto experiments = list("experiments", {to_string(b.experiment)});
  const auto fields = list("fields", {to_string(b.field)});
  const auto ratios = list("ellipticity_ratios", {b.field_params.lambda / b.field_params.Lambda});
  const auto offsets = list("offsets", {std::abs(b.center.x1) / b.radius});
  const auto seeds = list("seeds", {b.seed});
  const auto scales = list("scales", {1.0});
  try {
    for (const auto& e : experiments) {
      for (const auto& f : fields) {
        for (const auto& q : ratios) {
          for (const auto& o : offsets) {
            for (const auto& s : seeds) {
              for (const auto& t : scales) {
                ExperimentConfig c = b;
                c.experiment = experiment_from_string(e.get<std::string>());
                c.field = field_kind_from_string(f.get<std::string>());
                const double ratio = q.get<double>();
                if (!(ratio > 0.0 && ratio <= 1.0)) {
                  throw DomainError("ellipticity ratios must lie in (0, 1]");
                }
                c.field_params.lambda = ratio;
                c.field_params.Lambda = 1.0;
                c.center = {o.get<double>() * c.radius, 0.0};
                c.seed = s.get<std::uint64_t>();
                const double scale = t.get<double>();
                if (scale != 1.0) c = dilation_image(c, scale);
                c.validate();
                out.push_back(c);
              }
            }
          }
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed sweep: ") + e.what());
  }
  return out;
}

namespace {

// Composes an extra lab-side map G: new lab point z maps to old lab point
// G(z), so the physical frame becomes F o G.
ExperimentConfig recompose(const ExperimentConfig& cfg, const DiagonalMap& g, Point new_center,
                           double new_radius) {
  ExperimentConfig c = cfg;
  const DiagonalMap& f = cfg.frame;
  c.frame = {f.s1 * g.s1, f.s2 * g.s2, f.s1 * g.b1 + f.b1, f.s2 * g.b2 + f.b2};
  c.center = new_center;
  c.radius = new_radius;
  return c;
}

}  // namespace

ExperimentConfig translate_scale_image(const ExperimentConfig& cfg) {
  const DiagonalMap t = DiagonalMap::translate_scale(cfg.radius, cfg.center.x2);
  return recompose(cfg, t, t.inverse(cfg.center), 1.0);
}

ExperimentConfig reflection_image(const ExperimentConfig& cfg) {
  return recompose(cfg, DiagonalMap::reflection(), reflect(cfg.center), cfg.radius);
}

ExperimentConfig dilation_image(const ExperimentConfig& cfg, double t) {
  const DiagonalMap inv = DiagonalMap::dilation(1.0 / t);
  return recompose(cfg, inv, dilate(t, cfg.center), t * cfg.radius);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace grushin::lab
