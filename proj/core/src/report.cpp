#include "grushin/report.hpp"

#include <cmath>
#include <stdexcept>

namespace grushin {

std::string to_string(Relation relation) {
  switch (relation) {
    case Relation::Info: return "info";
    case Relation::Less: return "<";
    case Relation::LessEqual: return "<=";
    case Relation::Greater: return ">";
    case Relation::GreaterEqual: return ">=";
  }
  return "info";
}

Relation relation_from_string(const std::string& text) {
  if (text == "info") return Relation::Info;
  if (text == "<") return Relation::Less;
  if (text == "<=") return Relation::LessEqual;
  if (text == ">") return Relation::Greater;
  if (text == ">=") return Relation::GreaterEqual;
  throw std::invalid_argument("unknown relation '" + text + "'");
}

std::string to_string(ReportStatus status) {
  switch (status) {
    case ReportStatus::Ok: return "ok";
    case ReportStatus::Rejected: return "rejected";
    case ReportStatus::Error: return "error";
  }
  return "error";
}

namespace {

ReportStatus status_from_string(const std::string& text) {
  if (text == "ok") return ReportStatus::Ok;
  if (text == "rejected") return ReportStatus::Rejected;
  if (text == "error") return ReportStatus::Error;
  throw std::invalid_argument("unknown report status '" + text + "'");
}

// JSON has no representation for non-finite numbers; encode them as strings
// so that a round trip keeps them.
nlohmann::json encode_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw std::invalid_argument("bad number '" + s + "'");
}

}  // namespace

bool Measurement::holds() const {
  switch (relation) {
    case Relation::Info: return true;
    case Relation::Less: return value < bound;
    case Relation::LessEqual: return value <= bound;
    case Relation::Greater: return value > bound;
    case Relation::GreaterEqual: return value >= bound;
  }
  return false;
}

void ExperimentReport::record(const std::string& key, double value) {
  measurements[key] = Measurement{value, Relation::Info, 0.0};
}

bool ExperimentReport::check(const std::string& key, double value, Relation relation,
                             double bound) {
  Measurement m{value, relation, bound};
  measurements[key] = m;
  const bool ok = m.holds();
  verdicts[key] = ok;
  return ok;
}

double ExperimentReport::value(const std::string& key) const {
  auto it = measurements.find(key);
  if (it == measurements.end()) throw std::out_of_range("no measurement '" + key + "' in " + name);
  return it->second.value;
}

bool ExperimentReport::passed() const {
  if (status == ReportStatus::Error) return false;
  for (const auto& [key, ok] : verdicts) {
    if (!ok) return false;
  }
  return true;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["config"] = config;
  j["seed"] = seed;
  j["status"] = to_string(status);
  auto& ms = j["measurements"] = nlohmann::json::object();
  for (const auto& [key, m] : measurements) {
    nlohmann::json e;
    e["value"] = encode_number(m.value);
    e["relation"] = to_string(m.relation);
    if (m.relation != Relation::Info) e["bound"] = encode_number(m.bound);
    ms[key] = e;
  }
  j["verdicts"] = verdicts;
  if (!notes.empty()) j["notes"] = notes;
  j["passed"] = passed();
  return j;
}

nlohmann::json ExperimentReport::timing_json() const {
  return {{"name", name}, {"seed", seed}, {"wall_seconds", wall_seconds}};
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.name = j.at("name").get<std::string>();
  r.config = j.value("config", nlohmann::json::object());
  r.seed = j.value("seed", std::uint64_t{0});
  r.status = status_from_string(j.value("status", std::string("ok")));
  for (const auto& [key, e] : j.at("measurements").items()) {
    Measurement m;
    m.value = decode_number(e.at("value"));
    m.relation = relation_from_string(e.value("relation", std::string("info")));
    if (e.contains("bound")) m.bound = decode_number(e.at("bound"));
    r.measurements[key] = m;
  }
  for (const auto& [key, v] : j.at("verdicts").items()) r.verdicts[key] = v.get<bool>();
  if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

}  // namespace grushin
