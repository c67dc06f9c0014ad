#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace grushin {

/// Comparison attached to a measurement. `Info` records a value that is
/// reported but not judged.
enum class Relation { Info, Less, LessEqual, Greater, GreaterEqual };

std::string to_string(Relation relation);
Relation relation_from_string(const std::string& text);

/// A measured quantity together with the bound it was compared against.
struct Measurement {
  double value = 0.0;
  Relation relation = Relation::Info;
  double bound = 0.0;

  bool holds() const;
};

/// Outcome class of one experiment. Rejected configurations are not
/// failures: their hypotheses did not hold, so nothing was judged.
enum class ReportStatus { Ok, Rejected, Error };

/// Structured record of one experiment or check.
///
/// Serialization is deterministic: keys are ordered, wall time is kept out of
/// the JSON body and only reported through `timing_json()`.
struct ExperimentReport {
  std::string name;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, Measurement> measurements;
  std::map<std::string, bool> verdicts;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
  ReportStatus status = ReportStatus::Ok;
  double wall_seconds = 0.0;

  /// Records a value without judging it.
  void record(const std::string& key, double value);

  /// Records `value relation bound` and a verdict of the same name.
  bool check(const std::string& key, double value, Relation relation, double bound);

  void verdict(const std::string& key, bool ok) { verdicts[key] = ok; }
  void note(std::string text) { notes.push_back(std::move(text)); }

  double value(const std::string& key) const;
  bool has(const std::string& key) const { return measurements.count(key) != 0; }

  /// True when every verdict holds. Rejected reports pass vacuously; errored
  /// reports never pass.
  bool passed() const;

  nlohmann::json to_json() const;
  nlohmann::json timing_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);
};

std::string to_string(ReportStatus status);

}  // namespace grushin
