#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grushin/fields.hpp"
#include "grushin/geometry.hpp"

namespace grushin::lab {

enum class Experiment { CriticalDensity, DoubleBall, PowerDecay, Harnack };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& text);

/// Dirichlet data family. Bump: 1 + A exp(-|.|^2) centred at a seeded point
/// of the ball boundary. Pole: rho(., pole)^-1. Zero: 0 on the outer boundary (the
/// inner boundary of the ring problem is always 1).
enum class BoundaryKind { Constant, Bump, Pole, Zero };

std::string to_string(BoundaryKind k);
BoundaryKind boundary_kind_from_string(const std::string& text);

/// One experiment. Coordinates are lab coordinates; `frame` maps them to the
/// physical plane where the field and boundary data live.
struct ExperimentConfig {
  Experiment experiment = Experiment::Harnack;
  FieldKind field = FieldKind::Identity;
  FieldParams field_params;
  std::uint64_t seed = 1;
  Point center{0.0, 0.0};
  double radius = 1.0;
  double eta = 3.0;
  double theta = 0.5;
  double M = 4.0;
  int k_max = 6;
  std::size_t grid_n = 97;
  BoundaryKind boundary = BoundaryKind::Bump;
  double boundary_scale = 1.0;
  double bump_amplitude = 4.0;
  /// A >= 0: the ball problems solve L u = -A s exp(-|.|^2) around the
  /// physical center (width of Box(center, r/8), s the boundary scale), so
  /// u is a supersolution. Used by critical density and power decay only.
  double source_amplitude = 0.0;
  Point pole{0.0, 12.0};
  DiagonalMap frame;

  /// Throws DomainError on out-of-range values.
  void validate() const;

  FieldDescriptor field_descriptor() const { return {field, field_params, seed}; }
  /// Field in lab coordinates.
  CoefficientField lab_field() const;
  EllipticityConstants ellipticity() const {
    return EllipticityConstants(field_params.lambda, field_params.Lambda);
  }

  /// Flat JSON with one key per parameter.
  nlohmann::json to_json() const;
  /// Reads the keys present in `j` over `base`; unknown keys are errors.
  static ExperimentConfig from_json(const nlohmann::json& j, const ExperimentConfig& base);
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Reads a sweep document: {"plan": [...]} with optional "base", a grid
/// {"base", "experiments", "fields", "ellipticity_ratios", "offsets",
/// "seeds", "scales"} expanded as a cartesian product, or a single config.
std::vector<ExperimentConfig> parse_plan(const nlohmann::json& doc,
                                         const ExperimentConfig& base = {});

/// The same problem viewed through translation-scaling onto unit radius.
ExperimentConfig translate_scale_image(const ExperimentConfig& cfg);
/// The same problem viewed through the mirror in the vertical axis.
ExperimentConfig reflection_image(const ExperimentConfig& cfg);
/// The same problem viewed through the dilation by t.
ExperimentConfig dilation_image(const ExperimentConfig& cfg, double t);

/// 64-bit FNV-1a of a string; used to fingerprint resolved configurations.
std::uint64_t fnv1a(const std::string& text);

}  // namespace grushin::lab
