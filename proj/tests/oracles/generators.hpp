#pragma once
// Seeded generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>

#include "grushin/fields.hpp"

namespace oracle {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  /// log-uniform on [lo, hi]
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  grushin::Point point(double half = 3.0) { return {uniform(-half, half), uniform(-half, half)}; }
  std::uint64_t seed() { return engine_(); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

  /// Field kind, ellipticity pair and seed for an admissible field.
  grushin::FieldDescriptor field() {
    static const grushin::FieldKind kinds[] = {grushin::FieldKind::Identity, grushin::FieldKind::Rotating,
                                               grushin::FieldKind::Checkerboard,
                                               grushin::FieldKind::RandomSmooth};
    grushin::FieldDescriptor d;
    d.kind = kinds[index(4)];
    const double q = uniform(0.2, 1.0);
    d.params.lambda = q;
    d.params.Lambda = 1.0;
    d.seed = seed();
    return d;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oracle
