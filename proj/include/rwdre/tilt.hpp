#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rwdre/profile.hpp"
#include "rwdre/test_function.hpp"

namespace rwdre {

/// Perturbation (v0, H, a). Missing parts mean: v0 = u0, H = 0, a = 0.
struct TiltParams {
  std::optional<DensityProfile> v0;
  std::optional<TestFunctionH> H;
  std::optional<TimeFunction> a;

  bool has_environment_tilt() const { return H && !H->is_zero(); }
  bool has_walker_tilt() const { return a && !a->is_zero(); }
  bool is_null() const { return !v0 && !has_environment_tilt() && !has_walker_tilt(); }
  /// Rates do not depend on time (H time-independent, a constant).
  bool time_homogeneous() const {
    return (!has_environment_tilt() || H->time_independent()) && (!has_walker_tilt() || a->is_constant());
  }

  std::string describe() const;
  /// FNV-1a hash of describe().
  std::uint64_t hash() const;
};

std::uint64_t fnv1a(const std::string& text) noexcept;

}  // namespace rwdre
