#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "rwdre/dynamics.hpp"

namespace rwdre {

/// Binary trajectory dump, little-endian:
///   magic "RWDT" | u32 version (1) | u32 n | f64 horizon | u64 seed | u64 tilt hash
///   | n bytes initial occupancy | i64 N+ | i64 N- | u64 event count
///   | per event: f64 time delta, u8 kind, u32 site.
/// The final state is recovered by replay.
struct TrajectoryHeader {
  int n = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t tilt_hash = 0;
};

void write_trajectory(std::ostream& out, const Trajectory& traj, std::uint64_t seed, std::uint64_t tilt_hash);
Trajectory read_trajectory(std::istream& in, TrajectoryHeader* header = nullptr);

void write_trajectory_file(const std::string& path, const Trajectory& traj, std::uint64_t seed,
                           std::uint64_t tilt_hash);
Trajectory read_trajectory_file(const std::string& path, TrajectoryHeader* header = nullptr);

}  // namespace rwdre
