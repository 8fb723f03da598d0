#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "rwdre/dynamics.hpp"
#include "rwdre/lattice.hpp"
#include "rwdre/profile.hpp"

namespace rwdre {

/// Finite-element density sum_x eta(x) (1 - n|y - x|)^+, knots at the sites.
DensityProfile empirical_density(const Configuration& eta);

/// (1/eps) * integral of pi over (x, x + eps].
double block_average(const DensityProfile& pi, double x, double eps);

/// Exact L1 distance between two piecewise-linear profiles.
double l1_distance(const DensityProfile& a, const DensityProfile& b);

/// L1 distance between the eps-block averages of two profiles, midpoint
/// rule on `points` cells.
double block_l1_distance(const DensityProfile& a, const DensityProfile& b, double eps, int points = 512);

/// Finite sum of point masses.
struct DiscreteMeasure {
  std::vector<std::pair<double, double>> atoms;  // (position, mass)

  /// (1/n) sum_x eta(x) delta_{x/n}.
  static DiscreteMeasure from_configuration(const Configuration& eta);
  double mass() const noexcept;
};

/// sum_N 2^{-|N|} min(|integral f_N d(mu - nu)|, 1) over the Fourier family
/// f_0 = 1, f_N = cos(2 pi N x), f_{-N} = sin(2 pi N x), |N| <= n_max.
double weak_distance(const DensityProfile& mu, const DensityProfile& nu, int n_max = 32);
double weak_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int n_max = 32);
double weak_distance(const DensityProfile& mu, const DiscreteMeasure& nu, int n_max = 32);

/// Space-time density on a time grid. A moving-frame field shares the frames
/// of the fixed one and evaluates frame_m(x + shift_m).
class PathField {
 public:
  PathField() = default;
  PathField(std::vector<double> times, std::vector<DensityProfile> frames);

  PathField moving_frame(std::vector<double> shifts) const;

  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  double horizon() const noexcept { return times_.empty() ? 0.0 : times_.back(); }

  double value(std::size_t m, double x) const;
  /// Linear in time between frames, shift interpolated linearly.
  double value_at(double t, double x) const;
  DensityProfile frame(std::size_t m) const;
  const DensityProfile& base_frame(std::size_t m) const { return (*frames_)[m]; }
  double shift(std::size_t m) const noexcept { return shifts_.empty() ? 0.0 : shifts_[m]; }
  double shift_at(double t) const;

  bool has_walker() const noexcept { return !walker_.empty(); }
  void set_walker(std::vector<double> lifted, std::vector<std::int64_t> plus, std::vector<std::int64_t> minus);
  const std::vector<double>& walker() const noexcept { return walker_; }
  const std::vector<std::int64_t>& plus_counts() const noexcept { return plus_; }
  const std::vector<std::int64_t>& minus_counts() const noexcept { return minus_; }

 private:
  std::pair<std::size_t, double> locate(double t) const;

  std::vector<double> times_;
  std::shared_ptr<const std::vector<DensityProfile>> frames_;
  std::vector<double> shifts_;
  std::vector<double> walker_;
  std::vector<std::int64_t> plus_, minus_;
};

/// sqrt( integral_0^T integral (d_x pi)^2 dx dt ): central differences on
/// `points` uniform nodes per frame (0: the frame's own uniform knots, or
/// 512), trapezoid in time.
double energy_norm(const PathField& field, int points = 0);

struct RecordedFields {
  PathField fixed;   // pi_t
  PathField moving;  // pi-hat_t(x) = pi_t(x + x_t)
};

/// Replays the event log at the requested times.
RecordedFields record_path_field(const Trajectory& traj, const std::vector<double>& times);
/// Uses the snapshots stored during simulation.
RecordedFields record_path_field(const SimulationResult& result);

void write_path_field_csv(std::ostream& out, const PathField& field, int n);
void write_walker_csv(std::ostream& out, const PathField& field);

}  // namespace rwdre
