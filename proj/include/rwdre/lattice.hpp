#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rwdre {

/// The discrete circle T_n = {0, 1/n, ..., (n-1)/n}. Sites are integer
/// indices internally; coordinate() gives the point on the unit circle.
class TorusLattice {
 public:
  explicit TorusLattice(int n);

  int size() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  double coordinate(int site) const noexcept { return static_cast<double>(site) / n_; }

  /// Canonical covering Z -> T_n.
  int wrap(std::int64_t i) const noexcept {
    const std::int64_t r = i % n_;
    return static_cast<int>(r < 0 ? r + n_ : r);
  }

  /// Number of distinct nearest-neighbour bonds {x, x+1/n}.
  int bond_count() const noexcept { return n_ == 2 ? 1 : n_; }

 private:
  int n_;
};

class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int n, std::uint8_t fill = 0);
  explicit Configuration(std::vector<std::uint8_t> occupancy);

  /// Parses a string of '0'/'1' characters.
  static Configuration from_string(std::string_view bits);

  int size() const noexcept { return static_cast<int>(occ_.size()); }
  std::uint8_t operator[](int site) const noexcept { return occ_[static_cast<std::size_t>(site)]; }
  void set(int site, std::uint8_t value);
  void swap_sites(int a, int b) noexcept;

  int particle_count() const noexcept;
  /// tau_k eta: result(z) = eta(z + k).
  Configuration shifted(std::int64_t k) const;

  std::span<const std::uint8_t> occupancy() const noexcept { return occ_; }
  std::span<std::uint8_t> occupancy_mut() noexcept { return occ_; }
  std::string to_string() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<std::uint8_t> occ_;
};

}  // namespace rwdre
