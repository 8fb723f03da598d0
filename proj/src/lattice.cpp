#include "rwdre/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rwdre {

TorusLattice::TorusLattice(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("TorusLattice: n must be at least 2");
}

Configuration::Configuration(int n, std::uint8_t fill) {
  if (n < 0) throw std::invalid_argument("Configuration: negative size");
  if (fill > 1) throw std::invalid_argument("Configuration: occupancy must be 0 or 1");
  occ_.assign(static_cast<std::size_t>(n), fill);
}

Configuration::Configuration(std::vector<std::uint8_t> occupancy) : occ_(std::move(occupancy)) {
  if (std::any_of(occ_.begin(), occ_.end(), [](std::uint8_t v) { return v > 1; }))
    throw std::invalid_argument("Configuration: occupancy must be 0 or 1");
}

Configuration Configuration::from_string(std::string_view bits) {
  std::vector<std::uint8_t> occ;
  occ.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("Configuration: expected only '0' and '1'");
    occ.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Configuration(std::move(occ));
}

void Configuration::set(int site, std::uint8_t value) {
  if (value > 1) throw std::invalid_argument("Configuration: occupancy must be 0 or 1");
  occ_.at(static_cast<std::size_t>(site)) = value;
}

void Configuration::swap_sites(int a, int b) noexcept {
  std::swap(occ_[static_cast<std::size_t>(a)], occ_[static_cast<std::size_t>(b)]);
}

int Configuration::particle_count() const noexcept {
  return std::accumulate(occ_.begin(), occ_.end(), 0);
}

Configuration Configuration::shifted(std::int64_t k) const {
  const auto n = static_cast<std::int64_t>(occ_.size());
  std::vector<std::uint8_t> out(occ_.size());
  if (n == 0) return Configuration(std::move(out));
  std::int64_t offset = k % n;
  if (offset < 0) offset += n;
  std::rotate_copy(occ_.begin(), occ_.begin() + offset, occ_.end(), out.begin());
  return Configuration(std::move(out));
}

std::string Configuration::to_string() const {
  std::string s(occ_.size(), '0');
  for (std::size_t i = 0; i < occ_.size(); ++i) s[i] = static_cast<char>('0' + occ_[i]);
  return s;
}

}  // namespace rwdre
