#include "rwdre/tilt.hpp"

#include <sstream>

namespace rwdre {

std::uint64_t fnv1a(const std::string& text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string TiltParams::describe() const {
  std::ostringstream d;
  d.precision(17);
  d << "v0:";
  if (v0) {
    for (std::size_t i = 0; i < v0->knot_count(); ++i)
      d << ' ' << v0->knot_positions()[i] << '=' << v0->knot_values()[i];
  } else {
    d << " u0";
  }
  d << "|H: " << (H ? H->describe() : std::string("0"));
  d << "|a: " << (a ? a->description() : std::string("0"));
  return d.str();
}

std::uint64_t TiltParams::hash() const { return fnv1a(describe()); }

}  // namespace rwdre
