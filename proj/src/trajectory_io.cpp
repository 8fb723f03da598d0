#include "rwdre/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace rwdre {
namespace {

static_assert(std::endian::native == std::endian::little, "trajectory dump assumes a little-endian host");

constexpr char kMagic[4] = {'R', 'W', 'D', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw std::runtime_error("read_trajectory: truncated input");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj, std::uint64_t seed, std::uint64_t tilt_hash) {
  if (!traj.has_events) throw std::invalid_argument("write_trajectory: trajectory has no event log");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(traj.n));
  put<double>(out, traj.horizon);
  put<std::uint64_t>(out, seed);
  put<std::uint64_t>(out, tilt_hash);
  for (int i = 0; i < traj.n; ++i) put<std::uint8_t>(out, traj.initial[i]);
  put<std::int64_t>(out, traj.plus_count);
  put<std::int64_t>(out, traj.minus_count);
  put<std::uint64_t>(out, traj.events.size());
  double last = 0.0;
  for (const auto& e : traj.events) {
    put<double>(out, e.time - last);
    last = e.time;
    put<std::uint8_t>(out, static_cast<std::uint8_t>(e.kind));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.site));
  }
  if (!out) throw std::runtime_error("write_trajectory: write failed");
}

Trajectory read_trajectory(std::istream& in, TrajectoryHeader* header) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_trajectory: bad magic");
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("read_trajectory: unsupported version");
  Trajectory traj;
  traj.n = static_cast<int>(get<std::uint32_t>(in));
  traj.horizon = get<double>(in);
  TrajectoryHeader h{traj.n, traj.horizon, get<std::uint64_t>(in), get<std::uint64_t>(in)};
  if (header) *header = h;
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(traj.n));
  for (auto& o : occ) o = get<std::uint8_t>(in);
  traj.initial = Configuration(std::move(occ));
  const auto plus = get<std::int64_t>(in);
  const auto minus = get<std::int64_t>(in);
  const auto count = get<std::uint64_t>(in);
  traj.has_events = true;
  traj.events.reserve(count);
  double t = 0.0;
  Configuration eta = traj.initial;
  for (std::uint64_t i = 0; i < count; ++i) {
    Event e;
    t += get<double>(in);
    e.time = t;
    const auto kind = get<std::uint8_t>(in);
    if (kind > 2) throw std::runtime_error("read_trajectory: bad event kind");
    e.kind = static_cast<EventKind>(kind);
    e.site = static_cast<std::int32_t>(get<std::uint32_t>(in));
    if (e.site < 0 || e.site >= traj.n) throw std::runtime_error("read_trajectory: site out of range");
    if (e.kind == EventKind::exchange) {
      eta.swap_sites(e.site, e.site + 1 == traj.n ? 0 : e.site + 1);
      ++traj.exchange_count;
    } else if (e.kind == EventKind::step_plus) {
      ++traj.plus_count;
    } else {
      ++traj.minus_count;
    }
    traj.events.push_back(e);
  }
  if (traj.plus_count != plus || traj.minus_count != minus)
    throw std::runtime_error("read_trajectory: walker counts do not match the event log");
  traj.final_state = std::move(eta);
  return traj;
}

void write_trajectory_file(const std::string& path, const Trajectory& traj, std::uint64_t seed,
                           std::uint64_t tilt_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_trajectory_file: cannot open " + path);
  write_trajectory(out, traj, seed, tilt_hash);
}

Trajectory read_trajectory_file(const std::string& path, TrajectoryHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_trajectory_file: cannot open " + path);
  return read_trajectory(in, header);
}

}  // namespace rwdre
