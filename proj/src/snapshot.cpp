#include "nlkg/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace nlkg {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot IO assumes a little-endian host");

template <class T>
void put(std::ostream& os, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  os.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char bytes[sizeof(T)];
  is.read(bytes, sizeof(T));
  if (!is) throw DomainError("snapshot: truncated file");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field& field, double time,
                    const Physics& physics) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("snapshot: cannot open " + path.string());
  const auto& g = field.grid();
  put<std::uint64_t>(os, static_cast<std::uint64_t>(g.dim));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(g.n));
  put<double>(os, g.box_length);
  put<double>(os, time);
  put<double>(os, physics.mass);
  put<double>(os, physics.exponent);
  os.write(reinterpret_cast<const char*>(field.values().data()),
           static_cast<std::streamsize>(field.size() * sizeof(double)));
  if (!os) throw DomainError("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("snapshot: cannot open " + path.string());
  SnapshotHeader h;
  h.grid.dim = static_cast<int>(get<std::uint64_t>(is));
  h.grid.n = static_cast<std::size_t>(get<std::uint64_t>(is));
  h.grid.box_length = get<double>(is);
  h.time = get<double>(is);
  h.physics.mass = get<double>(is);
  h.physics.exponent = get<double>(is);
  h.grid.validate();
  std::vector<double> values(h.grid.size());
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw DomainError("snapshot: truncated sample block in " + path.string());
  return Snapshot{h, Field(h.grid, std::move(values))};
}

void write_state(const std::filesystem::path& stem, const State& state) {
  write_snapshot(with_suffix(stem, ".u.snap"), state.u, state.time, state.physics);
  write_snapshot(with_suffix(stem, ".v.snap"), state.v, state.time, state.physics);
}

State read_state(const std::filesystem::path& stem) {
  auto u = read_snapshot(with_suffix(stem, ".u.snap"));
  auto v = read_snapshot(with_suffix(stem, ".v.snap"));
  if (!(u.header.grid == v.header.grid) || u.header.time != v.header.time)
    throw DomainError("snapshot: u and v files disagree for " + stem.string());
  State s{std::move(u.field), std::move(v.field), u.header.time, u.header.physics};
  s.validate();
  return s;
}

}  // namespace nlkg
