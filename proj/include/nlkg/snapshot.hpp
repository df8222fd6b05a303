#pragma once

#include <filesystem>

#include "nlkg/state.hpp"

namespace nlkg {

/// Header of a field snapshot file.
///
/// Layout (little-endian): d:u64, n:u64, L:f64, time:f64, m:f64, p:f64,
/// followed by n^d row-major f64 samples.
struct SnapshotHeader {
  GridSpec grid;
  double time = 0.0;
  Physics physics;
};

void write_snapshot(const std::filesystem::path& path, const Field& field, double time,
                    const Physics& physics);

struct Snapshot {
  SnapshotHeader header;
  Field field;
};

Snapshot read_snapshot(const std::filesystem::path& path);

/// A State is checkpointed as two snapshot files, `<stem>.u.snap` and `<stem>.v.snap`.
void write_state(const std::filesystem::path& stem, const State& state);
State read_state(const std::filesystem::path& stem);

}  // namespace nlkg
