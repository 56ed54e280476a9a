#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "moistpe/state.hpp"

namespace moistpe {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary layout, all little-endian:
///   char[8]  magic "MPESNAP\0"
///   u32      version
///   u32      nx, ny, np
///   f64      lx, ly, p1, p0
///   f64      time
///   u32      field count
///   char[8]  name of each field, NUL padded
///   f64      payload: each field in turn, nx*ny*np values in (i, j, k) order, k fastest
struct SnapshotHeader {
  static constexpr std::array<char, 8> kMagic{'M', 'P', 'E', 'S', 'N', 'A', 'P', '\0'};
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t version = kVersion;
  std::uint32_t nx = 0, ny = 0, np = 0;
  double lx = 0, ly = 0, p1 = 0, p0 = 0;
  double time = 0;
  std::vector<std::string> fields;  // "u", "v", "T", "qv", "qc", "qr"

  bool operator==(const SnapshotHeader&) const = default;
};

struct Snapshot {
  SnapshotHeader header;
  State state;
};

/// Throws SnapshotError if the state does not match the grid or the file cannot be written.
void write_snapshot(const State& state, const Grid& grid, const std::filesystem::path& path);

/// Throws SnapshotError on I/O failure, bad magic, unsupported version, or a
/// payload length that disagrees with the header.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace moistpe
