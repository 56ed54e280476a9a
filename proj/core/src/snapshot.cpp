#include "moistpe/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace moistpe {

namespace {

constexpr std::array<const char*, 6> kFieldNames{"u", "v", "T", "qv", "qc", "qr"};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw SnapshotError("snapshot header truncated");
  return to_little(v);
}

std::array<const Array3*, 6> fields_of(const State& s) { return {&s.u, &s.v, &s.t, &s.qv, &s.qc, &s.qr}; }

}  // namespace

void write_snapshot(const State& state, const Grid& grid, const std::filesystem::path& path) {
  const auto n = grid.cells();
  for (const Array3* f : fields_of(state))
    if (f->n0() != std::size_t(grid.nx) || f->n1() != std::size_t(grid.ny) || f->n2() != std::size_t(grid.np))
      throw SnapshotError("state dimensions do not match the grid");

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw SnapshotError("cannot open " + path.string() + " for writing");
  os.write(SnapshotHeader::kMagic.data(), SnapshotHeader::kMagic.size());
  put<std::uint32_t>(os, SnapshotHeader::kVersion);
  put<std::uint32_t>(os, grid.nx);
  put<std::uint32_t>(os, grid.ny);
  put<std::uint32_t>(os, grid.np);
  for (double x : {grid.lx, grid.ly, grid.p1, grid.p0, state.time}) put<double>(os, x);
  put<std::uint32_t>(os, kFieldNames.size());
  for (const char* name : kFieldNames) {
    std::array<char, 8> buf{};
    std::strncpy(buf.data(), name, buf.size() - 1);
    os.write(buf.data(), buf.size());
  }
  for (const Array3* f : fields_of(state)) {
    if constexpr (std::endian::native == std::endian::little) {
      os.write(reinterpret_cast<const char*>(f->values().data()), static_cast<std::streamsize>(n * sizeof(double)));
    } else {
      for (double x : f->values()) put<double>(os, x);
    }
  }
  if (!os) throw SnapshotError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("cannot open " + path.string());
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != SnapshotHeader::kMagic)
    throw SnapshotError("not a snapshot file: bad magic");

  Snapshot snap;
  auto& h = snap.header;
  h.version = get<std::uint32_t>(is);
  if (h.version != SnapshotHeader::kVersion)
    throw SnapshotError("unsupported snapshot version " + std::to_string(h.version));
  h.nx = get<std::uint32_t>(is);
  h.ny = get<std::uint32_t>(is);
  h.np = get<std::uint32_t>(is);
  h.lx = get<double>(is);
  h.ly = get<double>(is);
  h.p1 = get<double>(is);
  h.p0 = get<double>(is);
  h.time = get<double>(is);
  const auto count = get<std::uint32_t>(is);
  if (count != kFieldNames.size()) throw SnapshotError("unexpected field count " + std::to_string(count));
  for (std::uint32_t f = 0; f < count; ++f) {
    std::array<char, 8> buf{};
    if (!is.read(buf.data(), buf.size())) throw SnapshotError("snapshot header truncated");
    h.fields.emplace_back(buf.data(), strnlen(buf.data(), buf.size()));
    if (h.fields.back() != kFieldNames[f]) throw SnapshotError("unexpected field '" + h.fields.back() + "'");
  }

  const std::size_t n = std::size_t(h.nx) * h.ny * h.np;
  const auto header_end = is.tellg();
  is.seekg(0, std::ios::end);
  const auto payload = static_cast<std::uintmax_t>(is.tellg() - header_end);
  if (payload != n * count * sizeof(double))
    throw SnapshotError("payload mismatch: header implies " + std::to_string(n * count * sizeof(double)) +
                        " bytes, file has " + std::to_string(payload));
  is.seekg(header_end);

  State& s = snap.state;
  s.time = h.time;
  for (Array3* f : {&s.u, &s.v, &s.t, &s.qv, &s.qc, &s.qr}) {
    *f = Array3(h.nx, h.ny, h.np);
    is.read(reinterpret_cast<char*>(f->values().data()), static_cast<std::streamsize>(n * sizeof(double)));
    if constexpr (std::endian::native == std::endian::big)
      for (double& x : f->values()) x = to_little(x);
  }
  if (!is) throw SnapshotError("read failed for " + path.string());
  return snap;
}

}  // namespace moistpe
