#include "qtensor/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace qtensor {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 8);
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw FormatError("QTS1: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("QTS1: truncated payload");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

template <int N>
void put_field(std::ostream& os, const Field<N>& f) {
  for (double v : f.data()) put_f64(os, v);
}

template <int N>
void get_field(std::istream& is, Field<N>& f) {
  for (double& v : f.data()) v = get_f64(is);
}

}  // namespace

void write_snapshot(std::ostream& os, const Snapshot& s) {
  const GridSpec& g = s.q.grid();
  if (!(s.p.grid() == g) || !(s.u.grid() == g)) throw GridMismatch("snapshot fields disagree on grid");
  os.write("QTS1", 4);
  put_u32(os, kSnapshotVersion);
  put_u32(os, static_cast<std::uint32_t>(g.nx));
  put_u32(os, static_cast<std::uint32_t>(g.ny));
  put_u32(os, static_cast<std::uint32_t>(g.nz));
  put_f64(os, g.lx);
  put_f64(os, g.ly);
  put_f64(os, g.lz);
  put_f64(os, s.t);
  put_field(os, s.p);
  put_field(os, s.u);
  put_field(os, s.q);
  if (!os) throw FormatError("QTS1: write failed");
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("QTS1: cannot open " + path.string() + " for writing");
  write_snapshot(os, s);
}

Snapshot read_snapshot(std::istream& is, std::array<BoundaryTag, 3> bc) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "QTS1", 4) != 0) throw FormatError("QTS1: bad magic");
  const std::uint32_t version = get_u32(is);
  if (version != kSnapshotVersion) throw FormatError("QTS1: unsupported version " + std::to_string(version));
  const int nx = static_cast<int>(get_u32(is));
  const int ny = static_cast<int>(get_u32(is));
  const int nz = static_cast<int>(get_u32(is));
  const double lx = get_f64(is);
  const double ly = get_f64(is);
  const double lz = get_f64(is);
  Snapshot s;
  s.t = get_f64(is);
  const GridSpec g = GridSpec::make(nx, ny, nz, lx, ly, lz, bc);
  s.p = ScalarField(g);
  s.u = VectorField(g);
  s.q = TensorField(g);
  get_field(is, s.p);
  get_field(is, s.u);
  get_field(is, s.q);
  return s;
}

Snapshot read_snapshot(const std::filesystem::path& path, std::array<BoundaryTag, 3> bc) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("QTS1: cannot open " + path.string());
  return read_snapshot(is, bc);
}

}  // namespace qtensor
