#pragma once

// QTS1 binary snapshot: a fixed little-endian header followed by the
// pressure plane, three velocity planes and nine tensor planes, each plane
// stored x-fastest.
//
//   offset  type      field
//   0       char[4]   magic "QTS1"
//   4       u32       version (1)
//   8       u32 x3    nx, ny, nz
//   20      f64 x3    lx, ly, lz
//   44      f64       t
//   52      f64[...]  p (nx*ny*nz), u (3 planes), Q (9 planes, Q_ij at 3i+j)

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "qtensor/fields.hpp"

namespace qtensor {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 52;

struct Snapshot {
  double t = 0.0;
  ScalarField p;
  VectorField u;
  TensorField q;
};

void write_snapshot(std::ostream& os, const Snapshot& s);
void write_snapshot(const std::filesystem::path& path, const Snapshot& s);

/// The file carries no boundary tags; they are taken from `bc`.
/// Throws FormatError on a bad magic, version, or truncated payload.
Snapshot read_snapshot(std::istream& is, std::array<BoundaryTag, 3> bc);
Snapshot read_snapshot(const std::filesystem::path& path, std::array<BoundaryTag, 3> bc);

}  // namespace qtensor
