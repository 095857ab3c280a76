#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace qtensor {

enum class BoundaryTag { Wall, Periodic };

std::string to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& s);

/// Rectangular box [0,lx]x[0,ly]x[0,lz] split into nx*ny*nz cells.
///
/// Values live at cell centres; cell (i,j,k) has linear index
/// i + nx*(j + ny*k) (x fastest).  A 2D slab is nz == 1 with a periodic z
/// axis, which makes every z-derivative vanish identically.
struct GridSpec {
  int nx = 4, ny = 4, nz = 4;
  double lx = 1.0, ly = 1.0, lz = 1.0;
  std::array<BoundaryTag, 3> bc{BoundaryTag::Periodic, BoundaryTag::Periodic,
                                BoundaryTag::Periodic};

  /// Builds and validates.  Throws ValidationError.
  static GridSpec make(int nx, int ny, int nz, double lx, double ly, double lz,
                       std::array<BoundaryTag, 3> bc);

  int n(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  double length(int axis) const { return axis == 0 ? lx : (axis == 1 ? ly : lz); }
  double h(int axis) const { return length(axis) / n(axis); }
  double hx() const { return h(0); }
  double hy() const { return h(1); }
  double hz() const { return h(2); }
  /// Smallest spacing over the axes that actually resolve something.
  double h_min() const;
  double cell_volume() const { return hx() * hy() * hz(); }
  double volume() const { return lx * ly * lz; }
  std::size_t cells() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * k);
  }
  /// Stride of the linear index along an axis.
  std::size_t stride(int axis) const {
    return axis == 0 ? 1 : (axis == 1 ? static_cast<std::size_t>(nx) : static_cast<std::size_t>(nx) * ny);
  }
  double center(int axis, int i) const { return (i + 0.5) * h(axis); }
  bool is_slab() const { return nz == 1; }
  bool all_periodic() const;

  bool operator==(const GridSpec&) const = default;
};

/// Every invariant violation as a human-readable line; empty when valid.
std::vector<std::string> grid_violations(const GridSpec& g);
void validate(const GridSpec& g);

}  // namespace qtensor
