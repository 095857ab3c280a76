#include "qtensor/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "qtensor/errors.hpp"

namespace qtensor {

namespace {

std::string join_lines(const std::vector<std::string>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << "; ";
    os << v[i];
  }
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument(join_lines(violations)), violations_(std::move(violations)) {}

SolverError::SolverError(const std::string& what, double relative_residual, int iterations)
    : std::runtime_error(what + " (relative residual " + std::to_string(relative_residual) +
                         ", iterations " + std::to_string(iterations) + ")"),
      residual_(relative_residual),
      iterations_(iterations) {}

StepRejected::StepRejected(const std::string& what, double suggested_dt)
    : std::runtime_error(what), suggested_dt_(suggested_dt) {}

std::string to_string(BoundaryTag tag) {
  return tag == BoundaryTag::Wall ? "wall" : "periodic";
}

BoundaryTag boundary_tag_from_string(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "wall") return BoundaryTag::Wall;
  if (t == "periodic") return BoundaryTag::Periodic;
  throw ValidationError({"unknown boundary tag '" + s + "' (expected wall|periodic)"});
}

GridSpec GridSpec::make(int nx, int ny, int nz, double lx, double ly, double lz,
                        std::array<BoundaryTag, 3> bc) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.lx = lx;
  g.ly = ly;
  g.lz = lz;
  g.bc = bc;
  validate(g);
  return g;
}

double GridSpec::h_min() const {
  double h = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a)
    if (n(a) > 1) h = std::min(h, this->h(a));
  return h;
}

bool GridSpec::all_periodic() const {
  return std::all_of(bc.begin(), bc.end(), [](BoundaryTag t) { return t == BoundaryTag::Periodic; });
}

std::vector<std::string> grid_violations(const GridSpec& g) {
  std::vector<std::string> out;
  const char* names[3] = {"x", "y", "z"};
  for (int a = 0; a < 3; ++a) {
    const int n = g.n(a);
    const bool slab_axis = (a == 2 && n == 1);
    if (slab_axis) {
      if (g.bc[2] != BoundaryTag::Periodic)
        out.push_back("slab mode (nz = 1) requires a periodic z axis");
    } else if (n < 4) {
      out.push_back(std::string("n") + names[a] + " must be >= 4 (got " + std::to_string(n) + ")");
    }
    const double l = g.length(a);
    if (!(l > 0.0) || !std::isfinite(l))
      out.push_back(std::string("l") + names[a] + " must be > 0");
  }
  return out;
}

void validate(const GridSpec& g) {
  auto v = grid_violations(g);
  if (!v.empty()) throw ValidationError(std::move(v));
}

}  // namespace qtensor
