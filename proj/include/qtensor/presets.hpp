#pragma once

// Initial-condition presets.  Every preset's velocity is passed through the
// discrete projection, so step 0 starts solenoidal.

#include <array>
#include <cstdint>

#include "qtensor/config.hpp"
#include "qtensor/solver.hpp"

namespace qtensor {

/// Single-cell-pair vortex in the x-y plane from a stream function
/// psi = X(x) Y(y): sin(2 pi x / l) on periodic axes, sin^2(pi x / l) on
/// walled ones (so the wall velocity vanishes).  Scaled to max |u| = amplitude
/// before projection.
VectorField vortex_velocity(const GridSpec& g, double amplitude);

/// Q = s (n (x) n - I/3), s = amplitude cos(2 pi x / lx) cos(2 pi y / ly).
/// The director is normalised; cos(2 pi x / l) has zero slope on both walls.
TensorField uniaxial_cosine(const GridSpec& g, double amplitude, std::array<double, 3> director);

/// Sum of low cosine modes with random symmetric traceless coefficients
/// (weights 1 / (1 + |k|^2), |k_axis| <= modes), scaled to max |Q| = amplitude.
/// Walled axes use cos(k pi x / l); periodic axes cos(2 pi k x / l + phase).
TensorField random_smooth_q(const GridSpec& g, double amplitude, std::uint64_t seed, int modes);

/// Discrete projection of an arbitrary velocity.
VectorField project_velocity(const VectorField& u);

/// Builds the state named by cfg.ic (reads the snapshot for preset = snapshot).
SimState initial_state(const RunConfig& cfg);

}  // namespace qtensor
