#pragma once

// Coupled time stepper for the Q-tensor / incompressible Navier-Stokes
// system.
//
// One step, in order:
//   1. G = S(grad u^n, Q^n) - (u^n . grad) Q^n - gamma f(Q^n)   [+ forcing]
//   2. Q^{n+1} = (I - dt gamma epsilon Lap_N)^{-1} (Q^n + dt G)
//   3. u* = u^n + dt [ -(u^n . grad) u^n + nu Lap u^n
//                      + div tau(Q^{n+1}) + div sigma(H^{n+1}, Q^{n+1}) ]
//      (the viscous term is taken implicitly when requested)
//   4. L_proj phi = div(u*) / dt,  u^{n+1} = u* - dt grad phi,  p^{n+1} = phi
//   5. t += dt
// No-slip is carried by the velocity ghost rule, so the face-interpolated
// wall velocity is zero by construction.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>

#include "qtensor/constitutive.hpp"
#include "qtensor/fields.hpp"
#include "qtensor/linear_solvers.hpp"

namespace qtensor {

struct SimState {
  VectorField u;
  ScalarField p;
  TensorField q;
  double t = 0.0;
  std::int64_t step_index = 0;

  static SimState zero(const GridSpec& g);
  const GridSpec& grid() const { return q.grid(); }
  bool all_finite() const { return u.all_finite() && p.all_finite() && q.all_finite(); }
};

struct StepControl {
  double dt = 1e-3;
  double cfl_target = 0.5;
  double dt_min = 1e-10;
  double dt_max = 1e-2;
  bool viscous_implicit = false;
  /// false: run() uses `dt` verbatim instead of compute_dt().
  bool adaptive = true;
};

struct StepOptions {
  /// false drops the tau and sigma stresses from the momentum equation.
  bool couple_flow = true;
  bool upwind = false;
};

/// Time-dependent body forces added to the Q and momentum equations; each
/// callback receives (t_n, dt) of the step being taken.
struct Forcing {
  std::function<TensorField(double, double)> q;
  std::function<VectorField(double, double)> u;
};

inline constexpr double kDtFloor = 1e-12;

/// cfl * h / max(|u|_max, floor) clamped to [dt_min, dt_max], then capped by
/// the explicit-potential bound 0.5 / (gamma (|a| + 2|b||Q|_inf + 3c|Q|_inf^2) + floor).
double compute_dt(const SimState& s, const ModelParams& p, const StepControl& ctrl);

/// Pointwise max of |u| (Euclidean).
double max_speed(const VectorField& u);

class Stepper {
 public:
  Stepper(const GridSpec& g, const ModelParams& p, const VariantConfig& v, StepOptions opts = {});

  /// Throws StepRejected if |u|_max dt / h exceeds ctrl.cfl_target.
  SimState step(const SimState& s, const StepControl& ctrl, const Forcing* forcing = nullptr);

  // Building blocks of step(), public so verification code can evaluate the
  // scheme's own discrete operators on exact fields.

  /// S(grad u, Q) - (u . grad) Q - gamma f(Q)
  TensorField q_tendency(const VectorField& u, const TensorField& q) const;
  /// -(u . grad) u [+ nu Lap u] + div(tau(Q) + sigma(H(Q), Q))
  VectorField momentum_rhs(const VectorField& u, const TensorField& q, bool include_viscous) const;
  /// (I - sigma Lap_N)^{-1} rhs
  TensorField implicit_q_diffusion(const TensorField& rhs, double sigma);
  /// (I - dt nu Lap_D)^{-1} rhs
  VectorField implicit_viscosity(const VectorField& rhs, double dt);
  /// Removes the discrete gradient part: returns v - grad(phi) with
  /// L_proj phi = div v; phi is written to `phi_out` if given.
  VectorField project(const VectorField& v, ScalarField* phi_out = nullptr);

  const GridSpec& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  const VariantConfig& variants() const { return variants_; }
  const StepOptions& options() const { return opts_; }

 private:
  GridSpec grid_;
  ModelParams params_;
  VariantConfig variants_;
  StepOptions opts_;
  SolverWorkspace ws_;
};

/// Single step with a throwaway workspace.
SimState step(const SimState& s, const ModelParams& p, const VariantConfig& v, const StepControl& ctrl);

struct RunHooks {
  /// Called after every accepted step with the new state and the dt used.
  std::function<void(const SimState&, double)> on_step;
  /// Where to dump the last finite state if the run blows up (empty: none).
  std::filesystem::path blowup_snapshot;
  const Forcing* forcing = nullptr;
  /// Optional cap on the number of steps (0: none).
  std::int64_t max_steps = 0;
};

/// Steps until t >= t_end (the last step is shortened to land on t_end).
/// Throws NumericalBlowup on a non-finite state after dumping the last good
/// snapshot; step errors propagate.
SimState run(const SimState& initial, const ModelParams& p, const VariantConfig& v, const StepControl& ctrl,
             double t_end, const RunHooks& hooks = {}, StepOptions opts = {});

}  // namespace qtensor
