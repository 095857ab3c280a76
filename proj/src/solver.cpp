#include "qtensor/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtensor/errors.hpp"
#include "qtensor/operators.hpp"
#include "qtensor/snapshot.hpp"

namespace qtensor {

SimState SimState::zero(const GridSpec& g) {
  SimState s;
  s.u = VectorField(g);
  s.p = ScalarField(g);
  s.q = TensorField(g);
  return s;
}

double max_speed(const VectorField& u) {
  double m = 0.0;
  for (std::size_t n = 0; n < u.cells(); ++n) {
    const double s = u(0, n) * u(0, n) + u(1, n) * u(1, n) + u(2, n) * u(2, n);
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double compute_dt(const SimState& s, const ModelParams& p, const StepControl& ctrl) {
  const double h = s.grid().h_min();
  const double umax = max_speed(s.u);
  double dt = ctrl.cfl_target * h / std::max(umax, kDtFloor);
  dt = std::clamp(dt, ctrl.dt_min, ctrl.dt_max);
  double qinf = 0.0;
  for (std::size_t n = 0; n < s.q.cells(); ++n) qinf = std::max(qinf, frobenius_sq(s.q.tensor_at(n)));
  qinf = std::sqrt(qinf);
  const double stiffness = p.gamma * (std::fabs(p.a) + 2.0 * std::fabs(p.b) * qinf + 3.0 * p.c * qinf * qinf);
  return std::min(dt, 0.5 / (stiffness + kDtFloor));
}

Stepper::Stepper(const GridSpec& g, const ModelParams& p, const VariantConfig& v, StepOptions opts)
    : grid_(g), params_(p), variants_(v), opts_(opts), ws_(g) {
  validate(g);
  validate(p);
}

TensorField Stepper::q_tendency(const VectorField& u, const TensorField& q) const {
  const TensorField grad_u = gradient(u, FieldRole::Velocity);
  TensorField g = stretching_S(grad_u, q, variants_.stretching);
  g -= advect(u, q, FieldRole::OrderTensor, opts_.upwind);
  g.axpy(-params_.gamma, potential_f(q, params_, variants_));
  return g;
}

VectorField Stepper::momentum_rhs(const VectorField& u, const TensorField& q, bool include_viscous) const {
  VectorField r = advect(u, u, FieldRole::Velocity, opts_.upwind);
  r *= -1.0;
  if (include_viscous) r.axpy(params_.nu, laplacian(u, FieldRole::Velocity));
  if (opts_.couple_flow) {
    const TensorField h = molecular_field_H(q, params_, variants_);
    TensorField stress = elastic_stress_tau(q, params_);
    stress += antisym_stress_sigma(h, q);
    r += tensor_divergence(stress, FieldRole::Stress);
  }
  return r;
}

TensorField Stepper::implicit_q_diffusion(const TensorField& rhs, double sigma) {
  return solve_shifted(ws_, rhs, OperatorKind::Compact, FieldRole::OrderTensor, 1.0, -sigma);
}

VectorField Stepper::implicit_viscosity(const VectorField& rhs, double dt) {
  return solve_shifted(ws_, rhs, OperatorKind::Compact, FieldRole::Velocity, 1.0, -dt * params_.nu);
}

VectorField Stepper::project(const VectorField& v, ScalarField* phi_out) {
  const ScalarField div = divergence(v, FieldRole::Velocity);
  SolveOptions opts;
  double vnorm = 0.0;
  for (double x : v.data()) vnorm += x * x;
  opts.residual_floor = 1e-4 * std::sqrt(vnorm) / grid_.h_min();
  const ScalarField phi = solve_shifted(ws_, div, OperatorKind::Projection, FieldRole::Pressure, 0.0, 1.0, opts);
  VectorField out = v;
  out -= gradient(phi, FieldRole::Pressure);
  if (phi_out) *phi_out = phi;
  return out;
}

SimState Stepper::step(const SimState& s, const StepControl& ctrl, const Forcing* forcing) {
  if (!(s.grid() == grid_)) throw GridMismatch("Stepper::step: state grid differs from stepper grid");
  const double dt = ctrl.dt;
  if (!(dt > 0.0)) throw StepRejected("non-positive time step", ctrl.dt_min);
  const double h = grid_.h_min();
  const double umax = max_speed(s.u);
  if (umax * dt > ctrl.cfl_target * h * (1.0 + 1e-12)) {
    const double suggested = ctrl.cfl_target * h / umax;
    std::ostringstream os;
    os << "CFL violated: |u|_max dt / h = " << umax * dt / h << " > " << ctrl.cfl_target;
    throw StepRejected(os.str(), suggested);
  }

  SimState out;
  out.t = s.t + dt;
  out.step_index = s.step_index + 1;

  // Q: explicit transport, stretching and potential; implicit diffusion.
  TensorField qrhs = q_tendency(s.u, s.q);
  if (forcing && forcing->q) qrhs += forcing->q(s.t, dt);
  qrhs *= dt;
  qrhs += s.q;
  out.q = implicit_q_diffusion(qrhs, dt * params_.gamma * params_.epsilon);

  // u: explicit momentum with the stresses of the updated Q.
  VectorField urhs = momentum_rhs(s.u, out.q, !ctrl.viscous_implicit);
  if (forcing && forcing->u) urhs += forcing->u(s.t, dt);
  urhs *= dt;
  urhs += s.u;
  VectorField ustar = ctrl.viscous_implicit ? implicit_viscosity(urhs, dt) : std::move(urhs);

  // Projection; phi is the pressure because the correction carries dt.
  ScalarField phi;
  out.u = project(ustar, &phi);
  phi *= 1.0 / dt;
  out.p = std::move(phi);
  return out;
}

SimState step(const SimState& s, const ModelParams& p, const VariantConfig& v, const StepControl& ctrl) {
  Stepper st(s.grid(), p, v);
  return st.step(s, ctrl);
}

SimState run(const SimState& initial, const ModelParams& p, const VariantConfig& v, const StepControl& ctrl,
             double t_end, const RunHooks& hooks, StepOptions opts) {
  Stepper stepper(initial.grid(), p, v, opts);
  SimState s = initial;
  const double t_tol = 1e-12 * std::max(1.0, std::fabs(t_end));
  std::int64_t taken = 0;
  while (s.t < t_end - t_tol) {
    if (hooks.max_steps > 0 && taken >= hooks.max_steps) break;
    StepControl c = ctrl;
    c.dt = ctrl.adaptive ? compute_dt(s, p, ctrl) : ctrl.dt;
    c.dt = std::min(c.dt, t_end - s.t);
    auto dump = [&] {
      if (!hooks.blowup_snapshot.empty()) write_snapshot(hooks.blowup_snapshot, Snapshot{s.t, s.p, s.u, s.q});
    };
    SimState next;
    try {
      next = stepper.step(s, c, hooks.forcing);
    } catch (const NumericalBlowup&) {
      dump();
      throw;
    }
    if (!next.all_finite()) {
      dump();
      std::ostringstream os;
      os << "non-finite state at step " << next.step_index << " (t = " << next.t << ")";
      throw NumericalBlowup(os.str());
    }
    s = std::move(next);
    ++taken;
    if (hooks.on_step) hooks.on_step(s, c.dt);
  }
  return s;
}

}  // namespace qtensor
