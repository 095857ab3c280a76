#pragma once

// Manufactured-solution harness.
//
// A manufactured case prescribes u*, p*, Q* as finite sums of separable
// trigonometric terms, so every space/time derivative is available in closed
// form.  Forcing comes in two flavours:
//
//   Continuous  g = (PDE operator applied to the exact fields), evaluated
//               pointwise from the closed forms; measures truncation order.
//   Discrete    g chosen so that one step of the scheme maps the sampled
//               exact state at t_n onto the sampled state at t_n + dt; the
//               velocity target is the discrete projection of u*.  Any
//               deviation is a stepping bug, never truncation.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "qtensor/constitutive.hpp"
#include "qtensor/fields.hpp"
#include "qtensor/solver.hpp"

namespace qtensor {

/// coef * cos(omega t + phase_t) * prod_axis cos(k[a] x_a + phase[a])
struct TrigTerm {
  double coef = 1.0;
  double omega = 0.0, phase_t = 0.0;
  std::array<double, 3> k{0.0, 0.0, 0.0};
  std::array<double, 3> phase{0.0, 0.0, 0.0};
};

class TrigExpr {
 public:
  TrigExpr() = default;
  explicit TrigExpr(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}

  /// d^{mt}/dt^{mt} d^{m}/dx^{m} of the expression at (x, t).
  double eval(const std::array<double, 3>& x, double t, const std::array<int, 3>& m = {0, 0, 0}, int mt = 0) const;
  /// Exact derivative along an axis, as another expression.
  TrigExpr derivative(int axis) const;
  TrigExpr scaled(double s) const;
  TrigExpr operator+(const TrigExpr& o) const;
  /// Multiplies every term by a factor acting on axes (and time) the terms
  /// leave constant; throws std::invalid_argument otherwise.
  TrigExpr times(const TrigTerm& factor) const;

  const std::vector<TrigTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<TrigTerm> terms_;
};

struct ManufacturedCase {
  std::string name;
  std::array<TrigExpr, 3> u;
  TrigExpr p;
  std::array<TrigExpr, 9> q;  // row-major

  /// Fields that vanish identically.
  static ManufacturedCase zero();
  /// Smooth time-dependent case compatible with the grid's boundary tags:
  /// divergence-free u from a stream function (vanishing on walls), p and Q
  /// from cosines with zero normal slope on walls, Q symmetric traceless.
  /// omega is the angular frequency of the time-dependent parts.
  static ManufacturedCase standard(const GridSpec& g, double u_amp = 0.5, double q_amp = 0.5,
                                   double omega = 2.0 * 3.141592653589793);
  /// Steady Q = cos(pi x / lx) E, u = p = 0.
  static ManufacturedCase steady_cosine(const GridSpec& g, const Mat3d& e);
};

ScalarField sample_p(const ManufacturedCase& c, const GridSpec& g, double t);
VectorField sample_u(const ManufacturedCase& c, const GridSpec& g, double t);
TensorField sample_q(const ManufacturedCase& c, const GridSpec& g, double t);

enum class ForcingKind { Continuous, Discrete };

std::string to_string(ForcingKind k);
ForcingKind forcing_kind_from_string(const std::string& s);

/// Pointwise continuous forcings at (x, t):
///   g_Q = dQ/dt + (u.grad)Q - S(grad u, Q) + gamma H(Q)
///   g_u = du/dt + (u.grad)u - nu Lap u + grad p - div tau - div sigma
/// (the stresses are dropped when `couple_flow` is false).
struct PointForcing {
  Mat3d g_q;
  std::array<double, 3> g_u{};
};
PointForcing continuous_forcing_at(const ManufacturedCase& c, const ModelParams& p, const VariantConfig& v,
                                   const std::array<double, 3>& x, double t, bool couple_flow = true);

/// Forcing callbacks for the stepper.  Continuous forcing is sampled at
/// t_n + dt; discrete forcing needs the same StepOptions and
/// viscous_implicit choice as the run it drives.
Forcing build_forcing(const ManufacturedCase& c, const GridSpec& g, const ModelParams& p, const VariantConfig& v,
                      ForcingKind kind, StepOptions opts = {}, bool viscous_implicit = false);

/// The state a run on grid g starts from (u projected for Discrete).
SimState manufactured_state(const ManufacturedCase& c, const GridSpec& g, double t, ForcingKind kind);

struct MmsRun {
  double h = 0.0, dt = 0.0;
  int steps = 0;
  double err_u = 0.0, err_q = 0.0;  // L2 at the final time
  double max_dev = 0.0;             // max over steps of the max-norm deviation (u and Q)
  double wall_seconds = 0.0;
};

/// Runs `steps` fixed steps of size dt from the manufactured state at t = 0.
MmsRun run_mms(const ManufacturedCase& c, const GridSpec& g, const ModelParams& p, const VariantConfig& v,
               ForcingKind kind, double dt, int steps, StepOptions opts = {}, bool viscous_implicit = false);

enum class LadderKind { Spatial, Temporal };

struct Ladder {
  LadderKind kind = LadderKind::Spatial;
  /// Template grid: boundary tags and lengths; counts are overridden.
  GridSpec base;
  std::vector<int> n{16, 32, 64};  // spatial ladder (cells per resolved axis)
  int n_fixed = 80;                // temporal ladder
  std::vector<double> dt{2e-3, 1e-3, 5e-4};  // temporal ladder
  double dt_coeff = 0.5;           // spatial ladder: dt = dt_coeff * h^2
  double t_end = 0.02;
  /// Time frequency of the manufactured case.  The temporal ladder needs the
  /// O(dt) error well above the O(h^2) floor of the fixed grid.
  double omega = 2.0 * 3.141592653589793;
  ForcingKind forcing = ForcingKind::Continuous;
  bool viscous_implicit = true;
  StepOptions opts{};

  /// Calibrated with mms_params(): both land in the asymptotic range on the
  /// periodic and the walled box.
  static Ladder spatial(const GridSpec& base);
  static Ladder temporal(const GridSpec& base);
  /// Few cheap steps; the deviation never depends on resolution.
  static Ladder discrete(const GridSpec& base);
};

/// Parameters the ladders are calibrated for.  nu and epsilon are moderate so
/// that the explicit u-Q coupling stays well inside its stability range at
/// the temporal ladder's largest step.
ModelParams mms_params();

struct ConvergenceTable {
  std::string title;
  LadderKind kind = LadderKind::Spatial;
  ForcingKind forcing = ForcingKind::Continuous;
  std::vector<MmsRun> runs;
  /// Least-squares slope of log(err) against log(h or dt); NaN for the
  /// discrete flavour, where errors sit at round-off.
  double order_u = 0.0, order_q = 0.0;
};

ConvergenceTable convergence_study(const ModelParams& p, const VariantConfig& v, const Ladder& ladder);

/// Least-squares slope of log(y) against log(x).
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

void print_table(std::ostream& os, const ConvergenceTable& t);
void write_table_csv(std::ostream& os, const ConvergenceTable& t, bool header = true);

}  // namespace qtensor
