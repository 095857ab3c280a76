#include "qtensor/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "qtensor/diagnostics.hpp"
#include "qtensor/dual.hpp"
#include "qtensor/errors.hpp"
#include "qtensor/operators.hpp"

namespace qtensor {

namespace {

constexpr double kPi = std::numbers::pi;

// k^m cos(theta + m pi/2) given c = cos(theta), s = sin(theta)
double dcos(double k, int m, double c, double s) {
  double km = 1.0;
  for (int i = 0; i < m; ++i) km *= k;
  switch (m & 3) {
    case 0:
      return km * c;
    case 1:
      return -km * s;
    case 2:
      return -km * c;
    default:
      return km * s;
  }
}

bool trivial_axis(const TrigTerm& t, int a) { return t.k[a] == 0.0 && t.phase[a] == 0.0; }

}  // namespace

double TrigExpr::eval(const std::array<double, 3>& x, double t, const std::array<int, 3>& m, int mt) const {
  double sum = 0.0;
  for (const auto& term : terms_) {
    const double th = term.omega * t + term.phase_t;
    double v = term.coef * dcos(term.omega, mt, std::cos(th), std::sin(th));
    for (int a = 0; a < 3 && v != 0.0; ++a) {
      const double ph = term.k[a] * x[a] + term.phase[a];
      v *= dcos(term.k[a], m[a], std::cos(ph), std::sin(ph));
    }
    sum += v;
  }
  return sum;
}

TrigExpr TrigExpr::derivative(int axis) const {
  std::vector<TrigTerm> out;
  for (auto t : terms_) {
    if (t.k[axis] == 0.0) continue;
    t.coef *= t.k[axis];
    t.phase[axis] += kPi / 2;
    out.push_back(t);
  }
  return TrigExpr(std::move(out));
}

TrigExpr TrigExpr::scaled(double s) const {
  std::vector<TrigTerm> out = terms_;
  for (auto& t : out) t.coef *= s;
  return TrigExpr(std::move(out));
}

TrigExpr TrigExpr::operator+(const TrigExpr& o) const {
  std::vector<TrigTerm> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return TrigExpr(std::move(out));
}

TrigExpr TrigExpr::times(const TrigTerm& f) const {
  std::vector<TrigTerm> out = terms_;
  for (auto& t : out) {
    for (int a = 0; a < 3; ++a) {
      if (trivial_axis(f, a)) continue;
      if (!trivial_axis(t, a)) throw std::invalid_argument("TrigExpr::times: overlapping axis factors");
      t.k[a] = f.k[a];
      t.phase[a] = f.phase[a];
    }
    if (f.omega != 0.0 || f.phase_t != 0.0) {
      if (t.omega != 0.0 || t.phase_t != 0.0) throw std::invalid_argument("TrigExpr::times: overlapping time factors");
      t.omega = f.omega;
      t.phase_t = f.phase_t;
    }
    t.coef *= f.coef;
  }
  return TrigExpr(std::move(out));
}

// ---------------------------------------------------------------------------

ManufacturedCase ManufacturedCase::zero() {
  ManufacturedCase c;
  c.name = "zero";
  return c;
}

ManufacturedCase ManufacturedCase::standard(const GridSpec& g, double u_amp, double q_amp, double omega) {
  ManufacturedCase c;
  c.name = "standard";
  const bool three_d = g.nz > 1;
  // Base wavenumber and phase per axis: cos(K x + phase) has zero slope on
  // walls only with phase 0 and K a multiple of pi / l.
  std::array<double, 3> K{}, ph{};
  for (int a = 0; a < 3; ++a) {
    const bool periodic = g.bc[a] == BoundaryTag::Periodic;
    K[a] = (periodic ? 2.0 : 1.0) * kPi / g.length(a);
    ph[a] = periodic ? 0.3 + 0.4 * a : 0.0;
  }
  if (!three_d) K[2] = ph[2] = 0.0;

  // Stream function psi = X(x) Y(y) T(t) [Z(z)], u = (dpsi/dy, -dpsi/dx, 0).
  auto psi_factor = [&](int a) {
    // periodic: sin(K x + ph) = cos(K x + ph - pi/2); wall: sin^2(pi x / l) = (1 - cos(2 pi x / l)) / 2
    if (g.bc[a] == BoundaryTag::Periodic) {
      TrigTerm t;
      t.k[a] = K[a];
      t.phase[a] = ph[a] - kPi / 2;
      return TrigExpr({t});
    }
    TrigTerm one;
    one.coef = 0.5;
    TrigTerm c2;
    c2.coef = -0.5;
    c2.k[a] = 2.0 * kPi / g.length(a);
    return TrigExpr({one, c2});
  };
  auto product = [](const TrigExpr& a, const TrigExpr& b) {
    TrigExpr acc;
    for (const auto& tb : b.terms()) acc = acc + a.times(tb);
    return acc;
  };
  TrigExpr psi = product(psi_factor(0), psi_factor(1));
  // T(t) = 1 + 0.5 cos(omega t)
  {
    TrigTerm tt;
    tt.coef = 0.5;
    tt.omega = omega;
    psi = psi + psi.times(tt);
  }
  // normalise so max |u| ~ u_amp (the stream-function slope is O(K))
  psi = psi.scaled(u_amp / (1.5 * std::max(K[0], K[1])));
  if (three_d) {
    TrigExpr z;
    if (g.bc[2] == BoundaryTag::Periodic) {
      // 1 + 0.5 cos(Kz z + ph) keeps the flow from vanishing on a plane
      TrigTerm one;
      z = TrigExpr({one, TrigTerm{0.5, 0, 0, {0, 0, K[2]}, {0, 0, ph[2]}}});
    } else {
      z = psi_factor(2);
    }
    psi = product(psi, z);
  }
  c.u[0] = psi.derivative(1);
  c.u[1] = psi.derivative(0).scaled(-1.0);

  // Pressure
  {
    TrigTerm t;
    t.coef = 0.3;
    t.omega = omega;
    t.phase_t = 0.2;
    t.k = K;
    t.phase = ph;
    c.p = TrigExpr({t});
  }

  // Q = phi1 A + phi2 B with A, B symmetric traceless
  Mat3d A;
  A(0, 0) = 2.0 / 3.0;
  A(1, 1) = -1.0 / 3.0;
  A(2, 2) = -1.0 / 3.0;
  A(0, 1) = A(1, 0) = 0.4;
  A(1, 2) = A(2, 1) = 0.2;
  Mat3d B;
  B(0, 0) = -0.2;
  B(1, 1) = 0.5;
  B(2, 2) = -0.3;
  B(0, 2) = B(2, 0) = 0.3;
  B(0, 1) = B(1, 0) = -0.25;
  TrigExpr phi1, phi2;
  {
    TrigTerm s;
    s.k = K;
    s.phase = ph;
    s.coef = q_amp;
    TrigTerm s_t = s;
    s_t.coef = 0.4 * q_amp;
    s_t.omega = omega;
    phi1 = TrigExpr({s, s_t});
    TrigTerm r;
    r.k = {2.0 * K[0], K[1], K[2]};
    r.phase = {2.0 * ph[0], ph[1] + 0.5 * (g.bc[1] == BoundaryTag::Periodic), ph[2]};
    r.coef = 0.6 * q_amp;
    r.omega = omega;
    r.phase_t = kPi / 2;  // -sin(omega t): starts at zero and grows
    TrigTerm r0 = r;
    r0.omega = 0.0;
    r0.phase_t = 0.0;
    r0.coef = 0.2 * q_amp;
    phi2 = TrigExpr({r, r0});
  }
  for (int idx = 0; idx < 9; ++idx) {
    TrigExpr e;
    if (A.m[idx] != 0.0) e = e + phi1.scaled(A.m[idx]);
    if (B.m[idx] != 0.0) e = e + phi2.scaled(B.m[idx]);
    c.q[idx] = e;
  }
  return c;
}

ManufacturedCase ManufacturedCase::steady_cosine(const GridSpec& g, const Mat3d& e) {
  ManufacturedCase c;
  c.name = "steady-cosine";
  TrigTerm t;
  t.k[0] = kPi / g.lx;
  for (int idx = 0; idx < 9; ++idx)
    if (e.m[idx] != 0.0) c.q[idx] = TrigExpr({t}).scaled(e.m[idx]);
  return c;
}

// ---------------------------------------------------------------------------

namespace {

// Per-axis tables of cos/sin at cell centres, so sampling a field costs a
// few multiplications per cell and term.
class GridExpr {
 public:
  static constexpr int kMaxOrder = 3;  // highest per-axis derivative gather() asks for

  GridExpr(const TrigExpr& e, const GridSpec& g) : e_(e) {
    for (const auto& t : e.terms()) {
      std::array<std::vector<double>, 3> tab;
      for (int a = 0; a < 3; ++a) {
        const int len = g.n(a);
        tab[a].resize(static_cast<std::size_t>((kMaxOrder + 1) * len));
        for (int i = 0; i < len; ++i) {
          const double th = t.k[a] * g.center(a, i) + t.phase[a];
          const double c = std::cos(th), s = std::sin(th);
          for (int m = 0; m <= kMaxOrder; ++m) tab[a][m * len + i] = dcos(t.k[a], m, c, s);
        }
      }
      tables_.push_back(std::move(tab));
    }
    for (int a = 0; a < 3; ++a) len_[a] = g.n(a);
  }

  /// coef * d^mt/dt^mt of each term's time factor at t, for mt = 0, 1.
  std::vector<std::array<double, 2>> time_table(double t) const {
    std::vector<std::array<double, 2>> tt;
    for (const auto& term : e_.terms()) {
      const double th = term.omega * t + term.phase_t;
      const double c = std::cos(th), s = std::sin(th);
      tt.push_back({term.coef * dcos(term.omega, 0, c, s), term.coef * dcos(term.omega, 1, c, s)});
    }
    return tt;
  }

  double at(int i, int j, int k, const std::array<int, 3>& m, const std::vector<std::array<double, 2>>& tt,
            int mt = 0) const {
    const std::array<int, 3> idx{i, j, k};
    double sum = 0.0;
    for (std::size_t n = 0; n < tables_.size(); ++n) {
      double v = tt[n][mt];
      for (int a = 0; a < 3; ++a) v *= tables_[n][a][m[a] * len_[a] + idx[a]];
      sum += v;
    }
    return sum;
  }

 private:
  TrigExpr e_;
  std::array<int, 3> len_{};
  std::vector<std::array<std::vector<double>, 3>> tables_;
};

struct PointData {
  Mat3d q, dtq;
  std::array<Mat3d, 3> dq;
  std::array<std::array<Mat3d, 3>, 3> ddq;
  std::array<Mat3d, 3> dlapq;
  std::array<double, 3> u{}, dtu{}, lapu{}, gradp{};
  Mat3d gradu;  // (i, j) = d_j u_i
};

constexpr std::array<int, 3> unit_m(int a) {
  std::array<int, 3> m{0, 0, 0};
  m[a] = 1;
  return m;
}

template <typename EvQ, typename EvU, typename EvP>
PointData gather(EvQ&& ev_q, EvU&& ev_u, EvP&& ev_p) {
  // ev_*(component, multi-index, time order)
  PointData d;
  for (int c = 0; c < 9; ++c) {
    d.q.m[c] = ev_q(c, {0, 0, 0}, 0);
    d.dtq.m[c] = ev_q(c, {0, 0, 0}, 1);
    for (int a = 0; a < 3; ++a) {
      d.dq[a].m[c] = ev_q(c, unit_m(a), 0);
      for (int b = a; b < 3; ++b) {
        std::array<int, 3> m{0, 0, 0};
        m[a] += 1;
        m[b] += 1;
        d.ddq[a][b].m[c] = d.ddq[b][a].m[c] = ev_q(c, m, 0);
      }
      double l = 0.0;
      for (int b = 0; b < 3; ++b) {
        std::array<int, 3> m{0, 0, 0};
        m[a] += 1;
        m[b] += 2;
        l += ev_q(c, m, 0);
      }
      d.dlapq[a].m[c] = l;
    }
  }
  for (int i = 0; i < 3; ++i) {
    d.u[i] = ev_u(i, {0, 0, 0}, 0);
    d.dtu[i] = ev_u(i, {0, 0, 0}, 1);
    double l = 0.0;
    for (int a = 0; a < 3; ++a) {
      d.gradu(i, a) = ev_u(i, unit_m(a), 0);
      std::array<int, 3> m{0, 0, 0};
      m[a] = 2;
      l += ev_u(i, m, 0);
    }
    d.lapu[i] = l;
    d.gradp[i] = ev_p(0, unit_m(i), 0);
  }
  return d;
}

PointForcing forcing_kernel(const PointData& d, const ModelParams& p, const VariantConfig& v, bool couple_flow) {
  PointForcing out;
  const Mat3d lapq = d.ddq[0][0] + d.ddq[1][1] + d.ddq[2][2];
  const Mat3d f = potential_f(d.q, p, v);
  Mat3d h = f;
  h -= p.epsilon * lapq;
  Mat3d adv;
  for (int k = 0; k < 3; ++k) adv += d.u[k] * d.dq[k];
  out.g_q = d.dtq + adv - stretching(d.gradu, d.q, v.stretching) + p.gamma * h;

  for (int i = 0; i < 3; ++i) {
    double a = 0.0;
    for (int k = 0; k < 3; ++k) a += d.u[k] * d.gradu(i, k);
    out.g_u[i] = d.dtu[i] + a - p.nu * d.lapu[i] + d.gradp[i];
  }
  if (couple_flow) {
    std::array<Mat3d, 3> dh;
    for (int j = 0; j < 3; ++j) {
      Mat3<Dual> qd;
      for (int c = 0; c < 9; ++c) qd.m[c] = Dual(d.q.m[c], d.dq[j].m[c]);
      const Mat3<Dual> fd = potential_f(qd, p, v);
      for (int c = 0; c < 9; ++c) dh[j].m[c] = fd.m[c].d;
      dh[j] -= p.epsilon * d.dlapq[j];
    }
    for (int i = 0; i < 3; ++i) {
      double div_tau = double_dot(lapq, d.dq[i]);
      for (int j = 0; j < 3; ++j) div_tau += double_dot(d.dq[j], d.ddq[i][j]);
      div_tau *= -p.epsilon;
      double div_sigma = 0.0;
      for (int j = 0; j < 3; ++j) {
        const Mat3d t = dh[j] * d.q + h * d.dq[j] - d.dq[j] * h - d.q * dh[j];
        div_sigma += t(i, j);
      }
      out.g_u[i] -= div_tau + div_sigma;
    }
  }
  return out;
}

template <int N>
Field<N> sample(const std::array<TrigExpr, N>& e, const GridSpec& g, double t) {
  Field<N> f(g);
  for (int c = 0; c < N; ++c) {
    if (e[c].empty()) continue;
    const GridExpr ge(e[c], g);
    const auto tt = ge.time_table(t);
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(c, g.index(i, j, k)) = ge.at(i, j, k, {0, 0, 0}, tt);
  }
  return f;
}

// Continuous forcing sampled on a grid, with the per-axis tables built once.
class ContinuousSampler {
 public:
  ContinuousSampler(const ManufacturedCase& c, const GridSpec& g, const ModelParams& p, const VariantConfig& v,
                    bool couple_flow)
      : g_(g), p_(p), v_(v), couple_(couple_flow) {
    for (const auto& e : c.q) q_.emplace_back(e, g);
    for (const auto& e : c.u) u_.emplace_back(e, g);
    p_expr_.emplace_back(c.p, g);
  }

  std::pair<TensorField, VectorField> at(double t) const {
    TensorField gq(g_);
    VectorField gu(g_);
    using Table = std::vector<std::vector<std::array<double, 2>>>;
    auto tables = [t](const std::vector<GridExpr>& ex) {
      Table tt;
      for (const auto& e : ex) tt.push_back(e.time_table(t));
      return tt;
    };
    const Table tq = tables(q_), tu = tables(u_), tp = tables(p_expr_);
    for (int k = 0; k < g_.nz; ++k)
      for (int j = 0; j < g_.ny; ++j)
        for (int i = 0; i < g_.nx; ++i) {
          auto ev = [&](const std::vector<GridExpr>& ex, const Table& tt) {
            return [&, i, j, k](int c, std::array<int, 3> m, int mt) { return ex[c].at(i, j, k, m, tt[c], mt); };
          };
          const PointData d = gather(ev(q_, tq), ev(u_, tu), ev(p_expr_, tp));
          const PointForcing f = forcing_kernel(d, p_, v_, couple_);
          const std::size_t n = g_.index(i, j, k);
          gq.set_tensor(n, f.g_q);
          for (int a = 0; a < 3; ++a) gu(a, n) = f.g_u[a];
        }
    return {std::move(gq), std::move(gu)};
  }

 private:
  GridSpec g_;
  ModelParams p_;
  VariantConfig v_;
  bool couple_;
  std::vector<GridExpr> q_, u_, p_expr_;
};

}  // namespace

ScalarField sample_p(const ManufacturedCase& c, const GridSpec& g, double t) {
  return sample<1>(std::array<TrigExpr, 1>{c.p}, g, t);
}
VectorField sample_u(const ManufacturedCase& c, const GridSpec& g, double t) { return sample<3>(c.u, g, t); }
TensorField sample_q(const ManufacturedCase& c, const GridSpec& g, double t) { return sample<9>(c.q, g, t); }

std::string to_string(ForcingKind k) { return k == ForcingKind::Continuous ? "continuous" : "discrete"; }

ForcingKind forcing_kind_from_string(const std::string& s) {
  if (s == "continuous") return ForcingKind::Continuous;
  if (s == "discrete") return ForcingKind::Discrete;
  throw ValidationError({"unknown forcing kind '" + s + "' (expected continuous|discrete)"});
}

PointForcing continuous_forcing_at(const ManufacturedCase& c, const ModelParams& p, const VariantConfig& v,
                                   const std::array<double, 3>& x, double t, bool couple_flow) {
  auto ev = [&](const auto& exprs) {
    return [&](int comp, std::array<int, 3> m, int mt) { return exprs[comp].eval(x, t, m, mt); };
  };
  const std::array<TrigExpr, 1> pe{c.p};
  return forcing_kernel(gather(ev(c.q), ev(c.u), ev(pe)), p, v, couple_flow);
}

SimState manufactured_state(const ManufacturedCase& c, const GridSpec& g, double t, ForcingKind kind) {
  SimState s;
  s.t = t;
  s.q = sample_q(c, g, t);
  s.u = sample_u(c, g, t);
  s.p = sample_p(c, g, t);
  if (kind == ForcingKind::Discrete) {
    Stepper st(g, ModelParams{}, VariantConfig{});
    s.u = st.project(s.u);
  }
  return s;
}

Forcing build_forcing(const ManufacturedCase& c, const GridSpec& g, const ModelParams& p, const VariantConfig& v,
                      ForcingKind kind, StepOptions opts, bool viscous_implicit) {
  Forcing out;
  if (kind == ForcingKind::Continuous) {
    auto sampler = std::make_shared<ContinuousSampler>(c, g, p, v, opts.couple_flow);
    // Both callbacks of one step ask for the same time level; evaluate once.
    auto cache = std::make_shared<std::pair<double, std::pair<TensorField, VectorField>>>();
    cache->first = std::nan("");
    auto get = [sampler, cache](double t) -> const std::pair<TensorField, VectorField>& {
      if (!(cache->first == t)) {
        cache->second = sampler->at(t);
        cache->first = t;
      }
      return cache->second;
    };
    out.q = [get](double tn, double dt) { return get(tn + dt).first; };
    out.u = [get](double tn, double dt) { return get(tn + dt).second; };
    return out;
  }
  auto st = std::make_shared<Stepper>(g, p, v, opts);
  auto mc = std::make_shared<ManufacturedCase>(c);
  auto target_u = [st, mc, g](double t) { return st->project(sample_u(*mc, g, t)); };
  out.q = [st, mc, g, p, target_u](double tn, double dt) {
    const TensorField qn = sample_q(*mc, g, tn);
    const TensorField qn1 = sample_q(*mc, g, tn + dt);
    const double sigma = dt * p.gamma * p.epsilon;
    TensorField lhs = qn1;
    lhs.axpy(-sigma, laplacian(qn1, FieldRole::OrderTensor));
    lhs -= qn;
    lhs *= 1.0 / dt;
    lhs -= st->q_tendency(target_u(tn), qn);
    return lhs;
  };
  out.u = [st, mc, g, p, target_u, viscous_implicit](double tn, double dt) {
    const VectorField un = target_u(tn);
    const VectorField un1 = target_u(tn + dt);
    const TensorField qn1 = sample_q(*mc, g, tn + dt);
    VectorField lhs = un1;
    if (viscous_implicit) lhs.axpy(-dt * p.nu, laplacian(un1, FieldRole::Velocity));
    lhs -= un;
    lhs *= 1.0 / dt;
    lhs -= st->momentum_rhs(un, qn1, !viscous_implicit);
    return lhs;
  };
  return out;
}

MmsRun run_mms(const ManufacturedCase& c, const GridSpec& g, const ModelParams& p, const VariantConfig& v,
               ForcingKind kind, double dt, int steps, StepOptions opts, bool viscous_implicit) {
  const auto t0 = std::chrono::steady_clock::now();
  Stepper st(g, p, v, opts);
  const Forcing forcing = build_forcing(c, g, p, v, kind, opts, viscous_implicit);
  SimState s = manufactured_state(c, g, 0.0, kind);
  StepControl ctl;
  ctl.dt = dt;
  ctl.cfl_target = 1.0;
  ctl.viscous_implicit = viscous_implicit;
  MmsRun r;
  r.h = g.h_min();
  r.dt = dt;
  r.steps = steps;
  for (int n = 0; n < steps; ++n) {
    s = st.step(s, ctl, &forcing);
    if (!s.all_finite()) throw NumericalBlowup("manufactured run blew up at step " + std::to_string(n + 1));
    const SimState ex = manufactured_state(c, g, s.t, kind);
    r.max_dev = std::max({r.max_dev, max_deviation(s.u, ex.u), max_deviation(s.q, ex.q)});
    if (n + 1 == steps) {
      VectorField du = s.u;
      du -= ex.u;
      TensorField dq = s.q;
      dq -= ex.q;
      r.err_u = std::sqrt(inner(du, du));
      r.err_q = std::sqrt(inner(dq, dq));
    }
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fitted_order: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Ladder Ladder::spatial(const GridSpec& base) {
  Ladder l;
  l.base = base;
  return l;
}

Ladder Ladder::temporal(const GridSpec& base) {
  Ladder l;
  l.kind = LadderKind::Temporal;
  l.base = base;
  l.t_end = 0.05;
  l.omega = 8.0 * kPi;
  return l;
}

Ladder Ladder::discrete(const GridSpec& base) {
  Ladder l;
  l.base = base;
  l.forcing = ForcingKind::Discrete;
  l.n = {16, 24, 32};
  l.dt_coeff = 2.0;
  l.t_end = 0.01;
  return l;
}

ModelParams mms_params() {
  ModelParams p;
  p.nu = 0.1;
  p.gamma = 1.0;
  p.epsilon = 0.02;
  p.a = -0.3;
  p.b = 0.5;
  p.c = 1.0;
  return p;
}

ConvergenceTable convergence_study(const ModelParams& p, const VariantConfig& v, const Ladder& ladder) {
  ConvergenceTable t;
  t.kind = ladder.kind;
  t.forcing = ladder.forcing;
  t.title = std::string(ladder.kind == LadderKind::Spatial ? "spatial" : "temporal") + " " +
            to_string(ladder.forcing) + " " + to_string(v.potential) + "+" + to_string(v.stretching) +
            (ladder.base.all_periodic() ? " periodic" : " walled");
  auto grid_with = [&](int n) {
    GridSpec g = ladder.base;
    g.nx = n;
    g.ny = n;
    g.nz = ladder.base.nz == 1 ? 1 : n;
    validate(g);
    return g;
  };
  const std::size_t count = ladder.kind == LadderKind::Spatial ? ladder.n.size() : ladder.dt.size();
  if (count < 3) throw std::invalid_argument("convergence_study: ladder needs >= 3 entries");
  for (std::size_t i = 0; i < count; ++i) {
    const GridSpec g = grid_with(ladder.kind == LadderKind::Spatial ? ladder.n[i] : ladder.n_fixed);
    const ManufacturedCase c = ManufacturedCase::standard(g, 0.5, 0.5, ladder.omega);
    double dt = ladder.kind == LadderKind::Spatial ? ladder.dt_coeff * g.h_min() * g.h_min() : ladder.dt[i];
    const int steps = std::max(1, static_cast<int>(std::lround(ladder.t_end / dt)));
    dt = ladder.t_end / steps;
    t.runs.push_back(run_mms(c, g, p, v, ladder.forcing, dt, steps, ladder.opts, ladder.viscous_implicit));
  }
  if (ladder.forcing == ForcingKind::Discrete) {
    t.order_u = t.order_q = std::nan("");
    return t;
  }
  std::vector<double> x, eu, eq;
  for (const auto& r : t.runs) {
    x.push_back(ladder.kind == LadderKind::Spatial ? r.h : r.dt);
    eu.push_back(r.err_u);
    eq.push_back(r.err_q);
  }
  t.order_u = fitted_order(x, eu);
  t.order_q = fitted_order(x, eq);
  return t;
}

void print_table(std::ostream& os, const ConvergenceTable& t) {
  char buf[256];
  os << t.title << "\n";
  std::snprintf(buf, sizeof buf, "%12s %12s %7s %14s %14s %14s\n", "h", "dt", "steps", "err_u_L2", "err_Q_L2",
                "max_dev");
  os << buf;
  for (const auto& r : t.runs) {
    std::snprintf(buf, sizeof buf, "%12.5g %12.5g %7d %14.6e %14.6e %14.6e\n", r.h, r.dt, r.steps, r.err_u, r.err_q,
                  r.max_dev);
    os << buf;
  }
  if (std::isnan(t.order_u))
    os << "observed order: N/A (exact by construction)\n";
  else {
    std::snprintf(buf, sizeof buf, "observed order (least squares): u %.3f  Q %.3f\n", t.order_u, t.order_q);
    os << buf;
  }
}

void write_table_csv(std::ostream& os, const ConvergenceTable& t, bool header) {
  if (header) os << "title,kind,forcing,h,dt,steps,err_u_L2,err_Q_L2,max_dev,order_u,order_Q\n";
  for (const auto& r : t.runs)
    os << t.title << "," << (t.kind == LadderKind::Spatial ? "spatial" : "temporal") << "," << to_string(t.forcing)
       << "," << format_double(r.h) << "," << format_double(r.dt) << "," << r.steps << "," << format_double(r.err_u)
       << "," << format_double(r.err_q) << "," << format_double(r.max_dev) << "," << format_double(t.order_u) << ","
       << format_double(t.order_q) << "\n";
}

}  // namespace qtensor
