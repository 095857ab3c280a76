#pragma once

// Constitutive relations of the Q-tensor / Navier-Stokes model: bulk
// potential F and its derivative f, molecular field H, elastic and
// commutator stresses, and the two stretching forms.
//
// Pointwise kernels are templates over the scalar type so the manufactured
// solution harness can push dual numbers through them; the field-level
// functions below apply them cell by cell.

#include <string>
#include <vector>

#include "qtensor/fields.hpp"
#include "qtensor/mat3.hpp"

namespace qtensor {

struct ModelParams {
  double nu = 1.0;       // viscosity, > 0
  double gamma = 1.0;    // relaxation, > 0
  double epsilon = 1.0;  // elastic constant, > 0
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;  // > 0

  bool operator==(const ModelParams&) const = default;
};

std::vector<std::string> param_violations(const ModelParams& p);
void validate(const ModelParams& p);

enum class Stretching { FullGradient, Corotational };
enum class PotentialKind { FF, FZ, M1 };

struct VariantConfig {
  Stretching stretching = Stretching::Corotational;
  PotentialKind potential = PotentialKind::FZ;
  double m1_theta = 1.0;  // used only by M1, in [0, 1]

  bool operator==(const VariantConfig&) const = default;
};

std::string to_string(Stretching s);
std::string to_string(PotentialKind k);
Stretching stretching_from_string(const std::string& s);
PotentialKind potential_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Pointwise kernels

/// a Q - (b/3)(Q^2 + Q Q^t + Q^t Q) + c |Q|^2 Q ; the exact derivative of F.
template <typename T>
Mat3<T> potential_ff(const Mat3<T>& q, double a, double b, double c) {
  const Mat3<T> qt = transpose(q);
  const Mat3<T> quad = q * q + q * qt + qt * q;
  Mat3<T> r = T(a) * q;
  r -= T(b / 3.0) * quad;
  r += (T(c) * frobenius_sq(q)) * q;
  return r;
}

/// a Q - b (Q^2 - tr(Q^2) I / 3) + c |Q|^2 Q
template <typename T>
Mat3<T> potential_fz(const Mat3<T>& q, double a, double b, double c) {
  Mat3<T> q2 = q * q;
  const T t = trace(q2) / T(3.0);
  for (int i = 0; i < 3; ++i) q2(i, i) -= t;
  Mat3<T> r = T(a) * q;
  r -= T(b) * q2;
  r += (T(c) * frobenius_sq(q)) * q;
  return r;
}

/// (b/9)(Q : Q^t + 2|Q|^2), the trace-projection coefficient on traceless Q.
template <typename T>
T alpha_traceless(const Mat3<T>& q, double b) {
  return T(b / 9.0) * (double_dot(q, transpose(q)) + T(2.0) * frobenius_sq(q));
}

/// f_FF + alpha I with alpha = theta * alpha_traceless + (1 - theta) * (-tr f_FF / 3).
/// theta = 0 removes the trace of f_FF exactly; theta = 1 does so on
/// traceless Q and coincides with f_FZ on symmetric traceless Q.
template <typename T>
Mat3<T> potential_m1(const Mat3<T>& q, double a, double b, double c, double theta) {
  Mat3<T> f = potential_ff(q, a, b, c);
  const T alpha2 = -trace(f) / T(3.0);
  const T alpha = T(theta) * alpha_traceless(q, b) + T(1.0 - theta) * alpha2;
  for (int i = 0; i < 3; ++i) f(i, i) += alpha;
  return f;
}

template <typename T>
Mat3<T> potential_f(const Mat3<T>& q, const ModelParams& p, const VariantConfig& v) {
  switch (v.potential) {
    case PotentialKind::FF:
      return potential_ff(q, p.a, p.b, p.c);
    case PotentialKind::FZ:
      return potential_fz(q, p.a, p.b, p.c);
    case PotentialKind::M1:
      return potential_m1(q, p.a, p.b, p.c, v.m1_theta);
  }
  return Mat3<T>{};
}

/// (a/2)|Q|^2 - (b/3)(Q^2 : Q) + (c/4)|Q|^4
template <typename T>
T bulk_F(const Mat3<T>& q, const ModelParams& p) {
  const T n2 = frobenius_sq(q);
  return T(p.a / 2.0) * n2 - T(p.b / 3.0) * double_dot(q * q, q) + T(p.c / 4.0) * n2 * n2;
}

/// grad_u uses (grad u)_ij = d_j u_i.
///   FullGradient: grad_u Q^t - Q^t grad_u
///   Corotational: W Q^t - Q^t W, W = antisymmetric part of grad_u
template <typename T>
Mat3<T> stretching(const Mat3<T>& grad_u, const Mat3<T>& q, Stretching kind) {
  const Mat3<T> qt = transpose(q);
  const Mat3<T> g = kind == Stretching::Corotational ? antisym_part(grad_u) : grad_u;
  return g * qt - qt * g;
}

// ---------------------------------------------------------------------------
// Field-level operations

TensorField potential_f(const TensorField& q, const ModelParams& p, const VariantConfig& v);
ScalarField bulk_F(const TensorField& q, const ModelParams& p);

/// H = -epsilon * Laplacian_Neumann(Q) + f(Q)
TensorField molecular_field_H(const TensorField& q, const ModelParams& p, const VariantConfig& v);

/// tau_ij = -epsilon sum_kl d_j Q_kl d_i Q_kl  (centred Neumann gradients)
TensorField elastic_stress_tau(const TensorField& q, const ModelParams& p);

/// sigma = H Q - Q H
TensorField antisym_stress_sigma(const TensorField& h, const TensorField& q);

TensorField stretching_S(const TensorField& grad_u, const TensorField& q, Stretching kind);

}  // namespace qtensor
