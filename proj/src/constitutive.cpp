#include "qtensor/constitutive.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "qtensor/errors.hpp"
#include "qtensor/operators.hpp"

namespace qtensor {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::vector<std::string> param_violations(const ModelParams& p) {
  std::vector<std::string> out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " > 0 required");
  };
  positive(p.nu, "nu");
  positive(p.gamma, "gamma");
  positive(p.epsilon, "epsilon");
  positive(p.c, "c");
  if (!std::isfinite(p.a)) out.push_back("a must be finite");
  if (!std::isfinite(p.b)) out.push_back("b must be finite");
  return out;
}

void validate(const ModelParams& p) {
  auto v = param_violations(p);
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::string to_string(Stretching s) { return s == Stretching::FullGradient ? "full-gradient" : "corotational"; }

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::FF:
      return "FF";
    case PotentialKind::FZ:
      return "FZ";
    case PotentialKind::M1:
      return "M1";
  }
  return "?";
}

Stretching stretching_from_string(const std::string& s) {
  const std::string t = lower(s);
  if (t == "full-gradient" || t == "fullgradient" || t == "full") return Stretching::FullGradient;
  if (t == "corotational" || t == "co-rotational") return Stretching::Corotational;
  throw ValidationError({"unknown stretching '" + s + "' (expected full-gradient|corotational)"});
}

PotentialKind potential_from_string(const std::string& s) {
  const std::string t = lower(s);
  if (t == "ff") return PotentialKind::FF;
  if (t == "fz") return PotentialKind::FZ;
  if (t == "m1") return PotentialKind::M1;
  throw ValidationError({"unknown potential '" + s + "' (expected FF|FZ|M1)"});
}

TensorField potential_f(const TensorField& q, const ModelParams& p, const VariantConfig& v) {
  return map_tensor(q, [&](const Mat3d& m) { return potential_f(m, p, v); });
}

ScalarField bulk_F(const TensorField& q, const ModelParams& p) {
  ScalarField out(q.grid());
  for (std::size_t n = 0; n < q.cells(); ++n) out(0, n) = bulk_F(q.tensor_at(n), p);
  return out;
}

TensorField molecular_field_H(const TensorField& q, const ModelParams& p, const VariantConfig& v) {
  TensorField h = potential_f(q, p, v);
  h.axpy(-p.epsilon, laplacian(q, FieldRole::OrderTensor));
  return h;
}

TensorField elastic_stress_tau(const TensorField& q, const ModelParams& p) {
  const Field<27> dq = gradient(q, FieldRole::OrderTensor);
  TensorField tau(q.grid());
  parallel::parallel_for(q.cells(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t n = lo; n < hi; ++n)
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          double s = 0.0;
          for (int c = 0; c < 9; ++c) s += dq(3 * c + j, n) * dq(3 * c + i, n);
          tau(3 * i + j, n) = -p.epsilon * s;
          tau(3 * j + i, n) = -p.epsilon * s;
        }
  });
  return tau;
}

TensorField antisym_stress_sigma(const TensorField& h, const TensorField& q) {
  h.require_same_grid(q);
  TensorField out(q.grid());
  parallel::parallel_for(q.cells(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t n = lo; n < hi; ++n) out.set_tensor(n, commutator(h.tensor_at(n), q.tensor_at(n)));
  });
  return out;
}

TensorField stretching_S(const TensorField& grad_u, const TensorField& q, Stretching kind) {
  grad_u.require_same_grid(q);
  TensorField out(q.grid());
  parallel::parallel_for(q.cells(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t n = lo; n < hi; ++n) out.set_tensor(n, stretching(grad_u.tensor_at(n), q.tensor_at(n), kind));
  });
  return out;
}

}  // namespace qtensor
