#include "qtensor/fields.hpp"

namespace qtensor {

TensorField constant_tensor(const GridSpec& g, const Mat3d& value) {
  TensorField out(g);
  for (std::size_t n = 0; n < out.cells(); ++n) out.set_tensor(n, value);
  return out;
}

ScalarField trace(const TensorField& q) {
  ScalarField out(q.grid());
  for (std::size_t n = 0; n < q.cells(); ++n) out(0, n) = q(0, n) + q(4, n) + q(8, n);
  return out;
}

TensorField transpose(const TensorField& a) {
  return map_tensor(a, [](const Mat3d& m) { return transpose(m); });
}

TensorField sym_part(const TensorField& a) {
  return map_tensor(a, [](const Mat3d& m) { return sym_part(m); });
}

TensorField antisym_part(const TensorField& a) {
  return map_tensor(a, [](const Mat3d& m) { return antisym_part(m); });
}

ScalarField double_dot(const TensorField& a, const TensorField& b) {
  a.require_same_grid(b);
  ScalarField out(a.grid());
  for (std::size_t n = 0; n < a.cells(); ++n) {
    double s = 0.0;
    for (int c = 0; c < 9; ++c) s += a(c, n) * b(c, n);
    out(0, n) = s;
  }
  return out;
}

ScalarField frobenius_sq(const TensorField& a) { return double_dot(a, a); }

}  // namespace qtensor
