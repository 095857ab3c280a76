#pragma once

// Cell-centred field containers and the pointwise tensor algebra every other
// module builds on.
//
// Components are stored as separate planes (structure of arrays): component c
// of cell n lives at data[c * cells + n].  Tensors keep all nine entries,
// row-major (component 3*i + j holds Q_ij), even when the model variant
// keeps Q symmetric and traceless; those properties are checked, not assumed.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qtensor/errors.hpp"
#include "qtensor/grid.hpp"
#include "qtensor/mat3.hpp"
#include "qtensor/parallel.hpp"

namespace qtensor {

template <int N>
class Field {
 public:
  static constexpr int kComponents = N;

  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0)
      : grid_(grid), cells_(grid.cells()), data_(cells_ * N, fill) {}

  const GridSpec& grid() const { return grid_; }
  std::size_t cells() const { return cells_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> component(int c) { return {data_.data() + c * cells_, cells_}; }
  std::span<const double> component(int c) const { return {data_.data() + c * cells_, cells_}; }

  double& operator()(int c, std::size_t cell) { return data_[c * cells_ + cell]; }
  double operator()(int c, std::size_t cell) const { return data_[c * cells_ + cell]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Mat3d tensor_at(std::size_t cell) const
    requires(N == 9)
  {
    Mat3d a;
    for (int c = 0; c < 9; ++c) a.m[c] = data_[c * cells_ + cell];
    return a;
  }
  void set_tensor(std::size_t cell, const Mat3d& a)
    requires(N == 9)
  {
    for (int c = 0; c < 9; ++c) data_[c * cells_ + cell] = a.m[c];
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_grid(const Field& o) const { return grid_ == o.grid_; }

  Field& operator+=(const Field& o) {
    require_same_grid(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  /// this += s * o
  Field& axpy(double s, const Field& o) {
    require_same_grid(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
    return *this;
  }

  void require_same_grid(const Field& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatch("fields live on different grids");
  }

  bool operator==(const Field&) const = default;

 private:
  GridSpec grid_{};
  std::size_t cells_ = 0;
  std::vector<double> data_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using TensorField = Field<9>;

template <int N>
Field<N> operator+(Field<N> a, const Field<N>& b) {
  return a += b;
}
template <int N>
Field<N> operator-(Field<N> a, const Field<N>& b) {
  return a -= b;
}
template <int N>
Field<N> operator*(double s, Field<N> a) {
  return a *= s;
}

/// Applies op(Mat3d) -> Mat3d at every cell.
template <typename Op>
TensorField map_tensor(const TensorField& a, Op&& op) {
  TensorField out(a.grid());
  parallel::parallel_for(a.cells(), [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) out.set_tensor(n, op(a.tensor_at(n)));
  });
  return out;
}

/// Fills every cell with the same tensor.
TensorField constant_tensor(const GridSpec& g, const Mat3d& value);

ScalarField trace(const TensorField& q);
TensorField transpose(const TensorField& a);
TensorField sym_part(const TensorField& a);
TensorField antisym_part(const TensorField& a);
ScalarField double_dot(const TensorField& a, const TensorField& b);
ScalarField frobenius_sq(const TensorField& a);

/// Pointwise Euclidean / Frobenius magnitude of each cell's components.
template <int N>
ScalarField magnitude(const Field<N>& f) {
  ScalarField out(f.grid());
  for (std::size_t n = 0; n < f.cells(); ++n) {
    double s = 0.0;
    for (int c = 0; c < N; ++c) s += f(c, n) * f(c, n);
    out(0, n) = std::sqrt(s);
  }
  return out;
}

template <int N>
double max_abs(const Field<N>& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::fmax(m, std::fabs(v));
  return m;
}

/// max over cells of the pointwise magnitude of (a - b)
template <int N>
double max_deviation(const Field<N>& a, const Field<N>& b) {
  a.require_same_grid(b);
  double m = 0.0;
  for (std::size_t n = 0; n < a.cells(); ++n) {
    double s = 0.0;
    for (int c = 0; c < N; ++c) {
      const double d = a(c, n) - b(c, n);
      s += d * d;
    }
    m = std::fmax(m, std::sqrt(s));
  }
  return m;
}

/// Volume mean of each component, subtracted in place; returns the means.
template <int N>
std::vector<double> remove_mean(Field<N>& f) {
  std::vector<double> means(N);
  for (int c = 0; c < N; ++c) {
    auto comp = f.component(c);
    const double m = parallel::sum(comp.size(), [&](std::size_t n) { return comp[n]; }) /
                     static_cast<double>(comp.size());
    for (double& v : comp) v -= m;
    means[c] = m;
  }
  return means;
}

}  // namespace qtensor
