#pragma once

// Small dense 3x3 matrix used for pointwise tensor algebra.
//
// The scalar type is a template parameter so the same constitutive code can
// be evaluated on plain doubles and on forward-mode dual numbers (the
// manufactured-solution harness differentiates f(Q) through it).

#include <array>
#include <cmath>
#include <cstddef>

namespace qtensor {

template <typename T>
struct Mat3 {
  std::array<T, 9> m{};  // row-major, m[3*i + j] = A_ij

  constexpr T& operator()(int i, int j) { return m[3 * i + j]; }
  constexpr const T& operator()(int i, int j) const { return m[3 * i + j]; }

  static constexpr Mat3 zero() { return Mat3{}; }
  static constexpr Mat3 identity() {
    Mat3 r{};
    r(0, 0) = T(1);
    r(1, 1) = T(1);
    r(2, 2) = T(1);
    return r;
  }
  static constexpr Mat3 diag(T a, T b, T c) {
    Mat3 r{};
    r(0, 0) = a;
    r(1, 1) = b;
    r(2, 2) = c;
    return r;
  }
  /// e_i (x) e_j
  static constexpr Mat3 unit(int i, int j) {
    Mat3 r{};
    r(i, j) = T(1);
    return r;
  }

  constexpr Mat3& operator+=(const Mat3& o) {
    for (std::size_t k = 0; k < 9; ++k) m[k] += o.m[k];
    return *this;
  }
  constexpr Mat3& operator-=(const Mat3& o) {
    for (std::size_t k = 0; k < 9; ++k) m[k] -= o.m[k];
    return *this;
  }
  constexpr Mat3& operator*=(const T& s) {
    for (auto& v : m) v *= s;
    return *this;
  }
};

template <typename T>
constexpr Mat3<T> operator+(Mat3<T> a, const Mat3<T>& b) {
  return a += b;
}
template <typename T>
constexpr Mat3<T> operator-(Mat3<T> a, const Mat3<T>& b) {
  return a -= b;
}
template <typename T>
constexpr Mat3<T> operator-(Mat3<T> a) {
  for (auto& v : a.m) v = -v;
  return a;
}
template <typename T, typename S>
constexpr Mat3<T> operator*(const S& s, Mat3<T> a) {
  for (auto& v : a.m) v = T(s) * v;
  return a;
}

template <typename T>
constexpr Mat3<T> operator*(const Mat3<T>& a, const Mat3<T>& b) {
  Mat3<T> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T acc = a(i, 0) * b(0, j);
      acc += a(i, 1) * b(1, j);
      acc += a(i, 2) * b(2, j);
      r(i, j) = acc;
    }
  return r;
}

template <typename T>
constexpr Mat3<T> transpose(const Mat3<T>& a) {
  Mat3<T> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

template <typename T>
constexpr T trace(const Mat3<T>& a) {
  return a(0, 0) + a(1, 1) + a(2, 2);
}

/// A : B = sum_ij A_ij B_ij
template <typename T>
constexpr T double_dot(const Mat3<T>& a, const Mat3<T>& b) {
  T acc = a.m[0] * b.m[0];
  for (std::size_t k = 1; k < 9; ++k) acc += a.m[k] * b.m[k];
  return acc;
}

template <typename T>
constexpr T frobenius_sq(const Mat3<T>& a) {
  return double_dot(a, a);
}

template <typename T>
constexpr Mat3<T> sym_part(const Mat3<T>& a) {
  Mat3<T> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = T(0.5) * (a(i, j) + a(j, i));
  return r;
}

template <typename T>
constexpr Mat3<T> antisym_part(const Mat3<T>& a) {
  Mat3<T> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = T(0.5) * (a(i, j) - a(j, i));
  return r;
}

/// A B - B A
template <typename T>
constexpr Mat3<T> commutator(const Mat3<T>& a, const Mat3<T>& b) {
  return a * b - b * a;
}

using Mat3d = Mat3<double>;

inline double max_abs_diff(const Mat3d& a, const Mat3d& b) {
  double r = 0.0;
  for (std::size_t k = 0; k < 9; ++k) r = std::fmax(r, std::fabs(a.m[k] - b.m[k]));
  return r;
}

}  // namespace qtensor
