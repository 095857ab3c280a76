#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qtensor/fields.hpp"
#include "qtensor/snapshot.hpp"

using namespace qtensor;

namespace {

GridSpec periodic(int n, int nz = 4) {
  return GridSpec::make(n, n, nz, 1.0, 1.0, 1.0, {BoundaryTag::Periodic, BoundaryTag::Periodic, BoundaryTag::Periodic});
}

TensorField random_tensor(const GridSpec& g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  TensorField t(g);
  for (double& v : t.data()) v = u(rng);
  return t;
}

const Mat3d kUniaxial = Mat3d::diag(2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0);

double max_abs_scalar(const ScalarField& s) { return max_abs(s); }

}  // namespace

TEST_CASE("grid validation collects every violation") {
  CHECK_NOTHROW(periodic(4));
  try {
    GridSpec::make(3, 4, 2, -1.0, 1.0, 1.0, {BoundaryTag::Periodic, BoundaryTag::Periodic, BoundaryTag::Periodic});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() >= 3);  // nx < 4, nz < 4 (not a slab), lx <= 0
  }
  // a slab needs a periodic z axis
  CHECK_NOTHROW(GridSpec::make(8, 8, 1, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Wall, BoundaryTag::Periodic}));
  CHECK_THROWS_AS(GridSpec::make(8, 8, 1, 1, 1, 1, {BoundaryTag::Wall, BoundaryTag::Wall, BoundaryTag::Wall}),
                  ValidationError);
}

TEST_CASE("grid indexing is x fastest") {
  const GridSpec g = GridSpec::make(4, 5, 6, 2.0, 1.0, 3.0,
                                    {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Wall});
  CHECK(g.cells() == 120);
  CHECK(g.index(1, 0, 0) == 1);
  CHECK(g.index(0, 1, 0) == 4);
  CHECK(g.index(0, 0, 1) == 20);
  CHECK(g.hx() == doctest::Approx(0.5));
  CHECK(g.center(0, 0) == doctest::Approx(0.25));
  CHECK(g.h_min() == doctest::Approx(0.2));
}

TEST_CASE("trace examples") {
  const GridSpec g = periodic(4);
  CHECK(max_abs_scalar(trace(TensorField(g))) == 0.0);
  const ScalarField ti = trace(constant_tensor(g, Mat3d::identity()));
  for (double v : ti.data()) CHECK(v == 3.0);
  CHECK(max_abs_scalar(trace(constant_tensor(g, kUniaxial))) <= 1e-16);
}

TEST_CASE("sym and antisym parts") {
  const GridSpec g = periodic(4);
  SUBCASE("symmetric input has no antisymmetric part") {
    const TensorField s = sym_part(constant_tensor(g, Mat3d{{1, 2, 3, 2, 5, 6, 3, 6, 9}}));
    CHECK(max_abs(antisym_part(s)) == 0.0);
  }
  SUBCASE("e1 (x) e2") {
    const TensorField a = constant_tensor(g, Mat3d::unit(0, 1));
    const Mat3d s = sym_part(a).tensor_at(7), w = antisym_part(a).tensor_at(7);
    CHECK(s(0, 1) == 0.5);
    CHECK(s(1, 0) == 0.5);
    CHECK(w(0, 1) == 0.5);
    CHECK(w(1, 0) == -0.5);
    CHECK(frobenius_sq(s) == doctest::Approx(0.5));
    CHECK(frobenius_sq(w) == doctest::Approx(0.5));
  }
  SUBCASE("random reconstruction by direct addition") {
    std::mt19937_64 rng(11);
    const TensorField a = random_tensor(g, rng);
    const TensorField sum = sym_part(a) + antisym_part(a);
    CHECK(max_deviation(sum, a) <= 1e-15);
  }
}

TEST_CASE("frobenius examples") {
  const GridSpec g = periodic(4);
  CHECK(frobenius_sq(constant_tensor(g, Mat3d::identity())).data()[0] == 3.0);
  std::mt19937_64 rng(3);
  CHECK(max_abs(double_dot(TensorField(g), random_tensor(g, rng))) == 0.0);
  // 4/9 + 1/9 + 1/9
  CHECK(frobenius_sq(constant_tensor(g, kUniaxial)).data()[5] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("property: trace of sym part equals trace") {
  std::mt19937_64 rng(5);
  const GridSpec g = periodic(6);
  for (int rep = 0; rep < 10; ++rep) {
    const TensorField a = random_tensor(g, rng, 10.0);
    CHECK(max_abs(trace(sym_part(a)) - trace(a)) <= 1e-13);
  }
}

TEST_CASE("property: double_dot is symmetric and bilinear") {
  std::mt19937_64 rng(6);
  const GridSpec g = periodic(6);
  for (int rep = 0; rep < 10; ++rep) {
    const TensorField a = random_tensor(g, rng), b = random_tensor(g, rng), c = random_tensor(g, rng);
    const ScalarField ab = double_dot(a, b), ba = double_dot(b, a);
    const ScalarField lhs = double_dot(a + b, c), rhs = double_dot(a, c) + double_dot(b, c);
    for (std::size_t n = 0; n < g.cells(); ++n) {
      CHECK(ab.data()[n] == ba.data()[n]);
      const double scale = std::max(1.0, std::fabs(rhs.data()[n]));
      CHECK(std::fabs(lhs.data()[n] - rhs.data()[n]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("property: antisymmetric : symmetric vanishes") {
  std::mt19937_64 rng(7);
  const GridSpec g = periodic(6);
  for (int rep = 0; rep < 10; ++rep) {
    const TensorField w = antisym_part(random_tensor(g, rng, 5.0)), s = sym_part(random_tensor(g, rng, 5.0));
    const ScalarField d = double_dot(w, s);
    for (std::size_t n = 0; n < g.cells(); ++n) {
      const double mag = std::sqrt(frobenius_sq(w.tensor_at(n)) * frobenius_sq(s.tensor_at(n)));
      CHECK(std::fabs(d.data()[n]) <= 1e-12 * std::max(mag, 1.0));
    }
  }
}

TEST_CASE("grid mismatch is detected") {
  const TensorField a(periodic(4)), b(periodic(5));
  CHECK_THROWS_AS(double_dot(a, b), GridMismatch);
  CHECK_THROWS_AS(a + b, GridMismatch);
}

TEST_CASE("non-finite entries are detectable") {
  TensorField a(periodic(4));
  CHECK(a.all_finite());
  a(4, 10) = std::nan("");
  CHECK_FALSE(a.all_finite());
}

TEST_CASE("snapshot round trip is bit exact") {
  std::mt19937_64 rng(9);
  const GridSpec g = GridSpec::make(5, 4, 6, 1.5, 2.0, 0.5, {BoundaryTag::Wall, BoundaryTag::Periodic, BoundaryTag::Wall});
  std::normal_distribution<double> nd;
  Snapshot s{0.125, ScalarField(g), VectorField(g), TensorField(g)};
  for (double& v : s.p.data()) v = nd(rng);
  for (double& v : s.u.data()) v = nd(rng);
  for (double& v : s.q.data()) v = nd(rng);

  std::stringstream buf;
  write_snapshot(buf, s);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == kSnapshotHeaderBytes + 13 * g.cells() * 8);
  CHECK(bytes.substr(0, 4) == "QTS1");

  const Snapshot r = read_snapshot(buf, g.bc);
  CHECK(r.t == s.t);
  CHECK(r.p.grid() == g);
  CHECK(r.p == s.p);
  CHECK(r.u == s.u);
  CHECK(r.q == s.q);

  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[3] = '2';
    std::istringstream is(bad);
    CHECK_THROWS_AS(read_snapshot(is, g.bc), FormatError);
  }
  SUBCASE("truncated payload") {
    std::istringstream is(bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(read_snapshot(is, g.bc), FormatError);
  }
}
