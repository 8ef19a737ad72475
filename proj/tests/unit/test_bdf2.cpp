#include <doctest.h>

#include <cmath>

#include "order_oracles.hpp"
#include "pemwe/bdf2.hpp"

using namespace pemwe;


TEST_CASE("dense solve") {
  Mat<3> a{{{0.0, 2.0, 1.0}, {1.0, 1.0, 0.0}, {3.0, 0.0, 1.0}}};
  Vec<3> x{1.0, -2.0, 0.5};
  Vec<3> b{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) b[r] += a[r][c] * x[c];
  REQUIRE(solve_dense<3>(a, b));
  for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-14));
  Mat<2> singular{{{1.0, 2.0}, {2.0, 4.0}}};
  Vec<2> rhs{1.0, 2.0};
  CHECK_FALSE(solve_dense<2>(singular, rhs));
}

TEST_CASE("BDF2 stiff Prothero-Robinson order") {
  for (double lambda : {-10.0, -1e3, -1e5}) {
    CAPTURE(lambda);
    CHECK(pemwe::testing::bdf2_orders(lambda).min() >= 1.8);
  }
}

TEST_CASE("first step is BDF1 and later steps BDF2") {
  Bdf2<1> bdf({1e-12, 20}, {1e-12});
  Vec<1> y{1.0};
  auto decay = [](const Vec<1>& v, Vec<1>& f, Mat<1>& jac) {
    f[0] = -v[0];
    jac[0][0] = -1.0;
  };
  auto info = bdf.step(decay, y, 0.1);
  CHECK(info.used_bdf1);
  CHECK(y[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
  info = bdf.step(decay, y, 0.1);
  CHECK_FALSE(info.used_bdf1);
  // BDF2: (3 y2 - 4 y1 + y0) / (2 dk) = -y2
  const double y1 = 1.0 / 1.1;
  CHECK(y[0] == doctest::Approx((4.0 * y1 - 1.0) / 3.0 / (1.0 + 2.0 / 3.0 * 0.1)).epsilon(1e-12));
  bdf.reset();
  CHECK(bdf.step(decay, y, 0.1).used_bdf1);
  // A change of dk restarts with BDF1.
  CHECK(bdf.step(decay, y, 0.05).used_bdf1);
}

TEST_CASE("inadmissible BDF2 results are retried with BDF1") {
  // Under-resolved stiff decay: BDF2 overshoots below zero, BDF1 does not.
  Bdf2<1> bdf({1e-11, 20}, {1e-30});
  Vec<1> y{1.0};
  auto decay = [](const Vec<1>& v, Vec<1>& f, Mat<1>& jac) {
    f[0] = -1e4 * v[0];
    jac[0][0] = -1e4;
  };
  auto nonneg = [](const Vec<1>& v) { return v[0] >= 0.0; };
  bool any_fallback = false;
  for (int i = 0; i < 20; ++i) {
    const auto info = bdf.step(decay, y, 0.1, nonneg);
    any_fallback = any_fallback || info.fell_back;
    CHECK(y[0] >= 0.0);
  }
  CHECK(any_fallback);
}

TEST_CASE("Newton failure raises StepFailure") {
  Bdf2<1> bdf({1e-14, 3}, {1e-12});
  Vec<1> y{1.0};
  auto stiff_nonlinear = [](const Vec<1>& v, Vec<1>& f, Mat<1>& jac) {
    f[0] = -std::exp(10.0 * v[0]);
    jac[0][0] = 0.0;  // deliberately wrong Jacobian
  };
  CHECK_THROWS_AS(bdf.step(stiff_nonlinear, y, 1.0), StepFailure);
  Bdf2<1> singular({1e-14, 5}, {1e-12});
  auto zero_matrix = [](const Vec<1>& v, Vec<1>& f, Mat<1>& jac) {
    f[0] = v[0] + 1.0;
    jac[0][0] = 1.0;  // 1 - beta * 1 = 0 for dk = 1
  };
  CHECK_THROWS_AS(singular.step(zero_matrix, y, 1.0), StepFailure);
}
