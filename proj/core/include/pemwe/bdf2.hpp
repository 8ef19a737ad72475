#pragma once

// Fixed-step BDF2 for small dense systems, solved by Newton with an analytic
// Jacobian. The first step after construction or reset() is BDF1 (backward
// Euler), which makes the scheme self-starting.
//
// A step that leaves the admissible set is retried once with BDF1 from the
// same starting point. BDF2 has complex characteristic roots for dk*|lambda|
// above 1/2, so an under-resolved stiff decay can ring through zero; the
// BDF1 retry is L-stable and monotone for that decay.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include <fmt/format.h>

#include "pemwe/errors.hpp"

namespace pemwe {

template <std::size_t N>
using Vec = std::array<double, N>;
template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

// Gaussian elimination with partial pivoting; rhs is overwritten with the
// solution. Returns false on a zero pivot.
template <std::size_t N>
bool solve_dense(Mat<N> a, Vec<N>& rhs) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) return false;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t r = col + 1; r < N; ++r) {
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < N; ++c) a[r][c] -= factor * a[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  for (std::size_t i = N; i-- > 0;) {
    double sum = rhs[i];
    for (std::size_t c = i + 1; c < N; ++c) sum -= a[i][c] * rhs[c];
    rhs[i] = sum / a[i][i];
  }
  return true;
}

struct NewtonControls {
  // Converged when the scaled residual max_i |G_i| / max(|y_i|, floor_i) or
  // the equally scaled Newton update drops below tol.
  double tol = 1e-10;
  int max_iter = 25;
};

struct Bdf2StepInfo {
  int iterations = 0;
  bool used_bdf1 = false;
  bool fell_back = false;  // BDF2 result was inadmissible, BDF1 retried
};

template <std::size_t N>
class Bdf2 {
 public:
  // `floor` sets the absolute scale below which residuals are measured
  // absolutely rather than relative to |y|.
  Bdf2(NewtonControls controls, Vec<N> floor) : controls_(controls), floor_(floor) {}

  void reset() { has_history_ = false; }
  bool has_history() const { return has_history_; }

  // Advances y by dk. `system(y, f, jac)` evaluates the right-hand side and
  // its Jacobian at the new time level. `admissible(y)` accepts or rejects a
  // converged BDF2 iterate.
  template <class System, class Admissible>
  Bdf2StepInfo step(System&& system, Vec<N>& y, double dk, Admissible&& admissible) {
    const bool bdf2 = has_history_ && prev_dk_ == dk;
    Bdf2StepInfo info;
    Vec<N> next = y;
    if (bdf2) {
      Vec<N> base;
      for (std::size_t i = 0; i < N; ++i) base[i] = (4.0 * y[i] - prev_[i]) / 3.0;
      info.iterations = solve(system, base, 2.0 / 3.0 * dk, y, next);
      if (!admissible(next)) {
        info.fell_back = true;
        next = y;
        info.iterations += solve(system, y, dk, y, next);
        info.used_bdf1 = true;
      }
    } else {
      info.iterations = solve(system, y, dk, y, next);
      info.used_bdf1 = true;
    }
    prev_ = y;
    prev_dk_ = dk;
    has_history_ = true;
    y = next;
    return info;
  }

  template <class System>
  Bdf2StepInfo step(System&& system, Vec<N>& y, double dk) {
    return step(std::forward<System>(system), y, dk, [](const Vec<N>&) { return true; });
  }

 private:
  // Solves y - base - beta f(y) = 0 starting from `guess`.
  template <class System>
  int solve(System& system, const Vec<N>& base, double beta, const Vec<N>& guess,
            Vec<N>& y) const {
    y = guess;
    Vec<N> f{};
    Mat<N> jac{};
    double scaled = 0.0;
    for (int iter = 0; iter <= controls_.max_iter; ++iter) {
      system(y, f, jac);
      Vec<N> residual;
      scaled = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        residual[i] = y[i] - base[i] - beta * f[i];
        const double w = std::max(std::abs(y[i]), floor_[i]);
        scaled = std::max(scaled, std::abs(residual[i]) / w);
      }
      if (!std::isfinite(scaled)) break;
      if (scaled <= controls_.tol) return iter;
      if (iter == controls_.max_iter) break;

      Mat<N> lhs;
      for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) lhs[r][c] = -beta * jac[r][c];
        lhs[r][r] += 1.0;
      }
      for (auto& v : residual) v = -v;
      if (!solve_dense<N>(lhs, residual)) {
        throw StepFailure("BDF Newton: singular iteration matrix", scaled);
      }
      double update = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        y[i] += residual[i];
        update = std::max(update, std::abs(residual[i]) / std::max(std::abs(y[i]), floor_[i]));
      }
      // A residual made of large cancelling terms can stall above tol at
      // roundoff level while the iterate no longer moves.
      if (update <= controls_.tol) return iter + 1;
    }
    throw StepFailure(
        fmt::format("BDF Newton did not converge in {} iterations (scaled residual {:.3e})",
                    controls_.max_iter, scaled),
        scaled);
  }

  NewtonControls controls_;
  Vec<N> floor_;
  Vec<N> prev_{};
  double prev_dk_ = 0.0;
  bool has_history_ = false;
};

}  // namespace pemwe
