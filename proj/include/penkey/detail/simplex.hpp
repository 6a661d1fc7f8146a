// Dense tableau simplex for packing LPs:
//   maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,
// so the slack basis is feasible from the start.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "penkey/errors.hpp"

namespace penkey::detail {

struct LpResult {
  double value = 0.0;
  std::vector<double> x;     // primal, one per column
  std::vector<double> dual;  // one per row
};

class PackingLp {
 public:
  /// rows x cols constraint matrix stored row-major.
  PackingLp(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0), b_(rows, 0.0), c_(cols, 0.0) {}

  double& a(std::size_t r, std::size_t col) { return a_[r * cols_ + col]; }
  double& b(std::size_t r) { return b_[r]; }
  double& c(std::size_t col) { return c_[col]; }

  LpResult solve(std::size_t max_pivots = 1000000) const {
    constexpr double kEps = 1e-11;
    const std::size_t width = cols_ + rows_ + 1;  // columns, slacks, rhs
    std::vector<double> t((rows_ + 1) * width, 0.0);
    auto at = [&](std::size_t r, std::size_t col) -> double& { return t[r * width + col]; };
    for (std::size_t r = 0; r < rows_; ++r) {
      if (b_[r] < 0.0) throw std::logic_error("packing LP requires b >= 0");
      for (std::size_t col = 0; col < cols_; ++col) at(r, col) = a_[r * cols_ + col];
      at(r, cols_ + r) = 1.0;
      at(r, width - 1) = b_[r];
    }
    // Objective row holds reduced costs c_j - z_j.
    for (std::size_t col = 0; col < cols_; ++col) at(rows_, col) = c_[col];

    std::vector<std::size_t> basis(rows_);
    for (std::size_t r = 0; r < rows_; ++r) basis[r] = cols_ + r;

    std::size_t degenerate_run = 0;
    for (std::size_t pivot = 0;; ++pivot) {
      if (pivot >= max_pivots) throw LimitError("simplex pivot limit reached");
      // Dantzig's rule, switching to Bland's after a long degenerate run.
      const bool bland = degenerate_run > 50;
      std::size_t enter = width;
      double best = kEps;
      for (std::size_t col = 0; col + 1 < width; ++col) {
        const double rc = at(rows_, col);
        if (rc > best) {
          enter = col;
          if (bland) break;
          best = rc;
        }
      }
      if (enter == width) break;

      std::size_t leave = rows_;
      double ratio = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double coef = at(r, enter);
        if (coef <= kEps) continue;
        const double q = at(r, width - 1) / coef;
        if (leave == rows_ || q < ratio - kEps ||
            (q <= ratio + kEps && basis[r] < basis[leave])) {
          leave = r;
          ratio = q;
        }
      }
      if (leave == rows_) throw std::logic_error("packing LP unbounded");
      degenerate_run = ratio <= kEps ? degenerate_run + 1 : 0;

      const double p = at(leave, enter);
      for (std::size_t col = 0; col < width; ++col) at(leave, col) /= p;
      for (std::size_t r = 0; r <= rows_; ++r) {
        if (r == leave) continue;
        const double f = at(r, enter);
        if (f == 0.0) continue;
        for (std::size_t col = 0; col < width; ++col) at(r, col) -= f * at(leave, col);
      }
      basis[leave] = enter;
    }

    LpResult out;
    out.x.assign(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis[r] < cols_) out.x[basis[r]] = at(r, width - 1);
    out.dual.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.dual[r] = -at(rows_, cols_ + r);
    out.value = 0.0;
    for (std::size_t col = 0; col < cols_; ++col) out.value += c_[col] * out.x[col];
    return out;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
};

}  // namespace penkey::detail
