#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace selfsim::num {

/// Finite-difference weights for the m-th derivative at x0 from arbitrary
/// nodes (Fornberg's recursion). Returns one weight per node.
std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int m);

/// First derivative of sampled data at every interior node using a centered
/// stencil of `width` points (odd). Endpoints closer than width/2 to the
/// boundary get NaN.
std::vector<double> stencil_derivative(std::span<const double> x, std::span<const double> y,
                                       int width = 7);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = slope*x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Cubic Hermite interpolation on one interval given values and slopes at
/// both ends.
double hermite(double x, double x0, double x1, double y0, double y1, double d0, double d1);

/// Index i with x[i] <= xq < x[i+1] for increasing x; clamps to [0, n-2].
std::size_t locate(std::span<const double> x, double xq);

/// Piecewise cubic Hermite interpolation of (x, y, dy) at xq. xq outside
/// [x.front(), x.back()] is an error (Domain).
double hermite_interp(std::span<const double> x, std::span<const double> y,
                      std::span<const double> dy, double xq);

/// Monotone piecewise cubic (Fritsch-Carlson) interpolant.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double xq) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;
};

/// Cumulative trapezoid integral, out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

/// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
/// upper[n-1] are ignored. rhs is overwritten with the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Bisection for a sign change of fn on [lo, hi]; fn(lo) and fn(hi) must
/// differ in sign. Stops when hi - lo <= xtol.
double bisect_root(const std::function<double(double)>& fn, double lo, double hi, double xtol,
                   int max_iter = 200);

}  // namespace selfsim::num
