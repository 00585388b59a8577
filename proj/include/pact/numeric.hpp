#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pact {

// Maximizes a unimodal function on [lo, hi] by golden-section search.
// The interval is contracted to width <= tol (capped at max_iter shrinks);
// returns the final interval midpoint.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol = 1e-9, int max_iter = 200);

// Root of a sign-changing function on [lo, hi] by bisection to width <= tol.
// Requires f(lo) and f(hi) of opposite (or zero) sign.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol = 1e-10, int max_iter = 200);

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10);

// Monotone piecewise-cubic interpolant (Fritsch-Carlson). Monotone data in,
// monotone interpolant out; first derivative continuous, second piecewise
// linear within each cell.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double q) const { return value(q); }
  double value(double q) const;
  double deriv(double q) const;
  double second(double q) const;

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  std::size_t knot_count() const { return x_.size(); }

 private:
  std::size_t cell(double q) const;
  std::vector<double> x_, y_, d_;  // knots, values, knot derivatives
};

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace pact
