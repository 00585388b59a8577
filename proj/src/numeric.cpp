#include "pact/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pact {

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_iter) {
  if (!(lo <= hi)) throw std::invalid_argument("golden_section_max: lo > hi");
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol, int max_iter) {
  if (!(lo <= hi)) throw std::invalid_argument("bisect_root: lo > hi");
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("bisect_root: no sign change on interval");
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double simpson_rule(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_rule(f, a, fa, m, fm, lm, flm);
  double right = simpson_rule(f, m, fm, b, fb, rm, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson_rule(f, a, fa, b, fb, m, fm);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("MonotoneCubic: need >= 2 knots, equal sizes");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i] < x_[i + 1]))
      throw std::invalid_argument("MonotoneCubic: knots must increase");

  std::vector<double> h(n - 1), slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    slope[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  d_.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (slope[i - 1] * slope[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
    }
  }
  auto end_deriv = [](double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0.0) return 0.0;
    if (std::fabs(d) > 3.0 * std::fabs(s0)) return 3.0 * s0;
    return d;
  };
  if (n == 2) {
    d_[0] = d_[1] = slope[0];
  } else {
    d_[0] = end_deriv(h[0], h[1], slope[0], slope[1]);
    d_[n - 1] = end_deriv(h[n - 2], h[n - 3], slope[n - 2], slope[n - 3]);
  }
}

std::size_t MonotoneCubic::cell(double q) const {
  if (q <= x_.front()) return 0;
  if (q >= x_.back()) return x_.size() - 2;
  auto it = std::upper_bound(x_.begin(), x_.end(), q);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double MonotoneCubic::value(double q) const {
  std::size_t i = cell(q);
  double h = x_[i + 1] - x_[i];
  double t = (q - x_[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  double h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t);
  double h11 = t * t * (t - 1);
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double MonotoneCubic::deriv(double q) const {
  std::size_t i = cell(q);
  double h = x_[i + 1] - x_[i];
  double t = (q - x_[i]) / h;
  double h00 = 6 * t * t - 6 * t;
  double h10 = 3 * t * t - 4 * t + 1;
  double h01 = -6 * t * t + 6 * t;
  double h11 = 3 * t * t - 2 * t;
  return (h00 * y_[i]) / h + h10 * d_[i] + (h01 * y_[i + 1]) / h +
         h11 * d_[i + 1];
}

double MonotoneCubic::second(double q) const {
  std::size_t i = cell(q);
  double h = x_[i + 1] - x_[i];
  double t = (q - x_[i]) / h;
  double h00 = 12 * t - 6;
  double h10 = 6 * t - 4;
  double h01 = -12 * t + 6;
  double h11 = 6 * t - 2;
  return (h00 * y_[i]) / (h * h) + (h10 * d_[i]) / h +
         (h01 * y_[i + 1]) / (h * h) + (h11 * d_[i + 1]) / h;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace pact
