#include "tract/numeric.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace tract::numeric {

double trapezoid(const std::vector<double>& v, double step) {
  if (v.size() < 2) return 0.0;
  double acc = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
  return acc * step;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& v,
                                         double step) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * step * (v[i - 1] + v[i]);
  }
  return out;
}

namespace {

// E1(i x) by modified Lentz continued fraction; good for x > ~2.
std::complex<double> e1_imag_axis(double x) {
  const std::complex<double> z(0.0, x);
  const double tiny = 1e-300;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

}  // namespace

double si(double x) {
  if (x < 0.0) return -si(-x);
  if (x == 0.0) return 0.0;
  if (x <= 4.0) {
    // Si(x) = sum (-1)^n x^(2n+1) / ((2n+1) (2n+1)!)
    double term = x;
    double sum = x;
    for (int n = 1; n <= 40; ++n) {
      const double tn = 2.0 * n;
      term *= -x * x / (tn * (tn + 1.0));
      sum += term / (tn + 1.0);
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  // E1(ix) = -Ci(x) - i (pi/2 - Si(x))
  const std::complex<double> e1 = e1_imag_axis(x);
  return std::numbers::pi / 2.0 + e1.imag();
}

double ci(double x) {
  if (!(x > 0.0)) {
    throw validation_error("ci: argument must be positive");
  }
  if (x <= 4.0) {
    constexpr double euler_gamma = 0.577215664901532860606512090082;
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n <= 40; ++n) {
      const double tn = 2.0 * n;
      term *= -x * x / ((tn - 1.0) * tn);
      sum += term / tn;
      if (std::abs(term) < 1e-18) break;
    }
    return euler_gamma + std::log(x) + sum;
  }
  return -e1_imag_axis(x).real();
}

double integral_cos_over_k2(double K, double t) {
  if (!(K > 0.0)) {
    throw validation_error("tail integral: K must be positive");
  }
  if (t == 0.0) return 1.0 / K;
  const double at = std::abs(t);
  return std::cos(K * at) / K - at * (std::numbers::pi / 2.0 - si(K * at));
}

double integral_sin_over_k2(double K, double t) {
  if (!(K > 0.0)) {
    throw validation_error("tail integral: K must be positive");
  }
  if (t == 0.0) return 0.0;
  const double sign = (t > 0.0) ? 1.0 : -1.0;
  const double at = std::abs(t);
  return sign * (std::sin(K * at) / K - at * ci(K * at));
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) {
    throw numeric_error("bisect: interval does not bracket a root");
  }
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

LinearFitResult linear_fit(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw validation_error("linear_fit: need two equally sized samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double n = static_cast<double>(x.size());
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) {
    return LinearFitResult{sy / n, 0.0};
  }
  LinearFitResult r;
  r.slope = (n * sxy - sx * sy) / det;
  r.intercept = (sy - r.slope * sx) / n;
  return r;
}

double interp_clamped(const Grid1D& grid, const std::vector<double>& v,
                      double x) {
  if (x <= grid.start) return v.front();
  if (x >= grid.back()) return v.back();
  const double s = (x - grid.start) / grid.step;
  std::size_t i = static_cast<std::size_t>(s);
  if (i >= grid.count - 1) i = grid.count - 2;
  const double t = s - static_cast<double>(i);
  return v[i] * (1.0 - t) + v[i + 1] * t;
}

}  // namespace tract::numeric
