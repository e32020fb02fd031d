#include "xr/quad.hpp"

#include "xr/common.hpp"

namespace xr {

QuadRule gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one node");
  QuadRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

QuadRule gauss_legendre(int n, double a, double b) {
  QuadRule r = gauss_legendre(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.x[i] = m + h * r.x[i];
    r.w[i] *= h;
  }
  return r;
}

namespace {

double composite(const std::function<double(double)>& fn, double a, double b, int m) {
  static const QuadRule r = gauss_legendre(16);
  const double h = (b - a) / m;
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (std::size_t i = 0; i < r.x.size(); ++i) sum += r.w[i] * fn(mid + 0.5 * h * r.x[i]);
  }
  return 0.5 * h * sum;
}

} // namespace

double integrate(const std::function<double(double)>& fn, double a, double b, double rel) {
  if (a == b) return 0.0;
  double prev = composite(fn, a, b, 2);
  for (int m = 4; m <= 4096; m *= 2) {
    const double cur = composite(fn, a, b, m);
    if (!std::isfinite(cur)) throw Error("integrate: integrand is not finite");
    if (std::fabs(cur - prev) <= rel * (1.0 + std::fabs(cur))) return cur;
    prev = cur;
  }
  throw Error("integrate: no convergence after 4096 panels");
}

} // namespace xr
