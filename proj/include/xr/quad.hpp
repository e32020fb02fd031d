#pragma once

#include <functional>
#include <vector>

namespace xr {

// Nodes and weights on [-1, 1].
struct QuadRule {
  std::vector<double> x, w;
};

QuadRule gauss_legendre(int n);

// Same rule mapped to [a, b] (b < a allowed; weights then carry the sign).
QuadRule gauss_legendre(int n, double a, double b);

// Composite 16-point Gauss-Legendre, doubling the panel count until two
// successive sums agree to rel * (1 + |I|). Throws after 4096 panels.
double integrate(const std::function<double(double)>& fn, double a, double b, double rel = 1e-13);

} // namespace xr
