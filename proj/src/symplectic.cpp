#include "xr/symplectic.hpp"

#include "xr/quad.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>

namespace xr {

namespace {

double normalized_pairing(const Vec& v, const Vec& c) { return std::fabs(c.dot(v)) / (c.norm() * v.norm()); }

void require_transverse(const Vec& v, const Vec& c, const char* what) {
  if (!(normalized_pairing(v, c) > pairing_tol)) throw Error(std::string(what) + ": line lies in the hyperplane");
}

} // namespace

PairedPoint::PairedPoint(const ProjPoint& d, const ProjHyperplane& p) : D(d), P(p) {
  if (d.dim() != p.dim()) throw Error("PairedPoint: dimension mismatch");
  require_transverse(D.rep, P.covector, "PairedPoint");
}

Vec PairedPoint::d() const { return D.rep / P.covector.dot(D.rep); }

double omega_eval(const PairedPoint& x, const Tangent& X, const Tangent& Y) {
  const Vec d = x.d();
  const Vec& p = x.p();
  const double tol = 1e-8;
  for (const Tangent* T : {&X, &Y}) {
    if (std::fabs(p.dot(T->a)) > tol * (1.0 + T->a.norm()) || std::fabs(T->c.dot(d)) > tol * (1.0 + T->c.norm()))
      throw Error("omega_eval: tangent is not in the chart at this point");
  }
  return Y.c.dot(X.a) - X.c.dot(Y.a);
}

Tangent chart_tangent(const PairedPoint& at, const Vec& dh, const Vec& ddh, const Vec& ph, const Vec& dph) {
  const double q = ph.dot(dh);
  if (!(std::fabs(q) > pairing_tol * ph.norm() * dh.norm())) throw Error("chart_tangent: chart degenerates (D near P)");
  const Vec& p = at.p();
  const double sigma = ph.dot(p);  // ph = sigma p
  Tangent t;
  t.a = (ddh - (ph.dot(ddh) / q) * dh) / p.dot(dh);
  t.c = (dph - (dph.dot(dh) / q) * ph) / sigma;
  return t;
}

double polarized_cr_algebraic(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f,
                              const ProjHyperplane& v) {
  require_transverse(e.rep, u.covector, "polarized_cr_algebraic <e,u>");
  require_transverse(f.rep, v.covector, "polarized_cr_algebraic <f,v>");
  require_transverse(f.rep, u.covector, "polarized_cr_algebraic <f,u>");
  require_transverse(e.rep, v.covector, "polarized_cr_algebraic <e,v>");
  return e.rep.dot(u.covector) * f.rep.dot(v.covector) / (f.rep.dot(u.covector) * e.rep.dot(v.covector));
}

namespace {

// Lifts of one square rescaled so that <U,E> = <V,F> = 1 and <U,F> = <V,E> = B^-1/2.
void balance(Vec& E, Vec& U, Vec& F, Vec& V) {
  E /= U.dot(E);
  F /= U.dot(F);
  V /= V.dot(E);
  const double B = V.dot(F);
  if (!(B > 0.0)) throw Error("polarized_cr_quadrature: every leafwise disc crosses the incidence locus (B <= 0)");
  const double s = 1.0 / std::sqrt(B);
  F *= s;
  V *= s;
}

// Midpoint sum of f(i, j) over an N x N grid, rows in parallel, reduced in order.
template <class F>
double grid_sum(int N, Exec exec, F&& f) {
  std::vector<double> rows(N, 0.0);
  std::vector<std::string> err(N);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (int i = 0; i < N; ++i) {
    try {
      double acc = 0.0;
      for (int j = 0; j < N; ++j) acc += f(i, j);
      rows[i] = acc;
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (int i = 0; i < N; ++i)
    if (!err[i].empty()) throw Error(err[i]);
  double s = 0.0;
  for (double r : rows) s += r;
  return s;
}

// Integral of Omega over one balanced square, m x m midpoint grid.
double square_integral(Vec E, Vec U, Vec F, Vec V, int m, Exec exec) {
  balance(E, U, F, V);
  const Vec dD = F - E, dP = V - U, zero = Vec::Zero(E.size());
  const double h = 1.0 / m;
  const double sum = grid_sum(m, exec, [&](int i, int j) {
    const Vec dh = E + ((i + 0.5) * h) * dD, ph = U + ((j + 0.5) * h) * dP;
    const PairedPoint at{ProjPoint(dh), ProjHyperplane(ph)};
    const Tangent X = chart_tangent(at, dh, dD, ph, zero);
    const Tangent Y = chart_tangent(at, dh, zero, ph, dP);
    return omega_eval(at, X, Y);
  });
  return sum * h * h;
}

} // namespace

DiscMap DiscMap::make(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f, const ProjHyperplane& v) {
  const double B = polarized_cr_algebraic(e, u, f, v);
  if (!(B > 0.0)) throw Error("polarized_cr_quadrature: every leafwise disc crosses the incidence locus (B <= 0)");
  DiscMap g;
  g.E = e.rep;
  g.U = u.covector;
  g.F = f.rep;
  g.V = v.covector;
  balance(g.E, g.U, g.F, g.V);
  g.blocks = std::max(1, static_cast<int>(std::ceil(std::fabs(std::log(B)))));
  return g;
}

QuadratureResult polarized_cr_quadrature(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f,
                                         const ProjHyperplane& v, int N, Exec exec) {
  if (N < 1) throw Error("polarized_cr_quadrature: grid size must be positive");
  const DiscMap g = DiscMap::make(e, u, f, v);
  // At least 8 x 8 points per block.
  const int k = std::clamp(g.blocks, 1, std::max(1, N / 8));
  const int m = N / k;
  double I = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      I += square_integral(g.D(double(i) / k), g.P(double(j) / k), g.D(double(i + 1) / k), g.P(double(j + 1) / k), m,
                           exec);
  return {std::exp(I), I, N};
}

ConvergenceStudy polarized_convergence(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f,
                                       const ProjHyperplane& v, const std::vector<int>& Ns, Exec exec) {
  ConvergenceStudy s;
  s.exact = polarized_cr_algebraic(e, u, f, v);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int N : Ns) {
    const double val = polarized_cr_quadrature(e, u, f, v, N, exec).value;
    const double err = std::fabs(val - s.exact) / std::fabs(s.exact);
    s.N.push_back(N);
    s.value.push_back(val);
    s.rel_error.push_back(err);
    const double x = std::log2(static_cast<double>(N)), y = -std::log2(std::max(err, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(Ns.size());
  if (Ns.size() >= 2) s.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return s;
}

double leaf_integral_plus(const ProjPoint& e, const ProjPoint& f, const ProjPoint& g, const ProjHyperplane& u,
                          int N) {
  const Vec U = u.covector;
  require_transverse(e.rep, U, "leaf_integral_plus");
  require_transverse(f.rep, U, "leaf_integral_plus");
  require_transverse(g.rep, U, "leaf_integral_plus");
  const Vec E = e.rep / U.dot(e.rep), F = f.rep / U.dot(f.rep), G = g.rep / U.dot(g.rep);
  const Vec zero = Vec::Zero(U.size());
  const double h = 1.0 / N;
  const double sum = grid_sum(N, Exec::serial, [&](int i, int j) {
    const double a = (i + 0.5) * h, b = (j + 0.5) * h;
    const Vec dh = E + a * (F - E) + b * (G - E);
    const PairedPoint at{ProjPoint(dh), u};
    const Tangent X = chart_tangent(at, dh, F - E, U, zero);
    const Tangent Y = chart_tangent(at, dh, G - E, U, zero);
    return omega_eval(at, X, Y);
  });
  return sum * h * h;
}

double leaf_integral_minus(const ProjPoint& e, const ProjHyperplane& u, const ProjHyperplane& v,
                           const ProjHyperplane& w, int N) {
  const Vec E = e.rep;
  const Vec U = u.covector / u.covector.dot(E), V = v.covector / v.covector.dot(E), W = w.covector / w.covector.dot(E);
  const Vec zero = Vec::Zero(E.size());
  const double h = 1.0 / N;
  const double sum = grid_sum(N, Exec::serial, [&](int i, int j) {
    const double a = (i + 0.5) * h, b = (j + 0.5) * h;
    const Vec ph = U + a * (V - U) + b * (W - U);
    const PairedPoint at{e, ProjHyperplane(ph)};
    const Tangent X = chart_tangent(at, E, zero, ph, V - U);
    const Tangent Y = chart_tangent(at, E, zero, ph, W - U);
    return omega_eval(at, X, Y);
  });
  return sum * h * h;
}

PolarizedReport check_polarized_identities(const CurvePair& c, const SampleSet& s, long N, std::uint64_t seed,
                                           int grid, double min_gap, Exec exec) {
  PolarizedReport rep;
  for (long i = 0; i < N; ++i) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    const auto t = draw_tuple(rng, s, 5, min_gap);
    std::vector<ProjPoint> X;
    std::vector<ProjHyperplane> Y;
    for (int k : t) {
      X.emplace_back(c.xi(s[k]));
      Y.emplace_back(c.xistar(s[k]));
    }
    enum { x, y, z, tt, w };
    const std::array<std::array<int, 4>, 6> quads = {{{x, y, z, tt},
                                                      {z, tt, x, y},
                                                      {x, y, z, w},
                                                      {x, w, z, tt},
                                                      {x, y, w, tt},
                                                      {w, y, z, tt}}};
    std::array<double, 6> alg{}, quad{};
    bool positive = true;
    for (int k = 0; k < 6; ++k) {
      const auto& q = quads[k];
      alg[k] = polarized_cr_algebraic(X[q[0]], Y[q[1]], X[q[2]], Y[q[3]]);
      positive = positive && alg[k] > 0.0;
    }
    if (!positive) {
      ++rep.skipped;
      continue;
    }
    for (int k = 0; k < 6; ++k) {
      const auto& q = quads[k];
      quad[k] = polarized_cr_quadrature(X[q[0]], Y[q[1]], X[q[2]], Y[q[3]], grid, exec).value;
    }
    rep.symmetry.update(rel_diff(quad[0], quad[1]), t);
    rep.cocycle_first.update(rel_diff(quad[0], quad[2] * quad[3]), t);
    rep.cocycle_second.update(rel_diff(quad[0], quad[4] * quad[5]), t);
    const double a = std::max({rel_diff(alg[0], alg[1]), rel_diff(alg[0], alg[2] * alg[3]),
                               rel_diff(alg[0], alg[4] * alg[5])});
    rep.algebraic.update(a, t);
    ++rep.tuples;
  }
  return rep;
}

// ---- bundle

BundlePoint make_bundle_point(const Vec& u, const Vec& f) {
  const double q = f.dot(u);
  if (!(std::fabs(q) > pairing_tol * f.norm() * u.norm())) throw Error("bundle point: <f, u> vanishes");
  BundlePoint l{u, f / q};
  const double scale = u.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::fabs(u(i)) > 1e-12 * scale) {
      if (u(i) < 0) {
        l.u = -l.u;
        l.f = -l.f;
      }
      break;
    }
  }
  return l;
}

BundlePoint transform(const Mat& A, const BundlePoint& l) {
  const Vec f = A.transpose().fullPivLu().solve(l.f);
  return make_bundle_point(A * l.u, f);
}

double fiber_shift(const BundlePoint& a, const BundlePoint& b) { return std::log(std::fabs(a.f.dot(b.u))); }

double base_distance(const BundlePoint& a, const BundlePoint& b) {
  return std::max(line_angle(a.u, b.u), line_angle(a.f, b.f));
}

FlagCurve flag_curve_veronese(int n) {
  return [n](const BoundaryPoint& p) { return osculating_flag_veronese(n, ProjPoint(Vec(p.line))); };
}

FlagCurve flag_curve_eigen(const Representation& rep) {
  auto r = std::make_shared<const Representation>(rep);
  return [r](const BoundaryPoint& p) {
    if (p.word.empty()) throw Error("eigen flag curve needs a fixed-point sample, got a bare angle");
    const Word w = p.sign == Sign::attracting ? p.word : inverse(p.word);
    Flag f = attracting_flag(r->eval(w), r->eval(inverse(w)));
    if (!p.prefix.empty()) {
      const Mat H = r->eval(p.prefix);
      for (auto& b : f.blocks) b = orthonormal_basis(H * b);
    }
    return f;
  };
}

namespace {

Mat flag_member(const Flag& f, int p) {
  const int n = f.dim();
  if (p == n) return Mat::Identity(n, n);
  return f.member(p);
}

} // namespace

Mat splitting_lines(const Flag& fx, const Flag& fy) {
  const int n = fx.dim();
  if (fy.dim() != n) throw Error("splitting_lines: flag dimensions differ");
  Mat L(n, n);
  for (int i = 1; i <= n; ++i) {
    const Mat X = flag_member(fx, i), Y = flag_member(fy, n - i + 1);
    Mat M(n, n + 1);
    M << X, -Y;
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const Vec sv = svd.singularValues();
    if (!(sv(n - 1) > 1e-10 * sv(0))) throw Error("splitting_lines: flags are not transverse");
    const Vec v = svd.matrixV().col(n);
    L.col(i - 1) = (X * v.head(i)).normalized();
  }
  return L;
}

BundlePoint bundle_point(const Vec& xi_z, const Flag& fx, const Flag& fy) {
  const int n = fx.dim();
  const Mat L = splitting_lines(fx, fy);
  const Eigen::FullPivLU<Mat> lu(L);
  const Vec c = lu.solve(xi_z);
  const double cmax = c.cwiseAbs().maxCoeff();
  double log_vol = std::log(std::fabs(lu.determinant()));
  for (int i = 0; i < n; ++i) {
    if (!(std::fabs(c(i)) > 1e-12 * cmax))
      throw Error("bundle_point: projection u_" + std::to_string(i + 1) + " vanishes (representation not hyperconvex)");
    log_vol += std::log(std::fabs(c(i)));
  }
  // |u_1 ^ ... ^ u_n| = 1 after scaling u by exp(-log_vol / n).
  const Vec u1 = std::exp(-log_vol / n) * c(0) * L.col(0);
  Eigen::HouseholderQR<Mat> qr(fy.member(n - 1));
  const Mat Q = qr.householderQ() * Mat::Identity(n, n);
  const Vec f0 = Q.col(n - 1);
  return make_bundle_point(u1, f0);
}

BundlePoint bundle_point(const CurvePair& c, const FlagCurve& fl, const BoundaryPoint& z, const BoundaryPoint& x,
                         const BoundaryPoint& y) {
  return bundle_point(c.xi(z), fl(x), fl(y));
}

TranslationLength translation_length(const Representation& rep, const Word& w, const CurvePair& c,
                                     const FlagCurve& fl) {
  if (reduce(w).empty()) return {0.0, 0.0, 0.0, 0.0};
  // lambda_min from the inverse word keeps its relative accuracy.
  const double lmax = proximal(rep.eval(w)).lambda, lmin = 1.0 / proximal(rep.eval(inverse(w))).lambda;
  TranslationLength t;
  t.eigen_ratio = std::log(std::fabs(lmax / lmin));
  const GeneratorSet& g = rep.base;
  const BoundaryPoint gp = fixed_point(g, w, Sign::attracting), gm = fixed_point(g, w, Sign::repelling);
  const BoundaryPoint z = period_base_points(g, w).first;
  const BoundaryPoint gz = act(g, w, z);
  t.tau_plus = fiber_shift(bundle_point(c, fl, z, gp, gm), bundle_point(c, fl, gz, gp, gm));
  t.tau_minus = fiber_shift(bundle_point(c, fl, z, gm, gp), bundle_point(c, fl, gz, gm, gp));
  t.fiber = t.tau_plus - t.tau_minus;
  return t;
}

TranslationLength translation_length(const Representation& rep, const Word& w) {
  return translation_length(rep, w, CurvePair::eigen_sampled(rep), flag_curve_eigen(rep));
}

namespace {

// Leafwise parallel transport: moving D keeps f, moving P keeps u.
struct Transport {
  Vec u, f;
  void move_D(const Vec& D) {
    require_transverse(D, f, "action_difference: path leaves the transverse domain");
    u = D / f.dot(D);
  }
  void move_P(const Vec& P) {
    require_transverse(u, P, "action_difference: path leaves the transverse domain");
    f = P / P.dot(u);
  }
};

} // namespace

ActionDifference action_difference(const CurvePair& c, const GeneratorSet& g, const Word& w, const BoundaryPoint& y) {
  if (reduce(w).empty()) throw Error("action_difference: the identity has no fixed points");
  const BoundaryPoint gp = fixed_point(g, w, Sign::attracting), gm = fixed_point(g, w, Sign::repelling);
  const BoundaryPoint gy = act(g, w, y);
  const Vec a = c.xi(gp), b = c.xistar(gm), abar = c.xi(gm), bbar = c.xistar(gp);
  const Vec Y = c.xi(y), GY = c.xi(gy);
  require_transverse(a, b, "action_difference: alpha");
  require_transverse(abar, bbar, "action_difference: beta");
  Transport T{a, b / b.dot(a)};
  // c = c+ . c- . cbar+ through y, then g(c) backwards.
  T.move_D(Y);
  T.move_P(bbar);
  T.move_D(abar);
  T.move_D(GY);
  T.move_P(b);
  T.move_D(a);
  // The loop bounds the square with corners (gy,b), (y,b), (y,bbar), (gy,bbar);
  // transport scales f by exp(-integral of Omega).
  // The start had <f, a> = 1, so <f, a> now is the scale picked up.
  const double h = -std::log(std::fabs(T.f.dot(a)));
  ActionDifference r;
  r.holonomy = h;
  r.delta = std::exp(2.0 * h);
  r.b = curve_cr(c, gp, y, gm, gy);
  r.residual = rel_diff(r.delta, r.b * r.b);
  r.half_log = 0.5 * std::log(std::fabs(r.delta));
  return r;
}

ActionDifference action_difference(const CurvePair& c, const GeneratorSet& g, const Word& w) {
  return action_difference(c, g, w, period_base_points(g, w).first);
}

BundlePoint section_xi_u(const Vec& u, const Vec& p) {
  const double q = p.dot(u);
  if (!(std::fabs(q) > pairing_tol * p.norm() * u.norm())) throw Error("section_xi_u: u lies in the hyperplane");
  return {u, p / q};
}

double covariant_derivative(const std::function<BundlePoint(double)>& l, double t, double h) {
  const BundlePoint m = l(t), a = l(t - h), b = l(t + h);
  return m.u.dot((b.f - a.f) / (2.0 * h));
}

// ---- density

namespace {

double ipow(double x, int e) { return e < 0 ? 0.0 : std::pow(x, e); }

// veronese(n, line(s)) and its s-derivative.
void veronese_jet(int n, double s, Vec& v, Vec& dv) {
  const double p0 = std::cos(s / 2), p1 = std::sin(s / 2), d0 = -0.5 * p1, d1 = 0.5 * p0;
  v.resize(n);
  dv.resize(n);
  for (int k = 0; k < n; ++k) {
    v(k) = ipow(p0, n - 1 - k) * ipow(p1, k);
    dv(k) = (n - 1 - k) * ipow(p0, n - 2 - k) * ipow(p1, k) * d0 + k * ipow(p0, n - 1 - k) * ipow(p1, k - 1) * d1;
  }
}

void veronese_dual_jet(int n, double t, Vec& c, Vec& dc) {
  const double a = std::cos(t / 2), b = std::sin(t / 2), da = -0.5 * b, db = 0.5 * a;
  c.resize(n);
  dc.resize(n);
  for (int k = 0; k < n; ++k) {
    const double C = binomial(n - 1, k);
    c(k) = C * ipow(-b, n - 1 - k) * ipow(a, k);
    dc(k) = C * ((n - 1 - k) * ipow(-b, n - 2 - k) * (-db) * ipow(a, k) + k * ipow(-b, n - 1 - k) * ipow(a, k - 1) * da);
  }
}

// Derivatives at x of the Lagrange basis on nodes xs.
std::array<double, 4> lagrange_deriv(const std::array<double, 4>& xs, double x) {
  std::array<double, 4> d{};
  for (int j = 0; j < 4; ++j) {
    double sum = 0.0;
    for (int m = 0; m < 4; ++m) {
      if (m == j) continue;
      double prod = 1.0 / (xs[j] - xs[m]);
      for (int k = 0; k < 4; ++k)
        if (k != j && k != m) prod *= (x - xs[k]) / (xs[j] - xs[k]);
      sum += prod;
    }
    d[j] = sum;
  }
  return d;
}

} // namespace

DensityTable DensityTable::closed_form(int n) {
  if (n < 2) throw Error("DensityTable: n must be at least 2");
  DensityTable d;
  d.n_ = n;
  return d;
}

DensityTable DensityTable::sampled(const CurvePair& c, const SampleSet& s) {
  if (s.size() < 64) throw Error("pullback_density: sampling too sparse (need at least 64 points)");
  DensityTable d;
  d.n_ = c.n();
  const int m = static_cast<int>(s.size());
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return s[a].angle < s[b].angle; });
  d.n_samples_ = m;
  d.angles_.resize(m);
  d.xi_.resize(m);
  d.xistar_.resize(m);
  std::vector<std::string> err(m);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < m; ++i) {
    try {
      const BoundaryPoint& p = s[idx[i]];
      d.angles_[i] = p.angle;
      d.xi_[i] = c.xi(p).normalized();
      d.xistar_[i] = c.xistar(p).normalized();
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (const auto& e : err)
    if (!e.empty()) throw Error(e);
  return d;
}

double DensityTable::sampled_log_pairing(int i, int j) const {
  const double q = std::fabs(xi_[i].dot(xistar_[j]));
  if (!(q > pairing_tol)) throw Error("DensityTable: point too close to the incidence locus");
  return 2.0 * std::log(q);
}

double DensityTable::log_pairing(double s, double t) const {
  if (is_closed_form()) {
    Vec v, dv, c, dc;
    veronese_jet(n_, s, v, dv);
    veronese_dual_jet(n_, t, c, dc);
    return 2.0 * std::log(std::fabs(v.dot(c)));
  }
  // Nearest samples.
  auto nearest = [&](double a) {
    const double w = wrap_angle(a);
    auto it = std::lower_bound(angles_.begin(), angles_.end(), w);
    int i = static_cast<int>(it - angles_.begin()) % n_samples_;
    const int j = (i - 1 + n_samples_) % n_samples_;
    return circ_dist(angles_[j], w) < circ_dist(angles_[i], w) ? j : i;
  };
  return sampled_log_pairing(nearest(s), nearest(t));
}

double DensityTable::sampled_density(double s, double t) const {
  const int m = n_samples_;
  // Four nodes around each coordinate, unwrapped next to the query.
  auto stencil = [&](double a, std::array<int, 4>& id, std::array<double, 4>& xs) {
    const double w = wrap_angle(a);
    auto it = std::upper_bound(angles_.begin(), angles_.end(), w);
    const int hi = static_cast<int>(it - angles_.begin());  // first node above w (may be m)
    for (int k = 0; k < 4; ++k) {
      const int raw = hi - 2 + k;
      const int i = ((raw % m) + m) % m;
      id[k] = i;
      double x = angles_[i];
      if (raw < 0) x -= two_pi;
      if (raw >= m) x += two_pi;
      xs[k] = x - w + a;
    }
  };
  std::array<int, 4> is{}, it{};
  std::array<double, 4> xs{}, xt{};
  stencil(s, is, xs);
  stencil(t, it, xt);
  for (int a : is)
    for (int b : it)
      if (a == b) throw Error("DensityTable: query too close to the incidence locus");
  const auto ds = lagrange_deriv(xs, s), dt = lagrange_deriv(xt, t);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += ds[a] * dt[b] * sampled_log_pairing(is[a], it[b]);
  return acc;
}

double DensityTable::density(double s, double t) const {
  if (!is_closed_form()) return sampled_density(s, t);
  Vec v, dv, c, dc;
  veronese_jet(n_, s, v, dv);
  veronese_dual_jet(n_, t, c, dc);
  const double q = v.dot(c), qs = dv.dot(c), qt = v.dot(dc), qst = dv.dot(dc);
  if (!(std::fabs(q) > pairing_tol * v.norm() * c.norm()))
    throw Error("DensityTable: query too close to the incidence locus");
  return 2.0 * (qst * q - qs * qt) / (q * q);
}

double DensityTable::min_density(int grid, double sep) const {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double s = two_pi * (i + 0.5) / grid, t = two_pi * (j + 0.5) / grid;
      if (circ_dist(s, t) < sep) continue;
      mn = std::min(mn, density(s, t));
    }
  return mn;
}

void DensityTable::write_csv(std::ostream& os, int grid, double sep) const {
  const auto old = os.precision(17);
  os << "s,t,density\n";
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double s = two_pi * (i + 0.5) / grid, t = two_pi * (j + 0.5) / grid;
      if (circ_dist(s, t) < sep) continue;
      os << s << ',' << t << ',' << density(s, t) << '\n';
    }
  os.precision(old);
}

DensityTable pullback_density(const CurvePair& c, const SampleSet& s) {
  if (c.mode() == CurvePair::Mode::veronese_closed_form) return DensityTable::closed_form(c.n());
  return DensityTable::sampled(c, s);
}

namespace {

bool on_ccw_arc(double from, double len, double p) { return wrap_angle(p - from) < len; }

// Signed length of the arc from a to b that avoids both p and r.
double avoiding_arc(double a, double b, double p, double r) {
  const double ccw = wrap_angle(b - a);
  const bool ccw_ok = !on_ccw_arc(a, ccw, p) && !on_ccw_arc(a, ccw, r);
  const double cw = ccw - two_pi;
  const bool cw_ok = !on_ccw_arc(b, -cw, p) && !on_ccw_arc(b, -cw, r);
  if (ccw_ok) return ccw;
  if (cw_ok) return cw;
  throw Error("cotangent_cr: pairs {x,z} and {y,t} are linked; the rectangle meets the incidence locus");
}

} // namespace

CotangentResult cotangent_cr(const DensityTable& d, const std::array<double, 4>& q, int N, Exec exec) {
  const auto [x, y, z, t] = q;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if ((i % 2) != (j % 2) && circ_dist(q[i], q[j]) < 1e-2)
        throw Error("cotangent_cr: quadruple too close to the incidence locus");
  const double ds = circ_dist(x, z) == 0.0 ? 0.0 : avoiding_arc(x, z, y, t);
  const double dt = circ_dist(y, t) == 0.0 ? 0.0 : avoiding_arc(y, t, x, z);
  double area = 0.0;
  if (ds != 0.0 && dt != 0.0) {
    const QuadRule rs = gauss_legendre(N, x, x + ds), rt = gauss_legendre(N, y, y + dt);
    area = grid_sum(N, exec, [&](int i, int j) { return rs.w[i] * rt.w[j] * d.density(rs.x[i], rt.x[j]); });
  }
  return {eps_sign(x, y, z, t) * std::exp(0.5 * area), area};
}

} // namespace xr
