#include "xr/jetspace.hpp"

#include "xr/quad.hpp"

#include <omp.h>

namespace xr {

double jet_distance(const Jet& a, const Jet& b) {
  return std::max({circ_dist(a.theta, b.theta), std::fabs(a.r - b.r), std::fabs(a.f - b.f)});
}

TrigPoly::TrigPoly(double c0, std::vector<double> ca, std::vector<double> cb) : a0(c0), a(std::move(ca)), b(std::move(cb)) {
  if (a.size() != b.size()) throw Error("TrigPoly: cosine and sine coefficient counts differ");
  if (degree() > max_trig_degree) throw Error("TrigPoly: degree above 32");
}

std::array<double, 3> TrigPoly::eval(double x) const {
  double v = a0, d1 = 0.0, d2 = 0.0;
  for (int k = 1; k <= degree(); ++k) {
    const double c = std::cos(k * x), s = std::sin(k * x);
    const double ak = a[k - 1], bk = b[k - 1];
    v += ak * c + bk * s;
    d1 += k * (bk * c - ak * s);
    d2 -= k * k * (ak * c + bk * s);
  }
  return {v, d1, d2};
}

JetGroupElement JetGroupElement::identity() { return flow(0.0); }

JetGroupElement JetGroupElement::flow(double t) {
  return {[t](double) { return std::array<double, 2>{t, 0.0}; },
          [](double x) { return std::array<double, 2>{x, 1.0}; }};
}

JetGroupElement JetGroupElement::trig(const TrigPoly& h, const TrigPoly& p) {
  const int grid = 8192;
  for (int i = 0; i < grid; ++i) {
    const double x = two_pi * i / grid;
    if (!(1.0 + p.eval(x)[1] > 0.0)) throw Error("JetGroupElement: phi is not an orientation preserving diffeomorphism");
  }
  return {[h](double x) {
            const auto e = h.eval(x);
            return std::array<double, 2>{e[0], e[1]};
          },
          [p](double x) {
            const auto e = p.eval(x);
            return std::array<double, 2>{x + e[0], 1.0 + e[1]};
          }};
}

JetGroupElement JetGroupElement::fuchsian(const Mat2& M) {
  if (std::fabs(M.determinant() - 1.0) > 1e-12) throw Error("JetGroupElement: matrix is not in SL(2,R)");
  // phi' = 1 / |M v|^2 for the unit line v at base angle x.
  auto image = [M](double x) {
    const Vec2 v(std::cos(x / 2), std::sin(x / 2)), dv(-std::sin(x / 2) / 2, std::cos(x / 2) / 2);
    return std::pair<Vec2, Vec2>(M * v, M * dv);
  };
  return {[image](double x) {
            const auto [w, dw] = image(x);
            const double n2 = w.squaredNorm();
            return std::array<double, 2>{-std::log(n2), -2.0 * w.dot(dw) / n2};
          },
          [image](double x) {
            const auto [w, dw] = image(x);
            const double y = angle_of_line(w);
            return std::array<double, 2>{x + std::remainder(y - x, two_pi), 1.0 / w.squaredNorm()};
          }};
}

JetGroupElement product(const JetGroupElement& g1, const JetGroupElement& g2) {
  return {[g1, g2](double x) {
            const auto p2 = g2.phi(x);
            const auto a = g1.h(p2[0]), b = g2.h(x);
            return std::array<double, 2>{a[0] + b[0], a[1] * p2[1] + b[1]};
          },
          [g1, g2](double x) {
            const auto p2 = g2.phi(x);
            const auto p1 = g1.phi(p2[0]);
            return std::array<double, 2>{p1[0], p1[1] * p2[1]};
          }};
}

Jet jet_act(const JetGroupElement& g, const Jet& j) {
  const auto [ph, dph] = g.phi(j.theta);
  const auto [hv, dh] = g.h(j.theta);
  return Jet(ph, (dh + j.r) / dph, j.f + hv);
}

Jet jet_transport(const TrigPoly& h, const TrigPoly& p, const TrigPoly& F, double theta) {
  const double psi0 = theta + p.eval(theta)[0];
  auto inv = [&](double psi) {
    double x = theta + (psi - psi0);
    for (int it = 0; it < 60; ++it) {
      const auto e = p.eval(x);
      const double dx = (x + e[0] - psi) / (1.0 + e[1]);
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    return x;
  };
  auto G = [&](double psi) {
    const double x = inv(psi);
    return h.eval(x)[0] + F.eval(x)[0];
  };
  const double d = 2e-3;
  const double dG = (-G(psi0 - 3 * d) + 9 * G(psi0 - 2 * d) - 45 * G(psi0 - d) + 45 * G(psi0 + d) -
                     9 * G(psi0 + 2 * d) + G(psi0 + 3 * d)) /
                    (60 * d);
  return Jet(psi0, dG, G(psi0));
}

namespace {

const double test_r[] = {-1.5, -0.2, 0.7, 2.0};

} // namespace

double jet_act_check_homomorphism(const JetGroupElement& g1, const JetGroupElement& g2, int grid) {
  const JetGroupElement g12 = product(g1, g2);
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst)
  for (int i = 0; i < grid; ++i) {
    for (double r : test_r) {
      const Jet j(two_pi * i / grid, r, 0.3);
      worst = std::max(worst, jet_distance(jet_act(g12, j), jet_act(g1, jet_act(g2, j))));
    }
  }
  return worst;
}

double flow_centrality(const JetGroupElement& g, double t, int grid) {
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst)
  for (int i = 0; i < grid; ++i) {
    for (double r : test_r) {
      const Jet j(two_pi * i / grid, r, -0.4);
      worst = std::max(worst, jet_distance(jet_act(g, flow_jet(j, t)), flow_jet(jet_act(g, j), t)));
    }
  }
  return worst;
}

namespace {

// Trapezoid sum of beta = df - r dtheta over sampled jets.
double beta_sum(const std::vector<Jet>& js) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < js.size(); ++i) {
    const double dth = std::remainder(js[i + 1].theta - js[i].theta, two_pi);
    s += (js[i + 1].f - js[i].f) - 0.5 * (js[i].r + js[i + 1].r) * dth;
  }
  return s;
}

template <class Map>
double beta_integral(const JetCurve& c, int steps, Map&& map) {
  auto sum = [&](int m) {
    std::vector<Jet> js(m + 1);
    for (int i = 0; i <= m; ++i) js[i] = map(c.at(c.s0 + (c.s1 - c.s0) * i / m));
    return beta_sum(js);
  };
  const double a = sum(steps), b = sum(2 * steps);
  return (4.0 * b - a) / 3.0;
}

} // namespace

ContactReport contact_check(const JetGroupElement& g, const JetCurve& c, int steps) {
  ContactReport r;
  r.before = beta_integral(c, steps, [](const Jet& j) { return j; });
  r.after = beta_integral(c, steps, [&](const Jet& j) { return jet_act(g, j); });
  r.violation = std::fabs(r.after - r.before);
  return r;
}

JetCurve jet_graph(const TrigPoly& F) {
  return {[F](double s) {
            const auto e = F.eval(s);
            return Jet(s, e[1], e[0]);
          },
          0.0, two_pi};
}

// ---- PSL(2,R)

PSL2Point::PSL2Point(const Mat2& a) : m(a) {
  if (std::fabs(a.determinant() - 1.0) > 1e-12) throw Error("PSL2Point: determinant is not 1");
  const double clear = 1e-12 * a.norm();
  for (int k = 0; k < 4; ++k) {
    const double x = m(k / 2, k % 2);
    if (std::fabs(x) > clear) {
      if (x < 0) m = -m;
      break;
    }
  }
}

namespace {

Mat2 diag_flow(double t) {
  Mat2 d = Mat2::Zero();
  d(0, 0) = std::exp(t / 2);
  d(1, 1) = std::exp(-t / 2);
  return d;
}

// u in SL(2) with columns on the attracting and repelling lines of M (trace made positive).
std::pair<Mat2, Mat2> conjugator(const GeneratorSet& g, const Word& w) {
  if (reduce(w).empty()) throw Error("rho_length: the identity is not hyperbolic");
  Mat2 M = evaluate(g, w);
  if (M.trace() < 0) M = -M;
  HyperbolicSplit hs;
  try {
    hs = hyperbolic_split(M);
  } catch (const Error&) {
    throw Error("rho_length: word " + word_name(w) + " is not hyperbolic");
  }
  Mat2 u;
  u.col(0) = hs.attracting;
  u.col(1) = hs.repelling;
  if (u.determinant() < 0) u.col(1) = -u.col(1);
  u /= std::sqrt(u.determinant());
  return {M, u};
}

} // namespace

PSL2Point psl2_flow(const PSL2Point& p, double t) { return PSL2Point(p.m * diag_flow(t)); }
PSL2Point psl2_left(const Mat2& g, const PSL2Point& p) { return PSL2Point(g * p.m); }

double leaf_residual(const PSL2Point& p, const PSL2Point& q) {
  const Mat2 r = p.m.inverse() * q.m;
  return std::fabs(r(1, 0));
}

RhoLength rho_length(const GeneratorSet& g, const Word& w) {
  const auto [M, u] = conjugator(g, w);
  const Mat2 D = u.inverse() * M * u;
  const HyperbolicSplit hs = hyperbolic_split(M);
  RhoLength r;
  r.t = std::log(D(0, 0) / D(1, 1));
  r.eigen_ratio = std::log(std::fabs(hs.lambda_max / hs.lambda_min));
  r.conj_residual = std::max(std::fabs(D(0, 1)), std::fabs(D(1, 0))) / std::fabs(D(0, 0));
  return r;
}

double GhysRep::omega_of(const Word& w) const {
  double s = 0.0;
  for (int l : w) s += (l > 0 ? 1.0 : -1.0) * omega.at(std::abs(l) - 1);
  return s;
}

JetGroupElement GhysRep::element(const Word& w) const {
  JetGroupElement e = JetGroupElement::fuchsian(evaluate(base, w));
  const double om = omega_of(w);
  auto h = e.h;
  e.h = [h, om](double x) {
    auto v = h(x);
    v[0] += om;
    return v;
  };
  return e;
}

double GhysRep::length(const Word& w) const {
  const auto [M, u] = conjugator(base, w);
  const Mat2 D = u.inverse() * (M * u * diag_flow(omega_of(w)));
  return std::log(D(0, 0) / D(1, 1));
}

double GhysRep::jet_length(const Word& w) const {
  Mat2 M = evaluate(base, w);
  if (M.trace() < 0) M = -M;
  const double x = angle_of_line(hyperbolic_split(M).repelling);
  const JetGroupElement e = element(w);
  if (!(e.phi(x)[1] > 1.0)) throw Error("jet_length: circle map does not expand at the repelling point");
  return e.h(x)[0];
}

GhysRep ghys_deform(const GeneratorSet& g, std::vector<double> omega, const Word& relator) {
  if (static_cast<int>(omega.size()) != g.rank) throw Error("ghys_deform: one value per generator is required");
  GhysRep r{g, std::move(omega)};
  const double rel = r.omega_of(relator);
  if (std::fabs(rel) > 1e-12) throw Error("ghys_deform: omega does not vanish on the relator");
  return r;
}

GhysRep ghys_deform(const GeneratorSet& g, std::vector<double> omega) {
  return ghys_deform(g, std::move(omega), g.kind == GroupKind::cocompact_genus2 ? surface_relator() : Word{});
}

// ---- pi-curves

bool PiCurve::closed(double tol) const {
  return std::fabs(std::remainder(theta.back() - theta.front(), two_pi)) < tol && std::fabs(r.back() - r.front()) < tol;
}

PiCurve make_pi_curve(const std::vector<double>& theta, const std::vector<double>& r) {
  if (theta.size() != r.size() || theta.size() < 2) throw Error("pi curve: need at least two samples");
  PiCurve c;
  c.theta.resize(theta.size());
  c.r = r;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i]) || !std::isfinite(r[i])) throw Error("pi curve: sample is not finite");
    c.theta[i] = i == 0 ? theta[0] : c.theta[i - 1] + std::remainder(theta[i] - theta[i - 1], two_pi);
  }
  return c;
}

PiCurve concat(const PiCurve& a, const PiCurve& b) {
  if (std::fabs(std::remainder(a.theta.back() - b.theta.front(), two_pi)) > 1e-9 || std::fabs(a.r.back() - b.r.front()) > 1e-9)
    throw Error("pi curve: pieces do not join");
  PiCurve c = a;
  const double shift = two_pi * std::round((a.theta.back() - b.theta.front()) / two_pi);
  for (std::size_t i = 1; i < b.theta.size(); ++i) {
    c.theta.push_back(b.theta[i] + shift);
    c.r.push_back(b.r[i]);
  }
  return c;
}

PiCurve reversed(const PiCurve& c) {
  PiCurve d;
  d.theta.assign(c.theta.rbegin(), c.theta.rend());
  d.r.assign(c.r.rbegin(), c.r.rend());
  return d;
}

double pi_log_holonomy(const PiCurve& c) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < c.theta.size(); ++i) s += 0.5 * (c.r[i] + c.r[i + 1]) * (c.theta[i + 1] - c.theta[i]);
  return s;
}

double pi_log_holonomy(const std::function<std::array<double, 2>(double)>& c, int N) {
  auto sample = [&](int m) {
    std::vector<double> th(m + 1), r(m + 1);
    for (int i = 0; i <= m; ++i) {
      const auto p = c(static_cast<double>(i) / m);
      th[i] = p[0];
      r[i] = p[1];
    }
    return pi_log_holonomy(make_pi_curve(th, r));
  };
  // Romberg table over doublings of N.
  std::vector<double> prev{sample(N)};
  for (int m = 2 * N, level = 1; m <= (1 << 22); m *= 2, ++level) {
    std::vector<double> row{sample(m)};
    double scale = 4.0;
    for (int j = 1; j <= level; ++j, scale *= 4.0) row.push_back(row[j - 1] + (row[j - 1] - prev[j - 1]) / (scale - 1.0));
    if (std::fabs(row.back() - prev.back()) <= 1e-13 * (1.0 + std::fabs(row.back()))) return row.back();
    prev = std::move(row);
  }
  return prev.back();
}

std::array<double, 2> cotangent_act(const JetGroupElement& g, double theta, double r) {
  const Jet j = jet_act(g, Jet(theta, r, 0.0));
  return {j.theta, j.r};
}

WidthReport width_identity(const GhysRep& rep, const Word& w, int N) {
  WidthReport out;
  if (reduce(w).empty()) return out;
  Mat2 M = evaluate(rep.base, w);
  if (M.trace() < 0) M = -M;
  const HyperbolicSplit hs = hyperbolic_split(M);
  const double xm = angle_of_line(hs.repelling), xp = angle_of_line(hs.attracting);
  const JetGroupElement E = rep.element(w);
  // Fixed points of the cotangent map over the two fixed angles.
  auto fixed_r = [&](double x) { return E.h(x)[1] / (E.phi(x)[1] - 1.0); };
  const double rm = fixed_r(xm), rp = fixed_r(xp);
  const double span = wrap_angle(xp - xm);
  auto c = [&](double s) { return std::array<double, 2>{xm + s * span, rm + s * (rp - rm)}; };
  // c from the gamma- point to the gamma+ point, then the image of c backwards.
  auto loop = [&](double s) {
    if (s <= 0.5) return c(2 * s);
    const auto p = c(2 - 2 * s);
    return cotangent_act(E, p[0], p[1]);
  };
  out.log_width = pi_log_holonomy(loop, N);
  out.l_plus = rep.jet_length(w);
  out.l_minus = rep.jet_length(inverse(w));
  out.two_period = 2.0 * period(classical_fn(), rep.base, w).value;
  const double sum = out.l_plus + out.l_minus;
  out.residual = std::max({std::fabs(out.log_width - sum), std::fabs(out.log_width - out.two_period),
                           std::fabs(sum - out.two_period)});
  return out;
}

// ---- straightening

Straighten::Straighten(std::function<double(double)> kappa, std::function<double(double, double)> f,
                       std::function<double(double)> g, int check_grid)
    : kappa_(std::move(kappa)), g_(std::move(g)), f_(std::move(f)) {
  for (int i = 0; i < check_grid; ++i) {
    const double s = two_pi * i / check_grid;
    const double k = kappa_(s), off = wrap_angle(g_(s) - k);
    if (off < 1e-9 || off > two_pi - 1e-9) throw Error("straighten: section touches kappa");
    for (int j = 1; j < 16; ++j) {
      const double u = k + two_pi * j / 16;
      if (!(f_(s, u) > 0.0)) throw Error("straighten: density is not positive");
    }
  }
}

double Straighten::integral(double s, double a, double b) const {
  return integrate([&](double u) { return f_(s, u); }, a, b, 1e-14);
}

std::array<double, 2> Straighten::map(double s, double t) const {
  const double k = kappa_(s);
  const double tt = k + wrap_angle(t - k), gg = k + wrap_angle(g_(s) - k);
  if (tt == k) throw Error("straighten: point lies on kappa");
  return {s, integral(s, gg, tt)};
}

Straighten::Report Straighten::check(const std::vector<std::array<double, 4>>& rects,
                                     const std::vector<std::array<double, 3>>& discs) const {
  Report rep;
  const QuadRule q = gauss_legendre(48);
  for (const auto& R : rects) {
    const auto [s0, s1, t0, t1] = R;
    for (double s : {s0, s1})
      for (double t : {t0, t1}) rep.fiber = std::max(rep.fiber, circ_dist(map(s, t)[0], s));
    // Area of psi(R) from the image of its t-edges, and the integral of f over R.
    const double image = integrate([&](double s) { return map(s, t1)[1] - map(s, t0)[1]; }, s0, s1, 1e-12);
    double direct = 0.0;
    for (int i = 0; i < 48; ++i) {
      const double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * q.x[i];
      for (int j = 0; j < 48; ++j) {
        const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * q.x[j];
        direct += q.w[i] * q.w[j] * f_(s, t);
      }
    }
    direct *= 0.25 * (s1 - s0) * (t1 - t0);
    rep.measure = std::max(rep.measure, std::fabs(image - direct) / std::fabs(direct));
  }
  for (const auto& D : discs) {
    const auto [cs, ct, rad] = D;
    auto curve = [&](double x) {
      const double s = cs + rad * std::cos(two_pi * x), t = ct + rad * std::sin(two_pi * x);
      return std::array<double, 2>{s, map(s, t)[1]};
    };
    const double hol = pi_log_holonomy(curve, 512);
    // Positively oriented boundary: the trapezoid sum of r dtheta is minus the enclosed area.
    const QuadRule qr = gauss_legendre(40, 0.0, rad);
    double area = 0.0;
    const int na = 128;
    for (int a = 0; a < na; ++a) {
      const double ang = two_pi * a / na;
      for (int i = 0; i < 40; ++i)
        area += qr.w[i] * qr.x[i] * f_(cs + qr.x[i] * std::cos(ang), ct + qr.x[i] * std::sin(ang));
    }
    area *= two_pi / na;
    rep.holonomy = std::max(rep.holonomy, std::fabs(std::expm1(hol + area)));
  }
  return rep;
}

double straighten_conjugacy(const Straighten& psi, const Mat2& M, int grid) {
  const JetGroupElement E = JetGroupElement::fuchsian(M);
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst)
  for (int i = 0; i < grid; ++i) {
    const double x = two_pi * i / grid + 0.1;
    for (int j = 0; j < grid; ++j) {
      const double y = x + pi * (0.2 + 1.6 * j / grid);
      const auto P = psi.map(x, y);
      const auto lhs = psi.map(E.phi(x)[0], E.phi(y)[0]);
      const auto rhs = cotangent_act(E, P[0], P[1]);
      worst = std::max({worst, circ_dist(lhs[0], rhs[0]), std::fabs(lhs[1] - rhs[1]) / (1.0 + std::fabs(rhs[1]))});
    }
  }
  return worst;
}

// ---- connection normalization

Normalization connection_normalize(const ConnectionForm& alpha, double rmax, double tol) {
  const double d = 1e-4;
  for (int i = 0; i < 32; ++i) {
    const double th = two_pi * i / 32;
    for (int j = 0; j <= 8; ++j) {
      const double r = -rmax + 2.0 * rmax * j / 8;
      const double curl = (alpha.alpha_r(th + d, r) - alpha.alpha_r(th - d, r)) / (2 * d) -
                          (alpha.alpha_theta(th, r + d) - alpha.alpha_theta(th, r - d)) / (2 * d);
      if (std::fabs(curl - 1.0) > tol)
        throw Error("connection_normalize: alpha - beta is not closed (curvature differs from that of beta)");
    }
  }
  // gamma = alpha - beta = (alpha_theta + r) dtheta + alpha_r dr
  auto gth = [alpha](double th, double r) { return alpha.alpha_theta(th, r) + r; };
  Normalization nm;
  const int m = 512;
  double loop = 0.0;
  for (int i = 0; i < m; ++i) loop += gth(two_pi * i / m, 0.0);
  nm.lambda = loop / m;
  const double lam = nm.lambda;
  nm.h = [alpha, gth, lam](double th, double r) {
    const double x = wrap_angle(th);
    const double along = integrate([&](double s) { return gth(s, 0.0) - lam; }, 0.0, x, 1e-13);
    const double up = integrate([&](double q) { return alpha.alpha_r(x, q); }, 0.0, r, 1e-13);
    return along + up;
  };
  return nm;
}

double normalization_residual(const ConnectionForm& alpha, const Normalization& nm, const JetCurve& c, int steps) {
  auto alpha_sum = [&](int m) {
    double s = 0.0;
    Jet prev = c.at(c.s0);
    for (int i = 1; i <= m; ++i) {
      const Jet cur = c.at(c.s0 + (c.s1 - c.s0) * i / m);
      const double dth = std::remainder(cur.theta - prev.theta, two_pi);
      s += (cur.f - prev.f) + 0.5 * (alpha.alpha_theta(prev.theta, prev.r) + alpha.alpha_theta(cur.theta, cur.r)) * dth +
           0.5 * (alpha.alpha_r(prev.theta, prev.r) + alpha.alpha_r(cur.theta, cur.r)) * (cur.r - prev.r);
      prev = cur;
    }
    return s;
  };
  const double direct = (4.0 * alpha_sum(2 * steps) - alpha_sum(steps)) / 3.0;
  const double pulled = beta_integral(c, steps, [&](const Jet& j) { return nm.xi(j); });
  return std::fabs(direct - pulled);
}

} // namespace xr
