#include "xr/crossratio.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace xr {

CurvePair CurvePair::veronese(int n) {
  CurvePair c;
  c.n_ = n;
  c.mode_ = Mode::veronese_closed_form;
  c.xi_ = [n](const BoundaryPoint& p) { return xr::veronese(n, p.line); };
  c.xistar_ = [n](const BoundaryPoint& p) { return veronese_dual(n, p.line); };
  return c;
}

namespace {

void require_word(const BoundaryPoint& p) {
  if (p.word.empty()) throw Error("eigen-sampled curve needs a fixed-point sample, got a bare angle");
}

// rho(h) v (or rho(h^-1)^T v) in extended precision. Translated points sit
// close to the attracting fixed point, and the pairings that matter are the
// small components of the product.
VecL translate(const Representation& r, const Word& h, VecL x, bool dual) {
  const Word hw = reduce(h);
  // Letters act right to left; the dual action uses transposed inverses.
  for (auto it = hw.rbegin(); it != hw.rend(); ++it) {
    const int l = *it;
    if (!dual) {
      x = l > 0 ? VecL(r.gens[l - 1].cast<long double>() * x) : VecL(r.inv_ext[-l - 1] * x);
    } else {
      x = l > 0 ? VecL(r.inv_ext[l - 1].transpose() * x) : VecL(r.gens[-l - 1].transpose().cast<long double>() * x);
    }
    x /= x.norm();
  }
  return normalize_rep_extended(x);
}

} // namespace

CurvePair CurvePair::eigen_sampled(const Representation& rep) {
  auto r = std::make_shared<const Representation>(rep);
  CurvePair c;
  c.n_ = rep.n;
  c.mode_ = Mode::eigen_sampled;
  // xi(g+) is the dominant right eigenvector of rho(w); xi*(g+) the dominant
  // left eigenvector of rho(w^-1). Repelling points swap the two words.
  // Translated points use equivariance: xi(h p) = rho(h) xi(p).
  c.xi_ext_ = [r](const BoundaryPoint& p) {
    require_word(p);
    const Word w = p.sign == Sign::attracting ? p.word : inverse(p.word);
    VecL v = proximal_extended(r->eval_extended(w)).right;
    if (!p.prefix.empty()) v = translate(*r, p.prefix, v, false);
    return v;
  };
  c.xistar_ext_ = [r](const BoundaryPoint& p) {
    require_word(p);
    const Word w = p.sign == Sign::attracting ? inverse(p.word) : p.word;
    VecL v = proximal_extended(r->eval_extended(w)).left;
    if (!p.prefix.empty()) v = translate(*r, p.prefix, v, true);
    return v;
  };
  c.xi_ = [f = c.xi_ext_](const BoundaryPoint& p) { return normalize_rep(Vec(f(p).cast<double>())); };
  c.xistar_ = [f = c.xistar_ext_](const BoundaryPoint& p) { return normalize_rep(Vec(f(p).cast<double>())); };
  return c;
}

CurvePair CurvePair::custom(int n, Eval xi, Eval xistar) {
  CurvePair c;
  c.n_ = n;
  c.mode_ = Mode::custom;
  c.xi_ = std::move(xi);
  c.xistar_ = std::move(xistar);
  return c;
}

FixedPointData fixed_point_data(const Representation& rep, const Word& w) {
  const Proximal fw = proximal(rep.eval_extended(w));
  const Proximal bw = proximal(rep.eval_extended(inverse(w)));
  FixedPointData d;
  d.xi_plus = fw.right;
  d.xistar_minus = fw.left;
  d.xi_minus = bw.right;
  d.xistar_plus = bw.left;
  d.lambda_max = fw.lambda;
  d.lambda_min = 1.0 / bw.lambda;
  return d;
}

double det2(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

double classical_cr(const Vec2& x, const Vec2& y, const Vec2& z, const Vec2& t) {
  const double xt = det2(x, t), zy = det2(z, y);
  const double sc = x.norm() * y.norm() * z.norm() * t.norm();
  if (std::fabs(xt) * std::fabs(zy) <= 1e-24 * sc) throw Error("classical_cr: quadruple outside the domain (x = t or y = z)");
  return det2(x, y) * det2(z, t) / (xt * zy);
}

double classical_cr(const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z, const BoundaryPoint& t) {
  return classical_cr(x.line, y.line, z.line, t.line);
}

Vec2 affine_line(double x) { return std::isinf(x) ? Vec2(1.0, 0.0) : Vec2(x, 1.0); }

double classical_cr_affine(double x, double y, double z, double t) {
  return classical_cr(affine_line(x), affine_line(y), affine_line(z), affine_line(t));
}

namespace {

double checked_pairing(const Vec& v, const Vec& c, const char* which) {
  const double p = v.dot(c);
  if (!(std::fabs(p) >= pairing_tol * v.norm() * c.norm()))
    throw Error(std::string("curve_cr: pairing ") + which + " degenerated below pairing_tol");
  return p;
}

} // namespace

double pairing_cr(const Vec& xi_x, const Vec& xs_y, const Vec& xi_z, const Vec& xs_t) {
  const double zy = checked_pairing(xi_z, xs_y, "<xi(z), xi*(y)>");
  const double xt = checked_pairing(xi_x, xs_t, "<xi(x), xi*(t)>");
  return xi_x.dot(xs_y) * xi_z.dot(xs_t) / (zy * xt);
}

namespace {

long double checked_pairing(const VecL& v, const VecL& c, const char* which) {
  const long double p = v.dot(c);
  if (!(std::fabs(p) >= pairing_tol * v.norm() * c.norm()))
    throw Error(std::string("curve_cr: pairing ") + which + " degenerated below pairing_tol");
  return p;
}

} // namespace

double curve_cr(const CurvePair& c, const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                const BoundaryPoint& t) {
  if (c.has_extended()) {
    const VecL xx = c.xi_extended(x), yy = c.xistar_extended(y), zz = c.xi_extended(z), tt = c.xistar_extended(t);
    const long double zy = checked_pairing(zz, yy, "<xi(z), xi*(y)>");
    const long double xt = checked_pairing(xx, tt, "<xi(x), xi*(t)>");
    return static_cast<double>(xx.dot(yy) * zz.dot(tt) / (zy * xt));
  }
  return pairing_cr(c.xi(x), c.xistar(y), c.xi(z), c.xistar(t));
}

CrossRatioFn classical_fn() {
  CrossRatioFn f;
  f.eval = [](const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z, const BoundaryPoint& t) {
    return classical_cr(x, y, z, t);
  };
  f.label = "classical";
  return f;
}

CrossRatioFn curve_fn(const CurvePair& c, std::string label) {
  CrossRatioFn f;
  f.eval = [c](const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z, const BoundaryPoint& t) {
    return curve_cr(c, x, y, z, t);
  };
  f.label = std::move(label);
  f.angles_ok = c.accepts_angles();
  return f;
}

CrossRatioFn dual_cr(const CrossRatioFn& b) {
  CrossRatioFn f;
  f.eval = [b](const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z, const BoundaryPoint& t) {
    return b(y, x, t, z);
  };
  f.label = b.label + "*";
  f.angles_ok = b.angles_ok;
  return f;
}

CrossRatioFn shifted_cr(const CrossRatioFn& b, double shift) {
  CrossRatioFn f;
  f.eval = [b, shift](const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                      const BoundaryPoint& t) { return b(x, y, z, t) + shift; };
  f.label = b.label + "+shift";
  f.angles_ok = b.angles_ok;
  return f;
}

CrossRatioFn noisy_cr(const CrossRatioFn& b, double amplitude) {
  CrossRatioFn f;
  f.eval = [b, amplitude](const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                          const BoundaryPoint& t) {
    std::uint64_t h = 0;
    for (double a : {x.angle, y.angle, z.angle, t.angle})
      h = splitmix64(h ^ static_cast<std::uint64_t>(std::llround(a * 1e9)));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
    return b(x, y, z, t) * (1.0 + amplitude * (2.0 * u - 1.0));
  };
  f.label = b.label + "+noise";
  f.angles_ok = b.angles_ok;
  return f;
}

int eps_sign(double x, double y, double z, double t) {
  const double c = classical_cr(line_of_angle(x), line_of_angle(y), line_of_angle(z), line_of_angle(t));
  return c < 0 ? -1 : 1;
}

std::vector<int> draw_tuple(std::mt19937_64& rng, const SampleSet& s, int k, double min_gap) {
  const int m = static_cast<int>(s.size());
  if (m < k) throw Error("draw_tuple: sample set smaller than the tuple size");
  std::uniform_int_distribution<int> pick(0, m - 1);
  std::vector<int> t(k);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      t[i] = pick(rng);
      for (int j = 0; j < i && ok; ++j) ok = t[j] != t[i] && circ_dist(s[t[i]].angle, s[t[j]].angle) >= min_gap;
    }
    if (ok) return t;
  }
  throw Error("draw_tuple: sample set too sparse for the requested gap");
}

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)}); }

double AxiomReport::worst() const {
  return std::max({symmetry.max, zero.max, cocycle_first.max, cocycle_second.max, strict_equal.max});
}

namespace {

// Runs f(i, rng) for i < N into a per-index buffer; parallel when asked.
template <class T, class F>
std::vector<T> tuple_map(long N, std::uint64_t seed, Exec exec, F&& f) {
  std::vector<T> out(N);
  std::vector<std::string> err(N);
#pragma omp parallel for schedule(dynamic, 8) if (exec == Exec::parallel)
  for (long i = 0; i < N; ++i) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    try {
      out[i] = f(i, rng);
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (long i = 0; i < N; ++i)
    if (!err[i].empty()) throw Error(err[i]);
  return out;
}

} // namespace

AxiomReport check_axioms(const CrossRatioFn& b, const SampleSet& s, long N, std::uint64_t seed, double min_gap,
                         Exec exec) {
  if (s.size() < 6) throw Error("check_axioms: need at least 6 sample points");
  struct Row {
    std::vector<int> t;
    double v[5];
    double floor;
  };
  auto rows = tuple_map<Row>(N, seed, exec, [&](long, std::mt19937_64& rng) {
    Row r;
    r.t = draw_tuple(rng, s, 5, min_gap);
    const auto &x = s[r.t[0]], &y = s[r.t[1]], &z = s[r.t[2]], &t = s[r.t[3]], &w = s[r.t[4]];
    const double bxyzt = b(x, y, z, t);
    r.v[0] = rel_diff(bxyzt, b(z, t, x, y));
    const double zx = std::fabs(b(x, x, z, t)), zz = std::fabs(b(x, y, z, z));
    r.v[1] = std::max(zx, zz) / std::max(1.0, std::fabs(bxyzt));
    r.v[2] = rel_diff(bxyzt, b(x, y, z, w) * b(x, w, z, t));
    r.v[3] = rel_diff(bxyzt, b(x, y, w, t) * b(w, y, z, t));
    r.v[4] = std::max(std::fabs(b(x, y, x, t) - 1.0), std::fabs(b(x, y, z, y) - 1.0));
    r.floor = std::fabs(bxyzt - 1.0);
    return r;
  });
  AxiomReport rep;
  rep.tuples = N;
  rep.strictness_floor = std::numeric_limits<double>::infinity();
  Violation* slots[5] = {&rep.symmetry, &rep.zero, &rep.cocycle_first, &rep.cocycle_second, &rep.strict_equal};
  for (const auto& r : rows) {
    for (int k = 0; k < 5; ++k) slots[k]->update(r.v[k], r.t);
    rep.strictness_floor = std::min(rep.strictness_floor, r.floor);
  }
  return rep;
}

double period_at(const CrossRatioFn& b, const GeneratorSet& g, const Word& w, const BoundaryPoint& y) {
  const BoundaryPoint gm = fixed_point(g, w, Sign::repelling);
  const BoundaryPoint gp = fixed_point(g, w, Sign::attracting);
  if (circ_dist(y.angle, gm.angle) < 1e-9 || circ_dist(y.angle, gp.angle) < 1e-9)
    throw Error("period: base point coincides with a fixed point of " + word_name(w));
  const BoundaryPoint gy = act(g, w, y);
  return std::log(std::fabs(b(gm, gy, gp, y)));
}

std::pair<BoundaryPoint, BoundaryPoint> period_base_points(const GeneratorSet& g, const Word& w) {
  const Word c = canonical_word(w);
  if (c != reduce(w)) {
    // For w = c^-1 use c y: the period quadruple of w is then the one of c,
    // rearranged by the symmetry b(x,y,z,t) = b(z,t,x,y).
    const auto [y1, y2] = period_base_points(g, c);
    return {act(g, c, y1), act(g, c, y2)};
  }
  const BoundaryPoint gm = fixed_point(g, w, Sign::repelling);
  const BoundaryPoint gp = fixed_point(g, w, Sign::attracting);
  const Mat2 M = evaluate(g, w);
  struct Cand {
    double score;
    BoundaryPoint p;
  };
  std::vector<Cand> cands;
  for (const Word& v : enumerate_words(g, 4)) {
    if (std::fabs(evaluate(g, v).trace()) <= 2.0 + 1e-9) continue;  // elliptic words in non-discrete groups
    for (Sign sg : {Sign::attracting, Sign::repelling}) {
      BoundaryPoint p = fixed_point(g, v, sg);
      const double img = angle_of_line(M * p.line);
      const double sc = std::min({circ_dist(p.angle, gm.angle), circ_dist(p.angle, gp.angle),
                                  circ_dist(img, gm.angle), circ_dist(img, gp.angle)});
      cands.push_back({sc, std::move(p)});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.score > b.score; });
  const BoundaryPoint& first = cands.front().p;
  for (const auto& c : cands)
    if (circ_dist(c.p.angle, first.angle) > 1e-3) return {first, c.p};
  throw Error("period: no second base point available");
}

PeriodResult period(const CrossRatioFn& b, const GeneratorSet& g, const Word& w) {
  const auto [y1, y2] = period_base_points(g, w);
  return {period_at(b, g, w, y1), period_at(b, g, w, y2)};
}

double triple_ratio_at(const CrossRatioFn& b, const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                       const BoundaryPoint& t) {
  return b(x, y, z, t) * b(z, x, y, t) * b(y, z, x, t);
}

TripleResult triple_ratio(const CrossRatioFn& b, const BoundaryPoint& x, const BoundaryPoint& y,
                          const BoundaryPoint& z, const BoundaryPoint& t, const BoundaryPoint& t2) {
  return {triple_ratio_at(b, x, y, z, t), triple_ratio_at(b, x, y, z, t2)};
}

RelationReport check_relation12(const CrossRatioFn& b, const SampleSet& s, long N, std::uint64_t seed,
                                double min_gap, Exec exec) {
  if (s.size() < 4) throw Error("check_relation12: need at least 4 sample points");
  using Row = std::pair<double, std::vector<int>>;
  auto rows = tuple_map<Row>(N, seed, exec, [&](long, std::mt19937_64& rng) {
    auto t = draw_tuple(rng, s, 4, min_gap);
    const auto &f = s[t[0]], &v = s[t[1]], &e = s[t[2]], &u = s[t[3]];
    return Row{rel_diff(1.0 - b(f, v, e, u), b(u, v, e, f)), t};
  });
  RelationReport r;
  r.tuples = N;
  for (const auto& [v, t] : rows) r.violation.update(v, t);
  return r;
}

RelationReport check_relation13(const CrossRatioFn& b, const SampleSet& s, long N, std::uint64_t seed,
                                double min_gap, Exec exec) {
  if (s.size() < 6) throw Error("check_relation13: need at least 6 sample points");
  using Row = std::pair<double, std::vector<int>>;
  auto rows = tuple_map<Row>(N, seed, exec, [&](long, std::mt19937_64& rng) {
    auto t = draw_tuple(rng, s, 6, min_gap);
    const auto &f = s[t[0]], &v = s[t[1]], &e = s[t[2]], &u = s[t[3]], &g = s[t[4]], &w = s[t[5]];
    const double lhs = (b(f, v, e, u) - 1.0) * (b(g, w, e, u) - 1.0);
    const double rhs = (b(f, w, e, u) - 1.0) * (b(g, v, e, u) - 1.0);
    return Row{rel_diff(lhs, rhs), t};
  });
  RelationReport r;
  r.tuples = N;
  for (const auto& [v, t] : rows) r.violation.update(v, t);
  return r;
}

std::function<double(const BoundaryPoint&)> embed_from_cr(const CrossRatioFn& b, const BoundaryPoint& w,
                                                          const BoundaryPoint& e, const BoundaryPoint& u,
                                                          const SampleSet* precheck) {
  if (circ_dist(w.angle, e.angle) < dedup_tol || circ_dist(w.angle, u.angle) < dedup_tol ||
      circ_dist(e.angle, u.angle) < dedup_tol)
    throw Error("embed_from_cr: w, e, u must be distinct");
  if (precheck) {
    const auto rep = check_relation13(b, *precheck, 200, 0x13, 0.1, Exec::serial);
    if (rep.violation.max > 1e-6) throw Error("embed_from_cr: relation (f,v,e,u)-product identity fails on samples");
  }
  return [b, w, e, u](const BoundaryPoint& x) {
    if (circ_dist(x.angle, u.angle) < dedup_tol) return std::numeric_limits<double>::infinity();
    return b(x, w, e, u);
  };
}

double horocycle_gap(double ai, double hi, double aj, double hj) {
  // Upper half-plane: boundary point cot(a/2), horocycle of Euclidean
  // diameter h / sin^2(a/2). Angles must avoid 0 (the point at infinity).
  const double si = std::sin(ai / 2), sj = std::sin(aj / 2);
  const double xi = std::cos(ai / 2) / si, xj = std::cos(aj / 2) / sj;
  const double Di = hi / (si * si), Dj = hj / (sj * sj);
  const double c = 0.5 * (xi + xj);
  // Second intersection of the geodesic circle with the horocycle at x0.
  auto crossing = [c](double x0, double D) {
    const double k = -2.0 * (x0 - c) / D;
    const double u = D * k / (1.0 + k * k);
    return std::pair<double, double>(x0 + u, k * u);
  };
  const auto [pxi, pyi] = crossing(xi, Di);
  const auto [pxj, pyj] = crossing(xj, Dj);
  const double dx = pxi - pxj, dy = pyi - pyj;
  const double d = std::acosh(1.0 + (dx * dx + dy * dy) / (2.0 * pyi * pyj));
  // Position along the geodesic, measured from x_i.
  const double phi_i = xi > c ? 0.0 : pi;
  auto from_i = [&](double px, double py) { return std::fabs(std::atan2(py, px - c) - phi_i); };
  return from_i(pxi, pyi) < from_i(pxj, pyj) ? d : -d;
}

double otal_cr_hyperbolic(const std::array<double, 4>& a, const std::array<double, 4>& h) {
  for (int i = 0; i < 4; ++i) {
    if (!(h[i] > 0)) throw Error("otal_cr_hyperbolic: horoball parameters must be positive");
    for (int j = 0; j < i; ++j)
      if (circ_dist(a[i], a[j]) < dedup_tol) throw Error("otal_cr_hyperbolic: boundary points must be distinct");
  }
  // Rotate so that no point sits at infinity; rotations preserve the horoball data.
  std::array<double, 4> s = a;
  std::sort(s.begin(), s.end(), [](double x, double y) { return wrap_angle(x) < wrap_angle(y); });
  double best = 0.0, shift = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double lo = wrap_angle(s[i]), hi = i == 3 ? wrap_angle(s[0]) + two_pi : wrap_angle(s[i + 1]);
    if (hi - lo > best) {
      best = hi - lo;
      shift = -0.5 * (lo + hi);
    }
  }
  std::array<double, 4> r;
  for (int i = 0; i < 4; ++i) r[i] = wrap_angle(a[i] + shift);
  auto l = [&](int i, int j) {
    const double g = horocycle_gap(r[i], h[i], r[j], h[j]);
    if (g <= 0) throw Error("otal_cr_hyperbolic: horoballs overlap");
    return g;
  };
  const double O = l(0, 1) - l(1, 2) + l(2, 3) - l(3, 0);
  return eps_sign(a[0], a[1], a[2], a[3]) * std::exp(0.5 * O);
}

BoundaryPoint flow_from_cr(const CrossRatioFn& b, const BoundaryPoint& xm, const BoundaryPoint& x0,
                           const BoundaryPoint& xp, double t, const SampleSet* s) {
  if (circ_dist(xm.angle, x0.angle) < dedup_tol || circ_dist(xp.angle, x0.angle) < dedup_tol ||
      circ_dist(xm.angle, xp.angle) < dedup_tol)
    throw Error("flow_from_cr: x-, x0, x+ must be distinct");
  if (t == 0.0) return x0;
  const double len_ccw = wrap_angle(xp.angle - xm.angle);
  const bool ccw = wrap_angle(x0.angle - xm.angle) < len_ccw;
  const double len = ccw ? len_ccw : two_pi - len_ccw;
  auto arc_pos = [&](double ang) { return (ccw ? wrap_angle(ang - xm.angle) : wrap_angle(xm.angle - ang)) / len; };
  auto F = [&](const BoundaryPoint& p) { return std::log(std::fabs(b(xp, x0, xm, p))); };

  if (s == nullptr) {
    if (!b.angles_ok) throw Error("flow_from_cr: this cross ratio needs a sample set");
    double lo = 0.0, hi = 1.0;
    auto at = [&](double u) { return point_at_angle(xm.angle + (ccw ? 1.0 : -1.0) * u * len); };
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      (F(at(mid)) < t ? lo : hi) = mid;
    }
    return at(0.5 * (lo + hi));
  }
  // Sampled arc: walk the samples in arc order and pick the closest value.
  std::vector<std::pair<double, int>> arc;
  for (std::size_t i = 0; i < s->size(); ++i) {
    const double u = arc_pos((*s)[i].angle);
    if (u > 1e-12 && u < 1.0 - 1e-12) arc.emplace_back(u, static_cast<int>(i));
  }
  std::sort(arc.begin(), arc.end());
  if (arc.size() < 2) throw Error("flow_from_cr: root not bracketed within sample resolution");
  std::size_t lo = 0, hi = arc.size() - 1;
  if (F((*s)[arc[lo].second]) > t || F((*s)[arc[hi].second]) < t)
    throw Error("flow_from_cr: root not bracketed within sample resolution");
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (F((*s)[arc[mid].second]) < t ? lo : hi) = mid;
  }
  const auto& pl = (*s)[arc[lo].second];
  const auto& ph = (*s)[arc[hi].second];
  return std::fabs(F(pl) - t) <= std::fabs(F(ph) - t) ? pl : ph;
}

Violation check_invariance(const CrossRatioFn& b, const GeneratorSet& g, const SampleSet& s, long N,
                           std::uint64_t seed, double min_gap, Exec exec) {
  using Row = std::pair<double, std::vector<int>>;
  auto rows = tuple_map<Row>(N, seed, exec, [&](long, std::mt19937_64& rng) {
    auto t = draw_tuple(rng, s, 4, min_gap);
    const auto &x = s[t[0]], &y = s[t[1]], &z = s[t[2]], &w = s[t[3]];
    const double base = b(x, y, z, w);
    double worst = 0.0;
    for (int k = 1; k <= g.rank; ++k) {
      for (int sgn : {1, -1}) {
        const Word h{sgn * k};
        worst = std::max(worst, rel_diff(base, b(act(g, h, x), act(g, h, y), act(g, h, z), act(g, h, w))));
      }
    }
    return Row{worst, t};
  });
  Violation v;
  for (const auto& [x, t] : rows) v.update(x, t);
  return v;
}

} // namespace xr
