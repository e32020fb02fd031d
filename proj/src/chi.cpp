#include "xr/chi.hpp"

#include <limits>

namespace xr {

namespace {

bool same_point(const BoundaryPoint& a, const BoundaryPoint& b) { return circ_dist(a.angle, b.angle) <= dedup_tol; }

} // namespace

void check_admissible(const ChiTuple& t) {
  const int p = t.p();
  if (p < 1 || static_cast<int>(t.u.size()) != p + 1) throw Error("chi: tuple needs p+1 points in e and in u");
  for (int i = 1; i <= p; ++i) {
    if (same_point(t.e[i], t.u[0])) throw Error("chi: inadmissible tuple, e_i coincides with u0");
    if (same_point(t.u[i], t.e[0])) throw Error("chi: inadmissible tuple, u_i coincides with e0");
    for (int j = 1; j < i; ++j) {
      if (same_point(t.e[i], t.e[j])) throw Error("chi: inadmissible tuple, repeated e_i");
      if (same_point(t.u[i], t.u[j])) throw Error("chi: inadmissible tuple, repeated u_i");
    }
  }
}

Mat chi_matrix(const CrossRatioFn& b, const ChiTuple& t) {
  check_admissible(t);
  const int p = t.p();
  Mat B(p, p);
  for (int i = 1; i <= p; ++i)
    for (int j = 1; j <= p; ++j) B(i - 1, j - 1) = b(t.e[i], t.u[j], t.e[0], t.u[0]);
  return B;
}

double equilibrated_det(Mat B, int sweeps) {
  for (int k = 0; k < sweeps; ++k) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
      const double r = B.row(i).norm();
      if (r > 0) B.row(i) /= r;
    }
    double drift = 0.0;
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      const double c = B.col(j).norm();
      if (c > 0) B.col(j) /= c;
      drift = std::max(drift, std::fabs(c - 1.0));
    }
    if (drift < 1e-15) break;
  }
  return std::fabs(B.partialPivLu().determinant());
}

ChiValue chi_det(const CrossRatioFn& b, const ChiTuple& t) {
  const Mat B = chi_matrix(b, t);
  ChiValue v;
  v.value = B.partialPivLu().determinant();
  v.scale = 1.0;
  for (Eigen::Index i = 0; i < B.rows(); ++i) v.scale *= B.row(i).norm();
  v.balanced = equilibrated_det(B);
  return v;
}

ChiTuple draw_chi_tuple(std::mt19937_64& rng, const SampleSet& s, int p, TupleDesign design, double min_gap) {
  const int m = 2 * p + 2;
  if (static_cast<int>(s.size()) < 2 * m) throw Error("chi: sample set too small for the tuple size");
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> angles(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) angles[i] = s[i].angle;
  auto snap = [&](double a) {
    a = wrap_angle(a);
    const auto it = std::lower_bound(angles.begin(), angles.end(), a);
    const std::size_t hi = it == angles.end() ? 0 : static_cast<std::size_t>(it - angles.begin());
    const std::size_t lo = hi == 0 ? angles.size() - 1 : hi - 1;
    return circ_dist(angles[lo], a) <= circ_dist(angles[hi], a) ? lo : hi;
  };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double base = two_pi * U(rng);
    std::vector<std::size_t> slot(m);
    for (int k = 0; k < m; ++k) slot[k] = snap(base + two_pi * (k + 0.1 + 0.8 * U(rng)) / m);
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int j = 0; j < i && ok; ++j) ok = slot[i] != slot[j] && circ_dist(angles[slot[i]], angles[slot[j]]) >= min_gap;
    if (!ok) continue;
    std::vector<std::size_t> ev, uv;
    if (design == TupleDesign::interleaved) {
      for (int k = 0; k < m; ++k) (k % 2 == 0 ? ev : uv).push_back(slot[k]);
    } else {
      std::shuffle(slot.begin(), slot.end(), rng);
      ev.assign(slot.begin(), slot.begin() + p + 1);
      uv.assign(slot.begin() + p + 1, slot.end());
    }
    // Which slot serves as base point is random too.
    std::shuffle(ev.begin(), ev.end(), rng);
    std::shuffle(uv.begin(), uv.end(), rng);
    ChiTuple t;
    for (auto i : ev) t.e.push_back(s[i]);
    for (auto i : uv) t.u.push_back(s[i]);
    return t;
  }
  throw Error("chi: could not draw a tuple with the requested gap");
}

bool RankReport::pass() const {
  for (double v : min_nonzero)
    if (!(v > nonzero_tol)) return false;
  return max_zero < zero_tol;
}

RankReport hitchin_rank_test(const CrossRatioFn& b, int n, const SampleSet& s, long N, std::uint64_t seed,
                             TupleDesign design, Exec exec) {
  if (static_cast<int>(s.size()) < 2 * n + 4) throw Error("hitchin_rank_test: sample set too small");
  RankReport r;
  r.n = n;
  r.tuples = N;
  r.min_nonzero.assign(n, std::numeric_limits<double>::infinity());
  r.min_nonzero_raw.assign(n, std::numeric_limits<double>::infinity());
  for (int p = 1; p <= n + 1; ++p) {
    std::vector<ChiValue> vals(N);
    std::vector<std::string> err(N);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
    for (long i = 0; i < N; ++i) {
      std::mt19937_64 rng(stream_seed(seed ^ (0x9e37ULL * p), static_cast<std::uint64_t>(i)));
      try {
        vals[i] = chi_det(b, draw_chi_tuple(rng, s, p, design));
      } catch (const std::exception& e) {
        err[i] = e.what();
      }
    }
    for (long i = 0; i < N; ++i) {
      if (!err[i].empty()) throw Error(err[i]);
      const double raw = std::fabs(vals[i].value) / vals[i].scale;
      if (p <= n) {
        r.min_nonzero[p - 1] = std::min(r.min_nonzero[p - 1], vals[i].balanced);
        r.min_nonzero_raw[p - 1] = std::min(r.min_nonzero_raw[p - 1], raw);
      } else {
        r.max_zero = std::max(r.max_zero, vals[i].balanced);
        r.max_zero_raw = std::max(r.max_zero_raw, raw);
      }
    }
  }
  return r;
}

BaseChange basepoint_independence(const CrossRatioFn& b, const ChiTuple& t, const BoundaryPoint& f0,
                                  const BoundaryPoint& v0) {
  ChiTuple t2 = t;
  t2.e[0] = f0;
  t2.u[0] = v0;
  check_admissible(t);
  check_admissible(t2);
  const int p = t.p();
  double factor = 1.0;
  for (int j = 1; j <= p; ++j) factor *= b(f0, t.u[j], t.e[0], v0);
  for (int i = 1; i <= p; ++i) factor *= b(t.e[i], v0, t.e[0], t.u[0]);
  BaseChange r;
  r.lhs = chi_matrix(b, t).partialPivLu().determinant();
  r.factor = factor;
  r.rhs = factor * chi_matrix(b, t2).partialPivLu().determinant();
  r.rel = std::fabs(r.lhs - r.rhs) / std::max({std::fabs(r.lhs), std::fabs(r.rhs), 1e-300});
  if (r.lhs == 0.0 && r.rhs == 0.0) r.rel = 0.0;
  return r;
}

SampleSet exclude_points(const SampleSet& s, const std::vector<BoundaryPoint>& pts) {
  SampleSet out;
  for (const auto& q : s.points) {
    bool hit = false;
    for (const auto& p : pts) hit = hit || same_point(p, q);
    if (!hit) out.points.push_back(q);
  }
  return out;
}

CurvePair reconstruct_curves(const CrossRatioFn& b, int n, const ChiTuple& t) {
  if (t.p() != n) throw Error("reconstruct_curves: tuple must have p = n");
  const Mat B = chi_matrix(b, t);
  if (equilibrated_det(B) < 1e-6) throw Error("reconstruct_curves: rank condition fails on this tuple");
  const Mat Binv = B.inverse();
  auto guarded = [](const char* what, auto&& f) {
    try {
      return f();
    } catch (const Error&) {
      throw Error(std::string("reconstruct_curves: coordinate underflow near ") + what);
    }
  };
  auto xi = [b, t, n, guarded](const BoundaryPoint& f) {
    return guarded("u0", [&] {
      Vec v(n);
      for (int j = 1; j <= n; ++j) v(j - 1) = b(f, t.u[j], t.e[0], t.u[0]);
      return normalize_rep(v);
    });
  };
  auto xistar = [b, t, n, Binv, guarded](const BoundaryPoint& v) {
    return guarded("e0", [&] {
      Vec c(n);
      for (int i = 1; i <= n; ++i) c(i - 1) = b(t.e[i], v, t.e[0], t.u[0]);
      return normalize_rep(Binv * c);
    });
  };
  return CurvePair::custom(n, xi, xistar);
}

double cross_ratio_residual(const CrossRatioFn& b, const CurvePair& c, const SampleSet& s, long N,
                            std::uint64_t seed, Exec exec) {
  std::vector<double> v(N);
  std::vector<std::string> err(N);
#pragma omp parallel for schedule(dynamic, 8) if (exec == Exec::parallel)
  for (long i = 0; i < N; ++i) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    try {
      const auto t = draw_tuple(rng, s, 4, 0.1);
      const auto &x = s[t[0]], &y = s[t[1]], &z = s[t[2]], &w = s[t[3]];
      v[i] = rel_diff(b(x, y, z, w), curve_cr(c, x, y, z, w));
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  double worst = 0.0;
  for (long i = 0; i < N; ++i) {
    if (!err[i].empty()) throw Error(err[i]);
    worst = std::max(worst, v[i]);
  }
  return worst;
}

double hyperconvexity_min(const CurvePair& c, const SampleSet& s, long N, std::uint64_t seed) {
  const int n = c.n();
  double worst = std::numeric_limits<double>::infinity();
  for (long i = 0; i < N; ++i) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    const auto t = draw_tuple(rng, s, n, 0.1);
    Mat M(n, n);
    for (int k = 0; k < n; ++k) M.col(k) = c.xi(s[t[k]]).normalized();
    worst = std::min(worst, std::fabs(M.determinant()));
  }
  return worst;
}

Match projective_match(const CurvePair& a, const CurvePair& c, const SampleSet& pts) {
  const int n = a.n();
  if (c.n() != n) throw Error("projective_match: dimension mismatch");
  const int m = static_cast<int>(pts.size());
  if (m < n + 2) throw Error("projective_match: need at least n+2 points");
  // n+1 evenly spread points x0..xn.
  std::vector<int> idx(n + 1);
  for (int k = 0; k <= n; ++k) idx[k] = static_cast<int>(static_cast<long>(k) * m / (n + 1));
  // Columns u_i in xi*(x_i) with <z0, u_i> = 1, z0 in xi(x0); same for the other pair.
  auto basis = [&](const CurvePair& cp) {
    const Vec z0 = cp.xi(pts[idx[0]]);
    Mat U(n, n);
    for (int i = 1; i <= n; ++i) {
      const Vec w = cp.xistar(pts[idx[i]]);
      const double d = z0.dot(w);
      if (std::fabs(d) < pairing_tol * z0.norm() * w.norm()) throw Error("projective_match: dual basis singular");
      U.col(i - 1) = w / d;
    }
    Eigen::FullPivLU<Mat> lu(U);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) throw Error("projective_match: dual basis singular");
    return U;
  };
  const Mat U = basis(a), V = basis(c);
  // The dual basis of U is the columns of U^-T; A sends V's dual basis to U's.
  Match r;
  r.A = U.transpose().inverse() * V.transpose();
  r.A /= r.A.norm();
  r.residual = 0.0;
  for (int i = 0; i < m; ++i) {
    Vec ya, yc;
    try {
      ya = a.xi(pts[i]);
      yc = c.xi(pts[i]);
    } catch (const Error&) {
      continue;  // a curve undefined here, e.g. a reconstruction base point
    }
    r.residual = std::max(r.residual, line_angle(r.A * yc, ya));
  }
  return r;
}

} // namespace xr
