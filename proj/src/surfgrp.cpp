#include "xr/surfgrp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace xr {

namespace {

Mat2 rot_half(double phi) {
  const double c = std::cos(phi / 2), s = std::sin(phi / 2);
  Mat2 k;
  k << c, s, -s, c;
  return k;
}

Mat2 boost(double d) {
  Mat2 a = Mat2::Zero();
  a(0, 0) = std::exp(d / 2);
  a(1, 1) = std::exp(-d / 2);
  return a;
}

Mat2 inv2(const Mat2& m) {
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r / m.determinant();
}

Mat2 comm(const Mat2& a, const Mat2& b) { return a * b * inv2(a) * inv2(b); }

// Side-pairing of the regular octagon with vertex angle pi/4: carries side j
// onto side i, sides centred at angles k pi/4 in the disc model.
Mat2 side_pairing(int i, int j) {
  const double dm = std::acosh(1.0 + std::sqrt(2.0));
  const double ti = i * pi / 4, tj = j * pi / 4;
  return rot_half(ti) * boost(2 * dm) * rot_half(-ti) * rot_half(ti + pi - tj);
}

int letter_key(int l) { return 2 * (std::abs(l) - 1) + (l < 0 ? 1 : 0); }

} // namespace

Word canonical_word(const Word& w) {
  const Word r = reduce(w);
  const Word ri = inverse(r);
  const bool inv_first = std::lexicographical_compare(ri.begin(), ri.end(), r.begin(), r.end(), [](int x, int y) {
    return letter_key(x) < letter_key(y);
  });
  return inv_first ? ri : r;
}

Word surface_relator() { return {1, 2, -1, -2, 3, 4, -3, -4}; }

double relator_residual(const GeneratorSet& g) {
  if (g.rank != 4) throw Error("relator_residual: genus-2 relator needs four generators");
  const Mat2 R = comm(g.mats[0], g.mats[1]) * comm(g.mats[2], g.mats[3]);
  return std::min((R - Mat2::Identity()).norm(), (R + Mat2::Identity()).norm());
}

HyperbolicSplit hyperbolic_split(const Mat2& M) {
  const double a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
  const double tr = a + d;
  const double h = (a - d) / 2;
  const double disc = h * h + b * c;
  if (!(disc > 0) || std::fabs(tr) <= 2.0 * std::sqrt(std::fabs(M.determinant())) * (1.0 + 1e-12))
    throw Error("hyperbolic_split: matrix is not hyperbolic");
  const double s = std::sqrt(disc);
  // Eigenvector of (a+d)/2 + sigma*s, avoiding cancellation.
  auto eigvec = [&](double sigma) -> Vec2 {
    Vec2 v1(h + sigma * s, c), v2(b, sigma * s - h);
    return (v1.norm() >= v2.norm() ? v1 : v2).normalized();
  };
  const double sg = tr > 0 ? 1.0 : -1.0;
  HyperbolicSplit out;
  out.lambda_max = tr / 2 + sg * s;
  out.lambda_min = M.determinant() / out.lambda_max;
  out.attracting = eigvec(sg);
  // The repelling line is the attracting line of the inverse.
  const Mat2 Mi = inv2(M);
  const double hi = (Mi(0, 0) - Mi(1, 1)) / 2;
  const double si = std::sqrt(hi * hi + Mi(0, 1) * Mi(1, 0));
  const double sgi = (Mi(0, 0) + Mi(1, 1)) > 0 ? 1.0 : -1.0;
  Vec2 w1(hi + sgi * si, Mi(1, 0)), w2(Mi(0, 1), sgi * si - hi);
  out.repelling = (w1.norm() >= w2.norm() ? w1 : w2).normalized();
  return out;
}

GeneratorSet make_generator_set(std::vector<Mat2> mats, GroupKind kind) {
  GeneratorSet g;
  g.rank = static_cast<int>(mats.size());
  g.kind = kind;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (std::fabs(mats[i].determinant() - 1.0) > 1e-12)
      throw Error("generator " + std::to_string(i + 1) + " has determinant != 1");
  }
  g.mats = std::move(mats);
  if (kind == GroupKind::cocompact_genus2) {
    if (g.rank != 4) throw Error("genus-2 presentation needs four generators");
    const double r = relator_residual(g);
    if (r > 1e-8) throw Error("surface relator residual " + std::to_string(r) + " exceeds 1e-8");
  } else {
    for (int i = 0; i < g.rank; ++i)
      if (std::fabs(g.mats[i].trace()) <= 2.0 + 1e-6)
        throw Error("generator " + std::to_string(i + 1) + " is not hyperbolic");
  }
  return g;
}

GeneratorSet octagon_fuchsian() {
  return make_generator_set({side_pairing(0, 2), side_pairing(3, 1), side_pairing(4, 6), side_pairing(7, 5)},
                            GroupKind::cocompact_genus2);
}

GeneratorSet schottky(double t1, double t2, double separation, double axis1, double axis2) {
  if (t1 <= 2.0 + 1e-6 || t2 <= 2.0 + 1e-6) throw Error("schottky: not hyperbolic");
  const double gap = std::min({circ_dist(axis1, axis2), circ_dist(axis1, axis2 + pi),
                               circ_dist(axis1 + pi, axis2), circ_dist(axis1 + pi, axis2 + pi)});
  if (gap < separation) throw Error("schottky: separation violated");
  auto gen = [](double t, double axis) {
    const double lam = (t + std::sqrt(t * t - 4)) / 2;
    // Rotating R^2 by axis/2 moves circle coordinates by axis.
    const Mat2 r = rot_half(-axis);
    return Mat2(r * boost(2 * std::log(lam)) * inv2(r));
  };
  return make_generator_set({gen(t1, axis1), gen(t2, axis2)}, GroupKind::schottky_free);
}

Word reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int l : w) {
    if (l == 0) throw Error("word letter 0 is invalid");
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& l : out) l = -l;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce(out);
}

Word conjugate(const Word& g, const Word& w) { return concat(concat(g, w), inverse(g)); }

bool is_cyclically_reduced(const Word& w) {
  if (w.empty()) return false;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == -w[i + 1]) return false;
  return w.size() == 1 || w.front() != -w.back();
}

std::string word_name(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (int l : w) s += static_cast<char>((l > 0 ? 'a' : 'A') + std::abs(l) - 1);
  return s;
}

std::vector<Word> enumerate_words(const GeneratorSet& g, int L) {
  std::vector<int> letters;
  for (int i = 1; i <= g.rank; ++i) {
    letters.push_back(i);
    letters.push_back(-i);
  }
  std::sort(letters.begin(), letters.end(), [](int a, int b) { return letter_key(a) < letter_key(b); });
  std::vector<Word> out;
  std::vector<Word> layer = {Word{}};
  for (int len = 1; len <= L; ++len) {
    std::vector<Word> next;
    for (const Word& w : layer)
      for (int l : letters) {
        if (!w.empty() && w.back() == -l) continue;
        Word v = w;
        v.push_back(l);
        next.push_back(std::move(v));
      }
    for (const Word& w : next)
      if (is_cyclically_reduced(w)) out.push_back(w);
    layer = std::move(next);
  }
  return out;
}

Mat2 evaluate(const GeneratorSet& g, const Word& w) {
  Mat2 m = Mat2::Identity();
  int count = 0;
  for (int l : w) {
    const int k = std::abs(l) - 1;
    if (k >= g.rank) throw Error("word letter out of range");
    m = m * (l > 0 ? g.mats[k] : inv2(g.mats[k]));
    if (++count % 8 == 0) m /= std::sqrt(std::fabs(m.determinant()));
  }
  return m;
}

Mat evaluate(const Word& w, const std::vector<Mat>& rep, const std::vector<Mat>& rep_inv) {
  if (rep.empty()) throw Error("evaluate: empty representation");
  const int n = static_cast<int>(rep[0].rows());
  Mat m = Mat::Identity(n, n);
  int count = 0;
  for (int l : w) {
    const std::size_t k = static_cast<std::size_t>(std::abs(l) - 1);
    if (k >= rep.size()) throw Error("word letter out of range");
    m = m * (l > 0 ? rep[k] : rep_inv[k]);
    if (++count % 8 == 0) m /= real_root(m.determinant(), n);
  }
  return m;
}

MatL evaluate_extended(const Word& w, const std::vector<Mat>& rep, const std::vector<MatL>& rep_inv) {
  if (rep.empty()) throw Error("evaluate: empty representation");
  if (rep_inv.size() != rep.size()) throw Error("evaluate: extended inverses missing");
  const int n = static_cast<int>(rep[0].rows());
  MatL m = MatL::Identity(n, n);
  int count = 0;
  for (int l : w) {
    const std::size_t k = static_cast<std::size_t>(std::abs(l) - 1);
    if (k >= rep.size()) throw Error("word letter out of range");
    m = l > 0 ? MatL(m * rep[k].cast<long double>()) : MatL(m * rep_inv[k]);
    if (++count % 8 == 0) {
      const long double d = m.determinant();
      m /= (d < 0 ? -1.0L : 1.0L) * std::pow(std::fabs(d), 1.0L / n);
    }
  }
  return m;
}

Mat evaluate(const GeneratorSet& g, const Word& w, const std::vector<Mat>& rep) {
  if (static_cast<int>(rep.size()) != g.rank) throw Error("evaluate: one matrix per generator required");
  std::vector<Mat> inv;
  for (const Mat& m : rep) {
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw Error("evaluate: singular generator");
    inv.push_back(lu.inverse());
  }
  return evaluate(w, rep, inv);
}

namespace {

void attach_extended(Representation& r) {
  r.inv_ext.clear();
  for (const Mat& m : r.gens) r.inv_ext.push_back(MatL(m.cast<long double>()).fullPivLu().inverse());
}

} // namespace

Representation n_fuchsian(const GeneratorSet& g, int n) {
  Representation r;
  r.base = g;
  r.n = n;
  for (const Mat2& m : g.mats) {
    r.gens.push_back(sym_power_rep(n, m));
    r.inv_gens.push_back(sym_power_rep(n, inv2(m)));
  }
  attach_extended(r);
  return r;
}

Representation user_representation(const GeneratorSet& g, std::vector<Mat> gens) {
  if (static_cast<int>(gens.size()) != g.rank) throw Error("representation: one matrix per generator required");
  Representation r;
  r.base = g;
  r.n = static_cast<int>(gens[0].rows());
  for (Mat& m : gens) {
    if (m.rows() != r.n || m.cols() != r.n) throw Error("representation: inconsistent matrix sizes");
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw Error("representation: singular generator");
    const double d = m.determinant();
    if (std::fabs(d - 1.0) > 1e-9) throw Error("representation: generator determinant != 1");
    r.inv_gens.push_back(lu.inverse());
    r.gens.push_back(std::move(m));
  }
  attach_extended(r);
  if (g.kind == GroupKind::cocompact_genus2) {
    const Word rel = surface_relator();
    const Mat R = r.eval(rel);
    const Mat I = Mat::Identity(r.n, r.n);
    const double res = std::min((R - I).norm(), (R + I).norm());
    // Rounding the entries already moves the relator by about eps times the
    // generator conditioning, which grows quickly with n.
    double cond = 1.0;
    for (std::size_t i = 0; i < r.gens.size(); ++i) cond = std::max(cond, r.gens[i].norm() * r.inv_gens[i].norm());
    const double tol = 1e-8 * cond;
    if (res > tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "representation: relator residual %.3g exceeds %.3g", res, tol);
      throw Error(buf);
    }
  }
  return r;
}

Representation contragredient(const Representation& r) {
  Representation c = r;
  for (std::size_t i = 0; i < r.gens.size(); ++i) {
    c.gens[i] = r.inv_gens[i].transpose();
    c.inv_gens[i] = r.gens[i].transpose();
  }
  attach_extended(c);
  return c;
}

Vec2 line_of_angle(double a) { return Vec2(std::cos(a / 2), std::sin(a / 2)); }

double angle_of_line(const Vec2& v) { return wrap_angle(2.0 * std::atan2(v(1), v(0))); }

BoundaryPoint point_at_angle(double a) {
  BoundaryPoint p;
  p.angle = wrap_angle(a);
  p.line = line_of_angle(p.angle);
  return p;
}

BoundaryPoint fixed_point(const GeneratorSet& g, const Word& w, Sign s) {
  Word r = reduce(w);
  if (r.empty()) throw Error("fixed_point: trivial word");
  // w and w^-1 share one canonical representative, so their data is bitwise equal.
  if (canonical_word(r) != r) {
    r = inverse(r);
    s = s == Sign::attracting ? Sign::repelling : Sign::attracting;
  }
  HyperbolicSplit hs;
  try {
    hs = hyperbolic_split(evaluate(g, r));
  } catch (const Error&) {
    throw Error("word " + word_name(r) + " is not hyperbolic");
  }
  BoundaryPoint p;
  p.word = r;
  p.sign = s;
  const Vec2 v = s == Sign::attracting ? hs.attracting : hs.repelling;
  p.angle = angle_of_line(v);
  p.line = line_of_angle(p.angle);
  p.eigenvalue = s == Sign::attracting ? hs.lambda_max : hs.lambda_min;
  return p;
}

BoundaryPoint act(const GeneratorSet& g, const Word& h, const BoundaryPoint& y) {
  const Vec2 img = evaluate(g, h) * y.line;
  if (y.word.empty()) return point_at_angle(angle_of_line(img));
  BoundaryPoint p = fixed_point(g, y.word, y.sign);
  p.prefix = reduce(concat(h, y.prefix));
  if (!p.prefix.empty()) {
    p.angle = angle_of_line(evaluate(g, p.prefix) * p.line);
    p.line = line_of_angle(p.angle);
  }
  return p;
}

SampleSet dedup(std::vector<BoundaryPoint> pts) {
  std::stable_sort(pts.begin(), pts.end(),
                   [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.angle < b.angle; });
  std::vector<BoundaryPoint> out;
  for (auto& p : pts) {
    if (!out.empty() && p.angle - out.back().angle <= dedup_tol) {
      if (p.word.size() < out.back().word.size()) out.back() = std::move(p);
      continue;
    }
    out.push_back(std::move(p));
  }
  if (out.size() > 1 && out.front().angle + two_pi - out.back().angle <= dedup_tol) {
    if (out.back().word.size() < out.front().word.size()) out.front() = out.back();
    out.pop_back();
  }
  SampleSet s;
  s.points = std::move(out);
  return s;
}

SampleSet sample_boundary(const GeneratorSet& g, int L, Exec exec) {
  const auto words = enumerate_words(g, L);
  const long nw = static_cast<long>(words.size());
  std::vector<BoundaryPoint> pts(2 * words.size());
  std::vector<int> bad(words.size(), 0);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long i = 0; i < nw; ++i) {
    try {
      pts[2 * i] = fixed_point(g, words[i], Sign::attracting);
      pts[2 * i + 1] = fixed_point(g, words[i], Sign::repelling);
    } catch (const Error&) {
      bad[i] = 1;
    }
  }
  for (long i = 0; i < nw; ++i)
    if (bad[i]) throw Error("word " + word_name(words[i]) + " is elliptic or parabolic");
  return dedup(std::move(pts));
}

void write_csv(std::ostream& os, const SampleSet& s) {
  os << "word,sign,angle,eigenvalue\n";
  os.precision(17);
  for (const auto& p : s.points)
    os << word_name(p.word) << ',' << (p.sign == Sign::attracting ? "attracting" : "repelling") << ',' << p.angle
       << ',' << p.eigenvalue << '\n';
}

} // namespace xr
