#include "xr/projlin.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xr {

Vec normalize_rep(const Vec& v) {
  const double nrm = v.norm();
  if (!(nrm > 1e-300) || !std::isfinite(nrm)) throw Error("zero or non-finite representative");
  Vec u = v / nrm;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::fabs(u(i)) > 1e-12) {
      if (u(i) < 0) u = -u;
      break;
    }
  }
  return u;
}

ProjPoint::ProjPoint(const Vec& v) : rep(normalize_rep(v)) {}

ProjHyperplane::ProjHyperplane(const Vec& c) : covector(normalize_rep(c)) {}

double line_angle(const Vec& a, const Vec& b) {
  const double c = std::fabs(a.dot(b)) / (a.norm() * b.norm());
  // sin via the rejection is accurate for nearly parallel lines.
  const Vec rej = b / b.norm() - (a / a.norm()) * (a.dot(b) / (a.norm() * b.norm()));
  return std::atan2(rej.norm(), c);
}

bool ProjPoint::same(const ProjPoint& o, double tol) const {
  return dim() == o.dim() && line_angle(rep, o.rep) < tol;
}

bool ProjHyperplane::same(const ProjHyperplane& o, double tol) const {
  return dim() == o.dim() && line_angle(covector, o.covector) < tol;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double real_root(double x, int n) {
  if (x >= 0) return std::pow(x, 1.0 / n);
  if (n % 2 == 0) throw Error("even root of a negative number");
  return -std::pow(-x, 1.0 / n);
}

Vec veronese(int n, const Vec2& p) {
  if (n < 2) throw Error("veronese: n must be at least 2");
  if (p.norm() == 0.0) throw Error("veronese: zero input vector");
  Vec v(n);
  for (int k = 0; k < n; ++k) v(k) = std::pow(p(0), n - 1 - k) * std::pow(p(1), k);
  return v;
}

ProjPoint veronese(int n, const ProjPoint& p) {
  if (p.dim() != 2) throw Error("veronese: input must lie in RP^1");
  return ProjPoint(veronese(n, Vec2(p.rep(0), p.rep(1))));
}

Vec veronese_dual(int n, const Vec2& q) {
  if (q.norm() == 0.0) throw Error("veronese_dual: zero input vector");
  const double a = q(0), b = q(1);
  Vec c(n);
  for (int k = 0; k < n; ++k) c(k) = binomial(n - 1, k) * std::pow(-b, n - 1 - k) * std::pow(a, k);
  return c;
}

namespace {

// Coefficients of (u0 + u1 s)^m (w0 + w1 s)^k as a polynomial in s.
std::vector<double> binary_product(double u0, double u1, int m, double w0, double w1, int k) {
  std::vector<double> out(m + k + 1, 0.0);
  for (int i = 0; i <= m; ++i) {
    const double ci = binomial(m, i) * std::pow(u0, m - i) * std::pow(u1, i);
    for (int l = 0; l <= k; ++l) out[i + l] += ci * binomial(k, l) * std::pow(w0, k - l) * std::pow(w1, l);
  }
  return out;
}

} // namespace

Mat sym_power_rep(int n, const Mat2& A, double det_tol) {
  if (n < 2) throw Error("sym_power_rep: n must be at least 2");
  const double d = A.determinant();
  if (std::fabs(d - 1.0) > det_tol) throw Error("sym_power_rep: determinant differs from 1");
  // Exact unit determinant first; the symmetric power then has det 1 too.
  const Mat2 B = A / std::sqrt(d);
  Mat S(n, n);
  // Row j expands (a x + b y)^(n-1-j) (c x + d y)^j in the basis x^(n-1-k) y^k.
  for (int j = 0; j < n; ++j) {
    const auto coeff = binary_product(B(0, 0), B(0, 1), n - 1 - j, B(1, 0), B(1, 1), j);
    for (int k = 0; k < n; ++k) S(j, k) = coeff[k];
  }
  return S;
}

EigenSplit eigen_split(const Mat& M, double gap_tol) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n || n == 0) throw Error("eigen_split: matrix must be square");
  Eigen::FullPivLU<Mat> lu(M);
  if (!lu.isInvertible()) throw Error("eigen_split: singular matrix");
  Eigen::EigenSolver<Mat> es(M);
  if (es.info() != Eigen::Success) throw Error("eigen_split: eigen solver failed");
  const auto ev = es.eigenvalues();
  const double rad = ev.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    if (std::fabs(ev(i).imag()) > 1e-9 * rad) throw Error("eigen_split: complex spectrum");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return std::fabs(ev(a).real()) > std::fabs(ev(b).real()); });
  EigenSplit s;
  s.source = M;
  s.values.resize(n);
  s.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    s.values(i) = ev(idx[i]).real();
    s.vectors.col(i) = normalize_rep(es.eigenvectors().col(idx[i]).real());
  }
  for (int i = 0; i + 1 < n; ++i)
    if (std::fabs(s.values(i)) < (1.0 + gap_tol) * std::fabs(s.values(i + 1)))
      throw Error("eigen_split: eigenvalue moduli not separated");
  const double mn = M.norm();
  for (int i = 0; i < n; ++i) {
    const double res = (M * s.vectors.col(i) - s.values(i) * s.vectors.col(i)).norm();
    if (res > 1e-10 * mn) throw Error("eigen_split: inaccurate eigenvector");
  }
  return s;
}

Mat orthonormal_basis(const Mat& M) {
  Eigen::HouseholderQR<Mat> qr(M);
  Mat Q = qr.householderQ() * Mat::Identity(M.rows(), M.cols());
  return Q;
}

Flag flag_from_eigen(const EigenSplit& s) {
  const int n = static_cast<int>(s.values.size());
  Flag f;
  for (int p = 1; p < n; ++p) f.blocks.push_back(orthonormal_basis(s.vectors.leftCols(p)));
  return f;
}

Mat dominant_subspace(const Mat& M, int p, int max_iter) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(M.rows());
  if (p < 1 || p > n) throw Error("dominant_subspace: bad dimension");
  const MatL A = M.cast<long double>() / static_cast<long double>(M.norm());
  MatL Q(n, p);
  std::uint64_t st = 0x1234567ULL;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) {
      st = splitmix64(st);
      Q(i, j) = static_cast<long double>(st >> 11) / 9007199254740992.0L - 0.5L;
    }
  auto orth = [n, p](const MatL& X) {
    Eigen::HouseholderQR<MatL> qr(X);
    return MatL(qr.householderQ() * MatL::Identity(n, p));
  };
  Q = orth(Q);
  // Stop at rounding level, or once the drift stalls below double precision.
  long double prev = 1.0L;
  for (int it = 0; it < max_iter; ++it) {
    const MatL Qn = orth(A * Q);
    const long double drift = (Qn - Q * (Q.transpose() * Qn)).norm();
    Q = Qn;
    if (drift < 1e-17L || (drift < 1e-15L && drift >= 0.5L * prev)) return Q.cast<double>();
    prev = drift;
  }
  throw Error("dominant_subspace: no eigenvalue gap after p dominant values");
}

Flag attracting_flag(const Mat& M, const Mat& Minv) {
  const int n = static_cast<int>(M.rows());
  Flag f;
  for (int p = 1; p < n; ++p) {
    if (2 * p <= n) {
      f.blocks.push_back(dominant_subspace(M, p));
    } else {
      const Mat K = dominant_subspace(Minv.transpose(), n - p);
      Eigen::HouseholderQR<Mat> qr(K);
      const Mat Q = qr.householderQ() * Mat::Identity(n, n);
      f.blocks.push_back(Q.rightCols(p));
    }
  }
  return f;
}

Vec attracting_covector(const EigenSplit& s) {
  const int n = static_cast<int>(s.values.size());
  // Last row of the inverse eigenvector matrix kills the first n-1 columns.
  Mat inv = s.vectors.inverse();
  return normalize_rep(inv.row(n - 1).transpose());
}

Flag osculating_flag_veronese(int n, const ProjPoint& p) {
  if (p.dim() != 2) throw Error("osculating_flag_veronese: input must lie in RP^1");
  const double x = p.rep(0), y = p.rep(1);
  // Column j holds the j-th Taylor coefficient of s -> veronese(p + s p_perp).
  Mat D(n, n);
  for (int k = 0; k < n; ++k) {
    const auto c = binary_product(x, -y, n - 1 - k, y, x, k);
    for (int j = 0; j < n; ++j) D(k, j) = c[j];
  }
  Flag f;
  for (int q = 1; q < n; ++q) f.blocks.push_back(orthonormal_basis(D.leftCols(q)));
  return f;
}

namespace {

template <class M_t>
struct RawProximal {
  using S = typename M_t::Scalar;
  Eigen::Matrix<S, Eigen::Dynamic, 1> right, left;
  S lambda;
};

template <class M_t>
RawProximal<M_t> proximal_impl(const M_t& M, int max_squarings, double stop) {
  using S = typename M_t::Scalar;
  using V_t = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  M_t P = M / M.norm();
  bool converged = false;
  for (int k = 0; k < max_squarings; ++k) {
    M_t Q = P * P;
    Q /= Q.norm();
    const S diff = (Q - P).norm();
    P = std::move(Q);
    if (diff < stop) {
      converged = true;
      break;
    }
  }
  Eigen::Index ci = 0, ri = 0;
  P.colwise().norm().maxCoeff(&ci);
  P.rowwise().norm().maxCoeff(&ri);
  V_t v = P.col(ci);
  V_t w = P.row(ri).transpose();
  if (!converged) {
    // Accept only if P has collapsed to rank one anyway.
    const S resid = (P - v * w.transpose() * (v.dot(P * w) / (v.squaredNorm() * w.squaredNorm()))).norm();
    if (resid > 1e-12) throw Error("proximal: matrix is not proximal");
  }
  v.normalize();
  w.normalize();
  // Two power steps with M itself polish the squaring roundoff.
  for (int k = 0; k < 2; ++k) {
    v = (M * v).normalized();
    w = (M.transpose() * w).normalized();
  }
  const S lambda = w.dot(M * v) / w.dot(v);
  return {v, w, lambda};
}

template <class R>
Proximal rounded(const R& r) {
  Proximal out;
  out.right = normalize_rep(r.right.template cast<double>());
  out.left = normalize_rep(r.left.template cast<double>());
  out.lambda = static_cast<double>(r.lambda);
  return out;
}

} // namespace

Proximal proximal(const Mat& M, int max_squarings) { return rounded(proximal_impl(M, max_squarings, 1e-15)); }

Proximal proximal(const MatL& M, int max_squarings) { return rounded(proximal_impl(M, max_squarings, 1e-18)); }

VecL normalize_rep_extended(const VecL& v) {
  const long double nrm = v.norm();
  if (!(nrm > 1e-300L) || !std::isfinite(nrm)) throw Error("zero or non-finite representative");
  VecL u = v / nrm;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::fabs(u(i)) > 1e-12L) {
      if (u(i) < 0) u = -u;
      break;
    }
  }
  return u;
}

ProximalL proximal_extended(const MatL& M, int max_squarings) {
  auto r = proximal_impl(M, max_squarings, 1e-18);
  return {normalize_rep_extended(r.right), normalize_rep_extended(r.left), r.lambda};
}

} // namespace xr
