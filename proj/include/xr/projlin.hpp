#pragma once

#include "xr/common.hpp"

namespace xr {

// Unit norm, first clearly nonzero coordinate positive.
Vec normalize_rep(const Vec& v);

struct ProjPoint {
  Vec rep;

  ProjPoint() = default;
  explicit ProjPoint(const Vec& v);
  int dim() const { return static_cast<int>(rep.size()); }
  // Parallel within the given angle (radians).
  bool same(const ProjPoint& o, double tol = 1e-10) const;
};

struct ProjHyperplane {
  Vec covector;

  ProjHyperplane() = default;
  explicit ProjHyperplane(const Vec& c);
  int dim() const { return static_cast<int>(covector.size()); }
  bool same(const ProjHyperplane& o, double tol = 1e-10) const;
};

// Angle between the lines spanned by a and b, in [0, pi/2].
double line_angle(const Vec& a, const Vec& b);

struct EigenSplit {
  Vec values;   // decreasing |lambda|
  Mat vectors;  // column i belongs to values(i), unit norm
  Mat source;
};

struct Flag {
  // blocks[p-1] is an n x p orthonormal basis of the p-dimensional member.
  std::vector<Mat> blocks;
  int dim() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }
  const Mat& member(int p) const { return blocks.at(p - 1); }
};

Vec veronese(int n, const Vec2& p);
ProjPoint veronese(int n, const ProjPoint& p);

// Dual Veronese: the covector whose kernel is the osculating hyperplane at
// [a:b]; pairing with veronese(n, p) gives det(q, p)^(n-1).
Vec veronese_dual(int n, const Vec2& q);

// Action of A on degree n-1 binary forms in the monomial basis
// x^(n-1), x^(n-2) y, ..., y^(n-1), rescaled to determinant one.
Mat sym_power_rep(int n, const Mat2& A, double det_tol = 1e-12);

EigenSplit eigen_split(const Mat& M, double gap_tol = 1e-6);

Flag flag_from_eigen(const EigenSplit& s);

// Orthonormal basis of the span of the p eigenlines of largest modulus, by
// orthogonal iteration in extended precision.
Mat dominant_subspace(const Mat& M, int p, int max_iter = 2000);

// Flag of the dominant eigenlines of M. Members above n/2 are taken as
// annihilators of dominant subspaces of Minv^T, which keeps them accurate.
Flag attracting_flag(const Mat& M, const Mat& Minv);

// Covector annihilating the span of the top n-1 eigenlines.
Vec attracting_covector(const EigenSplit& s);

Flag osculating_flag_veronese(int n, const ProjPoint& p);

// Dominant right/left eigenvectors of a proximal matrix by repeated squaring.
struct Proximal {
  Vec right;      // unit
  Vec left;       // unit
  double lambda;  // signed dominant eigenvalue
};
Proximal proximal(const Mat& M, int max_squarings = 60);

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
// Same iteration in extended precision; the result is rounded to double.
Proximal proximal(const MatL& M, int max_squarings = 60);

struct ProximalL {
  VecL right, left;
  long double lambda;
};
// Unrounded variant.
ProximalL proximal_extended(const MatL& M, int max_squarings = 60);
VecL normalize_rep_extended(const VecL& v);

// Orthonormal basis of the column span of M (rank must be full).
Mat orthonormal_basis(const Mat& M);

// Real n-th root preserving sign.
double real_root(double x, int n);

double binomial(int n, int k);

} // namespace xr
