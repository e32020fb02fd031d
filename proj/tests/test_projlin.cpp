#include "doctest.h"
#include "xr/projlin.hpp"

#include <random>

using namespace xr;

TEST_CASE("veronese image of basis lines") {
  const Vec v = veronese(3, Vec2(1, 0));
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 0.0);
  CHECK(v(2) == 0.0);
  const Vec w = veronese(4, Vec2(1, 1));
  for (int k = 0; k < 4; ++k) CHECK(w(k) == 1.0);
  CHECK_THROWS_AS(veronese(1, Vec2(1, 0)), Error);
  CHECK_THROWS_AS(veronese(3, Vec2(0, 0)), Error);
}

TEST_CASE("sym_power_rep of a diagonal matrix") {
  Mat2 A;
  A << 2, 0, 0, 0.5;
  const Mat S = sym_power_rep(3, A);
  CHECK(S(0, 0) == doctest::Approx(4.0));
  CHECK(S(1, 1) == doctest::Approx(1.0));
  CHECK(S(2, 2) == doctest::Approx(0.25));
  Mat2 B;
  B << 2, 0, 0, 1;
  CHECK_THROWS_AS(sym_power_rep(3, B), Error);
}

TEST_CASE("sym_power_rep is a homomorphism and intertwines veronese") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Mat2 A, B;
    A << g(rng), g(rng), g(rng), g(rng);
    B << g(rng), g(rng), g(rng), g(rng);
    if (A.determinant() < 0) A.col(0) *= -1;
    if (B.determinant() < 0) B.col(0) *= -1;
    A /= std::sqrt(A.determinant());
    B /= std::sqrt(B.determinant());
    for (int n = 2; n <= 5; ++n) {
      const Mat lhs = sym_power_rep(n, A * B);
      const Mat rhs = sym_power_rep(n, A) * sym_power_rep(n, B);
      CHECK((lhs - rhs).norm() < 1e-9 * (1 + rhs.norm()));
      const Vec2 p(g(rng), g(rng));
      const Vec img = sym_power_rep(n, A) * veronese(n, p);
      CHECK(line_angle(img, veronese(n, Vec2(A * p))) < 1e-9);
    }
  }
}

TEST_CASE("veronese_dual annihilates exactly the point itself") {
  for (int n = 2; n <= 5; ++n) {
    const Vec2 p(std::cos(0.3), std::sin(0.3)), q(std::cos(1.1), std::sin(1.1));
    CHECK(std::fabs(veronese(n, p).dot(veronese_dual(n, p))) < 1e-14);
    // Pairing equals det(q, p)^(n-1).
    const double d = q(0) * p(1) - q(1) * p(0);
    CHECK(veronese(n, p).dot(veronese_dual(n, q)) == doctest::Approx(std::pow(d, n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("eigen_split orders by modulus and rejects bad spectra") {
  Mat M = Mat::Zero(3, 3);
  M.diagonal() << 0.5, 4.0, -2.0;
  const auto s = eigen_split(M);
  CHECK(s.values(0) == doctest::Approx(4.0));
  CHECK(s.values(1) == doctest::Approx(-2.0));
  CHECK(s.values(2) == doctest::Approx(0.5));
  Mat R(2, 2);
  R << 0, -1, 1, 0;
  CHECK_THROWS_AS(eigen_split(R), Error);
  CHECK_THROWS_AS(eigen_split(Mat::Identity(3, 3)), Error);
}

TEST_CASE("proximal agrees with eigen_split") {
  std::srand(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    Mat P = Mat::Random(n, n) + 2.0 * Mat::Identity(n, n);
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = std::pow(3.0, n - i) * (i % 2 ? -1 : 1);
    const Mat M = P * d.asDiagonal() * P.inverse();
    const auto pr = proximal(M);
    const auto es = eigen_split(M);
    CHECK(line_angle(pr.right, es.vectors.col(0)) < 1e-10);
    CHECK(pr.lambda == doctest::Approx(es.values(0)).epsilon(1e-10));
    // Left vector annihilates the non-dominant eigenvectors.
    for (int i = 1; i < n; ++i) CHECK(std::fabs(pr.left.dot(es.vectors.col(i))) < 1e-9);
  }
}

TEST_CASE("osculating flag of the veronese curve matches finite differences") {
  const int n = 4;
  const ProjPoint p(Vec2(std::cos(0.7), std::sin(0.7)));
  const Flag f = osculating_flag_veronese(n, p);
  CHECK(f.blocks.size() == 3);
  const Vec v = veronese(n, Vec2(p.rep(0), p.rep(1)));
  CHECK(line_angle(f.member(1).col(0), v) < 1e-12);
  // The tangent line is spanned by the point and its derivative.
  const double h = 1e-6;
  const Vec2 q0(std::cos(0.7), std::sin(0.7)), q1(std::cos(0.7 + h), std::sin(0.7 + h));
  const Vec dv = (veronese(n, q1) - veronese(n, q0)) / h;
  const Mat& T = f.blocks[1];
  const Vec rej = dv - T * (T.transpose() * dv);
  CHECK(rej.norm() < 1e-5 * dv.norm());
}
