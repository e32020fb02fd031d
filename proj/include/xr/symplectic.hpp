#pragma once

#include "xr/crossratio.hpp"

#include <array>
#include <functional>
#include <iosfwd>

namespace xr {

// A line D and a hyperplane P (given by its covector) with D not inside P.
struct PairedPoint {
  ProjPoint D;
  ProjHyperplane P;

  PairedPoint(const ProjPoint& d, const ProjHyperplane& p);
  int dim() const { return D.dim(); }
  // Representative of D with <P, d> = 1.
  Vec d() const;
  const Vec& p() const { return P.covector; }
};

// Tangent vector at (D, P) in the Hom(D,P) + Hom(P^perp, D^perp) chart:
// a is the image of d() (so <p, a> = 0), c the image of p() (so <c, d> = 0).
struct Tangent {
  Vec a, c;
};

double omega_eval(const PairedPoint& x, const Tangent& X, const Tangent& Y);

// Chart tangent of a path through lifts (dh, ph) with lift derivatives (ddh, dph).
Tangent chart_tangent(const PairedPoint& at, const Vec& dh, const Vec& ddh, const Vec& ph, const Vec& dph);

// <e,u><f,v> / (<f,u><e,v>)
double polarized_cr_algebraic(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f,
                              const ProjHyperplane& v);

// Square [0,1]^2 -> pairs, G(a, b) = (E + a (F - E), U + b (V - U)) on lifts
// scaled so that <U,E> = <V,F> = 1 and <U,F> = <V,E> = B^-1/2. Edges lie in
// the leaves. The quadrature splits it into blocks x blocks squares, each
// rescaled the same way.
struct DiscMap {
  Vec E, F, U, V;
  int blocks = 1;
  static DiscMap make(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f, const ProjHyperplane& v);
  Vec D(double a) const { return E + a * (F - E); }
  Vec P(double b) const { return U + b * (V - U); }
};

struct QuadratureResult {
  double value;         // exp of the integral of Omega (= exp(1/2 int 2 Omega))
  double omega_integral;
  int N;
};

// Composite midpoint rule, N x N points in total.
QuadratureResult polarized_cr_quadrature(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f,
                                         const ProjHyperplane& v, int N, Exec exec = Exec::parallel);

struct ConvergenceStudy {
  std::vector<int> N;
  std::vector<double> value, rel_error;
  double exact = 0.0;
  double order = 0.0;  // least-squares slope of -log2(error) against log2(N)
};
ConvergenceStudy polarized_convergence(const ProjPoint& e, const ProjHyperplane& u, const ProjPoint& f,
                                       const ProjHyperplane& v, const std::vector<int>& Ns, Exec exec = Exec::parallel);

// Omega over a disc that moves only one factor.
// Plus leaf: D sweeps the triangle-ish patch spanned by e, f, g with P = u fixed.
double leaf_integral_plus(const ProjPoint& e, const ProjPoint& f, const ProjPoint& g, const ProjHyperplane& u,
                          int N);
// Minus leaf: P sweeps u, v, w with D = e fixed.
double leaf_integral_minus(const ProjPoint& e, const ProjHyperplane& u, const ProjHyperplane& v,
                           const ProjHyperplane& w, int N);

// Symmetry and both cocycles of the curve cross ratio, computed by
// quadrature and algebraically. Tuples whose values are not positive are skipped
// (no leafwise disc exists through the incidence locus).
struct PolarizedReport {
  Violation symmetry, cocycle_first, cocycle_second;  // quadrature
  Violation algebraic;                               // worst of the three, closed form
  long tuples = 0, skipped = 0;
};
PolarizedReport check_polarized_identities(const CurvePair& c, const SampleSet& s, long N, std::uint64_t seed,
                                           int grid, double min_gap = 0.3, Exec exec = Exec::parallel);

// ---- the line bundle L

// u in D, f in P^perp, <f, u> = 1; sign fixed by the first clear coordinate of u.
struct BundlePoint {
  Vec u, f;
};
BundlePoint make_bundle_point(const Vec& u, const Vec& f);
// (A u, A^-T f)
BundlePoint transform(const Mat& A, const BundlePoint& l);
// s with b = (e^s a.u, e^-s a.f); both over the same base point.
double fiber_shift(const BundlePoint& a, const BundlePoint& b);
// Distance of the base points of a and b (largest line angle).
double base_distance(const BundlePoint& a, const BundlePoint& b);

using FlagCurve = std::function<Flag(const BoundaryPoint&)>;
FlagCurve flag_curve_veronese(int n);
FlagCurve flag_curve_eigen(const Representation& rep);

// L_i = xi^i(x) cap xi^(n-i+1)(y), unit columns.
Mat splitting_lines(const Flag& fx, const Flag& fy);

// The normalized (u_1, f) over (xi^1(x), xi^(n-1)(y)) built from u in xi^1(z).
BundlePoint bundle_point(const Vec& xi_z, const Flag& fx, const Flag& fy);
BundlePoint bundle_point(const CurvePair& c, const FlagCurve& fl, const BoundaryPoint& z, const BoundaryPoint& x,
                         const BoundaryPoint& y);

struct TranslationLength {
  double eigen_ratio;  // log |lambda_max / lambda_min|
  double fiber;        // tau_plus - tau_minus
  double tau_plus, tau_minus;  // fiber shifts at (g+, g-) and (g-, g+)
};
TranslationLength translation_length(const Representation& rep, const Word& w, const CurvePair& c,
                                     const FlagCurve& fl);
TranslationLength translation_length(const Representation& rep, const Word& w);

struct ActionDifference {
  double delta;     // exp(2 h)
  double holonomy;  // h, the integral of Omega over the square
  double b;         // b(g+, y, g-, gy)
  double residual;  // rel_diff(delta, b^2)
  double half_log;  // log|delta| / 2
};
// Transport around c + g(c)^-1 with c through y.
ActionDifference action_difference(const CurvePair& c, const GeneratorSet& g, const Word& w, const BoundaryPoint& y);
ActionDifference action_difference(const CurvePair& c, const GeneratorSet& g, const Word& w);

// xi_u(P) = (u, p / <p, u>)
BundlePoint section_xi_u(const Vec& u, const Vec& p);
// beta(d/dt l(t)) = <u, f'(t)> with a central difference of step h.
double covariant_derivative(const std::function<BundlePoint(double)>& l, double t, double h);

// ---- pullback to the circle

// Density of eta^*(2 Omega) in base-angle coordinates:
// f(s,t) = 2 d_s d_t log |<xi(s), xi*(t)>|.
class DensityTable {
public:
  static DensityTable closed_form(int n);
  static DensityTable sampled(const CurvePair& c, const SampleSet& s);

  bool is_closed_form() const { return n_samples_ == 0; }
  int n() const { return n_; }
  double density(double s, double t) const;
  double log_pairing(double s, double t) const;
  // Minimum over a grid x grid lattice, skipping pairs closer than sep.
  double min_density(int grid, double sep) const;
  void write_csv(std::ostream& os, int grid, double sep) const;

private:
  int n_ = 0;
  int n_samples_ = 0;
  std::vector<double> angles_;
  std::vector<Vec> xi_, xistar_;
  double sampled_log_pairing(int i, int j) const;
  double sampled_density(double s, double t) const;
};

DensityTable pullback_density(const CurvePair& c, const SampleSet& s);

struct CotangentResult {
  double value;  // eps_q exp(area / 2)
  double area;   // integral of the density over the rectangle
};
// Q = [x, z] x [y, t] along arcs avoiding the other pair; requires {x,z}, {y,t} unlinked.
CotangentResult cotangent_cr(const DensityTable& d, const std::array<double, 4>& q, int N,
                             Exec exec = Exec::parallel);

} // namespace xr
