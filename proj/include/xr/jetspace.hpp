#pragma once

#include "xr/crossratio.hpp"

#include <array>
#include <functional>

namespace xr {

// j^1_theta(F) with F(theta) = f, F'(theta) = r.
struct Jet {
  double theta = 0.0, r = 0.0, f = 0.0;
  Jet() = default;
  Jet(double th, double r_, double f_) : theta(wrap_angle(th)), r(r_), f(f_) {}
};

// Circle distance in theta, absolute in r and f.
double jet_distance(const Jet& a, const Jet& b);

// a0 + sum_k a_k cos(k x) + b_k sin(k x), degree <= 32.
struct TrigPoly {
  double a0 = 0.0;
  std::vector<double> a, b;

  TrigPoly() = default;
  TrigPoly(double c0, std::vector<double> ca, std::vector<double> cb);
  int degree() const { return static_cast<int>(a.size()); }
  // value, first and second derivative
  std::array<double, 3> eval(double x) const;
};

inline constexpr int max_trig_degree = 32;

// (h, phi) acting by j^1_theta(F) -> j^1_phi(theta)((h + F) o phi^-1).
// h returns (h, h'); phi returns (lift value, phi'). The lift is continuous
// for trigonometric elements; only its value mod 2pi is used by the action.
struct JetGroupElement {
  std::function<std::array<double, 2>(double)> h;
  std::function<std::array<double, 2>(double)> phi;

  static JetGroupElement identity();
  // Canonical flow f -> f + t.
  static JetGroupElement flow(double t);
  // phi lift = x + p(x); requires 1 + p' > 0 on a fine grid.
  static JetGroupElement trig(const TrigPoly& h, const TrigPoly& p);
  // Moebius action of M on base angles with h = log phi'.
  static JetGroupElement fuchsian(const Mat2& M);
};

// g1 g2 = (h1 o phi2 + h2, phi1 o phi2)
JetGroupElement product(const JetGroupElement& g1, const JetGroupElement& g2);

Jet jet_act(const JetGroupElement& g, const Jet& j);
inline Jet flow_jet(const Jet& j, double t) { return Jet(j.theta, j.r, j.f + t); }

// The jet of (h + F) o phi^-1 at phi(theta), by inverting the phi lift with
// Newton and a sixth order central difference. F is a trigonometric test
// function; theta is the base point of its jet.
Jet jet_transport(const TrigPoly& h, const TrigPoly& p, const TrigPoly& F, double theta);

// max |act(g1 g2, j) - act(g1, act(g2, j))| over a theta x r grid with f = 0.3.
double jet_act_check_homomorphism(const JetGroupElement& g1, const JetGroupElement& g2, int grid);

// max |act(g, flow(j)) - flow(act(g, j))|
double flow_centrality(const JetGroupElement& g, double t, int grid);

// A curve of jets with its parameter range.
struct JetCurve {
  std::function<Jet(double)> at;
  double s0 = 0.0, s1 = 1.0;
};

struct ContactReport {
  double before = 0.0, after = 0.0;  // integrals of beta = df - r dtheta
  double violation = 0.0;            // |after - before|
};
// Trapezoid sums over the sampled curve and its image, Richardson-extrapolated
// from steps and 2 steps.
ContactReport contact_check(const JetGroupElement& g, const JetCurve& c, int steps);

// The 1-jet graph of F.
JetCurve jet_graph(const TrigPoly& F);

// ---- PSL(2,R) model

struct PSL2Point {
  Mat2 m;
  explicit PSL2Point(const Mat2& a);  // det 1 to 1e-12; first clear entry made positive
};

// p diag(e^(t/2), e^(-t/2))
PSL2Point psl2_flow(const PSL2Point& p, double t);
PSL2Point psl2_left(const Mat2& g, const PSL2Point& p);
// |lower left entry of p^-1 q|: zero iff q lies in the leaf p B, B upper triangular.
double leaf_residual(const PSL2Point& p, const PSL2Point& q);

struct RhoLength {
  double t;             // from u^-1 rho(w) u = diag(e^(t/2), e^(-t/2))
  double eigen_ratio;   // log |lambda_max / lambda_min|
  double conj_residual; // off-diagonal part of u^-1 rho(w) u
};
// The conjugating u is built from the eigenlines; hyperbolic words only.
RhoLength rho_length(const GeneratorSet& g, const Word& w);

// gamma -> (flow by omega(gamma)) o rho(gamma); omega given on generators.
struct GhysRep {
  GeneratorSet base;
  std::vector<double> omega;

  double omega_of(const Word& w) const;
  JetGroupElement element(const Word& w) const;
  // PSL2 model: t with u^-1 rho(w) u a(omega) = a(t).
  double length(const Word& w) const;
  // Jet model: value of h at the fixed point where the circle map expands.
  double jet_length(const Word& w) const;
};
// Throws when omega does not vanish on the relator.
GhysRep ghys_deform(const GeneratorSet& g, std::vector<double> omega, const Word& relator);
// The surface relator for cocompact groups, none for free groups.
GhysRep ghys_deform(const GeneratorSet& g, std::vector<double> omega);

// ---- pi-curves in T*S^1

// theta is a continuous lift.
struct PiCurve {
  std::vector<double> theta, r;
  bool closed(double tol = 1e-9) const;
};
// Builds a PiCurve from wrapped angles, unwrapping steps shorter than pi.
PiCurve make_pi_curve(const std::vector<double>& theta, const std::vector<double>& r);
PiCurve concat(const PiCurve& a, const PiCurve& b);
PiCurve reversed(const PiCurve& c);
// log Hol(c) = trapezoid sum of r dtheta
double pi_log_holonomy(const PiCurve& c);
inline double pi_holonomy(const PiCurve& c) { return std::exp(pi_log_holonomy(c)); }
// Log holonomy of a parametrized curve on [0, 1]: Romberg extrapolation of the
// sampled sums, doubling from N samples until converged to 1e-13.
double pi_log_holonomy(const std::function<std::array<double, 2>(double)>& c, int N);

// Action on T*S^1 = J / flow.
std::array<double, 2> cotangent_act(const JetGroupElement& g, double theta, double r);

struct WidthReport {
  double log_width = 0.0;       // log Hol(c u phi(c)) with c from the gamma- to the gamma+ fixed point
  double l_plus = 0.0;          // l_rho(gamma)
  double l_minus = 0.0;         // l_rho(gamma^-1)
  double two_period = 0.0;      // 2 l_b(gamma), classical cross ratio
  double residual = 0.0;        // largest pairwise gap of the three
};
WidthReport width_identity(const GhysRep& rep, const Word& w, int N = 512);

// ---- straightening of the pair space

// psi(s, t) = (s, int_{g(s)}^t f(s, u) du) for t in (kappa(s), kappa(s) + 2pi).
class Straighten {
public:
  Straighten(std::function<double(double)> kappa, std::function<double(double, double)> f,
             std::function<double(double)> g, int check_grid = 256);

  std::array<double, 2> map(double s, double t) const;
  double density(double s, double t) const { return f_(s, t); }
  double kappa(double s) const { return kappa_(s); }

  struct Report {
    double fiber = 0.0;    // |first coordinate - s|
    double measure = 0.0;  // relative gap of area(psi(R)) and int_R f
    double holonomy = 0.0; // relative gap of Hol(psi(c)) and exp(-int f) over the enclosed disc
  };
  // rects are (s0, s1, t0, t1); discs are (cs, ct, radius).
  Report check(const std::vector<std::array<double, 4>>& rects, const std::vector<std::array<double, 3>>& discs) const;

private:
  std::function<double(double)> kappa_, g_;
  std::function<double(double, double)> f_;
  double integral(double s, double a, double b) const;
};

// Prop-style criterion for the Fuchsian case: psi(phi x, phi y) against the
// cotangent action applied to psi(x, y), over a grid of pairs.
double straighten_conjugacy(const Straighten& psi, const Mat2& M, int grid);

// ---- connection normalization

// alpha = df + alpha_theta dtheta + alpha_r dr on J.
struct ConnectionForm {
  std::function<double(double, double)> alpha_theta, alpha_r;  // functions of (theta, r)
};

struct Normalization {
  double lambda = 0.0;
  std::function<double(double, double)> h;  // h(theta, r), h(0, 0) = 0
  // xi(theta, r, f) = (theta, r - lambda, f + h(theta, r)) pulls beta back to alpha.
  Jet xi(const Jet& j) const { return Jet(j.theta, j.r - lambda, j.f + h(j.theta, j.r)); }
};

// Curvature d(alpha - beta) must vanish; checked on a grid for |r| <= rmax.
Normalization connection_normalize(const ConnectionForm& alpha, double rmax = 2.0, double tol = 1e-6);

// |int_c alpha - int_{xi o c} beta| for a curve in (theta, r, f).
double normalization_residual(const ConnectionForm& alpha, const Normalization& nm, const JetCurve& c, int steps);

} // namespace xr
