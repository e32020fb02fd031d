#pragma once

#include "xr/surfgrp.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <random>

namespace xr {

// Limit curve and osculating hyperplane, evaluated at boundary points.
class CurvePair {
public:
  enum class Mode { veronese_closed_form, eigen_sampled, custom };
  using Eval = std::function<Vec(const BoundaryPoint&)>;
  using EvalL = std::function<VecL(const BoundaryPoint&)>;

  static CurvePair veronese(int n);
  static CurvePair eigen_sampled(const Representation& rep);
  static CurvePair custom(int n, Eval xi, Eval xistar);

  int n() const { return n_; }
  Mode mode() const { return mode_; }
  Vec xi(const BoundaryPoint& p) const { return xi_(p); }
  Vec xistar(const BoundaryPoint& p) const { return xistar_(p); }
  // Only the closed form accepts bare angles.
  bool accepts_angles() const { return mode_ == Mode::veronese_closed_form; }
  // Eigen-sampled curves also evaluate in extended precision; the pairings
  // of nearby translated points need the extra digits.
  bool has_extended() const { return static_cast<bool>(xi_ext_); }
  VecL xi_extended(const BoundaryPoint& p) const { return xi_ext_(p); }
  VecL xistar_extended(const BoundaryPoint& p) const { return xistar_ext_(p); }

private:
  int n_ = 0;
  Mode mode_ = Mode::custom;
  Eval xi_, xistar_;
  EvalL xi_ext_, xistar_ext_;
};

// Both curves at the fixed points of w, from one pass over rho(w), rho(w^-1).
struct FixedPointData {
  Vec xi_plus, xi_minus, xistar_plus, xistar_minus;
  double lambda_max, lambda_min;
};
FixedPointData fixed_point_data(const Representation& rep, const Word& w);

struct CrossRatioFn {
  std::function<double(const BoundaryPoint&, const BoundaryPoint&, const BoundaryPoint&, const BoundaryPoint&)> eval;
  std::string label;
  bool angles_ok = true;  // false when points must carry words

  double operator()(const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                    const BoundaryPoint& t) const {
    return eval(x, y, z, t);
  }
};

inline constexpr double pairing_tol = 1e-12;

double det2(const Vec2& a, const Vec2& b);
double classical_cr(const Vec2& x, const Vec2& y, const Vec2& z, const Vec2& t);
double classical_cr(const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z, const BoundaryPoint& t);
// Affine coordinates; +/-infinity stands for [1:0].
double classical_cr_affine(double x, double y, double z, double t);
Vec2 affine_line(double x);

double curve_cr(const CurvePair& c, const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                const BoundaryPoint& t);
// Pairing quotient on raw lifts.
double pairing_cr(const Vec& xi_x, const Vec& xs_y, const Vec& xi_z, const Vec& xs_t);

CrossRatioFn classical_fn();
CrossRatioFn curve_fn(const CurvePair& c, std::string label);
CrossRatioFn dual_cr(const CrossRatioFn& b);
CrossRatioFn shifted_cr(const CrossRatioFn& b, double shift);     // b + shift
CrossRatioFn noisy_cr(const CrossRatioFn& b, double amplitude);   // deterministic multiplicative noise

// Sign of the classical cross ratio of the base-circle coordinates.
int eps_sign(double x, double y, double z, double t);

// Seeded index tuples over a sample set with a minimum circular gap.
std::vector<int> draw_tuple(std::mt19937_64& rng, const SampleSet& s, int k, double min_gap);

struct Violation {
  double max = 0.0;
  std::vector<int> argmax;  // sample indices
  void update(double v, const std::vector<int>& t) {
    if (v > max || (argmax.empty() && v >= max)) {
      max = v;
      argmax = t;
    }
  }
};

struct AxiomReport {
  Violation symmetry, zero, cocycle_first, cocycle_second, strict_equal;
  double strictness_floor = 0.0;  // min |b - 1| over distinct tuples
  long tuples = 0;
  double worst() const;
};

AxiomReport check_axioms(const CrossRatioFn& b, const SampleSet& s, long N, std::uint64_t seed, double min_gap = 0.1,
                         Exec exec = Exec::parallel);

double rel_diff(double a, double b);

struct PeriodResult {
  double value;      // at the chosen y
  double value_alt;  // at a second y
};
// Pick y far (after the action) from both fixed points.
std::pair<BoundaryPoint, BoundaryPoint> period_base_points(const GeneratorSet& g, const Word& w);
double period_at(const CrossRatioFn& b, const GeneratorSet& g, const Word& w, const BoundaryPoint& y);
PeriodResult period(const CrossRatioFn& b, const GeneratorSet& g, const Word& w);

struct TripleResult {
  double value, value_alt;
};
double triple_ratio_at(const CrossRatioFn& b, const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z,
                       const BoundaryPoint& t);
TripleResult triple_ratio(const CrossRatioFn& b, const BoundaryPoint& x, const BoundaryPoint& y,
                          const BoundaryPoint& z, const BoundaryPoint& t, const BoundaryPoint& t2);

struct RelationReport {
  Violation violation;
  long tuples = 0;
};
// 1 - b(f,v,e,u) = b(u,v,e,f) on tuples (f,v,e,u).
RelationReport check_relation12(const CrossRatioFn& b, const SampleSet& s, long N, std::uint64_t seed,
                                double min_gap = 0.1, Exec exec = Exec::parallel);
// (b(f,v,e,u)-1)(b(g,w,e,u)-1) = (b(f,w,e,u)-1)(b(g,v,e,u)-1) on tuples (f,v,e,u,g,w).
RelationReport check_relation13(const CrossRatioFn& b, const SampleSet& s, long N, std::uint64_t seed,
                                double min_gap = 0.1, Exec exec = Exec::parallel);

// x -> b(x, w, e, u); maps w to 0, e to 1, u to infinity.
std::function<double(const BoundaryPoint&)> embed_from_cr(const CrossRatioFn& b, const BoundaryPoint& w,
                                                          const BoundaryPoint& e, const BoundaryPoint& u,
                                                          const SampleSet* precheck = nullptr);

// Signed distance between horocycles at a_i, a_j along their geodesic.
double horocycle_gap(double ai, double hi, double aj, double hj);
double otal_cr_hyperbolic(const std::array<double, 4>& a, const std::array<double, 4>& h);

// Solve b(x+, x0, x-, x_t) = e^t on the arc from x- to x+ through x0.
BoundaryPoint flow_from_cr(const CrossRatioFn& b, const BoundaryPoint& xm, const BoundaryPoint& x0,
                           const BoundaryPoint& xp, double t, const SampleSet* s = nullptr);

// Equivariance b(gx,gy,gz,gt) = b(x,y,z,t) for each generator.
Violation check_invariance(const CrossRatioFn& b, const GeneratorSet& g, const SampleSet& s, long N,
                           std::uint64_t seed, double min_gap = 0.1, Exec exec = Exec::parallel);

} // namespace xr
