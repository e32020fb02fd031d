#pragma once

#include "xr/crossratio.hpp"

namespace xr {

// e = (e0..ep), u = (u0..up).
struct ChiTuple {
  std::vector<BoundaryPoint> e, u;
  int p() const { return static_cast<int>(e.size()) - 1; }
};

void check_admissible(const ChiTuple& t);

// b_ij = b(e_i, u_j, e0, u0), 1 <= i,j <= p.
Mat chi_matrix(const CrossRatioFn& b, const ChiTuple& t);

struct ChiValue {
  double value;     // det B
  double scale;     // product of row norms
  double balanced;  // |det| after row/column equilibration
};
ChiValue chi_det(const CrossRatioFn& b, const ChiTuple& t);

// |det| of B after alternately normalizing rows and columns to unit length.
double equilibrated_det(Mat B, int sweeps = 2000);

enum class TupleDesign { interleaved, random_assignment };

// Stratified tuple: the 2p+2 points occupy their own arcs of the circle,
// snapped to samples and at least min_gap apart.
ChiTuple draw_chi_tuple(std::mt19937_64& rng, const SampleSet& s, int p, TupleDesign design, double min_gap = 1e-2);

struct RankReport {
  int n = 0;
  long tuples = 0;
  std::vector<double> min_nonzero;  // index p-1, for p = 1..n
  std::vector<double> min_nonzero_raw;  // same, with the row-norm scale
  double max_zero = 0.0;            // p = n+1, balanced
  double max_zero_raw = 0.0;        // p = n+1, row-norm scale
  double nonzero_tol = 1e-6, zero_tol = 1e-8;
  bool pass() const;
};

RankReport hitchin_rank_test(const CrossRatioFn& b, int n, const SampleSet& s, long N, std::uint64_t seed,
                             TupleDesign design = TupleDesign::interleaved, Exec exec = Exec::parallel);

struct BaseChange {
  double lhs, rhs, factor, rel;
};
// chi(e0..; u0..) against prod_j b(f0,u_j,e0,v0) prod_i b(e_i,v0,e0,u0) chi(f0..; v0..).
BaseChange basepoint_independence(const CrossRatioFn& b, const ChiTuple& t, const BoundaryPoint& f0,
                                  const BoundaryPoint& v0);

SampleSet exclude_points(const SampleSet& s, const std::vector<BoundaryPoint>& pts);

// Curves from a cross ratio satisfying the rank condition for n; t has p = n.
CurvePair reconstruct_curves(const CrossRatioFn& b, int n, const ChiTuple& t);

// max rel. difference between b and the cross ratio of c on sampled quadruples.
double cross_ratio_residual(const CrossRatioFn& b, const CurvePair& c, const SampleSet& s, long N,
                            std::uint64_t seed, Exec exec = Exec::parallel);

// min over N sampled n-tuples of |det[xi(x1)..xi(xn)]| / prod |xi(xi)|.
double hyperconvexity_min(const CurvePair& c, const SampleSet& s, long N, std::uint64_t seed);

struct Match {
  Mat A;  // a.xi ~ A c.xi
  double residual;
};
Match projective_match(const CurvePair& a, const CurvePair& c, const SampleSet& pts);

} // namespace xr
