#pragma once

#include "xr/projlin.hpp"

#include <iosfwd>
#include <string>

namespace xr {

// Signed generator indices, 1-based: k is the k-th generator, -k its inverse.
using Word = std::vector<int>;

enum class GroupKind { cocompact_genus2, schottky_free };

struct GeneratorSet {
  int rank = 0;
  std::vector<Mat2> mats;
  GroupKind kind = GroupKind::schottky_free;
};

// Validates determinants, and the relator or hyperbolicity depending on kind.
GeneratorSet make_generator_set(std::vector<Mat2> mats, GroupKind kind);

GeneratorSet octagon_fuchsian();
GeneratorSet schottky(double t1, double t2, double separation, double axis1 = 0.0, double axis2 = pi / 2);

// || [A1,B1][A2,B2] -+ I ||, smaller of the two signs.
double relator_residual(const GeneratorSet& g);
Word surface_relator();

Word reduce(const Word& w);
Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
Word conjugate(const Word& g, const Word& w);  // g w g^-1, reduced
bool is_cyclically_reduced(const Word& w);
// The smaller of w and w^-1 in enumeration letter order.
Word canonical_word(const Word& w);
std::string word_name(const Word& w);

std::vector<Word> enumerate_words(const GeneratorSet& g, int L);

Mat2 evaluate(const GeneratorSet& g, const Word& w);
Mat evaluate(const Word& w, const std::vector<Mat>& rep, const std::vector<Mat>& rep_inv);
Mat evaluate(const GeneratorSet& g, const Word& w, const std::vector<Mat>& rep);
// The same product accumulated in extended precision, with inverses given in
// extended precision too.
MatL evaluate_extended(const Word& w, const std::vector<Mat>& rep, const std::vector<MatL>& rep_inv);

// An SL(n) representation carried with its base Fuchsian data.
struct Representation {
  GeneratorSet base;
  int n = 2;
  std::vector<Mat> gens;
  std::vector<Mat> inv_gens;
  // Inverses of gens in long double; the double inverses carry an error of
  // about eps times the conditioning, which large n cannot afford.
  std::vector<MatL> inv_ext;

  Mat eval(const Word& w) const { return evaluate(w, gens, inv_gens); }
  MatL eval_extended(const Word& w) const { return evaluate_extended(w, gens, inv_ext); }
  Mat2 base_eval(const Word& w) const { return evaluate(base, w); }
};

Representation n_fuchsian(const GeneratorSet& g, int n);
Representation user_representation(const GeneratorSet& g, std::vector<Mat> gens);
// Contragredient: gamma -> rho(gamma^-1)^T.
Representation contragredient(const Representation& r);

enum class Sign { attracting, repelling };

// The point prefix . (fixed point of word); prefix is empty for sampled points.
struct BoundaryPoint {
  Word word;  // empty for a bare angle
  Word prefix;
  Sign sign = Sign::attracting;
  double angle = 0.0;
  Vec2 line = Vec2(1.0, 0.0);
  double eigenvalue = 0.0;  // base eigenvalue of the stored word at this point
};

// [cos(a/2) : sin(a/2)]
Vec2 line_of_angle(double a);
double angle_of_line(const Vec2& v);

BoundaryPoint point_at_angle(double a);
BoundaryPoint fixed_point(const GeneratorSet& g, const Word& w, Sign s);
// Image of y under h; fixed points keep their word and gain h as a prefix.
BoundaryPoint act(const GeneratorSet& g, const Word& h, const BoundaryPoint& y);

struct HyperbolicSplit {
  double lambda_max, lambda_min;
  Vec2 attracting, repelling;  // unit
};
HyperbolicSplit hyperbolic_split(const Mat2& M);

struct SampleSet {
  std::vector<BoundaryPoint> points;
  std::size_t size() const { return points.size(); }
  const BoundaryPoint& operator[](std::size_t i) const { return points[i]; }
};

inline constexpr double dedup_tol = 1e-9;

SampleSet sample_boundary(const GeneratorSet& g, int L, Exec exec = Exec::parallel);
SampleSet dedup(std::vector<BoundaryPoint> pts);
void write_csv(std::ostream& os, const SampleSet& s);

} // namespace xr
