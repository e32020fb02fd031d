#include "doctest.h"
#include "xr/crossratio.hpp"

#include <random>

using namespace xr;

namespace {

const GeneratorSet& oct() {
  static const GeneratorSet g = octagon_fuchsian();
  return g;
}
const SampleSet& samples() {
  static const SampleSet s = sample_boundary(oct(), 3);
  return s;
}

BoundaryPoint aff(double x) { return point_at_angle(angle_of_line(affine_line(x))); }

} // namespace

TEST_CASE("classical cross ratio at fixed affine points") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(classical_cr_affine(0, 1, 2, 3) == doctest::Approx(-1.0 / 3));
  CHECK(classical_cr_affine(0, 1, inf, 2) == doctest::Approx(0.5));
  CHECK(classical_cr_affine(5, 5, 2, 3) == 0.0);
  CHECK(classical_cr_affine(2, 1, 0, 3) == doctest::Approx(-3.0));
  CHECK(classical_cr_affine(3, 1, 0, 2) == doctest::Approx(4.0));
  CHECK_THROWS_AS(classical_cr_affine(1, 2, 3, 1), Error);
  CHECK_THROWS_AS(classical_cr_affine(1, 2, 2, 3), Error);
}

TEST_CASE("curve cross ratio: n=2 veronese equals classical, n-fuchsian is its power") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, two_pi);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = point_at_angle(U(rng)), y = point_at_angle(U(rng)), z = point_at_angle(U(rng)),
               t = point_at_angle(U(rng));
    double c;
    try {
      c = classical_cr(x, y, z, t);
    } catch (const Error&) {
      continue;
    }
    if (std::fabs(c) > 1e6) continue;
    for (int n = 2; n <= 5; ++n)
      CHECK(curve_cr(CurvePair::veronese(n), x, y, z, t) == doctest::Approx(std::pow(c, n - 1)).epsilon(1e-9));
  }
  const auto v3 = CurvePair::veronese(3);
  const auto x = point_at_angle(0.3), y = point_at_angle(1.7), t = point_at_angle(4.0);
  CHECK(curve_cr(v3, x, x, y, t) == doctest::Approx(0.0));
  CHECK(curve_cr(v3, x, y, x, t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(curve_cr(v3, x, y, y, t), doctest::Contains("pairing"), Error);
}

TEST_CASE("eigen-sampled curves agree with the veronese curve for n-fuchsian") {
  for (int n = 2; n <= 5; ++n) {
    const auto rep = n_fuchsian(oct(), n);
    const auto es = CurvePair::eigen_sampled(rep);
    const auto vc = CurvePair::veronese(n);
    for (std::size_t i = 0; i < samples().size(); i += 7) {
      const auto& p = samples()[i];
      CHECK(line_angle(es.xi(p), vc.xi(p)) < 1e-9);
      CHECK(line_angle(es.xistar(p), vc.xistar(p)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(CurvePair::eigen_sampled(n_fuchsian(oct(), 3)).xi(point_at_angle(0.5)), Error);
}

TEST_CASE("lift independence") {
  const auto rep = n_fuchsian(oct(), 4);
  const auto es = CurvePair::eigen_sampled(rep);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sc(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto idx = draw_tuple(rng, samples(), 4, 0.1);
    const auto &x = samples()[idx[0]], &y = samples()[idx[1]], &z = samples()[idx[2]], &t = samples()[idx[3]];
    const double a = pairing_cr(es.xi(x), es.xistar(y), es.xi(z), es.xistar(t));
    const double b = pairing_cr(es.xi(x) * sc(rng), es.xistar(y) * sc(rng), es.xi(z) * sc(rng),
                                es.xistar(t) * sc(rng));
    CHECK(rel_diff(a, b) < 1e-12);
  }
}

TEST_CASE("axioms hold for classical and curve cross ratios, fail when corrupted") {
  const auto rc = check_axioms(classical_fn(), samples(), 1000, 1);
  CHECK(rc.worst() < 1e-12);
  CHECK(rc.strictness_floor > 0.0);
  const auto rep = n_fuchsian(oct(), 3);
  const auto b3 = curve_fn(CurvePair::eigen_sampled(rep), "b3");
  CHECK(check_axioms(b3, samples(), 300, 2).worst() < 1e-9);
  const auto bad = check_axioms(shifted_cr(classical_fn(), 0.1), samples(), 300, 3);
  CHECK(bad.worst() > 0.05);
  // Serial and parallel sweeps are identical.
  const auto s1 = check_axioms(classical_fn(), samples(), 200, 9, 0.1, Exec::serial);
  const auto s2 = check_axioms(classical_fn(), samples(), 200, 9, 0.1, Exec::parallel);
  CHECK(s1.cocycle_first.max == s2.cocycle_first.max);
  CHECK(s1.cocycle_first.argmax == s2.cocycle_first.argmax);
}

TEST_CASE("periods: base eigenvalues, inverse symmetry, powers") {
  for (const Word& w : {Word{1}, Word{1, 2}, Word{2, -3, 4}}) {
    const auto hs = hyperbolic_split(evaluate(oct(), w));
    const double lam = std::fabs(hs.lambda_max);
    for (int n = 2; n <= 5; ++n) {
      const auto b = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), n)), "b");
      const auto p = period(b, oct(), w);
      CHECK(p.value == doctest::Approx(2.0 * (n - 1) * std::log(lam)).epsilon(1e-10));
      CHECK(std::fabs(p.value - p.value_alt) < 1e-8);
      CHECK(std::fabs(period(b, oct(), inverse(w)).value - p.value) < 1e-8);
    }
  }
  // Powers square the eigenvalue gap; keep to words whose squares stay above pairing_tol.
  for (const Word& w : {Word{1}, Word{3}, Word{1, 2}}) {
    for (int n = 2; n <= (w.size() == 1 ? 5 : 3); ++n) {
      const auto b = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), n)), "b");
      const double p = period(b, oct(), w).value;
      CHECK(std::fabs(period(b, oct(), concat(w, w)).value - 2 * p) < 1e-8);
      CHECK(std::fabs(period(b, oct(), concat(w, concat(w, w))).value - 3 * p) < 1e-8);
    }
  }
  CHECK_THROWS_AS(period_at(classical_fn(), oct(), {1}, fixed_point(oct(), {1}, Sign::attracting)), Error);
}

TEST_CASE("triple ratio independence of t and cyclic symmetry") {
  const double tr = triple_ratio_at(classical_fn(), aff(0), aff(1), aff(2), aff(3));
  CHECK(tr == doctest::Approx(-1.0));
  CHECK(triple_ratio_at(classical_fn(), aff(0), aff(1), aff(2), aff(5)) == doctest::Approx(-1.0));
  const auto b = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 3)), "b3");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto idx = draw_tuple(rng, samples(), 5, 0.1);
    const auto &x = samples()[idx[0]], &y = samples()[idx[1]], &z = samples()[idx[2]];
    const auto r = triple_ratio(b, x, y, z, samples()[idx[3]], samples()[idx[4]]);
    CHECK(rel_diff(r.value, r.value_alt) < 1e-9);
    CHECK(rel_diff(r.value, triple_ratio_at(b, z, x, y, samples()[idx[3]])) < 1e-9);
  }
}

TEST_CASE("relations (12) and (13): exact for n=2, violated beyond") {
  CHECK(rel_diff(1.0 - classical_cr_affine(2, 1, 0, 3), classical_cr_affine(3, 1, 0, 2)) < 1e-15);
  CHECK(check_relation12(classical_fn(), samples(), 500, 4).violation.max < 1e-12);
  CHECK(check_relation13(classical_fn(), samples(), 500, 4).violation.max < 1e-12);
  const auto b2 = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 2)), "b2");
  CHECK(check_relation12(b2, samples(), 200, 4).violation.max < 1e-9);
  CHECK(check_relation13(b2, samples(), 200, 4).violation.max < 1e-9);
  const auto b3 = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 3)), "b3");
  CHECK(check_relation12(b3, samples(), 200, 4).violation.max > 0.1);
  const auto b4 = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 4)), "b4");
  CHECK(check_relation13(b4, samples(), 200, 4).violation.max > 0.1);
}

TEST_CASE("embedding from a cross ratio reproduces it") {
  const double inf = std::numeric_limits<double>::infinity();
  const auto f = embed_from_cr(classical_fn(), aff(1), aff(0), aff(inf));
  // With (w,e,u) = (1,0,inf) the embedding is x -> 1 - x.
  CHECK(f(aff(1)) == doctest::Approx(0.0));
  CHECK(f(aff(0)) == doctest::Approx(1.0));
  CHECK(f(aff(2.5)) == doctest::Approx(-1.5));
  CHECK(std::isinf(f(aff(inf))));
  const auto b2 = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 2)), "b2");
  const auto& s = samples();
  const auto g = embed_from_cr(b2, s[5], s[40], s[90], &s);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto idx = draw_tuple(rng, s, 4, 0.1);
    const auto &x = s[idx[0]], &y = s[idx[1]], &z = s[idx[2]], &t = s[idx[3]];
    CHECK(rel_diff(b2(x, y, z, t), classical_cr_affine(g(x), g(y), g(z), g(t))) < 1e-9);
  }
  const auto b3 = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 3)), "b3");
  CHECK_THROWS_AS(embed_from_cr(b3, s[5], s[40], s[90], &s), Error);
}

TEST_CASE("horocycle gaps match the lambda-length formula") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.2, two_pi - 0.2), H(1e-4, 1e-2);
  for (int i = 0; i < 200; ++i) {
    const double a = U(rng), b = U(rng), ha = H(rng), hb = H(rng);
    if (circ_dist(a, b) < 0.1) continue;
    const double d = det2(line_of_angle(a), line_of_angle(b));
    const double oracle = std::log(d * d / (ha * hb));
    CHECK(horocycle_gap(a, ha, b, hb) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("otal cross ratio: horoball independence, classical modulus, symmetry") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(0, two_pi), H(1e-4, 1e-2);
  int tested = 0;
  while (tested < 100) {
    std::array<double, 4> a{U(rng), U(rng), U(rng), U(rng)};
    bool ok = true;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < i; ++j) ok = ok && circ_dist(a[i], a[j]) > 0.1;
    if (!ok) continue;
    ++tested;
    std::array<double, 4> h1{H(rng), H(rng), H(rng), H(rng)}, h2{H(rng), H(rng), H(rng), H(rng)};
    const double o1 = otal_cr_hyperbolic(a, h1), o2 = otal_cr_hyperbolic(a, h2);
    CHECK(rel_diff(o1, o2) < 1e-10);
    const double c = classical_cr(line_of_angle(a[0]), line_of_angle(a[1]), line_of_angle(a[2]), line_of_angle(a[3]));
    CHECK(rel_diff(o1, c) < 1e-8);
    CHECK(rel_diff(o1, otal_cr_hyperbolic({a[1], a[0], a[3], a[2]}, {h1[1], h1[0], h1[3], h1[2]})) < 1e-10);
  }
  CHECK_THROWS_AS(otal_cr_hyperbolic({0.1, 0.2, 3.0, 4.0}, {5, 5, 1e-3, 1e-3}), Error);
}

TEST_CASE("flow from the classical cross ratio") {
  const double inf = std::numeric_limits<double>::infinity();
  const auto b = classical_fn();
  const auto xm = aff(0), x0 = aff(1), xp = aff(inf);
  CHECK(flow_from_cr(b, xm, x0, xp, 0.0).angle == x0.angle);
  for (double t : {0.1, 0.5, 1.0}) {
    const auto xt = flow_from_cr(b, xm, x0, xp, t);
    CHECK(circ_dist(xt.angle, aff(std::exp(t)).angle) < 1e-12);
    for (double s : {0.1, 0.5, 1.0}) {
      const auto a = flow_from_cr(b, xm, xt, xp, s);
      const auto c = flow_from_cr(b, xm, x0, xp, t + s);
      CHECK(circ_dist(a.angle, c.angle) < 1e-10);
    }
  }
  const Word w{1, 2};
  const auto [y, y2] = period_base_points(oct(), w);
  const double lb = period_at(b, oct(), w, y);
  const auto gm = fixed_point(oct(), w, Sign::repelling), gp = fixed_point(oct(), w, Sign::attracting);
  const auto xt = flow_from_cr(b, gm, y, gp, lb);
  CHECK(circ_dist(xt.angle, act(oct(), w, y).angle) < 1e-9);
  // On a sample set the answer is the nearest sampled point.
  const auto b3 = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 3)), "b3");
  const auto ys = flow_from_cr(b3, gm, y, gp, 2 * lb, &samples());
  auto F = [&](const BoundaryPoint& p) { return std::log(std::fabs(b3(gp, y, gm, p))); };
  const double best = std::fabs(F(ys) - 2 * lb);
  const double arc_end = wrap_angle(gp.angle - gm.angle);
  const bool ccw = wrap_angle(y.angle - gm.angle) < arc_end;
  for (const auto& p : samples().points) {
    const double u = ccw ? wrap_angle(p.angle - gm.angle) : wrap_angle(gm.angle - p.angle);
    const double len = ccw ? arc_end : two_pi - arc_end;
    if (u > 1e-9 && u < len - 1e-9) CHECK(std::fabs(F(p) - 2 * lb) >= best);
  }
}

TEST_CASE("dual cross ratio") {
  const auto c = classical_fn(), cd = dual_cr(c);
  const auto rep = n_fuchsian(oct(), 3);
  const auto b = curve_fn(CurvePair::eigen_sampled(rep), "b3");
  const auto bstar = curve_fn(CurvePair::eigen_sampled(contragredient(rep)), "b3*");
  const auto bd = dual_cr(b);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const auto idx = draw_tuple(rng, samples(), 4, 0.1);
    const auto &x = samples()[idx[0]], &y = samples()[idx[1]], &z = samples()[idx[2]], &t = samples()[idx[3]];
    CHECK(rel_diff(c(x, y, z, t), cd(x, y, z, t)) < 1e-12);
    CHECK(rel_diff(bd(x, y, z, t), bstar(x, y, z, t)) < 1e-9);
  }
  for (const Word& w : {Word{1}, Word{2, 3}}) CHECK(std::fabs(period(bd, oct(), w).value - period(b, oct(), w).value) < 1e-8);
}

TEST_CASE("equivariance under generators") {
  const auto b = curve_fn(CurvePair::eigen_sampled(n_fuchsian(oct(), 3)), "b3");
  CHECK(check_invariance(b, oct(), samples(), 200, 17).max < 1e-9);
  CHECK(check_invariance(classical_fn(), oct(), samples(), 200, 17).max < 1e-12);
}
