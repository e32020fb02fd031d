#include "doctest.h"
#include "xr/jetspace.hpp"
#include "xr/symplectic.hpp"

#include <random>

using namespace xr;

namespace {

const GeneratorSet& oct() {
  static const GeneratorSet g = octagon_fuchsian();
  return g;
}

TrigPoly random_trig(std::mt19937_64& rng, int deg, double amp) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> a(deg), b(deg);
  for (int k = 0; k < deg; ++k) {
    a[k] = amp * U(rng) / (k + 1);
    b[k] = amp * U(rng) / (k + 1);
  }
  return TrigPoly(amp * U(rng), a, b);
}

// Periodic part of a diffeomorphism lift: 1 + p' stays above 1/2.
TrigPoly random_diffeo(std::mt19937_64& rng, int deg) {
  TrigPoly p = random_trig(rng, deg, 0.2);
  double worst = 0.0;
  for (int i = 0; i < 1024; ++i) worst = std::max(worst, std::fabs(p.eval(two_pi * i / 1024)[1]));
  if (worst > 0.5)
    for (int k = 0; k < deg; ++k) {
      p.a[k] *= 0.5 / worst;
      p.b[k] *= 0.5 / worst;
    }
  return p;
}

JetGroupElement random_element(std::mt19937_64& rng) {
  return JetGroupElement::trig(random_trig(rng, 3, 0.8), random_diffeo(rng, 3));
}

Mat2 rotation(double a) {
  Mat2 m;
  m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return m;
}

} // namespace

TEST_CASE("trig polynomials: derivatives and degree cap") {
  std::mt19937_64 rng(1);
  const TrigPoly p = random_trig(rng, 5, 1.0);
  for (double x : {0.0, 1.1, 4.0}) {
    const double d = 1e-5;
    const auto e = p.eval(x);
    CHECK(e[1] == doctest::Approx((p.eval(x + d)[0] - p.eval(x - d)[0]) / (2 * d)).epsilon(1e-8));
    CHECK(e[2] == doctest::Approx((p.eval(x + d)[1] - p.eval(x - d)[1]) / (2 * d)).epsilon(1e-8));
  }
  CHECK_THROWS_AS(TrigPoly(0, std::vector<double>(33, 0.0), std::vector<double>(33, 0.0)), Error);
  CHECK_THROWS_AS(JetGroupElement::trig(TrigPoly(), TrigPoly(0, {0.0, 0.6}, {0.0, 0.0})), Error);
}

TEST_CASE("jet action: identity, constants and pure h") {
  const Jet j(1.3, -0.7, 2.0);
  CHECK(jet_distance(jet_act(JetGroupElement::identity(), j), j) == 0.0);
  const Jet c = jet_act(JetGroupElement::trig(TrigPoly(0.9, {}, {}), TrigPoly()), j);
  CHECK(jet_distance(c, flow_jet(j, 0.9)) < 1e-15);
  const TrigPoly h(0.1, {0.4, -0.2}, {0.3, 0.05});
  for (double th : {0.0, 2.0, 5.5}) {
    const Jet out = jet_act(JetGroupElement::trig(h, TrigPoly()), Jet(th, 0.0, 0.0));
    const auto e = h.eval(th);
    CHECK(jet_distance(out, Jet(th, e[1], e[0])) < 1e-15);
  }
}

TEST_CASE("jet action agrees with transport of jets") {
  std::mt19937_64 rng(7);
  double worst = 0.0, printed = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const TrigPoly h = random_trig(rng, 3, 0.8), p = random_diffeo(rng, 3), F = random_trig(rng, 2, 1.0);
    const JetGroupElement g = JetGroupElement::trig(h, p);
    for (int i = 0; i < 16; ++i) {
      const double th = two_pi * i / 16 + 0.05;
      const auto Fe = F.eval(th);
      const Jet j(th, Fe[1], Fe[0]);
      const Jet act = jet_act(g, j);
      const Jet ref = jet_transport(h, p, F, th);
      worst = std::max(worst, jet_distance(act, ref));
      // Reading the derivative of phi^-1 at theta instead of phi(theta).
      double x = th;
      for (int it = 0; it < 60; ++it) x -= (x + p.eval(x)[0] - th) / (1.0 + p.eval(x)[1]);
      const double r_alt = (h.eval(th)[1] + Fe[1]) / (1.0 + p.eval(x)[1]);
      printed = std::max(printed, std::fabs(r_alt - ref.r));
    }
  }
  CHECK(worst < 1e-9);
  CHECK(printed > 1e-3);
}

TEST_CASE("jet action is a left action") {
  std::mt19937_64 rng(3);
  CHECK(jet_act_check_homomorphism(JetGroupElement::identity(), JetGroupElement::identity(), 64) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const JetGroupElement a = random_element(rng), b = random_element(rng);
    CHECK(jet_act_check_homomorphism(a, b, 128) < 1e-9);
  }
  // Fuchsian elements: the jet product follows the matrix product.
  for (int i = 0; i < 4; ++i) {
    const Mat2 A = oct().mats[i], B = oct().mats[(i + 1) % 4];
    const JetGroupElement ab = product(JetGroupElement::fuchsian(A), JetGroupElement::fuchsian(B));
    const JetGroupElement m = JetGroupElement::fuchsian(A * B);
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
      const Jet j(two_pi * k / 64, 0.4, 0.0);
      worst = std::max(worst, jet_distance(jet_act(ab, j), jet_act(m, j)) / (1.0 + std::fabs(jet_act(m, j).r)));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("canonical flow is central") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> T(-2, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) worst = std::max(worst, flow_centrality(random_element(rng), T(rng), 64));
  CHECK(worst < 1e-10);
  for (const Mat2& M : oct().mats) CHECK(flow_centrality(JetGroupElement::fuchsian(M), 0.7, 64) < 1e-10);
}

TEST_CASE("contact form is preserved") {
  std::mt19937_64 rng(17);
  const TrigPoly sinus(0.0, {0.0}, {1.0});
  const JetCurve graph = jet_graph(sinus);
  // Legendrian graphs carry no beta and map to graphs.
  for (int trial = 0; trial < 5; ++trial) {
    const TrigPoly h = random_trig(rng, 3, 0.8), p = random_diffeo(rng, 3);
    const JetGroupElement g = JetGroupElement::trig(h, p);
    const ContactReport r = contact_check(g, graph, 512);
    CHECK(std::fabs(r.before) < 1e-8);
    CHECK(r.violation < 1e-8);
    double worst = 0.0;
    for (int i = 0; i < 32; ++i) {
      const double th = two_pi * i / 32;
      worst = std::max(worst, jet_distance(jet_act(g, graph.at(th)), jet_transport(h, p, sinus, th)));
    }
    CHECK(worst < 1e-9);
  }
  // A curve with nonzero beta keeps its value.
  const JetCurve loose{[](double s) { return Jet(s, 1.0 + 0.5 * std::cos(s), 0.2 * s); }, 0.0, 3.0};
  const ContactReport flowed = contact_check(JetGroupElement::flow(1.4), loose, 512);
  CHECK(std::fabs(flowed.before - (0.6 - 3.0 - 0.5 * std::sin(3.0))) < 1e-8);
  CHECK(flowed.violation < 1e-12);
  for (int trial = 0; trial < 5; ++trial) CHECK(contact_check(random_element(rng), loose, 512).violation < 1e-8);
}

TEST_CASE("PSL(2,R) model: flow, left action and leaves") {
  CHECK_THROWS_AS(PSL2Point(2.0 * Mat2::Identity()), Error);
  const PSL2Point p(-rotation(0.4));
  CHECK(p.m(0, 0) > 0);
  CHECK((PSL2Point(rotation(0.4)).m - p.m).norm() == 0.0);
  CHECK((psl2_flow(p, 0.0).m - p.m).norm() < 1e-15);
  const PSL2Point a = psl2_flow(psl2_flow(p, 0.3), 0.9), b = psl2_flow(p, 1.2);
  CHECK((a.m - b.m).norm() < 1e-14);
  for (const Mat2& g : oct().mats) {
    CHECK((psl2_left(g, psl2_flow(p, 0.8)).m - psl2_flow(psl2_left(g, p), 0.8).m).norm() < 1e-12);
    // Left multiplication carries leaves to leaves; the flow stays in the leaf.
    Mat2 up;
    up << 1.3, 0.7, 0.0, 1.0 / 1.3;
    const PSL2Point q(p.m * up);
    CHECK(leaf_residual(p, q) < 1e-15);
    CHECK(leaf_residual(psl2_left(g, p), psl2_left(g, q)) < 1e-12);
    CHECK(leaf_residual(p, psl2_flow(p, 2.0)) < 1e-15);
  }
  CHECK(leaf_residual(p, PSL2Point(p.m * rotation(0.3))) > 0.1);
}

TEST_CASE("rho length: eigenvalue ratio and periods") {
  const GeneratorSet s = schottky(2.5, 3.0, 0.5);
  const RhoLength r = rho_length(s, Word{1});
  CHECK(r.t == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(rho_length(s, Word{-1}).t == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  GeneratorSet rot;
  rot.rank = 1;
  rot.mats = {rotation(0.3)};
  CHECK_THROWS_WITH_AS(rho_length(rot, Word{1}), doctest::Contains("not hyperbolic"), Error);
  CHECK_THROWS_AS(rho_length(oct(), Word{}), Error);
  for (const Word& w : enumerate_words(oct(), 3)) {
    const RhoLength l = rho_length(oct(), w);
    CHECK(std::fabs(l.t - l.eigen_ratio) < 1e-12);
    CHECK(l.conj_residual < 1e-12);
    CHECK(std::fabs(l.t - period(classical_fn(), oct(), w).value) < 1e-8);
  }
}

TEST_CASE("Ghys deformation shifts the spectrum and keeps the cross ratio") {
  const GhysRep plain = ghys_deform(oct(), {0, 0, 0, 0});
  const GhysRep tw = ghys_deform(oct(), {0.3, 0, 0, 0});
  CHECK_THROWS_AS(ghys_deform(oct(), {0.3, 0, 0, 0}, Word{1, 1}), Error);
  CHECK_THROWS_AS(ghys_deform(oct(), {0.3, 0}), Error);
  for (const Word& w : std::vector<Word>{{1}, {-1}, {1, 2}, {1, 1, -3}, {2, -4}, {-1, -1, 2}}) {
    const double l = rho_length(oct(), w).t;
    int count = 0;
    for (int x : w) count += x == 1 ? 1 : x == -1 ? -1 : 0;
    CHECK(plain.length(w) == doctest::Approx(l).epsilon(1e-13));
    CHECK(std::fabs(tw.length(w) - (l + 0.3 * count)) < 1e-12);
    CHECK(std::fabs(tw.jet_length(w) - tw.length(w)) < 1e-12);
    // Same circle maps: boundary cross ratios of the images agree.
    const JetGroupElement a = plain.element(w), b = tw.element(w);
    const double xs[4] = {0.3, 1.9, 3.1, 5.0};
    double ia[4], ib[4];
    for (int k = 0; k < 4; ++k) {
      ia[k] = a.phi(xs[k])[0];
      ib[k] = b.phi(xs[k])[0];
    }
    const double ca = classical_cr(point_at_angle(ia[0]), point_at_angle(ia[1]), point_at_angle(ia[2]), point_at_angle(ia[3]));
    const double cb = classical_cr(point_at_angle(ib[0]), point_at_angle(ib[1]), point_at_angle(ib[2]), point_at_angle(ib[3]));
    CHECK(std::fabs(ca - cb) <= 1e-12 * std::fabs(ca));
  }
  // The deformed elements still form a representation.
  const Word u{1, 2}, v{-3, 1};
  CHECK(jet_act_check_homomorphism(tw.element(u), tw.element(v), 64) < 1e-9);
  double worst = 0.0;
  const JetGroupElement uv = tw.element(concat(u, v)), pr = product(tw.element(u), tw.element(v));
  for (int k = 0; k < 64; ++k) {
    const Jet j(two_pi * k / 64, 0.1, 0.0);
    worst = std::max(worst, jet_distance(jet_act(uv, j), jet_act(pr, j)) / (1.0 + std::fabs(jet_act(uv, j).r)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("pi-curve holonomy") {
  std::vector<double> th, r;
  for (int i = 0; i <= 100; ++i) {
    th.push_back(wrap_angle(two_pi * i / 100));
    r.push_back(0.3);
  }
  const PiCurve loop = make_pi_curve(th, r);
  CHECK(loop.closed());
  CHECK(pi_holonomy(loop) == doctest::Approx(std::exp(two_pi * 0.3)).epsilon(1e-13));
  CHECK(pi_holonomy(reversed(loop)) == doctest::Approx(std::exp(-two_pi * 0.3)).epsilon(1e-13));
  const PiCurve vertical = make_pi_curve({0.0, 0.0, 0.0}, {0.3, 5.0, -2.0});
  CHECK(pi_holonomy(vertical) == 1.0);
  CHECK(pi_log_holonomy(concat(loop, vertical)) == doctest::Approx(two_pi * 0.3).epsilon(1e-13));
  CHECK_THROWS_AS(concat(vertical, loop), Error);
  CHECK_THROWS_AS(make_pi_curve({0.0, NAN}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(make_pi_curve({0.0}, {0.0}), Error);
  // Refinement: a smooth closed curve.
  auto c = [](double s) { return std::array<double, 2>{two_pi * s + 0.3 * std::sin(two_pi * s), 1.0 + std::cos(two_pi * s)}; };
  const double exact = two_pi + 0.3 * pi;  // int (1 + cos u)(1 + 0.3 cos u) du
  CHECK(std::fabs(pi_log_holonomy(c, 64) - exact) < 1e-12);
}

TEST_CASE("width: log width = l(g) + l(g^-1) = 2 l_b") {
  const GeneratorSet s = schottky(2.5, 3.0, 0.5);
  const WidthReport w1 = width_identity(ghys_deform(s, {0, 0}), Word{1});
  CHECK(std::fabs(w1.log_width - 2 * std::log(4.0)) < 1e-8);
  CHECK(w1.residual < 1e-8);
  const WidthReport id = width_identity(ghys_deform(s, {0, 0}), Word{});
  CHECK(id.log_width == 0.0);
  const GhysRep plain = ghys_deform(oct(), {0, 0, 0, 0});
  const GhysRep tw = ghys_deform(oct(), {0.3, -0.2, 0.1, 0.25});
  for (const Word& w : std::vector<Word>{{1}, {2, 3}, {-4, 1}, {1, -2, 3}}) {
    const WidthReport a = width_identity(plain, w), b = width_identity(tw, w);
    CHECK(a.residual < 1e-8);
    CHECK(b.residual < 1e-8);
    CHECK(std::fabs(a.l_plus - a.l_minus) < 1e-12);
    CHECK(std::fabs(b.l_plus - b.l_minus - 2 * tw.omega_of(w)) < 1e-12);
    CHECK(std::fabs(a.log_width - b.log_width) < 1e-8);
  }
}

TEST_CASE("straightening: flat density") {
  const Straighten psi([](double s) { return s; }, [](double, double) { return 1.0; }, [](double s) { return s + pi; });
  for (double s : {0.2, 3.0, 6.0})
    for (double d : {0.1, 2.0, 5.9}) {
      const auto p = psi.map(s, s + d);
      CHECK(p[0] == s);
      CHECK(p[1] == doctest::Approx(d - pi).epsilon(1e-13));
    }
  const auto rep = psi.check({{0.0, 1.0, 1.5, 3.0}, {2.0, 2.5, 3.0, 7.0}}, {{1.0, 3.0, 0.5}});
  CHECK(rep.fiber == 0.0);
  CHECK(rep.measure < 1e-12);
  CHECK(rep.holonomy < 1e-10);
  CHECK_THROWS_WITH_AS(Straighten([](double s) { return s; }, [](double, double) { return 1.0; },
                                  [](double s) { return s + 1e-12; }),
                       doctest::Contains("touches"), Error);
  CHECK_THROWS_WITH_AS(Straighten([](double s) { return s; }, [](double s, double) { return std::cos(s); },
                                  [](double s) { return s + pi; }),
                       doctest::Contains("positive"), Error);
}

TEST_CASE("straightening: n=2 density conjugates the Fuchsian action") {
  const DensityTable d = DensityTable::closed_form(2);
  const Straighten psi([](double s) { return s; }, [&](double s, double t) { return d.density(s, t); },
                       [](double s) { return s + pi; });
  // psi(s, t) = (s, cot((s - t) / 2))
  for (double s : {0.5, 4.0})
    for (double t : {s + 0.4, s + 3.0, s + 5.5}) CHECK(psi.map(s, t)[1] == doctest::Approx(1.0 / std::tan((s - t) / 2)).epsilon(1e-12));
  const auto rep = psi.check({{0.0, 0.5, 1.0, 2.5}, {3.0, 4.0, 4.5, 8.0}}, {{1.0, 3.5, 0.6}, {4.0, 6.5, 1.0}});
  CHECK(rep.fiber == 0.0);
  CHECK(rep.measure < 1e-6);
  CHECK(rep.holonomy < 1e-6);
  for (const Mat2& M : oct().mats) CHECK(straighten_conjugacy(psi, M, 16) < 1e-9);
}

TEST_CASE("connection normalization") {
  const double R = 2.0;
  {
    const Normalization nm = connection_normalize({[](double, double r) { return -r; }, [](double, double) { return 0.0; }});
    CHECK(std::fabs(nm.lambda) < 1e-15);
    CHECK(std::fabs(nm.h(2.0, 1.0)) < 1e-15);
  }
  {
    const Normalization nm =
        connection_normalize({[](double th, double r) { return -r + std::cos(th); }, [](double, double) { return 0.0; }});
    CHECK(std::fabs(nm.lambda) < 1e-14);
    for (double th : {0.3, 2.0, 5.0}) CHECK(std::fabs(nm.h(th, 0.7) - std::sin(th)) < 1e-12);
  }
  {
    const Normalization nm = connection_normalize({[](double, double r) { return -r + 0.7; }, [](double, double) { return 0.0; }});
    CHECK(nm.lambda == doctest::Approx(0.7).epsilon(1e-14));
  }
  // Mixed: beta + 0.7 dtheta + d(r^2 sin theta).
  const ConnectionForm a{[](double th, double r) { return -r + 0.7 + r * r * std::cos(th); },
                         [](double th, double r) { return 2 * r * std::sin(th); }};
  const Normalization nm = connection_normalize(a, R);
  CHECK(nm.lambda == doctest::Approx(0.7).epsilon(1e-13));
  const JetCurve c{[](double s) { return Jet(2.0 * s, std::sin(3 * s), 0.4 * std::cos(s)); }, 0.0, 4.0};
  CHECK(normalization_residual(a, nm, c, 256) < 1e-6);
  const JetCurve closed{[](double s) { return Jet(s, 0.5 + 0.3 * std::sin(s), 0.0); }, 0.0, two_pi};
  CHECK(normalization_residual(a, nm, closed, 256) < 1e-6);
  CHECK_THROWS_WITH_AS(connection_normalize({[](double, double r) { return -2 * r; }, [](double, double) { return 0.0; }}),
                       doctest::Contains("not closed"), Error);
}
