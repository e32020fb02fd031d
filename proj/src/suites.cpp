#include "xr/suites.hpp"

#include "xr/chi.hpp"
#include "xr/jetspace.hpp"
#include "xr/symplectic.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

namespace xr {

namespace {

struct Spec {
  const char* name;
  const char* anchor;
  char bound;
  double tol;
};

// Default tolerances; --tol overrides by name.
const std::vector<Spec>& specs() {
  static const std::vector<Spec> s = {
      {"axioms.cross_ratio", "symmetry, normalization and both cocycle rules of b", '<', 1e-9},
      {"axioms.strictness", "b equals 1 only on the degenerate locus", '>', 1e-6},
      {"axioms.equivariance", "b is invariant under the group", '<', 1e-9},
      {"chi.rank_vanishing", "chi of order n+1 vanishes for a rank n cross ratio", '<', 1e-8},
      {"chi.rank_nonvanishing", "chi of order p <= n is nonzero on separated tuples", '>', 1e-6},
      {"chi.base_point", "changing the base points multiplies chi by a product of b values", '<', 1e-9},
      {"periods.eigenvalues", "periods of b equal log|lambda_max / lambda_min|", '<', 1e-8},
      {"periods.inverse", "a word and its inverse have the same period", '<', 1e-10},
      {"relations.classical_first", "1 - b(f,v,e,u) = b(u,v,e,f) for the classical cross ratio", '<', 1e-9},
      {"relations.classical_second", "the four-term relation for the classical cross ratio", '<', 1e-9},
      {"relations.first", "1 - b(f,v,e,u) = b(u,v,e,f) for n = 2", '<', 1e-9},
      {"relations.second", "the four-term relation for n = 2", '<', 1e-9},
      {"relations.first_witness", "the first relation fails beyond n = 2", '>', 0.1},
      {"triple.t_independence", "the triple ratio does not depend on t", '<', 1e-9},
      {"reconstruct.projective_match", "curves rebuilt from b are projectively the limit curves", '<', 1e-6},
      {"reconstruct.tuple_independence", "the rebuilt curves do not depend on the tuple", '<', 1e-8},
      {"reconstruct.cross_ratio", "the rebuilt curves reproduce b", '<', 1e-8},
      {"symplectic.polarized_quadrature", "exp(1/2 int Omega) over a leafwise disc equals the pairing quotient", '<', 1e-6},
      {"symplectic.convergence_order", "|order - 2| of the polarized quadrature", '<', 0.3},
      {"symplectic.action_difference", "the action difference equals b squared", '<', 1e-8},
      {"symplectic.half_log_period", "half the log action difference is the period", '<', 1e-8},
      {"symplectic.translation_length", "fiber translation equals log|lambda_max / lambda_min|", '<', 1e-9},
      {"symplectic.cotangent", "the cotangent integral recovers |b|", '<', 1e-3},
      {"jet.transport", "the jet action is the transport of 1-jets", '<', 1e-9},
      {"jet.homomorphism", "the jet action is a left action", '<', 1e-9},
      {"jet.flow_centrality", "the canonical flow commutes with the group", '<', 1e-10},
      {"jet.contact", "the action preserves beta = df - r dtheta", '<', 1e-8},
      {"jet.rho_length_eigen", "rho length equals log|lambda_max / lambda_min|", '<', 1e-12},
      {"jet.rho_length_period", "rho length equals the period of the classical cross ratio", '<', 1e-8},
      {"jet.ghys_shift", "a Ghys deformation shifts the spectrum by omega", '<', 1e-12},
      {"jet.ghys_cross_ratio", "a Ghys deformation keeps the cross ratio", '<', 1e-12},
      {"jet.width", "log width = l(g) + l(g^-1) = 2 l_b(g)", '<', 1e-8},
      {"jet.straighten", "the straightening keeps fibers, measure and holonomy", '<', 1e-6},
      {"jet.normalization", "a closed connection form is normalized to beta", '<', 1e-6},
      {"otal.horoball", "the horocycle cross ratio does not depend on the horoballs", '<', 1e-10},
      {"otal.classical_modulus", "the horocycle cross ratio has the classical modulus", '<', 1e-8},
      {"otal.flow_group_law", "the cross ratio flow is a one-parameter group", '<', 1e-6},
      {"otal.flow_period", "flowing y by the period reaches gamma y", '<', 1e-6},
  };
  return s;
}

const Spec& spec(const std::string& name) {
  for (const auto& s : specs())
    if (name == s.name) return s;
  throw Error("internal: no check named " + name);
}

class Recorder {
public:
  Recorder(const SuiteConfig& cfg, std::vector<CheckRecord>& out) : cfg_(cfg), out_(out) {}

  double tol(const std::string& name, double fallback = -1.0) const {
    auto it = cfg_.tol.find(name);
    if (it != cfg_.tol.end()) return it->second;
    return fallback > 0 ? fallback : spec(name).tol;
  }

  // Evaluates fn and records its value; an exception becomes a failed record.
  void run(const std::string& name, long samples, const std::function<double(std::string&)>& fn,
           double default_tol = -1.0) {
    const Spec& sp = spec(name);
    CheckRecord r;
    r.name = name;
    r.anchor = sp.anchor;
    r.n = cfg_.rep.n;
    r.samples = samples;
    r.bound = sp.bound;
    r.tol = tol(name, default_tol);
    try {
      r.value = fn(r.note);
      r.pass = std::isfinite(r.value) && (sp.bound == '<' ? r.value < r.tol : r.value > r.tol);
    } catch (const std::exception& e) {
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.note = std::string("error: ") + e.what();
      r.pass = false;
    }
    out_.push_back(std::move(r));
  }

private:
  const SuiteConfig& cfg_;
  std::vector<CheckRecord>& out_;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Shared, lazily built inputs of one run.
class Context {
public:
  explicit Context(const SuiteConfig& cfg) : cfg(cfg), g(cfg.rep.base), n(cfg.rep.n) {}

  const SuiteConfig& cfg;
  const GeneratorSet& g;
  const int n;

  const SampleSet& samples() {
    if (samples_.size() == 0) samples_ = sample_boundary(g, cfg.max_word_len);
    return samples_;
  }
  // About 1500 points, evenly spaced through the sorted samples.
  const SampleSet& coarse() {
    if (coarse_.size() == 0) {
      const auto& s = samples();
      const std::size_t step = std::max<std::size_t>(1, s.size() / 1500);
      for (std::size_t i = 0; i < s.size(); i += step) coarse_.points.push_back(s[i]);
    }
    return coarse_;
  }
  const SampleSet& medium() {
    if (medium_.size() == 0) medium_ = sample_boundary(g, std::min(cfg.max_word_len, 4));
    return medium_;
  }
  const CurvePair& curves() {
    if (!curves_) curves_ = std::make_unique<CurvePair>(CurvePair::eigen_sampled(cfg.rep));
    return *curves_;
  }
  CrossRatioFn b() {
    CrossRatioFn f = curve_fn(curves(), "b_rho");
    return cfg.corrupt ? noisy_cr(f, 1e-3) : f;
  }
  const std::vector<Word>& short_words() {
    if (words_.empty()) words_ = shortest_words(g, 100, std::min(cfg.max_word_len, 4));
    return words_;
  }
  std::uint64_t seed(std::uint64_t k) const { return stream_seed(cfg.seed, k); }

private:
  SampleSet samples_, coarse_, medium_;
  std::unique_ptr<CurvePair> curves_;
  std::vector<Word> words_;
};

long frac(long tuples, long d) { return std::max<long>(10, tuples / d); }

// ---- suites

void suite_axioms(Context& cx, Recorder& rec) {
  const auto b = cx.b();
  const long N = cx.cfg.tuples;
  AxiomReport ax;
  bool have = false;
  auto axioms = [&]() -> const AxiomReport& {
    if (!have) ax = check_axioms(b, cx.samples(), N, cx.seed(1));
    have = true;
    return ax;
  };
  rec.run("axioms.cross_ratio", N, [&](std::string& note) {
    const auto& a = axioms();
    note = fmt("symmetry %.3g, zero %.3g, cocycles %.3g %.3g", a.symmetry.max, a.zero.max, a.cocycle_first.max,
               a.cocycle_second.max) +
           fmt(", equal %.3g", a.strict_equal.max);
    return a.worst();
  });
  rec.run("axioms.strictness", N, [&](std::string&) { return axioms().strictness_floor; });
  rec.run("axioms.equivariance", frac(N, 5),
          [&](std::string&) { return check_invariance(b, cx.g, cx.samples(), frac(N, 5), cx.seed(2)).max; });
}

void suite_chi(Context& cx, Recorder& rec) {
  const auto b = cx.b();
  const long N = frac(cx.cfg.tuples, 5);
  RankReport rr;
  bool have = false;
  auto rank = [&]() -> const RankReport& {
    if (!have) rr = hitchin_rank_test(b, cx.n, cx.samples(), N, cx.seed(3));
    have = true;
    return rr;
  };
  rec.run("chi.rank_vanishing", N, [&](std::string& note) {
    note = fmt("row-norm scale %.3g", rank().max_zero_raw);
    return rank().max_zero;
  });
  rec.run("chi.rank_nonvanishing", N * cx.n, [&](std::string&) {
    const auto& v = rank().min_nonzero;
    return *std::min_element(v.begin(), v.end());
  });
  const long M = frac(cx.cfg.tuples, 10);
  rec.run("chi.base_point", M, [&](std::string& note) {
    std::mt19937_64 rng(cx.seed(4));
    double worst = 0.0;
    long done = 0, tries = 0;
    while (done < M) {
      if (++tries > 50 * M) throw Error("chi.base_point: could not draw admissible tuples");
      const auto t = draw_chi_tuple(rng, cx.samples(), cx.n, TupleDesign::interleaved);
      const auto extra = draw_chi_tuple(rng, cx.samples(), 1, TupleDesign::interleaved);
      // The new base points must stay clear of every point of the tuple;
      // on Cantor-like limit sets separate draws can snap to the same sample.
      bool clear = true;
      for (const auto* side : {&t.e, &t.u})
        for (const auto& p : *side)
          clear = clear && circ_dist(p.angle, extra.e[0].angle) > 1e-2 && circ_dist(p.angle, extra.u[0].angle) > 1e-2;
      if (!clear) continue;
      worst = std::max(worst, basepoint_independence(b, t, extra.e[0], extra.u[0]).rel);
      ++done;
    }
    note = fmt("%.0f draws", static_cast<double>(tries));
    return worst;
  });
}

void suite_periods(Context& cx, Recorder& rec) {
  const auto b = cx.b();
  const auto& words = cx.short_words();
  const long W = static_cast<long>(words.size());
  rec.run("periods.eigenvalues", W, [&](std::string& note) {
    double worst = 0.0, worst_alt = 0.0;
    for (const Word& w : words) {
      const auto fd = fixed_point_data(cx.cfg.rep, w);
      const double exact = std::log(std::fabs(fd.lambda_max / fd.lambda_min));
      const auto p = period(b, cx.g, w);
      worst = std::max(worst, std::fabs(p.value - exact));
      worst_alt = std::max(worst_alt, std::fabs(p.value_alt - exact));
    }
    note = fmt("second base point %.3g; longest translation length %.6g", worst_alt,
               2 * std::acosh(std::fabs(evaluate(cx.g, words.back()).trace()) / 2));
    return worst;
  });
  rec.run("periods.inverse", W, [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words)
      worst = std::max(worst, std::fabs(period(b, cx.g, w).value - period(b, cx.g, inverse(w)).value));
    return worst;
  });
}

std::string tuple_note(const SampleSet& s, const std::vector<int>& t) {
  std::string out = "angles";
  for (int i : t) out += fmt(" %.17g", s[i].angle);
  return out;
}

void suite_relations(Context& cx, Recorder& rec) {
  const long N = frac(cx.cfg.tuples, 5);
  const auto& s = cx.samples();
  rec.run("relations.classical_first", N,
          [&](std::string&) { return check_relation12(classical_fn(), s, N, cx.seed(5)).violation.max; });
  rec.run("relations.classical_second", N,
          [&](std::string&) { return check_relation13(classical_fn(), s, N, cx.seed(6)).violation.max; });
  const auto b = cx.b();
  if (cx.n == 2) {
    rec.run("relations.first", N, [&](std::string&) { return check_relation12(b, s, N, cx.seed(7)).violation.max; });
    rec.run("relations.second", N, [&](std::string&) { return check_relation13(b, s, N, cx.seed(8)).violation.max; });
  } else {
    rec.run("relations.first_witness", N, [&](std::string& note) {
      const auto r = check_relation12(b, s, N, cx.seed(7));
      note = "witness (f, v, e, u) " + tuple_note(s, r.violation.argmax);
      return r.violation.max;
    });
  }
}

void suite_triple(Context& cx, Recorder& rec) {
  const auto b = cx.b();
  const long N = frac(cx.cfg.tuples, 5);
  rec.run("triple.t_independence", N, [&](std::string&) {
    std::mt19937_64 rng(cx.seed(9));
    const auto& s = cx.samples();
    double worst = 0.0;
    for (long i = 0; i < N; ++i) {
      const auto t = draw_tuple(rng, s, 5, 0.1);
      const auto r = triple_ratio(b, s[t[0]], s[t[1]], s[t[2]], s[t[3]], s[t[4]]);
      worst = std::max(worst, rel_diff(r.value, r.value_alt));
    }
    return worst;
  });
}

void suite_reconstruct(Context& cx, Recorder& rec) {
  const auto b = cx.b();
  std::mt19937_64 rng(cx.seed(10));
  std::unique_ptr<CurvePair> c1, c2;
  SampleSet pts;
  std::string failure;
  try {
    const auto t1 = draw_chi_tuple(rng, cx.samples(), cx.n, TupleDesign::interleaved);
    const auto t2 = draw_chi_tuple(rng, cx.samples(), cx.n, TupleDesign::interleaved);
    c1 = std::make_unique<CurvePair>(reconstruct_curves(b, cx.n, t1));
    c2 = std::make_unique<CurvePair>(reconstruct_curves(b, cx.n, t2));
    // The reconstructed coordinates blow up at e0 and u0; keep clear of them.
    for (const auto& q : cx.coarse().points) {
      bool near = false;
      for (const auto& p : {t1.e[0], t1.u[0], t2.e[0], t2.u[0]}) near = near || circ_dist(p.angle, q.angle) < 1e-2;
      if (!near) pts.points.push_back(q);
    }
  } catch (const Error& e) {
    failure = e.what();
  }
  auto need = [&]() {
    if (!failure.empty()) throw Error(failure);
  };
  const long P = static_cast<long>(pts.size());
  rec.run("reconstruct.projective_match", P, [&](std::string&) {
    need();
    return projective_match(cx.curves(), *c1, pts).residual;
  });
  rec.run("reconstruct.tuple_independence", P, [&](std::string&) {
    need();
    return projective_match(*c1, *c2, pts).residual;
  });
  const long N = frac(cx.cfg.tuples, 5);
  rec.run("reconstruct.cross_ratio", N, [&](std::string&) {
    need();
    return cross_ratio_residual(b, *c1, pts, N, cx.seed(11));
  });
}

void suite_symplectic(Context& cx, Recorder& rec) {
  const auto& c = cx.curves();
  const auto b = curve_fn(c, "b_rho");
  const int grid = cx.cfg.grid;
  // Leafwise discs through limit-curve quadruples with a positive value and
  // all four corner pairings of unit lifts above a floor.
  std::vector<std::array<int, 4>> quads;
  {
    std::mt19937_64 rng(cx.seed(12));
    const auto& s = cx.medium();
    for (int tries = 0; quads.size() < 3 && tries < 20000; ++tries) {
      const auto t = draw_tuple(rng, s, 4, 0.3);
      const Vec e = c.xi(s[t[0]]), u = c.xistar(s[t[1]]), f = c.xi(s[t[2]]), v = c.xistar(s[t[3]]);
      const double floor = std::min({std::fabs(e.dot(u)), std::fabs(e.dot(v)), std::fabs(f.dot(u)), std::fabs(f.dot(v))});
      if (floor < 0.1) continue;
      if (polarized_cr_algebraic(ProjPoint(e), ProjHyperplane(u), ProjPoint(f), ProjHyperplane(v)) > 0)
        quads.push_back({t[0], t[1], t[2], t[3]});
    }
  }
  std::vector<ConvergenceStudy> studies;
  auto study = [&]() -> const std::vector<ConvergenceStudy>& {
    if (studies.empty()) {
      if (quads.empty()) throw Error("no limit-curve quadruple with a positive polarized value");
      const auto& s = cx.medium();
      for (const auto& q : quads)
        studies.push_back(polarized_convergence(ProjPoint(c.xi(s[q[0]])), ProjHyperplane(c.xistar(s[q[1]])),
                                                ProjPoint(c.xi(s[q[2]])), ProjHyperplane(c.xistar(s[q[3]])),
                                                {grid / 8, grid / 4, grid / 2, grid}));
    }
    return studies;
  };
  rec.run("symplectic.polarized_quadrature", 3, [&](std::string& note) {
    double worst = 0.0;
    for (const auto& st : study()) worst = std::max(worst, st.rel_error.back());
    note = fmt("N = %.0f", grid);
    return worst;
  });
  rec.run("symplectic.convergence_order", 3, [&](std::string& note) {
    double worst = 0.0;
    for (const auto& st : study()) {
      worst = std::max(worst, std::fabs(st.order - 2.0));
      note += fmt("%.4f ", st.order);
    }
    note = "orders " + note;
    return worst;
  });
  std::vector<Word> words(cx.short_words().begin(), cx.short_words().begin() + 8);
  rec.run("symplectic.action_difference", 8, [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words) worst = std::max(worst, action_difference(c, cx.g, w).residual);
    return worst;
  });
  rec.run("symplectic.half_log_period", 8, [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words)
      worst = std::max(worst, std::fabs(action_difference(c, cx.g, w).half_log - period(b, cx.g, w).value));
    return worst;
  });
  rec.run("symplectic.translation_length", 8, [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words) {
      const auto a = translation_length(cx.cfg.rep, w);
      const auto ai = translation_length(cx.cfg.rep, inverse(w));
      worst = std::max({worst, std::fabs(a.fiber - a.eigen_ratio), std::fabs(ai.fiber - a.fiber)});
    }
    return worst;
  });
  rec.run(
      "symplectic.cotangent", 20,
      [&](std::string& note) {
        const auto& s = cx.medium();
        const DensityTable d = cx.n == 2 ? DensityTable::closed_form(2) : pullback_density(c, s);
        note = cx.n == 2 ? "closed-form density" : "interpolated density";
        std::mt19937_64 rng(cx.seed(13));
        double worst = 0.0;
        int done = 0;
        for (int tries = 0; done < 20; ++tries) {
          if (tries > 2000) throw Error("symplectic.cotangent: too few unlinked quadruples");
          const auto t = draw_tuple(rng, s, 4, 0.3);
          const std::array<double, 4> a{s[t[0]].angle, s[t[1]].angle, s[t[2]].angle, s[t[3]].angle};
          CotangentResult r;
          try {
            r = cotangent_cr(d, a, cx.n == 2 ? grid : grid / 4);
          } catch (const Error&) {
            continue;
          }
          const double ref = std::fabs(curve_cr(c, s[t[0]], s[t[1]], s[t[2]], s[t[3]]));
          worst = std::max(worst, std::fabs(std::fabs(r.value) - ref) / ref);
          ++done;
        }
        return worst;
      },
      cx.n == 2 ? 1e-4 : 1e-3);
}

// ---- jet suite generators

TrigPoly random_trig(std::mt19937_64& rng, int deg, double amp) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> a(deg), b(deg);
  for (int k = 0; k < deg; ++k) {
    a[k] = amp * U(rng) / (k + 1);
    b[k] = amp * U(rng) / (k + 1);
  }
  return TrigPoly(amp * U(rng), a, b);
}

// 1 + p' stays above 1/2.
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

void suite_jet(Context& cx, Recorder& rec) {
  const GeneratorSet& g = cx.g;
  rec.run("jet.transport", 20 * 16, [&](std::string&) {
    std::mt19937_64 rng(cx.seed(20));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const TrigPoly h = random_trig(rng, 3, 0.8), p = random_diffeo(rng, 3), F = random_trig(rng, 2, 1.0);
      const JetGroupElement e = JetGroupElement::trig(h, p);
      for (int i = 0; i < 16; ++i) {
        const double th = two_pi * i / 16 + 0.05;
        const auto Fe = F.eval(th);
        worst = std::max(worst, jet_distance(jet_act(e, Jet(th, Fe[1], Fe[0])), jet_transport(h, p, F, th)));
      }
    }
    return worst;
  });
  rec.run("jet.homomorphism", 20, [&](std::string&) {
    std::mt19937_64 rng(cx.seed(21));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = JetGroupElement::trig(random_trig(rng, 3, 0.8), random_diffeo(rng, 3));
      const auto b = JetGroupElement::trig(random_trig(rng, 3, 0.8), random_diffeo(rng, 3));
      worst = std::max(worst, jet_act_check_homomorphism(a, b, 64));
    }
    return worst;
  });
  rec.run("jet.flow_centrality", 50 + g.rank, [&](std::string&) {
    std::mt19937_64 rng(cx.seed(22));
    std::uniform_real_distribution<double> T(-2, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto e = JetGroupElement::trig(random_trig(rng, 3, 0.8), random_diffeo(rng, 3));
      worst = std::max(worst, flow_centrality(e, T(rng), 64));
    }
    for (const Mat2& M : g.mats) worst = std::max(worst, flow_centrality(JetGroupElement::fuchsian(M), 0.7, 64));
    return worst;
  });
  rec.run("jet.contact", 10, [&](std::string&) {
    std::mt19937_64 rng(cx.seed(23));
    const JetCurve loose{[](double s) { return Jet(s, 1.0 + 0.5 * std::cos(s), 0.2 * s); }, 0.0, 3.0};
    const JetCurve graph = jet_graph(TrigPoly(0.0, {0.0}, {1.0}));
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const auto e = JetGroupElement::trig(random_trig(rng, 3, 0.8), random_diffeo(rng, 3));
      worst = std::max({worst, contact_check(e, loose, 512).violation, contact_check(e, graph, 512).violation});
    }
    return worst;
  });
  const auto words = shortest_words(g, 20, 3);
  rec.run("jet.rho_length_eigen", 20, [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words) {
      const RhoLength l = rho_length(g, w);
      worst = std::max({worst, std::fabs(l.t - l.eigen_ratio), l.conj_residual});
    }
    return worst;
  });
  rec.run("jet.rho_length_period", 20, [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words) worst = std::max(worst, std::fabs(rho_length(g, w).t - period(classical_fn(), g, w).value));
    return worst;
  });
  std::vector<double> omega(g.rank);
  for (int k = 0; k < g.rank; ++k) omega[k] = 0.3 - 0.15 * k;
  const GhysRep plain = ghys_deform(g, std::vector<double>(g.rank, 0.0));
  const GhysRep tw = ghys_deform(g, omega);
  rec.run("jet.ghys_shift", 20, [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words) {
      const double l = rho_length(g, w).t;
      worst = std::max({worst, std::fabs(tw.length(w) - (l + tw.omega_of(w))),
                        std::fabs(tw.jet_length(w) - (l + tw.omega_of(w)))});
    }
    return worst;
  });
  rec.run("jet.ghys_cross_ratio", 20, [&](std::string&) {
    const double xs[4] = {0.3, 1.9, 3.1, 5.0};
    double worst = 0.0;
    for (const Word& w : words) {
      const JetGroupElement a = plain.element(w), b = tw.element(w);
      BoundaryPoint pa[4], pb[4];
      for (int k = 0; k < 4; ++k) {
        pa[k] = point_at_angle(a.phi(xs[k])[0]);
        pb[k] = point_at_angle(b.phi(xs[k])[0]);
      }
      const double ca = classical_cr(pa[0], pa[1], pa[2], pa[3]), cb = classical_cr(pb[0], pb[1], pb[2], pb[3]);
      worst = std::max(worst, std::fabs(ca - cb) / std::fabs(ca));
    }
    return worst;
  });
  rec.run("jet.width", 8, [&](std::string&) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, width_identity(plain, words[i]).residual);
      worst = std::max(worst, width_identity(tw, words[i]).residual);
    }
    return worst;
  });
  rec.run("jet.straighten", 4 + 2 * g.rank, [&](std::string& note) {
    const DensityTable d = DensityTable::closed_form(2);
    const Straighten psi([](double s) { return s; }, [&](double s, double t) { return d.density(s, t); },
                         [](double s) { return s + pi; });
    const auto r = psi.check({{0.0, 0.5, 1.0, 2.5}, {3.0, 4.0, 4.5, 8.0}}, {{1.0, 3.5, 0.6}, {4.0, 6.5, 1.0}});
    double conj = 0.0;
    for (const Mat2& M : g.mats) conj = std::max(conj, straighten_conjugacy(psi, M, 16));
    note = fmt("fiber %.3g, measure %.3g, holonomy %.3g, conjugacy %.3g", r.fiber, r.measure, r.holonomy, conj);
    return std::max({r.fiber, r.measure, r.holonomy, conj});
  });
  rec.run("jet.normalization", 2, [&](std::string& note) {
    const ConnectionForm a{[](double th, double r) { return -r + 0.7 + r * r * std::cos(th); },
                           [](double th, double r) { return 2 * r * std::sin(th); }};
    const Normalization nm = connection_normalize(a, 2.0);
    const JetCurve c1{[](double s) { return Jet(2.0 * s, std::sin(3 * s), 0.4 * std::cos(s)); }, 0.0, 4.0};
    const JetCurve c2{[](double s) { return Jet(s, 0.5 + 0.3 * std::sin(s), 0.0); }, 0.0, two_pi};
    note = fmt("lambda %.17g", nm.lambda);
    return std::max({normalization_residual(a, nm, c1, 256), normalization_residual(a, nm, c2, 256),
                     std::fabs(nm.lambda - 0.7)});
  });
}

void suite_otal(Context& cx, Recorder& rec) {
  const long N = frac(cx.cfg.tuples, 10);
  std::vector<std::array<double, 4>> as, h1, h2;
  {
    std::mt19937_64 rng(cx.seed(30));
    std::uniform_real_distribution<double> H(1e-4, 1e-2);
    const auto& s = cx.samples();
    for (long i = 0; i < N; ++i) {
      const auto t = draw_tuple(rng, s, 4, 0.1);
      as.push_back({s[t[0]].angle, s[t[1]].angle, s[t[2]].angle, s[t[3]].angle});
      h1.push_back({H(rng), H(rng), H(rng), H(rng)});
      h2.push_back({H(rng), H(rng), H(rng), H(rng)});
    }
  }
  rec.run("otal.horoball", N, [&](std::string&) {
    double worst = 0.0;
    for (long i = 0; i < N; ++i)
      worst = std::max(worst, rel_diff(otal_cr_hyperbolic(as[i], h1[i]), otal_cr_hyperbolic(as[i], h2[i])));
    return worst;
  });
  rec.run("otal.classical_modulus", N, [&](std::string&) {
    double worst = 0.0;
    for (long i = 0; i < N; ++i) {
      const auto& a = as[i];
      const double c = classical_cr(line_of_angle(a[0]), line_of_angle(a[1]), line_of_angle(a[2]), line_of_angle(a[3]));
      worst = std::max(worst, rel_diff(std::fabs(otal_cr_hyperbolic(a, h1[i])), std::fabs(c)));
    }
    return worst;
  });
  const auto b = classical_fn();
  const auto words = shortest_words(cx.g, 8, 3);
  rec.run("otal.flow_group_law", 9 * static_cast<long>(words.size()), [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words) {
      const auto gm = fixed_point(cx.g, w, Sign::repelling), gp = fixed_point(cx.g, w, Sign::attracting);
      const auto y = period_base_points(cx.g, w).first;
      for (double t : {0.1, 0.5, 1.0}) {
        const auto xt = flow_from_cr(b, gm, y, gp, t);
        for (double s : {0.1, 0.5, 1.0})
          worst = std::max(worst, circ_dist(flow_from_cr(b, gm, xt, gp, s).angle, flow_from_cr(b, gm, y, gp, t + s).angle));
      }
    }
    return worst;
  });
  rec.run("otal.flow_period", static_cast<long>(words.size()), [&](std::string&) {
    double worst = 0.0;
    for (const Word& w : words) {
      const auto gm = fixed_point(cx.g, w, Sign::repelling), gp = fixed_point(cx.g, w, Sign::attracting);
      const auto y = period_base_points(cx.g, w).first;
      const double lb = period_at(b, cx.g, w, y);
      worst = std::max(worst, circ_dist(flow_from_cr(b, gm, y, gp, lb).angle, act(cx.g, w, y).angle));
    }
    return worst;
  });
}

using SuiteFn = void (*)(Context&, Recorder&);

const std::vector<std::pair<std::string, SuiteFn>>& table() {
  static const std::vector<std::pair<std::string, SuiteFn>> t = {
      {"axioms", suite_axioms},       {"chi", suite_chi},       {"periods", suite_periods},
      {"relations", suite_relations}, {"triple", suite_triple}, {"reconstruct", suite_reconstruct},
      {"symplectic", suite_symplectic}, {"jet", suite_jet},     {"otal", suite_otal},
  };
  return t;
}

} // namespace

void validate(const SuiteConfig& cfg) {
  if (cfg.rep.n < 2) throw Error("config: n must be at least 2");
  if (cfg.max_word_len < 1) throw Error("config: max word length must be at least 1");
  if (cfg.tuples < 10) throw Error("config: tuple count must be at least 10");
  if (cfg.grid < 64) throw Error("config: grid must be at least 64");
  for (const auto& [k, v] : cfg.tol) {
    bool found = false;
    for (const auto& sp : specs()) found = found || k == sp.name;
    if (!found) throw Error("config: unknown tolerance key '" + k + "'");
    if (!(v > 0) || !std::isfinite(v)) throw Error("config: tolerance for " + k + " must be positive");
  }
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, f] : table()) v.push_back(n);
    return v;
  }();
  return names;
}

std::vector<CheckRecord> run_suite(const std::string& suite, const SuiteConfig& cfg,
                                   std::map<std::string, double>* timings) {
  validate(cfg);
  bool known = suite == "all";
  for (const auto& n : suite_names()) known = known || n == suite;
  if (!known) throw Error("unknown suite '" + suite + "'");
  Context cx(cfg);
  std::vector<CheckRecord> out;
  Recorder rec(cfg, out);
  for (const auto& [name, fn] : table()) {
    if (suite != "all" && suite != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    fn(cx, rec);
    if (timings) (*timings)[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  std::stable_sort(out.begin(), out.end(), [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  return out;
}

std::vector<Word> shortest_words(const GeneratorSet& g, int count, int max_len) {
  std::vector<std::pair<double, Word>> all;
  for (Word& w : enumerate_words(g, max_len)) {
    if (w.empty()) continue;
    const double tr = std::fabs(evaluate(g, w).trace());
    if (tr <= 2.0) continue;
    all.emplace_back(2 * std::acosh(tr / 2), std::move(w));
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (static_cast<int>(all.size()) < count)
    throw Error("shortest_words: only " + std::to_string(all.size()) + " hyperbolic words of length <= " +
                std::to_string(max_len));
  std::vector<Word> out;
  for (int i = 0; i < count; ++i) out.push_back(std::move(all[i].second));
  return out;
}

} // namespace xr
