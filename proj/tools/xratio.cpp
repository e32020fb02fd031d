// xratio: build representation bundles, run check suites, dump reconstructed curves.
#include "xr/chi.hpp"
#include "xr/suites.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace xr;

namespace {

// ---- JSON with 17 significant digits

void write_json(std::ostream& os, const json& j, int indent, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string end_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
      }
      break;
    }
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << end_pad << "}";
      break;
    }
    case json::value_t::array: {
      // Flat numeric arrays stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && e.is_primitive();
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent, depth + 1);
        }
        os << "]";
        break;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << "\n" << end_pad << "]";
      break;
    }
    default:
      os << j.dump();
  }
}

// Writes through a temporary file so a failed run leaves nothing behind.
void save(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot write " + tmp.string());
    os << text;
    if (!os) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string to_text(const json& j) {
  std::ostringstream os;
  write_json(os, j, 2);
  os << "\n";
  return os.str();
}

json load(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("missing file " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

// Row-major flat arrays.
json mat_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) a.push_back(m(i, k));
  return a;
}

Mat mat_from(const json& a, int n, const std::string& what) {
  if (!a.is_array() || static_cast<int>(a.size()) != n * n)
    throw Error(what + ": expected " + std::to_string(n * n) + " numbers");
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (!a[i * n + k].is_number()) throw Error(what + ": non-numeric entry");
      m(i, k) = a[i * n + k].get<double>();
    }
  return m;
}

std::string kind_name(GroupKind k) { return k == GroupKind::cocompact_genus2 ? "cocompact_genus2" : "schottky_free"; }

GroupKind kind_from(const std::string& s) {
  if (s == "cocompact_genus2") return GroupKind::cocompact_genus2;
  if (s == "schottky_free") return GroupKind::schottky_free;
  throw Error("unknown group kind '" + s + "'");
}

struct Options {
  int n = 3;
  std::string group = "octagon";
  int max_word_len = 6;
  long tuples = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> tol;
  int grid = 512;
  std::string out = ".";
  bool corrupt = false;
  bool n_given = false;
};

std::map<std::string, double> parse_tols(const std::vector<std::string>& items) {
  std::map<std::string, double> m;
  for (const auto& s : items) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("--tol expects KEY=VAL, got '" + s + "'");
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s.substr(eq + 1), &used);
    } catch (const std::exception&) {
      throw Error("--tol: bad number in '" + s + "'");
    }
    if (used != s.size() - eq - 1) throw Error("--tol: bad number in '" + s + "'");
    m[s.substr(0, eq)] = v;
  }
  return m;
}

// ---- rep

Representation build_rep(const Options& o) {
  if (o.group == "octagon") return n_fuchsian(octagon_fuchsian(), o.n);
  if (o.group == "schottky") return n_fuchsian(schottky(3.0, 4.0, 0.5), o.n);
  // file: DIR/generators.json with "kind", "base" and optionally "sym".
  const json j = load(fs::path(o.out) / "generators.json");
  if (!j.contains("kind") || !j.contains("base") || !j["base"].is_array())
    throw Error("generators.json needs \"kind\" and \"base\"");
  std::vector<Mat2> base;
  for (std::size_t i = 0; i < j["base"].size(); ++i)
    base.push_back(mat_from(j["base"][i], 2, "base matrix " + std::to_string(i + 1)));
  const GeneratorSet g = make_generator_set(base, kind_from(j["kind"].get<std::string>()));
  if (!j.contains("sym")) return n_fuchsian(g, o.n);
  std::vector<Mat> sym;
  for (std::size_t i = 0; i < j["sym"].size(); ++i)
    sym.push_back(mat_from(j["sym"][i], o.n, "sym matrix " + std::to_string(i + 1)));
  return user_representation(g, sym);
}

double rep_relator_residual(const Representation& r) {
  if (r.base.kind != GroupKind::cocompact_genus2) return 0.0;
  const Mat R = r.eval(surface_relator());
  const Mat I = Mat::Identity(r.n, r.n);
  return std::min((R - I).norm(), (R + I).norm());
}

int cmd_rep(const Options& o) {
  const Representation r = build_rep(o);
  json j;
  j["schema"] = 1;
  j["group"] = o.group;
  j["kind"] = kind_name(r.base.kind);
  j["n"] = r.n;
  j["base"] = json::array();
  j["sym"] = json::array();
  for (const Mat2& m : r.base.mats) j["base"].push_back(mat_json(m));
  for (const Mat& m : r.gens) j["sym"].push_back(mat_json(m));
  j["relator_residual"] = json{{"base", r.base.kind == GroupKind::cocompact_genus2 ? relator_residual(r.base) : 0.0},
                               {"sym", rep_relator_residual(r)}};
  fs::create_directories(o.out);
  save(fs::path(o.out) / "rep.json", to_text(j));
  std::cout << "wrote " << (fs::path(o.out) / "rep.json").string() << ": " << r.base.rank << " base + " << r.gens.size()
            << " sym-power matrices, n = " << r.n << ", relator residual " << j["relator_residual"]["sym"].get<double>()
            << "\n";
  return 0;
}

struct Bundle {
  Representation rep;
  std::string group;
};

Bundle load_bundle(const Options& o) {
  const fs::path p = fs::path(o.out) / "rep.json";
  if (!fs::exists(p)) throw Error("missing bundle " + p.string() + "; run 'xratio rep' first");
  const json j = load(p);
  if (!j.contains("schema") || j["schema"] != 1) throw Error("bundle schema must be 1");
  const int n = j.at("n").get<int>();
  if (o.n_given && o.n != n)
    throw Error("bundle has n = " + std::to_string(n) + " but --n " + std::to_string(o.n) + " was given");
  std::vector<Mat2> base;
  std::vector<Mat> sym;
  for (const auto& m : j.at("base")) base.push_back(mat_from(m, 2, "bundle base matrix"));
  for (const auto& m : j.at("sym")) sym.push_back(mat_from(m, n, "bundle sym matrix"));
  const GeneratorSet g = make_generator_set(base, kind_from(j.at("kind").get<std::string>()));
  return {user_representation(g, sym), j.at("group").get<std::string>()};
}

SuiteConfig suite_config(const Options& o, const Bundle& b) {
  SuiteConfig c;
  c.rep = b.rep;
  c.group = b.group;
  c.max_word_len = o.max_word_len;
  c.tuples = o.tuples;
  c.seed = o.seed;
  c.grid = o.grid;
  c.corrupt = o.corrupt;
  c.tol = parse_tols(o.tol);
  validate(c);
  return c;
}

// ---- check

int cmd_check(const Options& o, const std::string& suite) {
  const Bundle b = load_bundle(o);
  const SuiteConfig cfg = suite_config(o, b);
  std::map<std::string, double> timings;
  const auto records = run_suite(suite, cfg, &timings);
  json rep;
  rep["schema"] = 1;
  rep["suite"] = suite;
  rep["config"] = {{"n", cfg.rep.n},         {"group", cfg.group}, {"max_word_len", cfg.max_word_len},
                   {"tuples", cfg.tuples},   {"seed", cfg.seed},   {"grid", cfg.grid},
                   {"corrupt", cfg.corrupt}, {"tol", cfg.tol}};
  rep["records"] = json::array();
  bool all = true;
  for (const auto& r : records) {
    rep["records"].push_back({{"name", r.name},
                              {"anchor", r.anchor},
                              {"n", r.n},
                              {"samples", r.samples},
                              {"value", r.value},
                              {"bound", std::string(1, r.bound)},
                              {"tol", r.tol},
                              {"verdict", r.pass ? "pass" : "fail"},
                              {"note", r.note}});
    all = all && r.pass;
    std::printf("%s  %-34s %-10.3g %c %-8.3g %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value, r.bound, r.tol,
                r.note.c_str());
  }
  rep["pass"] = all;
  json tm;
  tm["seconds"] = timings;
  save(fs::path(o.out) / ("report_" + suite + ".json"), to_text(rep));
  save(fs::path(o.out) / ("timings_" + suite + ".json"), to_text(tm));
  std::printf("%s: %zu checks, %s\n", suite.c_str(), records.size(), all ? "all pass" : "FAILURES");
  return all ? 0 : 1;
}

// ---- reconstruct

int cmd_reconstruct(const Options& o) {
  const Bundle bd = load_bundle(o);
  const SuiteConfig cfg = suite_config(o, bd);
  const int n = cfg.rep.n;
  const SampleSet s = sample_boundary(cfg.rep.base, cfg.max_word_len);
  // The stratified draws need room for 2n+2 separated points plus checks.
  const std::size_t need = static_cast<std::size_t>(8 * (n + 2));
  if (s.size() < need)
    throw Error("insufficient samples: " + std::to_string(s.size()) + " points at word length " +
                std::to_string(cfg.max_word_len) + ", need at least " + std::to_string(need));
  const CurvePair es = CurvePair::eigen_sampled(cfg.rep);
  CrossRatioFn b = curve_fn(es, "b_rho");
  if (cfg.corrupt) b = noisy_cr(b, 1e-3);
  const long N = std::max<long>(10, cfg.tuples / 5);
  const RankReport rr = hitchin_rank_test(b, n, s, N, stream_seed(cfg.seed, 3));
  if (!rr.pass())
    throw Error("rank precondition fails: max chi of order n+1 is " + std::to_string(rr.max_zero) +
                ", so b does not come from an n-dimensional curve");
  std::mt19937_64 rng(stream_seed(cfg.seed, 10));
  const ChiTuple t = draw_chi_tuple(rng, s, n, TupleDesign::interleaved);
  const CurvePair c = reconstruct_curves(b, n, t);
  SampleSet pts;
  const std::size_t step = std::max<std::size_t>(1, s.size() / 1500);
  for (std::size_t i = 0; i < s.size(); i += step) pts.points.push_back(s[i]);
  pts = exclude_points(pts, {t.e[0], t.u[0]});
  const Match m = projective_match(es, c, pts);

  std::ostringstream csv;
  csv << "word,sign,angle";
  for (int k = 0; k < n; ++k) csv << ",xi_" << k;
  for (int k = 0; k < n; ++k) csv << ",xistar_" << k;
  csv << "\n";
  char buf[40];
  for (const auto& p : pts.points) {
    const Vec x = c.xi(p), y = c.xistar(p);
    csv << word_name(p.word) << "," << (p.sign == Sign::attracting ? "+" : "-");
    std::snprintf(buf, sizeof buf, ",%.17g", p.angle);
    csv << buf;
    for (int k = 0; k < n; ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", x(k));
      csv << buf;
    }
    for (int k = 0; k < n; ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", y(k));
      csv << buf;
    }
    csv << "\n";
  }
  json j;
  j["schema"] = 1;
  j["n"] = n;
  j["points"] = pts.size();
  j["projective_match"] = m.residual;
  j["rank_vanishing"] = rr.max_zero;
  j["match_matrix"] = mat_json(m.A);
  fs::create_directories(o.out);
  save(fs::path(o.out) / "curve.csv", csv.str());
  save(fs::path(o.out) / "reconstruct.json", to_text(j));
  std::printf("reconstructed n = %d curves at %zu points, projective match residual %.3g\n", n, pts.size(), m.residual);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross ratios of surface group representations: checks and reports"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  auto* nopt = app.add_option("--n", o.n, "dimension of the representation")->check(CLI::Range(2, 12));
  app.add_option("--group", o.group, "octagon, schottky, or file (reads OUT/generators.json)")
      ->check(CLI::IsMember({"octagon", "schottky", "file"}));
  app.add_option("--max-word-len", o.max_word_len, "word length of the boundary sample")->check(CLI::Range(1, 9));
  app.add_option("--tuples", o.tuples, "random tuples per sweep")->check(CLI::Range(10L, 100000000L));
  app.add_option("--seed", o.seed, "seed for all random draws");
  app.add_option("--tol", o.tol, "KEY=VAL tolerance override, repeatable");
  app.add_option("--grid", o.grid, "quadrature grid size")->check(CLI::Range(64, 1 << 16));
  app.add_option("--out", o.out, "bundle and report directory");
  app.add_flag("--corrupt", o.corrupt, "replace the cross ratio by a noisy copy");

  auto* rep = app.add_subcommand("rep", "write the representation bundle OUT/rep.json");
  std::string suite;
  auto* check = app.add_subcommand("check", "run a check suite on the bundle");
  std::vector<std::string> choices = suite_names();
  choices.push_back("all");
  check->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(choices));
  auto* recon = app.add_subcommand("reconstruct", "rebuild the limit curves from the cross ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help exits 0, usage errors 2
  }
  o.n_given = nopt->count() > 0;
  try {
    if (*rep) return cmd_rep(o);
    if (*check) return cmd_check(o, suite);
    if (*recon) return cmd_reconstruct(o);
  } catch (const std::exception& e) {
    std::cerr << "xratio: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
