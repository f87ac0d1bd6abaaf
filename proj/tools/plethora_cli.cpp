// Batch command-line surface: every pipeline, machine-readable output,
// reproducible configuration.  JSON is the contract format; text output is
// advisory.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "plethora/verify.hpp"

using json = nlohmann::ordered_json;
using namespace plethora;

namespace {

json spec_json(const RingSpec& s) {
  return json{{"p", s.p}, {"M", s.M}, {"N", s.N}, {"slack", s.slack}};
}

json scalar_json(const TruncScalar& x) {
  json arr = json::array();
  for (int j = 0; j < x.spec().N; ++j) arr.push_back(std::to_string(x.coeff(j)));
  return arr;
}

json gamma_json(const GammaScalar& x) {
  return json{{"1", scalar_json(x.c[0])}, {"d", scalar_json(x.c[1])}, {"d2", scalar_json(x.c[2])}};
}

json matrix_json(const TruncMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(scalar_json(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json flat_json(const FlatMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(std::to_string(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json presentation_json(const ModulePresentation& p) {
  return json{{"generators", p.gens}, {"relations", matrix_json(p.relations)}};
}

// canonical signed polynomial string, e.g. "2*x - x^2"
std::string poly_str(const TruncScalar& x, const std::string& var) {
  u64 mod = x.spec().modulus();
  std::string s;
  for (int j = 0; j < x.spec().N; ++j) {
    u64 c = x.coeff(j);
    if (!c) continue;
    i64 v = c <= mod / 2 ? static_cast<i64>(c) : static_cast<i64>(c) - static_cast<i64>(mod);
    i64 av = v < 0 ? -v : v;
    std::string term;
    if (j == 0) {
      term = std::to_string(av);
    } else {
      term = (av == 1 ? "" : std::to_string(av) + "*") + var + (j > 1 ? "^" + std::to_string(j) : "");
    }
    if (s.empty())
      s = (v < 0 ? "-" : "") + term;
    else
      s += (v < 0 ? " - " : " + ") + term;
  }
  return s.empty() ? "0" : s;
}

Word parse_word(const std::string& text, i64 p) {
  Word w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      w.push_back(Letter{0, std::stoll(item)});
    } else {
      int eps = std::stoi(item.substr(0, colon));
      w.push_back(Letter{p == 2 ? 0 : eps, std::stoll(item.substr(colon + 1))});
    }
  }
  return w;
}

json word_json(const Word& w, i64 p) {
  json arr = json::array();
  for (const Letter& l : w) {
    if (p == 2)
      arr.push_back(l.r);
    else
      arr.push_back(json::array({l.eps, l.r}));
  }
  return arr;
}

json lambda_word_json(const LambdaWord& w, i64 p) {
  json arr = json::array();
  for (const LLetter& l : w) {
    if (p == 2)
      arr.push_back(l.r);
    else
      arr.push_back(json::array({l.eps, l.r}));
  }
  return arr;
}

TruncScalar scalar_from_json(const json& arr, const RingSpec& spec) {
  std::vector<i64> c;
  for (const auto& v : arr) c.push_back(std::stoll(v.get<std::string>()));
  return TruncScalar::from_coeffs(spec, c);
}

// QuadraticDatum JSON: {"ring": {...}, "generators": [...],
// "right_action": {gen: [scalar-array per target]}, "relations": [[...]]}
QuadraticDatum datum_from_json(const json& j) {
  RingSpec spec(j.at("ring").at("p").get<i64>(), j.at("ring").at("M").get<int>(),
                j.at("ring").at("N").get<int>(), j.at("ring").value("slack", 0));
  QuadraticDatum q;
  q.H.spec = spec;
  q.H.labels = j.at("generators").get<std::vector<std::string>>();
  int k = q.H.rank();
  q.H.action = TruncMatrix(spec, k, k);
  if (j.contains("right_action"))
    for (int i = 0; i < k; ++i) {
      const std::string& label = q.H.labels[static_cast<std::size_t>(i)];
      if (!j.at("right_action").contains(label)) continue;
      const json& row = j.at("right_action").at(label);
      for (int c = 0; c < k; ++c)
        q.H.action.at(i, c) = scalar_from_json(row.at(static_cast<std::size_t>(c)), spec);
    }
  for (const auto& rel : j.at("relations")) {
    TensorVec v = tensor_zero(spec, k, 2);
    for (std::size_t w = 0; w < v.size() && w < rel.size(); ++w)
      v[w] = scalar_from_json(rel.at(w), spec);
    q.relations.push_back(std::move(v));
  }
  return q;
}

QuadraticDatum builtin_datum(const std::string& name, const RingSpec& spec) {
  if (name == "gamma") return gamma_datum(spec);
  if (name == "delta") return delta_datum(spec);
  if (name == "exterior") {
    RingSpec fp(spec.p, 1, 1);
    QuadraticDatum q;
    q.H.spec = fp;
    q.H.labels = {"x"};
    q.H.action = TruncMatrix(fp, 1, 1);
    TensorVec rho = tensor_zero(fp, 1, 2);
    rho[0] = TruncScalar::one(fp);
    q.relations.push_back(rho);
    return q;
  }
  throw CLI::ValidationError("--builtin must be gamma, delta, or exterior");
}

ModulePresentation su4_paper_presentation(const RingSpec& spec) {
  ModulePresentation paper;
  paper.spec = spec;
  paper.gens = {"c3d", "c3d2", "c4d", "c4d2"};
  paper.relations = TruncMatrix(spec, 5, 4);
  TruncScalar A = TruncScalar::var_a(spec);
  auto C = [&](i64 v) { return TruncScalar::from_int(spec, v); };
  paper.relations.at(0, 1) = C(4);
  paper.relations.at(1, 0) = C(2);
  paper.relations.at(1, 1) = -A;
  paper.relations.at(2, 3) = C(4);
  paper.relations.at(3, 2) = C(2) * A;
  paper.relations.at(3, 3) = -(A * A);
  paper.relations.at(4, 2) = C(4);
  paper.relations.at(4, 1) = C(-2) * A;
  paper.relations.at(4, 3) = C(-2) * A;
  return paper;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plethora: exact computation with algebras of power operations"};
  app.require_subcommand(1);

  RingSpec defaults;
  i64 p = defaults.p;
  int M = defaults.M, N = defaults.N, slack = defaults.slack;
  std::string format = "json";
  app.add_option("--p", p, "prime");
  app.add_option("--M", M, "p-adic precision");
  app.add_option("--N", N, "a-adic precision");
  app.add_option("--slack", slack, "internal extra p-adic precision");
  app.add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}));

  if (const char* env = std::getenv("PLETHORA_PRECISION")) {
    std::string s(env);
    auto comma = s.find(',');
    if (comma != std::string::npos) {
      M = std::stoi(s.substr(0, comma));
      N = std::stoi(s.substr(comma + 1));
    }
  }

  auto* adem = app.add_subcommand("adem-normalize", "Adem normalization to admissible form");
  std::string word_text;
  adem->add_option("--word", word_text, "comma-separated indices; eps:r pairs at odd p")
      ->required();

  auto* dlb = app.add_subcommand("dl-basis", "admissible bases of free modules / ring generators");
  i64 dl_n = 0, dl_u = 0, deg_min = 0, deg_max = 0;
  int len_cap = 4;
  std::string dl_kind = "free";
  dlb->add_option("--n", dl_n, "generator degree");
  dlb->add_option("--u", dl_u, "instability shift (free kind only)");
  dlb->add_option("--deg-min", deg_min)->required();
  dlb->add_option("--deg-max", deg_max)->required();
  dlb->add_option("--len-cap", len_cap);
  dlb->add_option("--kind", dl_kind, "free|generators")
      ->check(CLI::IsMember({"free", "generators"}));

  auto* lb = app.add_subcommand("lambda-basis", "coadmissible Ext bases");
  int lb_n = 1;
  i64 lb_a = 0, lb_b = 0, lb_bmin = 0, lb_bmax = 0;
  std::string lb_side = "source";
  lb->add_option("--coh", lb_n, "cohomological degree")->required();
  lb->add_option("--a", lb_a, "fixed degree")->required();
  lb->add_option("--b", lb_b, "other degree (source side)");
  lb->add_option("--b-min", lb_bmin);
  lb->add_option("--b-max", lb_bmax);
  lb->add_option("--side", lb_side, "source|target")->check(CLI::IsMember({"source", "target"}));
  bool lb_unstable = false;
  lb->add_flag("--unstable", lb_unstable, "restrict to nonnegative words");

  auto* lex = app.add_subcommand("lambda-ext", "windowed Ext over the big algebra");
  i64 lex_a = 0, lex_gdeg = 0, lex_tmin = 0, lex_tmax = 8, lex_u = 0;
  int lex_cohmax = 3;
  lex->add_option("--a", lex_a)->required();
  lex->add_option("--gen-deg", lex_gdeg, "degree of the trivial coefficient generator");
  lex->add_option("--u", lex_u, "instability shift of the acting algebra");
  lex->add_option("--coh-max", lex_cohmax);
  lex->add_option("--t-min", lex_tmin);
  lex->add_option("--t-max", lex_tmax);

  auto* qd = app.add_subcommand("quad-dual", "quadratic dual and graded piece ranks");
  std::string qd_input, qd_builtin;
  int qd_nmax = 3;
  qd->add_option("--input", qd_input, "JSON file with a quadratic datum");
  qd->add_option("--builtin", qd_builtin, "gamma|delta|exterior");
  qd->add_option("--coh-max", qd_nmax, "max graded piece");

  auto* kc = app.add_subcommand("koszul-check", "off-diagonal bar homology diagnostic");
  std::string kc_input, kc_builtin;
  int kc_mmax = 3;
  kc->add_option("--input", kc_input, "JSON file with a quadratic datum");
  kc->add_option("--builtin", kc_builtin, "gamma|delta|exterior");
  kc->add_option("--m-max", kc_mmax, "weight window");

  auto* taq = app.add_subcommand("morava-taq-su", "the SU(n) Ext pipeline at height 2");
  int taq_n = 4;
  taq->add_option("--n", taq_n, "rank (2..8)")->required();

  app.add_subcommand("morava-hgamma", "cohomology of the height-2 algebra");

  auto* ext1 = app.add_subcommand("morava-ext1", "height-1 Ext groups");
  std::string ext1_module = "t";
  int ext1_omega = 1;
  ext1->add_option("--module", ext1_module, "t|s")->check(CLI::IsMember({"t", "s"}));
  ext1->add_option("--omega", ext1_omega, "power of the twist (>= 1)");

  auto* orient = app.add_subcommand("morava-orient", "orientation determinant criterion");
  int orient_K = 12;
  orient->add_option("--K", orient_K, "x-truncation");

  app.add_subcommand("verify-paper", "run the golden suite");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  RingSpec spec(p, M, N, slack);
  json out;
  out["config"] = {{"ring", spec_json(spec)}, {"format", format}};

  auto emit = [&](const json& j) { std::cout << j.dump(2) << "\n"; };

  try {
    if (adem->parsed()) {
      Word w = parse_word(word_text, p);
      OperationElement e = adem_normalize(w, p);
      out["config"]["word"] = word_json(w, p);
      json terms = json::array();
      for (const auto& [term, c] : e.terms)
        terms.push_back(json{{"word", word_json(term, p)}, {"coeff", c}});
      out["terms"] = terms;
    } else if (dlb->parsed()) {
      EnumerationResult r = dl_kind == "free"
                                ? free_basis_window(dl_n, dl_u, deg_min, deg_max, len_cap, p)
                                : dl_generators(dl_n, deg_min, deg_max, len_cap, p);
      out["config"]["kind"] = dl_kind;
      out["config"]["n"] = dl_n;
      out["config"]["window"] = {{"deg_min", deg_min}, {"deg_max", deg_max}, {"len_cap", len_cap}};
      json words = json::array();
      for (const auto& aw : r.words)
        words.push_back(
            json{{"word", word_json(aw.entries, p)}, {"degree", aw.degree}, {"excess", aw.excess}});
      out["words"] = words;
      out["capped"] = r.capped;
    } else if (lb->parsed()) {
      std::vector<LambdaWord> basis;
      if (lb_side == "source")
        basis = ext_basis_source(lb_n, lb_a, lb_b, p);
      else
        basis = ext_basis_target(lb_n, lb_a, lb_bmin, lb_bmax, p);
      if (lb_unstable) basis = unstable_restrict(basis);
      out["config"]["side"] = lb_side;
      json words = json::array();
      for (const auto& w : basis) words.push_back(lambda_word_json(w, p));
      out["words"] = words;
      out["dimension"] = basis.size();
    } else if (lex->parsed()) {
      FModuleData coeffs = trivial_module(p, lex_u, "m", lex_gdeg, 0, 64);
      auto cells = ext_over_F_window(coeffs, lex_a, lex_cohmax, lex_tmin, lex_tmax);
      json chart = json::array();
      for (const auto& c : cells) {
        json reps = json::array();
        for (const auto& r : c.representatives)
          reps.push_back(json{{"word", lambda_word_json(r.word, p)}, {"gen", r.gen}});
        chart.push_back(json{{"n", c.n},
                             {"a", lex_a},
                             {"b", lex_a - (c.t - lex_gdeg)},
                             {"t", c.t},
                             {"dimension", c.dim},
                             {"reliable", c.reliable},
                             {"representatives", reps}});
      }
      out["chart"] = chart;
    } else if (qd->parsed() || kc->parsed()) {
      bool is_dual = qd->parsed();
      std::string input = is_dual ? qd_input : kc_input;
      std::string builtin = is_dual ? qd_builtin : kc_builtin;
      QuadraticDatum q;
      if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw std::runtime_error("cannot open " + input);
        json j;
        in >> j;
        q = datum_from_json(j);
      } else if (!builtin.empty()) {
        q = builtin_datum(builtin, widened(spec, 8));
      } else {
        std::cerr << "need --input or --builtin\n";
        return 2;
      }
      if (is_dual) {
        QuadraticDatum dual = quadratic_dual(q);
        out["dual_generators"] = dual.H.labels;
        out["dual_action"] = matrix_json(dual.H.action);
        json rels = json::array();
        for (const TensorVec& r : dual.relations) {
          json row = json::array();
          for (const TruncScalar& c : r) row.push_back(scalar_json(c));
          rels.push_back(row);
        }
        out["r_perp"] = rels;
        json ranks = json::array();
        for (int n2 = 0; n2 <= qd_nmax; ++n2) ranks.push_back(grade_piece_rank(dual, n2));
        out["dual_piece_ranks"] = ranks;
      } else {
        KoszulityReport r = koszulity_check(q, kc_mmax);
        out["pass"] = r.pass;
        json fails = json::array();
        for (auto& [n2, m2, h] : r.failures)
          fails.push_back(json{{"n", n2}, {"m", m2}, {"size_exponent", h}});
        out["off_diagonal"] = fails;
        json diag = json::array();
        for (auto& [nm, h] : r.diagonal) diag.push_back(json{{"n", nm.first}, {"size_exponent", h}});
        out["diagonal"] = diag;
      }
    } else if (taq->parsed()) {
      TaqReport rep = taq_su(taq_n, spec);
      out["config"]["n"] = taq_n;
      out["generators"] = rep.coaction.gens;
      json coact = json::array();
      for (const auto& row : rep.coaction.p) {
        json r2 = json::array();
        for (const auto& x : row) r2.push_back(gamma_json(x));
        coact.push_back(r2);
      }
      out["coaction_dual"] = coact;
      json d1 = json::array();
      for (const auto& [key, vals] : rep.d1) {
        json entry = {{"generator", rep.coaction.gens[static_cast<std::size_t>(key.first)]},
                      {"power", key.second}};
        json v = json::array();
        for (const auto& x : vals) v.push_back(json::array({scalar_json(x[0]), scalar_json(x[1])}));
        entry["value"] = v;
        d1.push_back(entry);
      }
      out["delta1"] = d1;
      out["ext2"] = {{"raw", presentation_json(rep.ext2_raw)},
                     {"minimal", presentation_json(rep.ext2_minimal)},
                     {"howell", flat_json(howell_form(flatten(rep.ext2_raw.relations)).rows)}};
      out["ext1"] = {{"presentation", presentation_json(rep.ext1)},
                     {"truncation_suspect", rep.ext1_truncation_suspect}};
      out["ext0_size_exponent"] = rep.ext0_size_exponent;
      if (taq_n == 4)
        out["paper_match"] = presentations_isomorphic(rep.ext2_raw, su4_paper_presentation(spec));
    } else if (app.get_subcommand("morava-hgamma")->parsed()) {
      GammaCohomology h = gamma_cohomology(spec);
      out["basis"] = h.basis;
      out["total_rank"] = h.basis.size();
      out["h3_rank"] = h.h3_rank;
      json prods = json::array();
      for (const auto& [key, val] : h.products)
        prods.push_back(json{{"left", key.first},
                             {"right", key.second},
                             {"Q0Q1", scalar_json(val[0])},
                             {"Q0Q2", scalar_json(val[1])}});
      out["h1_products"] = prods;
    } else if (ext1->parsed()) {
      Height1Ext e = height1_ext(ext1_module == "t" ? 0 : 1, ext1_omega, p, M);
      out["config"]["module"] = ext1_module;
      out["config"]["omega"] = ext1_omega;
      out["ext0_size_exponent"] = e.ext0_exponent;
      out["ext1_size_exponent"] = e.ext1_exponent;
      out["ext1_presentation"] = presentation_json(e.ext1);
    } else if (orient->parsed()) {
      OrientationReport r = orientation_det(p, M, orient_K);
      out["config"]["K"] = orient_K;
      out["determinant"] = poly_str(r.determinant, "x");
      out["target"] = poly_str(r.target, "x");
      out["matches_target"] = r.matches;
    } else if (app.get_subcommand("verify-paper")->parsed()) {
      auto checks = verify_paper();
      json table = json::array();
      int failures = 0;
      for (const auto& c : checks) {
        table.push_back(json{{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        if (!c.pass) ++failures;
      }
      out["checks"] = table;
      out["failures"] = failures;
      emit(out);
      for (const auto& c : checks)
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name
                  << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    out["error"] = e.what();
    emit(out);
    return 1;
  }

  emit(out);
  return 0;
}
