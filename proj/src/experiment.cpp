#include "famlab/experiment.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "famlab/cylinder.hpp"
#include "famlab/error.hpp"
#include "famlab/intnum.hpp"
#include "famlab/ptree.hpp"

namespace famlab::experiment {

namespace {

using config::rational_text;
using famlimit::CheckRow;
using famlimit::VerificationReport;

CheckRow check(std::string name, const Rational& lhs, const std::string& rel, const Rational& rhs) {
  bool pass = rel == "<"    ? lhs < rhs
              : rel == "<=" ? lhs <= rhs
              : rel == ">"  ? lhs > rhs
              : rel == ">=" ? lhs >= rhs
                            : lhs == rhs;
  return CheckRow{std::move(name), lhs, rel, rhs, pass};
}

json merged_setting(const json& spec, const std::filesystem::path& base) {
  if (!spec.contains("setting")) return spec;
  const auto& s = spec.at("setting");
  json out = s.is_string() ? config::load_json(base / s.get<std::string>()) : s;
  for (const auto& [k, v] : spec.items()) {
    if (k != "setting") out[k] = v;
  }
  return out;
}

void apply(config::WitnessSpec& ws, const Overrides& o) {
  if (o.seed) {
    ws.search.seed = *o.seed;
    ws.seed_given = true;
  }
  if (o.budget) ws.search.budget = *o.budget;
  if (o.threads) ws.search.threads = *o.threads;
}

std::string hex(const boolalg::Element& e) {
  mpz_class m = 0;
  e.for_each_atom([&](std::size_t a) { mpz_setbit(m.get_mpz_t(), a); });
  return "0x" + m.get_str(16);
}

std::string cylinder_text(const cylinder::Cylinder& c) {
  if (c.fixed.empty()) return "*";
  std::string s;
  for (const auto& [coord, v] : c.fixed) {
    if (!s.empty()) s += ';';
    s += 'c' + std::to_string(coord) + '=' + (v ? '1' : '0');
  }
  return s;
}

json rows_only(const VerificationReport& r) { return config::report_json(r); }

Outcome fam_limit_run(const json& spec, const std::filesystem::path& base, const Overrides& o) {
  json setting = merged_setting(spec, base);
  auto ws = config::parse_witness(setting);
  apply(ws, o);
  if (ws.search.mode == famlimit::SearchMode::sampled && !ws.seed_given) {
    throw Error(Errc::parse, "sampled search needs a seed");
  }
  setting.erase("kind");
  setting.erase("threads");
  setting["seed"] = ws.search.seed;
  setting["budget"] = ws.search.budget;

  auto run = famlimit::run_witness(ws.input, ws.search);
  json doc;
  doc["setting"] = setting;
  doc["certificate"] = config::certificate_json(run.certificate);
  json limits = json::array();
  for (const auto& l : run.limits) limits.push_back(config::element_json(l));
  doc["limits"] = limits;
  json c = json::array();
  for (const auto& row : run.grid.c) {
    json r = json::array();
    for (const auto& v : row) r.push_back(rational_text(v));
    c.push_back(r);
  }
  doc["grid"] = {{"N", run.grid.N},
                 {"tolerance", rational_text(run.grid.tolerance)},
                 {"r_star", config::element_json(run.grid.r_star)},
                 {"c", c},
                 {"steps", run.grid.trace.size()}};

  Outcome out;
  out.kind = "fam-limit-run";
  out.passed = run.lemma.passed && run.characterization.passed;
  out.report = {{"lemma", rows_only(run.lemma)},
                {"characterization", rows_only(run.characterization)},
                {"u_size", run.certificate.u.size()},
                {"path_index", run.certificate.path_index},
                {"h_star", run.params.h_star},
                {"eps_star", rational_text(run.params.eps_star)},
                {"empirical", run.params.empirical}};
  if (run.certificate.prob_event) out.report["prob_event"] = rational_text(*run.certificate.prob_event);
  out.files["certificate.json"] = doc.dump(2) + "\n";
  out.files["summary.csv"] = config::summary_csv(run.certificate);
  return out;
}

Outcome sandwich_run(const json& spec) {
  auto alg = config::parse_algebra(spec.at("algebra"));
  std::vector<boolalg::Element> Q;
  std::optional<Rational> delta;
  if (spec.contains("threshold")) {
    const auto& t = spec.at("threshold");
    auto s = t.contains("s") ? config::parse_element(t.at("s"), alg) : alg.algebra.one();
    delta = config::parse_rational(t.at("delta"));
    Q = intnum::threshold_set(alg.algebra, s, *delta);
  } else {
    for (const auto& e : spec.at("Q")) Q.push_back(config::parse_element(e, alg));
  }
  std::size_t max_len = spec.value("max_len", std::size_t{6});
  std::size_t budget = spec.value("node_budget", intnum::kDefaultNodeBudget);
  auto res = intnum::sandwich(Q, max_len, budget);

  VerificationReport rep;
  rep.add(check("lower <= upper", res.lower, "<=", res.upper));
  if (delta) {
    rep.add(check("lower >= delta", res.lower, ">=", *delta));
    for (std::size_t n = 0; n < res.sequences.per_length.size(); ++n) {
      rep.add(check("upper n=" + std::to_string(n + 1), res.sequences.per_length[n], ">=", *delta));
    }
  }
  json per = json::array();
  for (const auto& v : res.sequences.per_length) per.push_back(rational_text(v));
  json weights = json::array();
  for (const auto& w : res.kelley.weights) weights.push_back(rational_text(w));

  Outcome out;
  out.kind = "intnum-sandwich";
  out.passed = rep.passed;
  out.report = {{"members", Q.size()},
                {"lower", rational_text(res.lower)},
                {"upper", rational_text(res.upper)},
                {"closed", res.closed()},
                {"partial", res.sequences.partial},
                {"per_length", per},
                {"witness", res.sequences.witness},
                {"kelley_weights", weights},
                {"checks", rows_only(rep)}};
  return out;
}

Outcome density_run(const json& spec, const Overrides& o) {
  auto alg = config::parse_algebra(spec.at("algebra"));
  if (!alg.dyadic) throw Error(Errc::parse, "density-sweep needs a dyadic algebra");
  const auto& D = *alg.dyadic;
  std::size_t max_fixed = spec.value("max_fixed", D.depth());
  std::vector<Rational> eps;
  for (const auto& e : spec.at("eps")) eps.push_back(config::parse_rational(e));
  std::size_t n = D.atom_count();

  std::vector<boolalg::Element> elements;
  const json& which = spec.value("elements", json("all"));
  if (which == "all") {
    if (n > intnum::kMaxThresholdAtoms) throw Error(Errc::capacity, "too many elements to sweep");
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
      boolalg::Element e(n);
      for (std::size_t a = 0; a < n; ++a) {
        if ((m >> a) & 1U) e.set(a);
      }
      elements.push_back(std::move(e));
    }
  } else {
    std::optional<std::uint64_t> seed = o.seed;
    if (!seed && spec.contains("seed")) seed = spec.at("seed").get<std::uint64_t>();
    if (!seed) throw Error(Errc::parse, "sampled density-sweep needs a seed");
    std::mt19937_64 rng(*seed);
    auto count = which.at("sample").get<std::size_t>();
    while (elements.size() < count) {
      boolalg::Element e(n);
      for (std::size_t a = 0; a < n; ++a) {
        if (rng() & 1U) e.set(a);
      }
      if (!e.is_zero()) elements.push_back(std::move(e));
    }
  }

  cylinder::CylinderIndex index(D, max_fixed);
  std::ostringstream csv;
  csv << "element,eps,cylinder,conditional,examined\n";
  VerificationReport rep;
  json per = json::array();
  for (const auto& e : eps) {
    std::size_t worst = 0;
    std::size_t total = 0;
    Rational lowest = 2;
    for (const auto& b : elements) {
      auto hit = index.search(b, e);
      worst = std::max(worst, hit.examined);
      total += hit.examined;
      lowest = std::min(lowest, hit.conditional);
      csv << hex(b) << ',' << rational_text(e) << ',' << cylinder_text(hit.s) << ','
          << rational_text(hit.conditional) << ',' << hit.examined << '\n';
    }
    rep.add(check("min conditional eps=" + rational_text(e), lowest, ">=", 1 - e));
    Rational mean(static_cast<unsigned long>(total));
    mean /= Rational(static_cast<unsigned long>(elements.size()));
    per.push_back({{"eps", rational_text(e)},
                   {"max_examined", worst},
                   {"mean_examined", rational_text(mean)}});
  }
  Outcome out;
  out.kind = "density-sweep";
  out.passed = rep.passed;
  out.report = {{"elements", elements.size()}, {"per_eps", per}, {"checks", rows_only(rep)}};
  out.files["hits.csv"] = csv.str();
  return out;
}

Outcome tree_audit(const json& spec, const std::filesystem::path& base) {
  auto ws = config::parse_witness(merged_setting(spec, base));
  if (!ws.input.h_star) throw Error(Errc::parse, "tree-audit needs an explicit h_star");
  auto prep = famlimit::prepare_witness(ws.input);
  const auto& s = prep.setting;
  famlimit::LemmaTree lt(s, prep.grid, prep.params, ws.input.F);
  auto tree = lt.tree();
  std::size_t H = prep.params.h_star;
  tree.materialize_level(H, ws.search.node_cap);
  const Rational& eps_star = prep.params.eps_star;
  const Rational& eps = prep.params.eps;

  VerificationReport rep;
  std::ostringstream levels;
  levels << "level,nodes,total\n";
  for (std::size_t h = 0; h <= H; ++h) {
    Rational total = 0;
    for (const auto& p : tree.level_measure(h)) total += p;
    levels << h << ',' << tree.level_size(h) << ',' << rational_text(total) << '\n';
    rep.add(check("level " + std::to_string(h) + " sum", total, "=", 1));
  }
  for (std::size_t h = 1; h < H; h += 2) {
    for (std::size_t j = 0; j < tree.level_size(h); ++j) {
      const auto& rho = tree.payload(h, j);
      auto x = lt.expand_odd(rho);
      Rational w = 0;
      for (const auto& v : x.weights) w += v;
      std::string at = std::to_string(h) + "/" + std::to_string(j);
      rep.add(check("pattern mass " + at, w, "=", 1));
      auto [lo, hi] = tree.descendants(h, j, 1);
      for (std::size_t i = 0; i < s.istar(); ++i) {
        Rational ez = 0;
        for (std::size_t c = lo; c < hi; ++c) ez += tree.succ_prob(h + 1, c) * tree.payload(h + 1, c).z[i];
        auto f = famlimit::f_function(s.algebra, s.blocks, s.sequences[i], rho.r);
        Rational avg = 0;
        for (auto k : x.u) avg += f(k);
        avg /= Rational(static_cast<unsigned long>(x.u.size()));
        rep.add(check("E[Z" + std::to_string(i) + "] " + at, ez, "=", avg));
      }
    }
  }

  // Z^i_h per leaf, h = 2, 4, ..., H
  auto probs = tree.level_measure(H);
  std::size_t leaves = tree.level_size(H);
  std::vector<std::vector<std::vector<Rational>>> Z(s.istar(),
                                                    std::vector<std::vector<Rational>>(H / 2));
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    std::size_t idx = leaf;
    for (std::size_t h = H; h >= 2; --h) {
      if (h % 2 == 0) {
        for (std::size_t i = 0; i < s.istar(); ++i) Z[i][h / 2 - 1].push_back(tree.payload(h, idx).z[i]);
      }
      idx = tree.parent(h, idx);
    }
  }
  Rational half(static_cast<unsigned long>(H / 2));
  for (std::size_t i = 0; i < s.istar(); ++i) {
    for (std::size_t a = 0; a < H / 2; ++a) {
      for (std::size_t b = a + 1; b < H / 2; ++b) {
        rep.add(check("Cov Z" + std::to_string(i) + " " + std::to_string(2 * a + 2) + "," +
                          std::to_string(2 * b + 2),
                      ptree::covariance(probs, Z[i][a], Z[i][b]), "<=", eps_star));
      }
    }
    std::vector<Rational> Y(leaves, Rational(0));
    for (std::size_t a = 0; a < H / 2; ++a) {
      for (std::size_t l = 0; l < leaves; ++l) Y[l] += Z[i][a][l] / half;
    }
    rep.add(check("Var Y" + std::to_string(i), ptree::variance(probs, Y), "<",
                  2 / Rational(static_cast<unsigned long>(H)) + eps_star));
  }
  auto a = s.masses();
  Rational pe = 0;
  std::vector<Rational> tail(s.mstar(), Rational(0));
  for (std::size_t l = 0; l < leaves; ++l) {
    auto ev = lt.evaluate(tree.payload(H, l));
    if (ev.in_event) pe += probs[l];
    for (std::size_t m = 0; m < s.mstar(); ++m) {
      if (abs(ev.V[m] - a[m]) >= eps) tail[m] += probs[l];
    }
  }
  for (std::size_t m = 0; m < s.mstar(); ++m) {
    rep.add(check("Pr|V" + std::to_string(m) + "-a|>=eps", tail[m], "<=",
                  2 * a[m] * (1 - a[m]) / (Rational(static_cast<unsigned long>(H)) * eps * eps)));
  }
  rep.add(check("Pr(E)", pe, ">", 0));

  Outcome out;
  out.kind = "tree-audit";
  out.passed = rep.passed;
  out.report = {{"leaves", leaves},
                {"h_star", H},
                {"prob_event", rational_text(pe)},
                {"checks", rows_only(rep)}};
  out.files["levels.csv"] = levels.str();
  return out;
}

}  // namespace

Outcome verify(const json& doc) {
  if (!doc.contains("setting") || !doc.contains("certificate")) {
    throw Error(Errc::parse, "certificate file needs setting and certificate");
  }
  auto ws = config::parse_witness(doc.at("setting"));
  auto s = ws.input.setting;
  s.deltas.clear();
  for (const auto& e : ws.input.eps_i) s.deltas.push_back(1 - e);
  auto c = config::parse_certificate(doc.at("certificate"), ws.algebra);

  VerificationReport params;
  params.add(check("recorded eps", c.eps, "=", ws.input.eps));
  params.add(check("recorded deltas", Rational(static_cast<unsigned long>(c.deltas == s.deltas)),
                   "=", 1));
  params.add(check("recorded masses", Rational(static_cast<unsigned long>(c.masses == s.masses())),
                   "=", 1));
  auto lemma = famlimit::verify_certificate(c, s, ws.input.F);
  auto chr = famlimit::verify_characterization(c, s, ws.input.eps_i, ws.input.eps);

  Outcome out;
  out.kind = "verify-certificate";
  out.passed = params.passed && lemma.passed && chr.passed;
  out.report = {{"parameters", rows_only(params)},
                {"lemma", rows_only(lemma)},
                {"characterization", rows_only(chr)}};
  return out;
}

Outcome run(const json& spec, const std::filesystem::path& base, const Overrides& o) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
    throw Error(Errc::parse, "spec needs a string field \"kind\"");
  }
  auto kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "fam-limit-run") return fam_limit_run(spec, base, o);
    if (kind == "intnum-sandwich") return sandwich_run(spec);
    if (kind == "density-sweep") return density_run(spec, o);
    if (kind == "tree-audit") return tree_audit(spec, base);
    if (kind == "verify-certificate") {
      if (!spec.contains("certificate")) throw Error(Errc::parse, "missing certificate path");
      return verify(config::load_json(base / spec.at("certificate").get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse, e.what());
  }
  throw Error(Errc::parse, "unknown kind \"" + kind + "\"");
}

void write(const Outcome& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(Errc::missing_input, "cannot write " + (dir / name).string());
    f << body;
  };
  json r{{"kind", out.kind}, {"passed", out.passed}, {"report", out.report}};
  put("report.json", r.dump(2) + "\n");
  for (const auto& [name, body] : out.files) put(name, body);
}

}  // namespace famlab::experiment
