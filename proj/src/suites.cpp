#include "famlab/suites.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include "famlab/boolalg.hpp"
#include "famlab/config.hpp"
#include "famlab/cylinder.hpp"
#include "famlab/error.hpp"
#include "famlab/experiment.hpp"
#include "famlab/fam.hpp"
#include "famlab/famlimit.hpp"
#include "famlab/intnum.hpp"
#include "famlab/ptree.hpp"

namespace famlab::suites {

namespace {

using boolalg::Element;
using Rng = std::mt19937_64;

struct Tally {
  Result& r;
  void operator()(bool ok, const std::string& what) {
    ++r.checks;
    if (!ok && r.passed) {
      r.passed = false;
      r.detail = what;
    }
  }
};

std::uint64_t below(Rng& rng, std::uint64_t n) { return rng() % n; }

Rational ratio(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

Element random_element(Rng& rng, std::size_t n) {
  Element e(n);
  for (std::size_t a = 0; a < n; ++a) {
    if (rng() & 1U) e.set(a);
  }
  return e;
}

std::vector<Rational> random_weights(Rng& rng, std::size_t n, bool allow_zero = false) {
  std::vector<long> raw(n);
  long total = 0;
  do {
    total = 0;
    for (auto& x : raw) total += (x = static_cast<long>(below(rng, 6)) + (allow_zero ? 0 : 1));
  } while (total == 0);
  std::vector<Rational> w;
  for (auto x : raw) w.push_back(ratio(x, total));
  return w;
}

fam::PeriodicSimpleFunction random_function(Rng& rng, std::uint64_t period) {
  fam::PeriodicSimpleFunction f{period, {}};
  for (std::uint64_t j = 0; j < period; ++j) f.values.push_back(ratio(static_cast<long>(below(rng, 9)), 8));
  return f;
}

fam::IndexPartition random_partition(Rng& rng, std::uint64_t period) {
  std::size_t blocks = 1 + below(rng, std::min<std::uint64_t>(period, 3));
  fam::IndexPartition p{period, std::vector<std::vector<std::uint64_t>>(blocks)};
  for (std::uint64_t j = 0; j < period; ++j) {
    p.blocks[j < blocks ? j : below(rng, blocks)].push_back(j);
  }
  return p;
}

void atoms_suite(Result& r, std::uint64_t seed) {
  Tally t{r};
  Rng rng(seed);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 1 + below(rng, 1024);
    std::vector<Element> gens;
    std::size_t count = below(rng, 11);
    for (std::size_t j = 0; j < count; ++j) gens.push_back(random_element(rng, n));
    std::vector<Element> atoms;
    for (auto& a : boolalg::generated_atoms_with_patterns(gens, Element::one(n))) {
      atoms.push_back(std::move(a.atom));
    }
    Element join(n);
    bool disjoint = true;
    bool nonzero = true;
    bool decided = true;
    for (const auto& a : atoms) {
      nonzero = nonzero && !a.is_zero();
      disjoint = disjoint && (join & a).is_zero();
      join |= a;
      for (const auto& g : gens) decided = decided && (boolalg::leq(a, g) || boolalg::disjoint(a, g));
    }
    std::string at = "trial " + std::to_string(trial);
    t(nonzero, at + ": zero atom");
    t(disjoint, at + ": overlapping atoms");
    t(join.is_one(), at + ": atoms do not join to 1");
    t(decided, at + ": atom splits a generator");
  }
}

void integration_suite(Result& r, std::uint64_t seed) {
  Tally t{r};
  Rng rng(seed);
  for (int trial = 0; trial < 200; ++trial) {
    std::string at = "trial " + std::to_string(trial);
    std::uint64_t p = 1 + below(rng, 6);
    fam::PeriodicFAM xi(p, random_weights(rng, p, true));
    auto f = random_function(rng, 1 + below(rng, 6));
    auto g = random_function(rng, 1 + below(rng, 6));
    Rational a = ratio(static_cast<long>(below(rng, 7)) - 3, 1 + static_cast<long>(below(rng, 4)));
    Rational b = ratio(static_cast<long>(below(rng, 7)) - 3, 1 + static_cast<long>(below(rng, 4)));
    Rational lhs = fam::integrate(fam::linear_combination(a, f, b, g), xi);
    t(lhs == a * fam::integrate(f, xi) + b * fam::integrate(g, xi), at + ": linearity");

    auto h = f;
    for (auto& v : h.values) v += ratio(static_cast<long>(below(rng, 5)), 4);
    t(fam::integrate(f, xi) <= fam::integrate(h, xi), at + ": monotonicity");

    std::uint64_t q = 1 + below(rng, 6);
    fam::PeriodicSet E;
    E.period = q;
    E.residues.assign(q, false);
    for (std::uint64_t j = 0; j < q; ++j) E.residues[j] = rng() & 1U;
    for (int k = 0; k < 3; ++k) {
      auto idx = static_cast<fam::Index>(below(rng, 40));
      if (rng() & 1U) E.added.insert(idx);
      else E.removed.insert(idx);
    }
    for (auto k : E.added) E.removed.erase(k);
    t(fam::integrate(fam::PeriodicSimpleFunction::indicator(E), xi) == fam::xi(xi, E),
      at + ": indicator");

    auto part = random_partition(rng, 1 + below(rng, 6));
    auto pieces = fam::partition_decompose(f, xi, part);
    Rational total = 0;
    Rational direct = 0;
    for (std::size_t m = 0; m < part.size(); ++m) {
      total += pieces[m];
      direct += fam::integrate(f, xi, part.block(m));
    }
    t(total == fam::integrate(f, xi) && direct == total, at + ": partition additivity");
  }
}

void trees_suite(Result& r, std::uint64_t seed) {
  Tally t{r};
  Rng outer(seed);
  for (int trial = 0; trial < 100; ++trial) {
    std::string at = "tree " + std::to_string(trial);
    std::size_t depth = 1 + below(outer, 6);
    std::uint64_t salt = outer();
    using Tree = ptree::ProbTree<std::uint64_t>;
    Tree tree(salt, [](const std::uint64_t& node, std::size_t) {
      Rng rng(node);
      std::size_t k = 1 + below(rng, 4);
      auto w = random_weights(rng, k);
      std::vector<Tree::Child> kids;
      for (std::size_t i = 0; i < k; ++i) kids.push_back({std::to_string(i), w[i], rng()});
      return kids;
    }, depth);
    tree.materialize_level(depth);
    for (std::size_t h = 0; h <= depth; ++h) {
      Rational sum = 0;
      for (const auto& p : tree.level_measure(h)) sum += p;
      t(sum == 1, at + ": level " + std::to_string(h) + " sums to " + to_string(sum));
    }
    // product decomposition through every intermediate level
    for (std::size_t i = 0; i < tree.level_size(depth); ++i) {
      Rational prod = 1;
      std::size_t cur = i;
      for (std::size_t d = depth; d > 0; --d) {
        prod *= tree.succ_prob(d, cur);
        cur = tree.parent(d, cur);
      }
      t(prod == tree.level_prob(depth, i), at + ": product of successor weights");
    }
    for (std::size_t h = 0; h < depth; ++h) {
      for (std::size_t rho = 0; rho < tree.level_size(h); ++rho) {
        auto [lo, hi] = tree.descendants(h, rho, depth - h);
        Rational sub = 0;
        for (std::size_t eta = lo; eta < hi; ++eta) {
          Rational s = tree.subtree_prob(h, rho, depth - h, eta);
          sub += s;
          t(s * tree.level_prob(h, rho) == tree.level_prob(depth, eta), at + ": decomposition");
        }
        t(sub == 1, at + ": subtree level sum");
      }
    }
    ptree::LevelRV x{depth, {}};
    for (std::size_t i = 0; i < tree.level_size(depth); ++i) {
      x.values.push_back(ratio(static_cast<long>(below(outer, 21)) - 10, 1 + static_cast<long>(below(outer, 5))));
    }
    auto probs = tree.level_measure(depth);
    t(tree.expectation(x) == ptree::expectation(probs, x.values), at + ": expectation");
    for (std::size_t h = 0; h + 1 < depth; ++h) {
      for (std::size_t n = 1; h + n < depth; ++n) {
        t(tree.tower_check(x, h, n).equal, at + ": tower law at " + std::to_string(h));
      }
    }
  }
}

void binomial_suite(Result& r, std::uint64_t seed) {
  Tally t{r};
  Rng rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + below(rng, 20);
    long den = 2 + static_cast<long>(below(rng, 9));
    Rational p = ratio(static_cast<long>(below(rng, static_cast<std::uint64_t>(den + 1))), den);
    Rational eps = ratio(1 + static_cast<long>(below(rng, 8)), 1 + static_cast<long>(below(rng, 4)));
    auto d = ptree::binomial(n, p);
    auto m = ptree::moments(d.probs, d.values, d.values);
    Rational N(static_cast<unsigned long>(n));
    std::string at = "Bin(" + std::to_string(n) + "," + to_string(p) + ")";
    t(m.ex == N * p, at + ": mean");
    t(m.var_x == N * p * (1 - p), at + ": variance");
    auto c = ptree::chebyshev_audit(d.probs, d.values, eps);
    t(c.holds && c.lhs <= c.rhs, at + ": Chebyshev at " + to_string(eps));
  }
}

void sandwich_suite(Result& r, std::uint64_t seed) {
  Tally t{r};
  Rng rng(seed);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + below(rng, 10);
    boolalg::MeasuredAlgebra alg(random_weights(rng, n));
    for (Rational delta : {ratio(1, 4), ratio(1, 2), ratio(3, 4)}) {
      std::string at = "trial " + std::to_string(trial) + " δ=" + to_string(delta);
      auto Q = intnum::threshold_set(alg, alg.one(), delta);
      auto res = intnum::sandwich(Q, 6);
      t(res.lower >= delta, at + ": kelley_lower " + to_string(res.lower));
      for (std::size_t k = 0; k < res.sequences.per_length.size(); ++k) {
        t(res.sequences.per_length[k] >= delta, at + ": int_upper at n=" + std::to_string(k + 1));
      }
      t(res.lower <= res.upper, at + ": lower > upper");
    }
  }
}

// ∫ f_r dΞ straight from the definition
Rational direct_integral(const boolalg::MeasuredAlgebra& alg, const fam::PeriodicFAM& xi,
                         const famlimit::BlockFamily& blocks, const famlimit::ConditionSequence& b,
                         const Element& r) {
  std::uint64_t L = std::lcm(std::lcm(xi.period(), blocks.period), b.period);
  Rational mr = alg.measure(r);
  Rational total = 0;
  for (std::uint64_t k = 0; k < L; ++k) {
    auto kk = static_cast<fam::Index>(k);
    Rational sum = 0;
    for (std::size_t j = 0; j < blocks.size(kk); ++j) sum += alg.measure(r & b.at(kk, j));
    total += xi.residue_weight(k, L) * sum /
             (mr * Rational(static_cast<unsigned long>(blocks.size(kk))));
  }
  return total;
}

void limits_suite(Result& r, std::uint64_t seed) {
  Tally t{r};
  Rng rng(seed);
  for (int trial = 0; trial < 20; ++trial) {
    std::string at = "instance " + std::to_string(trial);
    std::size_t n = 2 + below(rng, 9);
    boolalg::MeasuredAlgebra alg(random_weights(rng, n));
    Element r_star(n);
    while (r_star.is_zero()) r_star = random_element(rng, n);
    std::uint64_t bp = 1 + below(rng, 3);
    famlimit::BlockFamily blocks{bp, {}};
    for (std::uint64_t k = 0; k < bp; ++k) blocks.sizes.push_back(1 + static_cast<std::uint32_t>(below(rng, 3)));
    famlimit::ConditionSequence b{bp * (1 + below(rng, 2)), {}};
    for (std::uint64_t k = 0; k < b.period; ++k) {
      std::vector<Element> row;
      for (std::size_t j = 0; j < blocks.size(static_cast<fam::Index>(k)); ++j) {
        Element e(n);
        while ((e & r_star).is_zero()) e = random_element(rng, n);
        row.push_back(e);
      }
      b.table.push_back(std::move(row));
    }
    auto cond = boolalg::conditional(alg, r_star);
    Rational delta = 1;
    for (const auto& row : b.table) {
      for (const auto& e : row) delta = std::min(delta, cond(e));
    }
    std::uint64_t fp = 1 + below(rng, 4);
    fam::PeriodicFAM xi(fp, random_weights(rng, fp, true));
    Element out = famlimit::limit_construct(alg, xi, blocks, b, r_star, delta);
    t(!out.is_zero() && boolalg::leq(out, r_star), at + ": r⊗ not a nonzero part of r*");
    auto atoms = out.atoms();
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << atoms.size()); ++m) {
      Element sub(n);
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        if ((m >> j) & 1U) sub.set(atoms[j]);
      }
      t(direct_integral(alg, xi, blocks, b, sub) >= delta, at + ": integral below δ under r⊗");
    }
  }
}

experiment::Outcome run_file(const std::filesystem::path& path, const experiment::Overrides& o) {
  return experiment::run(config::load_json(path), path.parent_path(), o);
}

void witness_suite(Result& r, const std::filesystem::path& data) {
  Tally t{r};
  auto out = run_file(data / "witness_depth10.json", {});
  t(out.passed, "depth-10 certificate failed its exact checks");
  auto doc = config::json::parse(out.files.at("certificate.json"));
  auto again = experiment::verify(doc);
  t(again.passed, "depth-10 certificate failed re-verification from file");
  t(out.report.at("empirical").get<bool>(), "depth-10 run is not in empirical mode");

  auto tiny = run_file(data / "exhaustive_tiny.json", {});
  t(tiny.passed, "tiny exhaustive certificate failed");
  Rational pe = config::parse_rational(tiny.report.at("prob_event"));
  t(pe > 0, "tiny exhaustive Pr(E) = " + to_string(pe));
  r.detail = "u = " + std::to_string(out.report.at("u_size").get<std::size_t>()) +
             " indices at path " + std::to_string(out.report.at("path_index").get<std::uint64_t>()) +
             ", tiny Pr(E) = " + to_string(pe);
}

void assembly_suite(Result& r, const std::filesystem::path& data) {
  Tally t{r};
  cylinder::DyadicAlgebra alg({0, 1, 2, 3});
  auto S = cylinder::cylinders_in_order(alg, alg.depth());
  std::vector<Rational> grid{ratio(1, 2), ratio(1, 4), ratio(1, 8)};
  auto rep = famlimit::fam_linked_witness(alg, S, grid);
  t(rep.covered, "some element lies in no Q_{s,ε}");
  t(rep.bounds_hold, "kelley_lower(Q_{s,ε}) < 1 − ε somewhere");
  t(rep.entries.size() == S.size() * grid.size(), "missing (s, ε) entries");
  for (const auto& e : rep.entries) t(e.kelley >= 1 - e.eps, "kelley below 1 − ε");

  // a certificate from sequences inside Q_{s,ε}
  auto spec = config::load_json(data / "witness_depth4.json");
  auto ws = config::parse_witness(spec);
  for (std::size_t i = 0; i < ws.input.setting.istar(); ++i) {
    auto cond = boolalg::conditional(ws.algebra.algebra, ws.input.conditions[i]);
    for (const auto& row : ws.input.setting.sequences[i].table) {
      for (const auto& b : row) t(cond(b) >= 1 - ws.input.eps_i[i], "sequence member outside Q_{s,ε}");
    }
  }
  auto out = experiment::run(spec, data, {});
  t(out.report.at("characterization").at("passed").get<bool>(), "characterization failed");
  t(experiment::verify(config::json::parse(out.files.at("certificate.json"))).passed,
    "certificate failed re-verification");
  r.detail = std::to_string(rep.elements) + " elements, " + std::to_string(rep.entries.size()) +
             " (s, ε) pairs";
}

void determinism_suite(Result& r, const std::filesystem::path& data) {
  Tally t{r};
  auto dir = std::filesystem::temp_directory_path() /
             ("famlab-determinism-" + std::to_string(std::random_device{}()));
  experiment::Overrides one;
  one.threads = 1;
  experiment::Overrides four;
  four.threads = 4;
  experiment::write(run_file(data / "witness_depth10.json", one), dir / "a");
  experiment::write(run_file(data / "witness_depth10.json", four), dir / "b");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  auto a = slurp(dir / "a" / "certificate.json");
  auto b = slurp(dir / "b" / "certificate.json");
  t(!a.empty() && a == b, "certificate files differ between runs");
  t(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"), "summaries differ");
  std::filesystem::remove_all(dir);
  r.detail = std::to_string(a.size()) + " identical bytes";
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"atoms",  "integration", "trees",
                                            "binomial", "sandwich",  "limits",
                                            "witness",  "assembly",  "determinism"};
  return all;
}

Result run(const std::string& name, std::uint64_t seed, const std::filesystem::path& data) {
  Result r;
  r.name = name;
  auto start = std::chrono::steady_clock::now();
  if (name == "atoms") atoms_suite(r, seed);
  else if (name == "integration") integration_suite(r, seed);
  else if (name == "trees") trees_suite(r, seed);
  else if (name == "binomial") binomial_suite(r, seed);
  else if (name == "sandwich") sandwich_suite(r, seed);
  else if (name == "limits") limits_suite(r, seed);
  else if (name == "witness") witness_suite(r, data);
  else if (name == "assembly") assembly_suite(r, data);
  else if (name == "determinism") determinism_suite(r, data);
  else throw Error(Errc::missing_input, "no suite named \"" + name + "\"");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.passed && r.detail.empty()) r.detail = std::to_string(r.checks) + " checks";
  return r;
}

}  // namespace famlab::suites
