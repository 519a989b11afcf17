#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "famlab/cylinder.hpp"
#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"
#include "famlab/intnum.hpp"
#include "famlab/ptree.hpp"

using namespace famlab;
using namespace famlab::famlimit;

namespace {

Element make(std::size_t n, std::initializer_list<std::size_t> atoms) {
  std::vector<std::size_t> v(atoms);
  return Element::from_atoms(n, v);
}

Element from_mask(std::size_t n, std::uint64_t mask) {
  Element e(n);
  for (std::size_t a = 0; a < n; ++a) {
    if ((mask >> a) & 1U) e.set(a);
  }
  return e;
}

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

// singleton blocks, one condition per residue
ConditionSequence periodic(std::vector<Element> rows) {
  ConditionSequence s;
  s.period = rows.size();
  for (auto& e : rows) s.table.push_back({std::move(e)});
  return s;
}

// 4 atoms, Ξ uniform of period 4, B_0 = {0,1}, B_1 = {2,3} mod 4, and one
// sequence alternating {a0,a1} and {a2,a3}
Setting two_block_setting(const Rational& delta) {
  Setting s{MeasuredAlgebra::uniform(4),
            fam::PeriodicFAM::uniform(4),
            fam::IndexPartition{4, {{0, 1}, {2, 3}}},
            BlockFamily{},
            {periodic({make(4, {0, 1}), make(4, {2, 3})})},
            {delta}};
  return s;
}

Setting no_sequence_setting() {
  return Setting{MeasuredAlgebra::uniform(4), fam::PeriodicFAM::uniform(4),
                 fam::IndexPartition{4, {{0, 1}, {2, 3}}}, BlockFamily{}, {}, {}};
}

Parameters params(const Rational& eps, std::size_t h, const Rational& eps_star) {
  return Parameters{eps, h, eps_star, true};
}

LemmaTree two_block_tree(std::size_t h, const Rational& eps) {
  Setting s = two_block_setting(q(1, 2));
  auto grid = grid_refine(s, s.algebra.one(), q(1, 64));
  return LemmaTree(s, grid, params(eps, h, q(1, 16)), {});
}

// ∫ f_r dΞ by direct evaluation
Rational direct_integral(const MeasuredAlgebra& alg, const fam::PeriodicFAM& fam,
                         const BlockFamily& blocks, const ConditionSequence& b, const Element& r) {
  std::uint64_t L = std::lcm(std::lcm(fam.period(), blocks.period), b.period);
  Rational total = 0;
  Rational mr = alg.measure(r);
  for (std::uint64_t k = 0; k < L; ++k) {
    auto kk = static_cast<Index>(k);
    Rational sum = 0;
    for (std::size_t j = 0; j < blocks.size(kk); ++j) sum += alg.measure(r & b.at(kk, j)) / mr;
    total += fam.residue_weight(k, L) * sum / Rational(static_cast<unsigned long>(blocks.size(kk)));
  }
  return total;
}

}  // namespace

TEST(Grid, NoSequences) {
  Setting s = no_sequence_setting();
  Element r = make(4, {1, 2});
  auto g = grid_refine(s, r, q(1, 4));
  EXPECT_EQ(g.r_star, r);
  EXPECT_TRUE(g.c.empty());
  for (std::uint64_t m = 1; m < 16; ++m) {
    if (boolalg::leq(from_mask(4, m), r)) EXPECT_TRUE(g.in_dstar(s, from_mask(4, m)));
  }
}

TEST(Grid, ConstantOne) {
  Setting s = two_block_setting(q(1, 2));
  s.sequences[0] = periodic({Element::one(4)});
  auto g = grid_refine(s, s.algebra.one(), q(1, 4));
  EXPECT_EQ(g.r_star, s.algebra.one());
  for (const auto& row : g.c) {
    for (const auto& v : row) EXPECT_EQ(v, 1);
  }
}

TEST(Grid, FourAtomsExhaustive) {
  // Ξ uniform of period 2, B_m = residue m, sequence alternating two halves
  Setting s{MeasuredAlgebra::uniform(4),
            fam::PeriodicFAM::uniform(2),
            fam::IndexPartition{2, {{0}, {1}}},
            BlockFamily{},
            {periodic({make(4, {0, 1}), make(4, {2, 3})})},
            {q(1, 2)}};
  Rational tol = q(1, 4);
  auto g = grid_refine(s, s.algebra.one(), tol);
  EXPECT_EQ(g.N, 5u);
  EXPECT_EQ(g.r_star, make(4, {0, 1}));
  for (std::uint64_t m = 1; m < 16; ++m) {
    Element r = from_mask(4, m);
    auto c = c_values(s, r);
    bool direct = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < c[i].size(); ++j) {
        EXPECT_GE(c[i][j], 0);
        EXPECT_LE(c[i][j], 1);
        if (abs(c[i][j] - g.c[i][j]) >= tol) direct = false;
      }
    }
    EXPECT_EQ(g.in_dstar(s, r), direct) << m;
  }
  // D* dense below r* and r* ∈ D*
  EXPECT_TRUE(g.in_dstar(s, g.r_star));
  for (std::uint64_t m = 1; m < 16; ++m) {
    Element r = from_mask(4, m);
    if (!boolalg::leq(r, g.r_star)) continue;
    bool found = false;
    for (std::uint64_t sub = m; sub && !found; sub = (sub - 1) & m) {
      found = g.in_dstar(s, from_mask(4, sub));
    }
    EXPECT_TRUE(found);
  }
  // grid values and Σ_m c a_m >= δ
  auto a = s.masses();
  Rational total = 0;
  for (std::size_t j = 0; j < g.c[0].size(); ++j) {
    EXPECT_EQ(g.c[0][j] * 5, ceil(g.c[0][j] * 5));
    total += g.c[0][j] * a[g.M[j]];
  }
  EXPECT_GE(total, s.deltas[0]);
}

TEST(Grid, HypothesisViolation) {
  Setting s = two_block_setting(q(1, 2));
  s.sequences[0] = periodic({make(4, {0, 1}), make(4, {0, 2})});
  try {
    grid_refine(s, s.algebra.one(), q(1, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::precondition_failure);
    EXPECT_NE(std::string(e.what()).find("atom 3"), std::string::npos);
  }
}

TEST(Grid, RandomInstancesSettle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 6;
    std::vector<Element> rows;
    for (int k = 0; k < 4; ++k) {
      std::uint64_t m = 0;
      while (m == 0) m = rng() & 63;
      rows.push_back(from_mask(n, m));
    }
    Setting s{MeasuredAlgebra::uniform(n), fam::PeriodicFAM::uniform(4),
              fam::IndexPartition{4, {{0, 1}, {2, 3}}}, BlockFamily{}, {periodic(rows)}, {0}};
    Rational tol = q(1, 8);
    auto g = grid_refine(s, s.algebra.one(), tol);
    EXPECT_TRUE(g.in_dstar(s, g.r_star));
    EXPECT_LE(g.trace.size(), 3u);
    g.r_star.for_each_atom(
        [&](std::size_t a) { EXPECT_TRUE(g.in_dstar(s, Element::atom(n, a))); });
  }
}

TEST(Limit, TrivialCases) {
  auto alg = MeasuredAlgebra::uniform(4);
  auto fam = fam::PeriodicFAM::uniform(2);
  BlockFamily blocks;
  Element r = make(4, {0, 1, 3});
  EXPECT_EQ(limit_construct(alg, fam, blocks, periodic({Element::one(4)}), r, q(1, 2)), r);
  auto b = periodic({make(4, {0}), make(4, {1, 2})});
  EXPECT_EQ(limit_construct(alg, fam, blocks, b, Element::one(4), 0), Element::one(4));
}

TEST(Limit, FourAtomExample) {
  auto alg = MeasuredAlgebra::uniform(4);
  auto fam = fam::PeriodicFAM::uniform(2);
  BlockFamily blocks;
  auto b = periodic({make(4, {0, 1}), make(4, {0, 2})});
  Element out = limit_construct(alg, fam, blocks, b, Element::one(4), q(1, 2));
  EXPECT_EQ(out, make(4, {0, 1, 2}));
  EXPECT_TRUE(boolalg::leq(make(4, {0}), out));
  for (std::uint64_t m = 1; m < 16; ++m) {
    Element r = from_mask(4, m);
    bool below = boolalg::leq(r, out);
    bool ok = direct_integral(alg, fam, blocks, b, r) >= q(1, 2);
    if (below) EXPECT_TRUE(ok) << m;
  }
  EXPECT_EQ(direct_integral(alg, fam, blocks, b, make(4, {0})), 1);
}

TEST(Limit, Precondition) {
  auto alg = MeasuredAlgebra::uniform(4);
  auto b = periodic({make(4, {0}), make(4, {0, 2})});
  EXPECT_THROW(limit_construct(alg, fam::PeriodicFAM::uniform(2), BlockFamily{}, b,
                               Element::one(4), q(1, 2)),
               Error);
}

TEST(Limit, ExhaustiveRandom) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 3 + rng() % 8;
    std::vector<Rational> w;
    long total = 0;
    std::vector<long> raw(n);
    for (auto& x : raw) total += (x = 1 + static_cast<long>(rng() % 4));
    for (auto x : raw) w.push_back(q(x, total));
    MeasuredAlgebra alg(w);
    std::uint64_t full = (std::uint64_t{1} << n) - 1;
    Element r_star;
    do r_star = from_mask(n, rng() & full);
    while (r_star.count() < 2);

    BlockFamily blocks{2, {1, 2}};
    ConditionSequence b;
    b.period = 2;
    b.table.resize(2);
    for (std::uint64_t k = 0; k < 2; ++k) {
      for (std::size_t j = 0; j < blocks.sizes[k]; ++j) {
        Element e;
        do e = from_mask(n, rng() & full);
        while ((e & r_star).is_zero());
        b.table[k].push_back(e);
      }
    }
    auto cond = boolalg::conditional(alg, r_star);
    Rational delta = 1;
    for (const auto& row : b.table) {
      for (const auto& e : row) delta = std::min(delta, cond(e));
    }
    fam::PeriodicFAM fam(2, {q(1, 3), q(2, 3)});
    Element out = limit_construct(alg, fam, blocks, b, r_star, delta);
    ASSERT_FALSE(out.is_zero());
    ASSERT_TRUE(boolalg::leq(out, r_star));
    for (std::uint64_t m = 1; m <= full; ++m) {
      Element r = from_mask(n, m);
      if (boolalg::leq(r, out)) EXPECT_GE(direct_integral(alg, fam, blocks, b, r), delta);
    }
    // nothing larger works: each atom of r* outside r⊗ falls below δ
    r_star.for_each_atom([&](std::size_t a) {
      if (!out.test(a)) EXPECT_LT(direct_integral(alg, fam, blocks, b, Element::atom(n, a)), delta);
    });
  }
}

TEST(Parameters, TheoreticalValues) {
  std::vector<Rational> a{q(1, 2), q(1, 2)};
  auto p = paper_parameters(q(1, 8), a, 2);
  EXPECT_EQ(p.h_star, 2050u);
  Rational e = 1;
  for (int j = 0; j < 21; ++j) e /= 2;
  EXPECT_EQ(p.eps_star, e);
  EXPECT_FALSE(p.empirical);
  // the displayed constraints hold and fail one step further
  Rational total = 4;
  Rational half = q(1, 16);
  EXPECT_LT(1 / Rational(2050), half * half / (2 * total));
  EXPECT_LT((2 / Rational(2050) + e) / (half * half), 1 / total);
  EXPECT_GE((2 / Rational(2050) + 2 * e) / (half * half), 1 / total);
}

TEST(Tree, DegenerateNoSequence) {
  Setting s = no_sequence_setting();
  s.partition = fam::IndexPartition{4, {{0, 1, 2, 3}}};
  auto grid = grid_refine(s, s.algebra.one(), q(1, 4));
  LemmaTree lt(s, grid, params(q(1, 4), 2, q(1, 16)), {});
  auto kids = lt.expand(lt.root(), 0);
  ASSERT_EQ(kids.size(), 1u);
  auto x = lt.expand_odd(kids[0].payload);
  ASSERT_EQ(x.atoms.size(), 1u);
  EXPECT_TRUE(x.atoms[0].sigma.empty());
  EXPECT_EQ(x.weights[0], 1);
}

TEST(Tree, LevelOneWeights) {
  auto lt = two_block_tree(4, q(1, 4));
  auto kids = lt.expand(lt.root(), 0);
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(kids[0].prob, q(1, 2));
  EXPECT_EQ(kids[1].prob, q(1, 2));
}

TEST(Tree, TwoPatterns) {
  auto lt = two_block_tree(4, q(1, 4));
  for (auto& k : lt.expand(lt.root(), 0)) {
    auto x = lt.expand_odd(k.payload);
    ASSERT_EQ(x.atoms.size(), 2u);
    EXPECT_EQ(x.weights[0], q(1, 2));
    EXPECT_EQ(x.weights[1], q(1, 2));
    for (Index kk : x.u) EXPECT_TRUE(lt.setting().partition.block(k.payload.m).contains(kk));
    for (const auto& c : lt.expand(k.payload, 1)) EXPECT_EQ(c.prob, q(1, 2) / x.u.size());
  }
}

TEST(Tree, ChildInvariantsAndFreshness) {
  auto lt = two_block_tree(6, q(1, 4));
  auto tree = lt.tree();
  tree.materialize_level(6);
  const auto& s = lt.setting();
  for (std::size_t h = 1; h <= 6; h += 2) {
    for (std::size_t i = 0; i < tree.level_size(h); ++i) {
      const auto& rho = tree.payload(h, i);
      auto x = lt.expand_odd(rho);
      Rational sum = 0;
      for (const auto& w : x.weights) sum += w;
      EXPECT_EQ(sum, 1);
      std::set<Index> used;
      for (auto p = rho.path; p; p = p->prev) used.insert(p->k);
      for (Index k : x.u) EXPECT_EQ(used.count(k), 0u);
      for (const auto& c : lt.expand(rho, h)) {
        const auto& eta = c.payload;
        EXPECT_TRUE(boolalg::leq(eta.r, rho.r));
        EXPECT_TRUE(lt.grid().in_dstar(s, eta.r));
        // σ = 0 means below the generator, σ = 1 disjoint from it
        for (Index k : x.u) {
          const Element& g = s.sequences[0].at(k, 0);
          EXPECT_TRUE(boolalg::leq(eta.r, g) || boolalg::disjoint(eta.r, g));
        }
      }
    }
  }
}

TEST(Tree, RelativeExpectationIdentity) {
  auto lt = two_block_tree(4, q(1, 4));
  auto tree = lt.tree();
  tree.materialize_level(4);
  const auto& s = lt.setting();
  for (std::size_t h : {1u, 3u}) {
    for (std::size_t i = 0; i < tree.level_size(h); ++i) {
      const auto& rho = tree.payload(h, i);
      auto x = lt.expand_odd(rho);
      Rational ez = 0;
      for (const auto& c : lt.expand(rho, h)) ez += c.prob * c.payload.z[0];
      auto f = f_function(s.algebra, s.blocks, s.sequences[0], rho.r);
      Rational avg = 0;
      for (Index k : x.u) avg += f(k);
      avg /= Rational(static_cast<unsigned long>(x.u.size()));
      EXPECT_EQ(ez, avg);
    }
  }
}

TEST(Tree, CovarianceBound) {
  auto lt = two_block_tree(4, q(1, 4));
  auto tree = lt.tree();
  tree.materialize_level(4);
  auto probs = tree.level_measure(4);
  std::vector<Rational> z2, z4;
  for (std::size_t i = 0; i < tree.level_size(4); ++i) {
    const auto& leaf = tree.payload(4, i);
    z4.push_back(leaf.z[0]);
    z2.push_back(leaf.zsum[0] - leaf.z[0]);
  }
  EXPECT_LE(ptree::covariance(probs, z2, z4), lt.parameters().eps_star);
  Rational half = 2;
  std::vector<Rational> y;
  for (std::size_t i = 0; i < z2.size(); ++i) y.push_back((z2[i] + z4[i]) / half);
  EXPECT_LT(ptree::variance(probs, y), q(1, 2) + lt.parameters().eps_star);
}

TEST(Tree, BlockCountsAreBinomial) {
  auto lt = two_block_tree(8, q(1, 4));
  auto tree = lt.tree();
  tree.materialize_level(8);
  std::vector<Rational> dist(5, Rational(0));
  for (std::size_t i = 0; i < tree.level_size(8); ++i) {
    dist[tree.payload(8, i).counts[0]] += tree.level_prob(8, i);
  }
  auto bin = ptree::binomial(4, q(1, 2));
  for (std::size_t c = 0; c <= 4; ++c) EXPECT_EQ(dist[c], bin.probs[c]);
}

TEST(Tree, ChebyshevBinomialCrossCheck) {
  Rational a = q(1, 2);
  Rational eps = q(1, 4);
  Rational bound = 2 * a * (1 - a) / (52 * eps * eps);
  EXPECT_EQ(bound, q(2, 13));
  auto bin = ptree::binomial(26, a);
  Rational tail = 0;
  for (std::size_t c = 0; c < bin.values.size(); ++c) {
    if (abs(bin.values[c] / 26 - a) >= eps) tail += bin.probs[c];
  }
  EXPECT_LE(tail, bound);
}

TEST(Witness, ExhaustiveDepthTwo) {
  Setting s = no_sequence_setting();
  auto grid = grid_refine(s, s.algebra.one(), q(1, 4));
  LemmaTree lt(s, grid, params(q(3, 4), 2, q(1, 16)), {});
  auto tree = lt.tree();
  tree.materialize_level(2);
  EXPECT_EQ(tree.level_size(2), 4u);
  SearchOptions opt;
  opt.mode = SearchMode::exhaustive;
  auto c = witness_search(lt, opt);
  ASSERT_TRUE(c.prob_event.has_value());
  EXPECT_EQ(*c.prob_event, 1);
}

TEST(Witness, SingleBlockDependsOnYOnly) {
  Setting s = two_block_setting(q(1, 2));
  s.partition = fam::IndexPartition{4, {{0, 1, 2, 3}}};
  auto grid = grid_refine(s, s.algebra.one(), q(1, 64));
  LemmaTree lt(s, grid, params(q(1, 4), 4, q(1, 16)), {});
  auto tree = lt.tree();
  tree.materialize_level(4);
  for (std::size_t i = 0; i < tree.level_size(4); ++i) {
    auto ev = lt.evaluate(tree.payload(4, i));
    EXPECT_EQ(ev.V[0], 1);
    EXPECT_EQ(ev.in_event, ev.Y[0] > q(1, 4));
  }
}

TEST(Witness, ExhaustiveAndSampledAgree) {
  auto lt = two_block_tree(8, q(1, 4));
  SearchOptions ex;
  ex.mode = SearchMode::exhaustive;
  auto c = witness_search(lt, ex);
  ASSERT_TRUE(c.prob_event.has_value());
  EXPECT_GT(*c.prob_event, 0);
  EXPECT_LE(*c.prob_event, 1);
  EXPECT_TRUE(verify_certificate(c, lt.setting(), {}).passed);

  // no leaf sits on a boundary that a slack ε′ would have to absorb
  auto tree = lt.tree();
  tree.materialize_level(8);
  Rational pe = 0;
  for (std::size_t i = 0; i < tree.level_size(8); ++i) {
    auto ev = lt.evaluate(tree.payload(8, i));
    if (ev.in_event) pe += tree.level_prob(8, i);
  }
  EXPECT_EQ(pe, *c.prob_event);

  SearchOptions sa;
  sa.seed = 42;
  sa.budget = 1000;
  auto one = witness_search(lt, sa);
  sa.threads = 4;
  auto four = witness_search(lt, sa);
  EXPECT_EQ(one.path_index, four.path_index);
  EXPECT_EQ(one.u, four.u);
  EXPECT_EQ(one.r_plus, four.r_plus);
  EXPECT_EQ(one.path_prob, four.path_prob);
  EXPECT_TRUE(verify_certificate(one, lt.setting(), {}).passed);
  EXPECT_EQ(one.u.size(), 4u);
}

TEST(Witness, ExcludedIndicesAvoided) {
  Setting s = two_block_setting(q(1, 2));
  auto grid = grid_refine(s, s.algebra.one(), q(1, 64));
  std::set<Index> F{0, 1, 2, 3, 4, 5, 9};
  LemmaTree lt(s, grid, params(q(1, 4), 8, q(1, 16)), F);
  SearchOptions sa;
  sa.seed = 3;
  sa.budget = 1000;
  auto c = witness_search(lt, sa);
  for (Index k : c.u) EXPECT_EQ(F.count(k), 0u);
  EXPECT_TRUE(verify_certificate(c, s, F).passed);
  EXPECT_FALSE(verify_certificate(c, s, {c.u[0]}).passed);
}

TEST(Witness, BudgetExhausted) {
  // h*/2 = 3 draws never give V_m = 1/2
  auto lt = two_block_tree(6, q(1, 64));
  SearchOptions sa;
  sa.budget = 5;
  try {
    witness_search(lt, sa);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::budget_exhausted);
    EXPECT_NE(std::string(e.what()).find("5 paths"), std::string::npos);
  }
}

TEST(Witness, SampleLeafMatchesTree) {
  auto lt = two_block_tree(4, q(1, 4));
  auto tree = lt.tree();
  tree.materialize_level(4);
  for (std::uint64_t idx = 0; idx < 20; ++idx) {
    Rational prob;
    auto leaf = sample_leaf(lt, path_seed(1, idx), &prob);
    bool found = false;
    for (std::size_t i = 0; i < tree.level_size(4) && !found; ++i) {
      const auto& p = tree.payload(4, i);
      found = p.r == leaf.r && LemmaTree::chosen(p) == LemmaTree::chosen(leaf) &&
              p.counts == leaf.counts && tree.level_prob(4, i) == prob;
    }
    EXPECT_TRUE(found) << idx;
  }
}

TEST(Verify, CharacterizationAndTamper) {
  auto lt = two_block_tree(8, q(1, 4));
  SearchOptions sa;
  sa.seed = 9;
  auto c = witness_search(lt, sa);
  std::vector<Rational> eps_i{1 - lt.setting().deltas[0]};
  auto rep = verify_characterization(c, lt.setting(), eps_i, c.eps);
  EXPECT_TRUE(rep.passed);
  for (const auto& row : rep.rows) EXPECT_TRUE(row.pass) << row.name;

  Certificate bad = c;
  bad.u.pop_back();
  EXPECT_FALSE(verify_characterization(bad, lt.setting(), eps_i, c.eps).passed);
  EXPECT_FALSE(verify_certificate(bad, lt.setting(), {}).passed);

  Certificate empty = c;
  empty.u.clear();
  EXPECT_FALSE(verify_certificate(empty, lt.setting(), {}).passed);

  Certificate outside = c;
  outside.r_plus = Element::one(4);
  outside.r = make(4, {0, 1});
  EXPECT_FALSE(verify_certificate(outside, lt.setting(), {}).passed);
}

TEST(Verify, MaximalSuccess) {
  Setting s = two_block_setting(q(1, 2));
  s.sequences[0] = periodic({Element::one(4)});
  Certificate c;
  c.u = {0, 2};
  c.r_plus = make(4, {3});
  c.r = Element::one(4);
  c.block_freq = {q(1, 2), q(1, 2)};
  c.success = {1};
  std::vector<Rational> eps_i{q(1, 3)};
  auto rep = verify_characterization(c, s, eps_i, q(1, 8));
  EXPECT_TRUE(rep.passed);
}

TEST(Assembly, DepthTwoCoverage) {
  cylinder::DyadicAlgebra alg({0, 1});
  auto S = cylinder::cylinders_in_order(alg, 2);
  EXPECT_EQ(S.size(), 9u);
  std::vector<Rational> eps{q(1, 2)};
  auto rep = fam_linked_witness(alg, S, eps);
  EXPECT_EQ(rep.elements, 15u);
  EXPECT_TRUE(rep.covered);
  EXPECT_TRUE(rep.bounds_hold);
  for (const auto& e : rep.entries) EXPECT_GE(e.kelley, 1 - e.eps);
}

TEST(Assembly, WholeSpaceThreshold) {
  cylinder::DyadicAlgebra alg({0, 1, 2});
  Element one = alg.embed(cylinder::Cylinder{});
  for (Rational e : {q(1, 2), q(1, 4), q(1, 8)}) {
    auto Q = intnum::threshold_minimal(alg.algebra(), one, 1 - e);
    for (const auto& b : Q) EXPECT_GE(alg.leb(b), 1 - e);
    EXPECT_GE(intnum::kelley_lower(Q).t, 1 - e);
  }
}

TEST(Assembly, MembersOfOwnQ) {
  cylinder::DyadicAlgebra alg({0, 1});
  for (const auto& s : cylinder::cylinders_in_order(alg, 2)) {
    EXPECT_EQ(alg.conditional_leb(alg.embed(s), alg.embed(s)), 1);
  }
}

TEST(Assembly, UncoveredReported) {
  cylinder::DyadicAlgebra alg({0, 1});
  std::vector<cylinder::Cylinder> S{cylinder::Cylinder{{{0, false}}}};
  std::vector<Rational> eps{q(1, 2)};
  try {
    fam_linked_witness(alg, S, eps);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::coverage);
  }
}

TEST(Assembly, LimitMap) {
  cylinder::DyadicAlgebra alg({0, 1});
  cylinder::Cylinder c{{{0, false}}};
  Element s = alg.embed(c);
  auto b = periodic({s, Element::one(4)});
  auto fam = fam::PeriodicFAM::uniform(2);
  Element out = limit_map(alg, fam, BlockFamily{}, b, s, q(1, 4));
  EXPECT_EQ(out, limit_construct(alg.algebra(), fam, BlockFamily{}, b, s, q(3, 4)));
  EXPECT_EQ(out, s);
}
