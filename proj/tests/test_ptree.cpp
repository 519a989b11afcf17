#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "famlab/error.hpp"
#include "famlab/ptree.hpp"

using namespace famlab;
using namespace famlab::ptree;

namespace {

// Payload: the path as a string of child indices.
using Tree = ProbTree<std::string>;

Tree uniform_binary(std::size_t height) {
  return Tree("", [](const std::string& p, std::size_t) {
    return std::vector<Tree::Child>{{"0", Rational(1, 2), p + "0"}, {"1", Rational(1, 2), p + "1"}};
  }, height);
}

// Successor weights derived deterministically from the path, so a separate
// recursive walk can recompute every probability.
std::vector<Rational> weights_for(const std::string& path, std::uint64_t seed) {
  std::seed_seq seq(path.begin(), path.end());
  std::vector<std::uint32_t> v(1);
  seq.generate(v.begin(), v.end());
  std::mt19937_64 rng(seed ^ v[0]);
  std::size_t k = 1 + rng() % 4;
  std::vector<long> raw(k);
  long total = 0;
  for (auto& r : raw) total += (r = 1 + static_cast<long>(rng() % 6));
  std::vector<Rational> w;
  for (auto r : raw) {
    Rational x(r, total);
    x.canonicalize();
    w.push_back(x);
  }
  return w;
}

Tree random_tree(std::uint64_t seed, std::size_t height) {
  return Tree("", [seed](const std::string& p, std::size_t) {
    std::vector<Tree::Child> kids;
    auto w = weights_for(p, seed);
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::string l(1, static_cast<char>('a' + i));
      kids.push_back({l, w[i], p + l});
    }
    return kids;
  }, height);
}

// Path probabilities at depth h by explicit recursion.
void oracle_level(std::uint64_t seed, const std::string& p, std::size_t h, const Rational& prob,
                  std::vector<std::pair<std::string, Rational>>& out) {
  if (p.size() == h) {
    out.emplace_back(p, prob);
    return;
  }
  auto w = weights_for(p, seed);
  for (std::size_t i = 0; i < w.size(); ++i) {
    oracle_level(seed, p + static_cast<char>('a' + i), h, prob * w[i], out);
  }
}

Rational value_of(const std::string& p, std::uint64_t salt) {
  std::uint64_t h = salt;
  for (char c : p) h = h * 131 + static_cast<unsigned char>(c);
  Rational v(static_cast<long>(h % 13) - 4, 3);
  v.canonicalize();
  return v;
}

}  // namespace

TEST(Tree, RootLevel) {
  auto t = uniform_binary(3);
  EXPECT_EQ(t.level_size(0), 1U);
  EXPECT_EQ(t.level_prob(0, 0), 1);
}

TEST(Tree, UniformBinary) {
  auto t = uniform_binary(3);
  t.materialize_level(3);
  ASSERT_EQ(t.level_size(3), 8U);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(t.level_prob(3, i), Rational(1, 8));
}

TEST(Tree, ProductLawExample) {
  Tree t("", [](const std::string& p, std::size_t d) {
    if (d == 0) return std::vector<Tree::Child>{{"x", Rational(1, 3), "x"}, {"y", Rational(2, 3), "y"}};
    return std::vector<Tree::Child>{{"u", Rational(1, 4), p + "u"}, {"v", Rational(3, 4), p + "v"}};
  }, 2);
  t.materialize_level(2);
  EXPECT_EQ(t.level_prob(2, 0), Rational(1, 12));
  EXPECT_EQ(t.level_prob(2, 0), t.subtree_prob(1, 0, 1, 0) * t.level_prob(1, 0));
}

TEST(Tree, NotMaterialized) {
  auto t = uniform_binary(3);
  try {
    t.level_size(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_materialized);
  }
}

TEST(Tree, RejectsBadWeights) {
  Tree t("", [](const std::string&, std::size_t) {
    return std::vector<Tree::Child>{{"a", Rational(1, 2), "a"}, {"b", Rational(1, 3), "b"}};
  }, 1);
  EXPECT_THROW(t.materialize_level(1), Error);
}

TEST(Tree, RandomTreesAgainstOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::size_t height = 1 + seed % 5;
    auto t = random_tree(seed, height);
    t.materialize_level(height);
    for (std::size_t h = 0; h <= height; ++h) {
      std::vector<std::pair<std::string, Rational>> oracle;
      oracle_level(seed, "", h, Rational(1), oracle);
      ASSERT_EQ(oracle.size(), t.level_size(h));
      Rational total = 0;
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        EXPECT_EQ(t.payload(h, i), oracle[i].first);
        EXPECT_EQ(t.level_prob(h, i), oracle[i].second);
        total += t.level_prob(h, i);
      }
      EXPECT_EQ(total, 1);
    }
    // product law for every pair ρ ⊆ η
    for (std::size_t h = 0; h <= height; ++h) {
      for (std::size_t rho = 0; rho < t.level_size(h); ++rho) {
        for (std::size_t n = 0; h + n <= height; ++n) {
          auto [lo, hi] = t.descendants(h, rho, n);
          for (std::size_t eta = lo; eta < hi; ++eta) {
            EXPECT_EQ(t.level_prob(h + n, eta), t.subtree_prob(h, rho, n, eta) * t.level_prob(h, rho));
          }
        }
      }
    }
  }
}

TEST(Expectation, ConstantOnChildren) {
  auto t = random_tree(3, 2);
  t.materialize_level(2);
  LevelRV x{1, std::vector<Rational>(t.level_size(1), Rational(5, 7))};
  EXPECT_EQ(t.relative_expectation(x, 0, 0), Rational(5, 7));
}

TEST(Expectation, GrandchildIndicator) {
  auto t = random_tree(4, 3);
  t.materialize_level(3);
  ASSERT_GT(t.level_size(1), 0U);
  auto [lo, hi] = t.descendants(1, 0, 2);
  ASSERT_LT(lo, hi);
  LevelRV x{3, std::vector<Rational>(t.level_size(3), Rational(0))};
  x.values[lo] = 1;
  Rational expect = t.level_prob(3, lo) / t.level_prob(1, 0);
  EXPECT_EQ(t.relative_expectation(x, 1, 0), expect);
}

TEST(Expectation, RootIsOrdinary) {
  auto t = random_tree(5, 3);
  t.materialize_level(3);
  LevelRV x{3, {}};
  Rational direct = 0;
  for (std::size_t i = 0; i < t.level_size(3); ++i) {
    x.values.push_back(value_of(t.payload(3, i), 1));
    direct += x.values.back() * t.level_prob(3, i);
  }
  EXPECT_EQ(t.expectation(x), direct);
}

TEST(Tower, ConstantAndLeafIndicator) {
  auto t = uniform_binary(3);
  t.materialize_level(3);
  LevelRV c{3, std::vector<Rational>(8, Rational(2))};
  auto rep = t.tower_check(c, 0, 1);
  EXPECT_TRUE(rep.equal);
  EXPECT_EQ(rep.entries[0].direct, 2);
  LevelRV leaf{3, std::vector<Rational>(8, Rational(0))};
  leaf.values[5] = 1;
  rep = t.tower_check(leaf, 0, 1);
  EXPECT_TRUE(rep.equal);
  EXPECT_EQ(rep.entries[0].direct, Rational(1, 8));
  EXPECT_EQ(rep.entries[0].iterated, Rational(1, 8));
}

TEST(Tower, RandomTrees) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    std::size_t height = 2 + seed % 4;
    auto t = random_tree(seed, height);
    t.materialize_level(height);
    LevelRV x{height, {}};
    for (std::size_t i = 0; i < t.level_size(height); ++i) {
      x.values.push_back(value_of(t.payload(height, i), seed));
    }
    for (std::size_t h = 0; h + 1 < height; ++h) {
      for (std::size_t n = 1; h + n < height; ++n) {
        auto rep = t.tower_check(x, h, n);
        EXPECT_TRUE(rep.equal);
        for (const auto& e : rep.entries) EXPECT_EQ(e.direct, e.iterated);
      }
    }
  }
}

TEST(Tower, LinearityOfRelativeExpectation) {
  auto t = random_tree(77, 4);
  t.materialize_level(4);
  LevelRV x{4, {}}, y{4, {}}, z{4, {}};
  Rational r(3, 5), s(-2, 7);
  for (std::size_t i = 0; i < t.level_size(4); ++i) {
    x.values.push_back(value_of(t.payload(4, i), 1));
    y.values.push_back(value_of(t.payload(4, i), 2));
    z.values.push_back(r * x.values.back() + s * y.values.back());
  }
  for (std::size_t rho = 0; rho < t.level_size(2); ++rho) {
    EXPECT_EQ(t.relative_expectation(z, 2, rho),
              r * t.relative_expectation(x, 2, rho) + s * t.relative_expectation(y, 2, rho));
  }
}

TEST(Tree, CsvDump) {
  auto t = uniform_binary(2);
  t.materialize_level(2);
  std::ostringstream os;
  t.write_csv(os, 2);
  EXPECT_NE(os.str().find("\"0/1\",1/4"), std::string::npos);
}

TEST(Sample, PathProbabilityMatchesTree) {
  auto t = random_tree(9, 3);
  t.materialize_level(3);
  std::mt19937_64 rng(1);
  auto expand = [](const std::string& p, std::size_t) {
    std::vector<Tree::Child> kids;
    auto w = weights_for(p, 9);
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::string l(1, static_cast<char>('a' + i));
      kids.push_back({l, w[i], p + l});
    }
    return kids;
  };
  for (int trial = 0; trial < 20; ++trial) {
    auto [path, prob] = sample_path(std::string(), expand, 3, rng);
    bool found = false;
    for (std::size_t i = 0; i < t.level_size(3); ++i) {
      if (t.payload(3, i) == path.back()) {
        EXPECT_EQ(t.level_prob(3, i), prob);
        found = true;
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(Moments, ConstantHasNoVariance) {
  std::vector<Rational> p{Rational(1, 3), Rational(2, 3)};
  std::vector<Rational> c{Rational(4), Rational(4)};
  std::vector<Rational> y{Rational(1), Rational(-2)};
  auto m = moments(p, c, y);
  EXPECT_EQ(m.var_x, 0);
  EXPECT_EQ(m.cov, 0);
  EXPECT_EQ(covariance(p, y, c), 0);
}

TEST(Moments, TranslationInvariance) {
  std::vector<Rational> p{Rational(1, 6), Rational(1, 2), Rational(1, 3)};
  std::vector<Rational> x{Rational(1), Rational(-3, 2), Rational(7)};
  std::vector<Rational> x5;
  for (auto& v : x) x5.push_back(v + 5);
  EXPECT_EQ(variance(p, x5), variance(p, x));
  EXPECT_GE(variance(p, x), 0);
}

TEST(Moments, BilinearityAndSumExpansion) {
  std::mt19937_64 rng(4);
  const std::size_t points = 6;
  std::vector<Rational> p(points, Rational(1, points));
  std::vector<std::vector<Rational>> X(5);
  for (auto& xs : X) {
    for (std::size_t i = 0; i < points; ++i) xs.emplace_back(static_cast<long>(rng() % 9) - 4, 2);
    for (auto& v : xs) v.canonicalize();
  }
  std::vector<Rational> a{Rational(1), Rational(-1, 2), Rational(2), Rational(0), Rational(3, 4)};
  std::vector<Rational> sum(points, Rational(0));
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t i = 0; i < points; ++i) sum[i] += a[k] * X[k][i];
  }
  Rational expansion = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) expansion += a[i] * a[j] * covariance(p, X[i], X[j]);
  }
  EXPECT_EQ(variance(p, sum), expansion);
  std::vector<Rational> comb(points);
  for (std::size_t i = 0; i < points; ++i) comb[i] = 3 * X[0][i] - X[1][i];
  EXPECT_EQ(covariance(p, comb, X[2]), 3 * covariance(p, X[0], X[2]) - covariance(p, X[1], X[2]));
}

TEST(Chebyshev, Examples) {
  std::vector<Rational> p{Rational(1, 2), Rational(1, 2)};
  std::vector<Rational> c{Rational(3), Rational(3)};
  auto a = chebyshev_audit(p, c, Rational(1));
  EXPECT_EQ(a.lhs, 0);
  EXPECT_EQ(a.rhs, 0);
  EXPECT_TRUE(a.holds);
  std::vector<Rational> coin{Rational(0), Rational(1)};
  a = chebyshev_audit(p, coin, Rational(1, 2));
  EXPECT_EQ(a.lhs, 1);
  EXPECT_EQ(a.rhs, 1);
  EXPECT_TRUE(a.holds);
  auto b = binomial(4, Rational(1, 2));
  a = chebyshev_audit(b.probs, b.values, Rational(2));
  EXPECT_EQ(a.lhs, Rational(1, 8));
  EXPECT_EQ(a.rhs, Rational(1, 4));
  EXPECT_TRUE(a.holds);
}

TEST(Binomial, MomentsExact) {
  for (std::size_t n = 1; n <= 20; ++n) {
    for (Rational p : {Rational(1, 2), Rational(1, 3), Rational(5, 7)}) {
      auto b = binomial(n, p);
      Rational nn(static_cast<long>(n));
      EXPECT_EQ(expectation(b.probs, b.values), nn * p);
      EXPECT_EQ(variance(b.probs, b.values), nn * p * (1 - p));
      EXPECT_EQ(sum(b.probs), 1);
    }
  }
}

// Bin(n, p) as n independent Bernoulli levels of a tree: the level-n sum
// of indicators has the same distribution as binomial().
TEST(Binomial, MatchesTree) {
  Rational p(2, 5);
  for (std::size_t n = 1; n <= 10; ++n) {
    ProbTree<int> t(0, [p](const int& s, std::size_t) {
      return std::vector<ProbTree<int>::Child>{{"0", 1 - p, s}, {"1", p, s + 1}};
    }, n);
    t.materialize_level(n);
    std::vector<Rational> dist(n + 1, Rational(0));
    for (std::size_t i = 0; i < t.level_size(n); ++i) dist[t.payload(n, i)] += t.level_prob(n, i);
    auto b = binomial(n, p);
    ASSERT_EQ(b.values.size(), n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      EXPECT_EQ(b.values[k], static_cast<long>(k));
      EXPECT_EQ(b.probs[k], dist[k]);
    }
  }
}
