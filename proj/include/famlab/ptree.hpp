#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "famlab/error.hpp"
#include "famlab/rational.hpp"

/// Probability trees with finite discrete probability spaces on successor
/// sets, level measures and relative expectations.
namespace famlab::ptree {

/// A random variable on one level, aligned with the level's node order.
struct LevelRV {
  std::size_t level = 0;
  std::vector<Rational> values;
};

struct TowerEntry {
  std::size_t node = 0;  // index of ρ in Lev_h
  Rational direct;       // E[X : ν↾h = ρ]
  Rational iterated;     // E[E[X : ν↾(h+n) = η] : η↾h = ρ]
};

struct TowerReport {
  std::vector<TowerEntry> entries;
  bool equal = true;
};

template <class Payload>
class ProbTree {
 public:
  struct Child {
    std::string label;
    Rational prob;
    Payload payload;
  };
  using Expander = std::function<std::vector<Child>(const Payload&, std::size_t depth)>;

  ProbTree(Payload root, Expander expand, std::size_t height)
      : expand_(std::move(expand)), height_(height) {
    levels_.emplace_back();
    levels_[0].push_back(Node{std::string(), Rational(1), Rational(1), 0, 0, 0, std::move(root)});
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t materialized() const noexcept { return levels_.size() - 1; }

  /// Builds every level up to h. Throws Errc::structural when a non-maximal
  /// node has no successors or its successor weights do not sum to 1, and
  /// Errc::capacity past `node_cap` nodes on a level.
  void materialize_level(std::size_t h, std::size_t node_cap = 1'000'000) {
    if (h > height_) {
      throw Error(Errc::not_materialized, "level " + std::to_string(h) + " beyond height " +
                                              std::to_string(height_));
    }
    while (levels_.size() <= h) {
      std::size_t depth = levels_.size() - 1;
      std::vector<Node> next;
      for (auto& node : levels_[depth]) {
        auto kids = expand_(node.payload, depth);
        if (kids.empty()) throw Error(Errc::structural, "tree is not well-pruned");
        Rational total = 0;
        node.first_child = next.size();
        node.child_count = kids.size();
        std::size_t parent = static_cast<std::size_t>(&node - levels_[depth].data());
        for (auto& c : kids) {
          if (c.prob < 0) throw Error(Errc::structural, "negative successor probability");
          total += c.prob;
          Rational lp = node.level_prob * c.prob;
          next.push_back(Node{std::move(c.label), c.prob, lp, parent, 0, 0, std::move(c.payload)});
          if (next.size() > node_cap) {
            throw Error(Errc::capacity, "level " + std::to_string(depth + 1) + " exceeds " +
                                            std::to_string(node_cap) + " nodes");
          }
        }
        if (total != 1) {
          throw Error(Errc::structural, "successor probabilities sum to " + to_string(total));
        }
      }
      levels_.push_back(std::move(next));
    }
  }

  std::size_t level_size(std::size_t h) const { return level(h).size(); }
  const Payload& payload(std::size_t h, std::size_t i) const { return level(h).at(i).payload; }
  const std::string& label(std::size_t h, std::size_t i) const { return level(h).at(i).label; }
  const Rational& succ_prob(std::size_t h, std::size_t i) const { return level(h).at(i).prob; }
  std::size_t parent(std::size_t h, std::size_t i) const { return level(h).at(i).parent; }

  /// Pr_{Lev_h}(node): the product of successor weights along the path.
  const Rational& level_prob(std::size_t h, std::size_t i) const {
    return level(h).at(i).level_prob;
  }

  std::vector<Rational> level_measure(std::size_t h) const {
    std::vector<Rational> out;
    for (const auto& n : level(h)) out.push_back(n.level_prob);
    return out;
  }

  /// Nodes of Lev_{h+n} above node i of Lev_h, as an index range.
  std::pair<std::size_t, std::size_t> descendants(std::size_t h, std::size_t i,
                                                  std::size_t n) const {
    std::size_t lo = i, hi = i + 1;
    for (std::size_t d = h; d < h + n; ++d) {
      const auto& lev = level(d);
      (void)level(d + 1);
      if (lo == hi) return {0, 0};
      std::size_t new_lo = lev.at(lo).first_child;
      const auto& last = lev.at(hi - 1);
      std::size_t new_hi = last.first_child + last.child_count;
      lo = new_lo;
      hi = new_hi;
    }
    return {lo, hi};
  }

  /// Pr_{Lev_n(T_{≥ρ})}(η) for η at level h+n above ρ at level h.
  Rational subtree_prob(std::size_t h, std::size_t rho, std::size_t n, std::size_t eta) const {
    Rational p = 1;
    std::size_t cur = eta;
    for (std::size_t d = h + n; d > h; --d) {
      p *= succ_prob(d, cur);
      cur = parent(d, cur);
    }
    if (cur != rho) throw Error(Errc::structural, "node is not above ρ");
    return p;
  }

  /// E_{Lev_n(T_{≥ρ})}[X] with X on level h+n and ρ on level h.
  Rational relative_expectation(const LevelRV& x, std::size_t h, std::size_t rho) const {
    if (x.level < h) throw Error(Errc::structural, "random variable below ρ's level");
    if (x.values.size() != level_size(x.level)) {
      throw Error(Errc::structural, "random variable does not match its level");
    }
    std::size_t n = x.level - h;
    auto [lo, hi] = descendants(h, rho, n);
    Rational total = 0;
    for (std::size_t eta = lo; eta < hi; ++eta) {
      if (x.values[eta] != 0) total += subtree_prob(h, rho, n, eta) * x.values[eta];
    }
    return total;
  }

  Rational expectation(const LevelRV& x) const { return relative_expectation(x, 0, 0); }

  /// Both sides of the tower law for every ρ on level h, with X on level
  /// h+m and the intermediate level h+n, 0 < n < m.
  TowerReport tower_check(const LevelRV& x, std::size_t h, std::size_t n) const {
    if (x.level <= h + n || n == 0) {
      throw Error(Errc::precondition_failure, "tower law needs 0 < n < m");
    }
    LevelRV inner{h + n, {}};
    for (std::size_t eta = 0; eta < level_size(h + n); ++eta) {
      inner.values.push_back(relative_expectation(x, h + n, eta));
    }
    TowerReport report;
    for (std::size_t rho = 0; rho < level_size(h); ++rho) {
      TowerEntry e{rho, relative_expectation(x, h, rho), relative_expectation(inner, h, rho)};
      if (e.direct != e.iterated) report.equal = false;
      report.entries.push_back(std::move(e));
    }
    return report;
  }

  std::vector<std::string> path(std::size_t h, std::size_t i) const {
    std::vector<std::string> out(h);
    for (std::size_t d = h; d > 0; --d) {
      out[d - 1] = label(d, i);
      i = parent(d, i);
    }
    return out;
  }

  /// CSV rows "path,probability[,value]" for level h.
  void write_csv(std::ostream& os, std::size_t h, const LevelRV* x = nullptr) const {
    os << "path,probability" << (x ? ",value" : "") << '\n';
    for (std::size_t i = 0; i < level_size(h); ++i) {
      std::string p;
      for (const auto& l : path(h, i)) p += (p.empty() ? "" : "/") + l;
      os << '"' << p << "\"," << to_string(level_prob(h, i));
      if (x) os << ',' << to_string(x->values.at(i));
      os << '\n';
    }
  }

 private:
  struct Node {
    std::string label;
    Rational prob;
    Rational level_prob;
    std::size_t parent;
    std::size_t first_child;
    std::size_t child_count;
    Payload payload;
  };

  const std::vector<Node>& level(std::size_t h) const {
    if (h >= levels_.size()) {
      throw Error(Errc::not_materialized, "level " + std::to_string(h) + " is not materialized");
    }
    return levels_[h];
  }

  Expander expand_;
  std::size_t height_;
  std::vector<std::vector<Node>> levels_;
};

/// Uniform draw in [0,1) as an exact dyadic rational from 64 random bits.
inline Rational unit_draw(std::mt19937_64& rng) {
  mpz_class bits = static_cast<unsigned long>(rng());
  mpz_class den = 1;
  den <<= 64;
  Rational u(bits, den);
  u.canonicalize();
  return u;
}

/// Index of the child selected by cumulative comparison against `u`.
template <class Child>
std::size_t pick_child(const std::vector<Child>& kids, const Rational& u) {
  Rational acc = 0;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    acc += kids[i].prob;
    if (u < acc) return i;
  }
  return kids.size() - 1;
}

/// Draws one root-to-level-`height` path, expanding only the visited nodes.
/// Returns the payloads along the path and its probability.
template <class Payload, class Expander>
std::pair<std::vector<Payload>, Rational> sample_path(Payload root, const Expander& expand,
                                                      std::size_t height, std::mt19937_64& rng) {
  std::vector<Payload> out;
  out.push_back(std::move(root));
  Rational prob = 1;
  for (std::size_t d = 0; d < height; ++d) {
    auto kids = expand(out.back(), d);
    if (kids.empty()) throw Error(Errc::structural, "tree is not well-pruned");
    std::size_t i = pick_child(kids, unit_draw(rng));
    prob *= kids[i].prob;
    out.push_back(std::move(kids[i].payload));
  }
  return {std::move(out), std::move(prob)};
}

struct Moments {
  Rational ex;
  Rational ey;
  Rational var_x;
  Rational cov;
};

/// E[X], E[Y], Var[X], Cov[X,Y] on a finite space with the given point probabilities.
Moments moments(std::span<const Rational> probs, std::span<const Rational> x,
                std::span<const Rational> y);

Rational expectation(std::span<const Rational> probs, std::span<const Rational> x);
Rational variance(std::span<const Rational> probs, std::span<const Rational> x);
Rational covariance(std::span<const Rational> probs, std::span<const Rational> x,
                    std::span<const Rational> y);

struct ChebyshevAudit {
  Rational lhs;  // Pr[|X - E[X]| >= eps]
  Rational rhs;  // Var[X]/eps^2
  bool holds = false;
};

ChebyshevAudit chebyshev_audit(std::span<const Rational> probs, std::span<const Rational> x,
                               const Rational& eps);

/// A finite distribution: distinct values with their probabilities.
struct Distribution {
  std::vector<Rational> values;
  std::vector<Rational> probs;
};

/// Bin(n, p) by repeated convolution of Bernoulli(p) levels.
Distribution binomial(std::size_t n, const Rational& p);

}  // namespace famlab::ptree
