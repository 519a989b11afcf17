#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"

namespace famlab::famlimit {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Weighted {
  Rational prob;
};

Certificate make_certificate(const LemmaTree& tree, const NodeState& leaf) {
  const Setting& s = tree.setting();
  Certificate c;
  c.u = LemmaTree::chosen(leaf);
  c.r_plus = leaf.r;
  c.r = tree.grid().trace.front().r;
  Rational n(static_cast<unsigned long>(c.u.size()));
  for (std::size_t m = 0; m < s.mstar(); ++m) {
    auto B = s.partition.block(m);
    std::size_t hits = 0;
    for (Index k : c.u) hits += B.contains(k) ? 1 : 0;
    c.block_freq.push_back(Rational(static_cast<unsigned long>(hits)) / n);
  }
  for (const auto& seq : s.sequences) {
    Rational total = 0;
    for (Index k : c.u) total += success_ratio(s.blocks, seq, c.r_plus, k);
    c.success.push_back(total / n);
  }
  const Parameters& p = tree.parameters();
  c.eps = p.eps;
  c.deltas = s.deltas;
  c.masses = s.masses();
  c.h_star = p.h_star;
  c.eps_star = p.eps_star;
  c.empirical = p.empirical;
  return c;
}

Certificate checked(const LemmaTree& tree, Certificate c) {
  auto report = verify_certificate(c, tree.setting(), tree.excluded());
  if (!report.passed) {
    for (const auto& row : report.rows) {
      if (!row.pass) {
        throw Error(Errc::verification_failed, row.name + ": " + to_string(row.lhs) + " " +
                                                   row.relation + " " + to_string(row.rhs) +
                                                   " fails");
      }
    }
  }
  return c;
}

void record(TailStats& t, const LeafEvaluation& ev, const Setting& s, const Rational& eps,
            const std::vector<Rational>& masses) {
  t.paths += 1;
  bool block_bad = false;
  for (std::size_t m = 0; m < ev.V.size(); ++m) {
    if (abs(ev.V[m] - masses[m]) >= eps) block_bad = true;
  }
  bool success_bad = false;
  for (std::size_t i = 0; i < ev.Y.size(); ++i) {
    if (ev.Y[i] <= s.deltas[i] - eps) success_bad = true;
    if (t.worst_success.size() <= i) t.worst_success.push_back(ev.Y[i]);
    else if (ev.Y[i] < t.worst_success[i]) t.worst_success[i] = ev.Y[i];
  }
  t.block_failures += block_bad ? 1 : 0;
  t.success_failures += success_bad ? 1 : 0;
}

std::string describe(const TailStats& t) {
  std::string out = std::to_string(t.paths) + " paths, " + std::to_string(t.block_failures) +
                    " missed (1), " + std::to_string(t.success_failures) + " missed (2)";
  for (std::size_t i = 0; i < t.worst_success.size(); ++i) {
    out += ", min Y_" + std::to_string(i) + " = " + to_string(t.worst_success[i]);
  }
  return out;
}

Certificate exhaustive(const LemmaTree& lt, const SearchOptions& opt) {
  auto tree = lt.tree();
  std::size_t h = lt.parameters().h_star;
  tree.materialize_level(h, opt.node_cap);
  Rational pe = 0;
  std::optional<std::size_t> first;
  TailStats stats;
  auto masses = lt.setting().masses();
  for (std::size_t i = 0; i < tree.level_size(h); ++i) {
    auto ev = lt.evaluate(tree.payload(h, i));
    if (ev.in_event) {
      pe += tree.level_prob(h, i);
      if (!first) first = i;
    } else {
      record(stats, ev, lt.setting(), lt.parameters().eps, masses);
    }
  }
  if (!first) throw Error(Errc::budget_exhausted, "Pr(E) = 0 over " + describe(stats));
  Certificate c = make_certificate(lt, tree.payload(h, *first));
  c.path_index = *first;
  c.path_prob = tree.level_prob(h, *first);
  c.prob_event = pe;
  return checked(lt, std::move(c));
}

Certificate sampled(const LemmaTree& lt, const SearchOptions& opt) {
  const std::uint64_t none = opt.budget;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> found{none};
  std::mutex mu;
  TailStats stats;
  std::exception_ptr failure;
  auto masses = lt.setting().masses();

  auto worker = [&] {
    TailStats local;
    try {
      for (;;) {
        std::uint64_t idx = next.fetch_add(1);
        if (idx >= opt.budget || idx > found.load()) break;
        auto leaf = sample_leaf(lt, path_seed(opt.seed, idx));
        auto ev = lt.evaluate(leaf);
        if (ev.in_event) {
          std::uint64_t cur = found.load();
          while (idx < cur && !found.compare_exchange_weak(cur, idx)) {
          }
          break;
        }
        record(local, ev, lt.setting(), lt.parameters().eps, masses);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      found.store(0);
    }
    std::lock_guard lock(mu);
    stats.paths += local.paths;
    stats.block_failures += local.block_failures;
    stats.success_failures += local.success_failures;
    for (std::size_t i = 0; i < local.worst_success.size(); ++i) {
      if (stats.worst_success.size() <= i) stats.worst_success.push_back(local.worst_success[i]);
      else stats.worst_success[i] = std::min(stats.worst_success[i], local.worst_success[i]);
    }
  };

  unsigned n = std::max(1u, opt.threads);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::uint64_t idx = found.load();
  if (idx == none) {
    throw Error(Errc::budget_exhausted, "no path in E within budget: " + describe(stats));
  }
  Rational prob;
  auto leaf = sample_leaf(lt, path_seed(opt.seed, idx), &prob);
  Certificate c = make_certificate(lt, leaf);
  c.path_index = idx;
  c.path_prob = prob;
  return checked(lt, std::move(c));
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  return mix(mix(seed) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

NodeState sample_leaf(const LemmaTree& tree, std::uint64_t seed, Rational* prob) {
  std::mt19937_64 rng(seed);
  NodeState cur = tree.root();
  Rational p = 1;
  for (std::size_t d = 0; d < tree.parameters().h_star; ++d) {
    if (d % 2 == 0) {
      auto kids = tree.expand(cur, d);
      std::size_t i = ptree::pick_child(kids, ptree::unit_draw(rng));
      p *= kids[i].prob;
      cur = std::move(kids[i].payload);
      continue;
    }
    auto x = tree.expand_odd(cur);
    Rational share = 1 / Rational(static_cast<unsigned long>(x.u.size()));
    std::vector<Weighted> flat;
    for (std::size_t sg = 0; sg < x.atoms.size(); ++sg) {
      for (std::size_t ki = 0; ki < x.u.size(); ++ki) flat.push_back({x.weights[sg] * share});
    }
    std::size_t i = ptree::pick_child(flat, ptree::unit_draw(rng));
    p *= flat[i].prob;
    cur = tree.odd_child(cur, x, i / x.u.size(), i % x.u.size());
  }
  if (prob) *prob = p;
  return cur;
}

Certificate witness_search(const LemmaTree& tree, const SearchOptions& opt) {
  if (opt.mode == SearchMode::exhaustive) return exhaustive(tree, opt);
  if (opt.budget == 0) throw Error(Errc::budget_exhausted, "zero path budget");
  return sampled(tree, opt);
}

}  // namespace famlab::famlimit
