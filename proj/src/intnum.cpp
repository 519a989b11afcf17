#include "famlab/intnum.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "famlab/error.hpp"
#include "famlab/lp.hpp"

namespace famlab::intnum {

namespace {

__extension__ using Wide = __int128;

void check_family(std::span<const Element> Q) {
  if (Q.empty()) throw Error(Errc::undefined_input, "empty family");
  for (const auto& q : Q) {
    if (q.space_size() != Q.front().space_size()) {
      throw Error(Errc::structural, "family mixes atom spaces");
    }
    if (q.is_zero()) throw Error(Errc::structural, "family contains the zero element");
  }
}

Rational weight_of(const Element& q, const std::vector<Rational>& w) {
  Rational total = 0;
  q.for_each_atom([&](std::size_t a) { total += w[a]; });
  return total;
}

// Elements below `s` by submask index, with a membership test for the
// threshold μ_s(b) >= delta evaluated in scaled integers.
class SubmaskTable {
 public:
  SubmaskTable(const MeasuredAlgebra& m, const Element& s, const Rational& delta)
      : atoms_(s.atoms()), space_(m.size()) {
    if (atoms_.size() > kMaxThresholdAtoms) {
      throw Error(Errc::capacity, "threshold enumeration below " +
                                      std::to_string(atoms_.size()) + " atoms");
    }
    if (delta <= 0) throw Error(Errc::precondition_failure, "threshold must be positive");
    mpz_class den = 1;
    for (auto a : atoms_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m.weight(a).get_den_mpz_t());
    mpz_class total = 0;
    for (auto a : atoms_) {
      mpz_class w = m.weight(a).get_num() * (den / m.weight(a).get_den());
      if (!w.fits_slong_p()) throw Error(Errc::capacity, "atom weights too fine to enumerate");
      scaled_.push_back(w.get_si());
      total += w;
    }
    // b ∈ Q iff Σ_b w * delta_den >= delta_num * Σ_s w
    mpz_class rhs = delta.get_num() * total;
    mpz_class dden = delta.get_den();
    if (!rhs.fits_slong_p() || !dden.fits_slong_p() || !total.fits_slong_p()) {
      throw Error(Errc::capacity, "threshold arithmetic exceeds 64 bits");
    }
    rhs_ = static_cast<Wide>(rhs.get_si());
    dden_ = dden.get_si();
  }

  std::size_t width() const { return atoms_.size(); }

  bool member(long sum) const { return static_cast<Wide>(sum) * dden_ >= rhs_; }

  long weight(std::size_t bit) const { return scaled_[bit]; }

  Element element(std::size_t mask) const {
    Element e(space_);
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      if ((mask >> j) & 1U) e.set(atoms_[j]);
    }
    return e;
  }

 private:
  std::vector<std::size_t> atoms_;
  std::size_t space_;
  std::vector<long> scaled_;
  Wide rhs_ = 0;
  long dden_ = 1;
};

struct Search {
  const std::vector<Element>* Q;
  std::vector<std::size_t> order;        // Q indices by increasing w(q)
  std::vector<Rational> wq;              // w(q) in `order` positions
  std::vector<std::vector<std::uint32_t>> atoms;  // per order position
  bool weighted = false;
  Rational t_w;
  std::size_t n = 0;
  std::size_t best = 0;
  std::vector<std::size_t> best_seq;
  std::vector<std::size_t> cur;
  std::vector<int> counts;
  std::size_t nodes = 0;
  std::size_t budget = 0;
  bool exhausted = false;
  std::size_t floor_bound = 1;

  void dfs(std::size_t start, int curmax, const Rational& wsum) {
    if (exhausted || best == floor_bound) return;
    if (++nodes > budget) {
      exhausted = true;
      return;
    }
    std::size_t j = cur.size();
    if (j == n) {
      if (static_cast<std::size_t>(curmax) < best) {
        best = static_cast<std::size_t>(curmax);
        best_seq = cur;
      }
      return;
    }
    if (static_cast<std::size_t>(curmax) >= best) return;
    if (weighted) {
      Rational lb = wsum + Rational(static_cast<long>(n - j)) * t_w;
      if (ceil(lb) >= static_cast<long>(best)) return;
    }
    for (std::size_t p = start; p < order.size(); ++p) {
      int m = curmax;
      for (auto a : atoms[p]) m = std::max(m, ++counts[a]);
      cur.push_back(p);
      dfs(p, m, weighted ? Rational(wsum + wq[p]) : wsum);
      cur.pop_back();
      for (auto a : atoms[p]) --counts[a];
      if (exhausted || best == floor_bound) return;
    }
  }
};

}  // namespace

std::size_t istar(std::span<const Element> seq) {
  if (seq.empty()) throw Error(Errc::undefined_input, "i* of the empty sequence");
  std::size_t n = seq.front().space_size();
  std::vector<std::size_t> count(n, 0);
  for (const auto& q : seq) {
    if (q.space_size() != n) throw Error(Errc::structural, "sequence mixes atom spaces");
    if (q.is_zero()) throw Error(Errc::structural, "sequence contains the zero element");
    q.for_each_atom([&](std::size_t a) { ++count[a]; });
  }
  return *std::max_element(count.begin(), count.end());
}

KelleyResult kelley_lower(std::span<const Element> Q) {
  check_family(Q);
  std::size_t n = Q.front().space_size();
  std::vector<lp::Column> cols;
  cols.reserve(Q.size());
  for (const auto& q : Q) {
    lp::Column c;
    q.for_each_atom([&](std::size_t a) { c.push_back(static_cast<std::uint32_t>(a)); });
    cols.push_back(std::move(c));
  }
  auto sol = lp::solve_packing(n, cols);
  KelleyResult out;
  out.t = 1 / sol.value;
  out.iterations = sol.iterations;
  for (const auto& p : sol.dual) out.weights.push_back(p / sol.value);
  out.packing = std::move(sol.primal);

  Rational total = 0;
  for (const auto& w : out.weights) {
    if (w < 0) throw Error(Errc::invariant_violation, "negative weight in the Kelley measure");
    total += w;
  }
  Rational least = weight_of(Q.front(), out.weights);
  for (const auto& q : Q) least = std::min(least, weight_of(q, out.weights));
  if (total != 1 || least != out.t) {
    throw Error(Errc::invariant_violation, "Kelley measure fails its own certificate: total " +
                                               to_string(total) + ", min " + to_string(least) +
                                               ", t " + to_string(out.t));
  }
  return out;
}

std::vector<Element> minimal_elements(std::span<const Element> Q) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < Q.size(); ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < Q.size() && minimal; ++j) {
      if (Q[j] != Q[i] && boolalg::leq(Q[j], Q[i])) minimal = false;
    }
    if (minimal && std::find(out.begin(), out.end(), Q[i]) == out.end()) out.push_back(Q[i]);
  }
  return out;
}

UpperResult int_upper(std::span<const Element> Q, std::size_t max_len, std::size_t node_budget) {
  check_family(Q);
  if (max_len == 0) throw Error(Errc::precondition_failure, "max_len must be at least 1");
  std::vector<Element> minimal = minimal_elements(Q);
  std::vector<std::size_t> back;  // minimal member -> an index in Q
  for (const auto& q : minimal) {
    back.push_back(static_cast<std::size_t>(std::find(Q.begin(), Q.end(), q) - Q.begin()));
  }

  Search s;
  s.Q = &minimal;
  s.order.resize(minimal.size());
  std::iota(s.order.begin(), s.order.end(), 0);
  std::vector<Rational> w;
  try {
    w = kelley_lower(minimal).weights;
    s.weighted = true;
  } catch (const Error&) {
    s.weighted = false;
  }
  if (s.weighted) {
    // the bound max count >= Σ w(q) needs a probability vector; check it here
    Rational total = 0;
    for (const auto& x : w) {
      if (x < 0) s.weighted = false;
      total += x;
    }
    if (total != 1) s.weighted = false;
  }
  std::vector<Rational> wq_raw(minimal.size(), Rational(0));
  if (s.weighted) {
    for (std::size_t i = 0; i < minimal.size(); ++i) wq_raw[i] = weight_of(minimal[i], w);
    std::stable_sort(s.order.begin(), s.order.end(),
                     [&](std::size_t a, std::size_t b) { return wq_raw[a] < wq_raw[b]; });
    s.t_w = wq_raw[s.order.front()];
  }
  for (auto idx : s.order) {
    s.wq.push_back(wq_raw[idx]);
    std::vector<std::uint32_t> at;
    minimal[idx].for_each_atom([&](std::size_t a) { at.push_back(static_cast<std::uint32_t>(a)); });
    s.atoms.push_back(std::move(at));
  }
  s.counts.assign(Q.front().space_size(), 0);

  UpperResult out;
  bool have = false;
  for (std::size_t n = 1; n <= max_len; ++n) {
    s.n = n;
    s.best = n + 1;
    s.best_seq.clear();
    s.nodes = 0;
    s.budget = node_budget;
    s.exhausted = false;
    s.floor_bound = 1;
    if (s.weighted) {
      s.floor_bound = std::max<std::size_t>(
          1, static_cast<std::size_t>(ceil(Rational(static_cast<long>(n)) * s.t_w).get_ui()));
    }
    s.dfs(0, 0, Rational(0));
    out.nodes += s.nodes;
    if (s.exhausted) out.partial = true;
    if (s.best_seq.empty()) {
      out.per_length.emplace_back(1);
      continue;
    }
    Rational v(static_cast<long>(s.best), static_cast<long>(n));
    v.canonicalize();
    out.per_length.push_back(v);
    if (!have || v < out.value) {
      have = true;
      out.value = v;
      out.witness.clear();
      for (auto p : s.best_seq) out.witness.push_back(back[s.order[p]]);
    }
  }
  if (!have) {
    out.value = 1;
    out.witness = {0};
  }
  return out;
}

SandwichResult sandwich(std::span<const Element> Q, std::size_t max_len, std::size_t node_budget) {
  std::vector<Element> minimal = minimal_elements(Q);
  SandwichResult r;
  r.kelley = kelley_lower(minimal);
  r.sequences = int_upper(Q, max_len, node_budget);
  r.lower = r.kelley.t;
  r.upper = r.sequences.value;
  if (r.lower > r.upper) {
    throw Error(Errc::invariant_violation, "Kelley bound " + to_string(r.lower) +
                                               " exceeds the sequence bound " + to_string(r.upper));
  }
  return r;
}

std::vector<Element> threshold_set(const MeasuredAlgebra& m, const Element& s,
                                   const Rational& delta) {
  if (m.size() > kMaxThresholdAtoms) {
    throw Error(Errc::capacity, "threshold set over " + std::to_string(m.size()) + " atoms");
  }
  Rational ms = m.measure(s);
  if (ms == 0) throw Error(Errc::division_by_zero, "conditioning on a null element");
  std::vector<Element> out;
  std::size_t n = m.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    Element b(n);
    for (std::size_t a = 0; a < n; ++a) {
      if ((mask >> a) & 1U) b.set(a);
    }
    if (m.measure(b & s) >= delta * ms) out.push_back(std::move(b));
  }
  return out;
}

std::vector<Element> threshold_minimal(const MeasuredAlgebra& m, const Element& s,
                                       const Rational& delta) {
  if (s.is_zero()) throw Error(Errc::division_by_zero, "conditioning on a null element");
  SubmaskTable table(m, s, delta);
  std::size_t k = table.width();
  std::size_t size = std::size_t{1} << k;
  std::vector<long> sum(size, 0);
  std::vector<long> lightest(size, 0);
  std::vector<Element> out;
  for (std::size_t mask = 1; mask < size; ++mask) {
    auto bit = static_cast<std::size_t>(__builtin_ctzll(mask));
    std::size_t rest = mask & (mask - 1);
    sum[mask] = sum[rest] + table.weight(bit);
    lightest[mask] = rest == 0 ? table.weight(bit) : std::min(lightest[rest], table.weight(bit));
    if (table.member(sum[mask]) && !table.member(sum[mask] - lightest[mask])) {
      out.push_back(table.element(mask));
    }
  }
  return out;
}

}  // namespace famlab::intnum
