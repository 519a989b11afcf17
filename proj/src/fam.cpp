#include "famlab/fam.hpp"

#include <algorithm>
#include <string>

#include "famlab/error.hpp"

namespace famlab::fam {

namespace {

std::uint64_t residue(Index k, std::uint64_t period) {
  auto p = static_cast<Index>(period);
  Index r = k % p;
  return static_cast<std::uint64_t>(r < 0 ? r + p : r);
}

}  // namespace

std::uint64_t common_period(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) throw Error(Errc::structural, "period must be positive");
  std::uint64_t l = a / gcd_u64(a, b) * b;
  if (l > kMaxPeriod) {
    throw Error(Errc::unsupported_set, "common period " + std::to_string(l) +
                                           " exceeds the periodic-algebra cap");
  }
  return l;
}

PeriodicSet PeriodicSet::full() { return PeriodicSet{}; }

PeriodicSet PeriodicSet::empty() {
  PeriodicSet s;
  s.residues = {false};
  return s;
}

PeriodicSet PeriodicSet::residue_class(std::uint64_t period, std::uint64_t r) {
  std::uint64_t one[] = {r};
  return classes(period, one);
}

PeriodicSet PeriodicSet::classes(std::uint64_t period, std::span<const std::uint64_t> rs) {
  if (period == 0 || period > kMaxPeriod) {
    throw Error(Errc::unsupported_set, "period " + std::to_string(period) + " out of range");
  }
  PeriodicSet s;
  s.period = period;
  s.residues.assign(period, false);
  for (auto r : rs) {
    if (r >= period) throw Error(Errc::structural, "residue " + std::to_string(r) + " >= period");
    s.residues[r] = true;
  }
  return s;
}

PeriodicSet PeriodicSet::finite(std::set<Index> points) {
  PeriodicSet s = empty();
  s.added = std::move(points);
  return s;
}

bool PeriodicSet::contains(Index k) const {
  if (added.count(k)) return true;
  if (removed.count(k)) return false;
  return k >= 0 && residues[residue(k, period)];
}

Index PeriodicSet::last_exception() const {
  Index last = -1;
  if (!added.empty()) last = std::max(last, *added.rbegin());
  if (!removed.empty()) last = std::max(last, *removed.rbegin());
  return last;
}

PeriodicFAM::PeriodicFAM(std::uint64_t period, std::vector<Rational> weights)
    : period_(period), weights_(std::move(weights)) {
  if (period_ == 0 || period_ > kMaxPeriod || weights_.size() != period_) {
    throw Error(Errc::structural, "fam needs one weight per residue of a positive period");
  }
  Rational total = 0;
  for (auto& w : weights_) {
    w.canonicalize();
    if (w < 0) throw Error(Errc::structural, "negative residue weight " + to_string(w));
    total += w;
  }
  if (total != 1) throw Error(Errc::structural, "residue weights sum to " + to_string(total));
}

PeriodicFAM PeriodicFAM::uniform(std::uint64_t period) {
  return PeriodicFAM(period, std::vector<Rational>(period, Rational(1, period)));
}

Rational PeriodicFAM::residue_weight(std::uint64_t j, std::uint64_t modulus) const {
  if (modulus % period_ != 0) {
    throw Error(Errc::structural, "modulus is not a multiple of the fam period");
  }
  Rational scale(period_, modulus);
  scale.canonicalize();
  return weights_[j % period_] * scale;
}

Rational xi(const PeriodicFAM& fam, const PeriodicSet& s) {
  std::uint64_t L = common_period(fam.period(), s.period);
  Rational total = 0;
  for (std::uint64_t j = 0; j < L; ++j) {
    if (s.has_residue(j)) total += fam.residue_weight(j, L);
  }
  return total;
}

void IndexPartition::validate() const {
  if (period == 0 || period > kMaxPeriod) throw Error(Errc::structural, "bad partition period");
  if (blocks.empty()) throw Error(Errc::structural, "partition has no blocks");
  std::vector<int> seen(period, 0);
  for (const auto& b : blocks) {
    for (auto r : b) {
      if (r >= period) throw Error(Errc::structural, "partition residue out of range");
      ++seen[r];
    }
  }
  for (std::uint64_t r = 0; r < period; ++r) {
    if (seen[r] != 1) {
      throw Error(Errc::structural, "residue " + std::to_string(r) + " is covered " +
                                        std::to_string(seen[r]) + " times by the partition");
    }
  }
}

std::size_t IndexPartition::block_of(Index k) const {
  std::uint64_t r = residue(k, period);
  for (std::size_t m = 0; m < blocks.size(); ++m) {
    if (std::find(blocks[m].begin(), blocks[m].end(), r) != blocks[m].end()) return m;
  }
  throw Error(Errc::structural, "index not covered by the partition");
}

PeriodicSet IndexPartition::block(std::size_t m) const {
  return PeriodicSet::classes(period, blocks.at(m));
}

std::vector<Rational> block_masses(const PeriodicFAM& fam, const IndexPartition& partition) {
  std::vector<Rational> out;
  for (std::size_t m = 0; m < partition.size(); ++m) out.push_back(xi(fam, partition.block(m)));
  return out;
}

PeriodicSimpleFunction PeriodicSimpleFunction::constant(const Rational& c) {
  return PeriodicSimpleFunction{1, {c}};
}

PeriodicSimpleFunction PeriodicSimpleFunction::indicator(const PeriodicSet& s) {
  PeriodicSimpleFunction f{s.period, {}};
  for (std::uint64_t j = 0; j < s.period; ++j) f.values.emplace_back(s.residues[j] ? 1 : 0);
  return f;
}

const Rational& PeriodicSimpleFunction::operator()(Index k) const {
  return values[residue(k, period)];
}

PeriodicSimpleFunction linear_combination(const Rational& alpha, const PeriodicSimpleFunction& f,
                                          const Rational& beta, const PeriodicSimpleFunction& g) {
  std::uint64_t L = common_period(f.period, g.period);
  PeriodicSimpleFunction h{L, {}};
  h.values.reserve(L);
  for (std::uint64_t j = 0; j < L; ++j) {
    auto k = static_cast<Index>(j);
    h.values.push_back(alpha * f(k) + beta * g(k));
  }
  return h;
}

Rational integrate(const PeriodicSimpleFunction& f, const PeriodicFAM& fam,
                   const PeriodicSet& over) {
  if (f.values.size() != f.period) throw Error(Errc::structural, "malformed simple function");
  std::uint64_t L = common_period(common_period(fam.period(), f.period), over.period);
  Rational total = 0;
  for (std::uint64_t j = 0; j < L; ++j) {
    if (!over.has_residue(j)) continue;
    const Rational& v = f(static_cast<Index>(j));
    if (v != 0) total += v * fam.residue_weight(j, L);
  }
  return total;
}

std::vector<Rational> partition_decompose(const PeriodicSimpleFunction& f, const PeriodicFAM& fam,
                                          const IndexPartition& partition) {
  partition.validate();
  std::vector<Rational> out;
  for (std::size_t m = 0; m < partition.size(); ++m) {
    out.push_back(integrate(f, fam, partition.block(m)));
  }
  return out;
}

Selection uniform_approx_select(std::span<const PeriodicSimpleFunction> fs, const PeriodicSet& E,
                                const std::set<Index>& F, const Rational& eps,
                                const PeriodicFAM& fam) {
  if (eps <= 0) throw Error(Errc::precondition_failure, "tolerance must be positive");
  Rational mass = xi(fam, E);
  if (mass == 0) throw Error(Errc::illegal_region, "approximation region has measure zero");

  std::uint64_t L = common_period(fam.period(), E.period);
  for (const auto& f : fs) L = common_period(L, f.period);

  // relative weights ω_j / Ξ(E) over a common denominator
  std::vector<std::pair<std::uint64_t, Rational>> rel;
  mpz_class denom = 1;
  for (std::uint64_t j = 0; j < L; ++j) {
    if (!E.has_residue(j)) continue;
    Rational w = fam.residue_weight(j, L) / mass;
    if (w == 0) continue;
    mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), w.get_den_mpz_t());
    rel.emplace_back(j, w);
  }
  if (denom > 4096) {
    throw Error(Errc::capacity, "replication denominator " + denom.get_str() + " too large");
  }

  Index floor = std::max(E.last_exception(), F.empty() ? Index{-1} : *F.rbegin());
  auto Ls = static_cast<Index>(L);
  Index base = (floor + 1 + Ls - 1) / Ls;  // first period starting beyond every exception

  Selection sel;
  for (const auto& [j, w] : rel) {
    mpz_class copies = w.get_num() * (denom / w.get_den());
    for (long t = 0; t < copies.get_si(); ++t) {
      sel.u.push_back(static_cast<Index>(j) + Ls * (base + t));
    }
  }
  std::sort(sel.u.begin(), sel.u.end());

  Rational size(static_cast<long>(sel.u.size()));
  for (const auto& f : fs) {
    Rational avg = 0;
    for (Index k : sel.u) avg += f(k);
    avg /= size;
    Rational target = integrate(f, fam, E) / mass;
    sel.errors.push_back(abs(avg - target));
    if (sel.errors.back() >= eps) {
      throw Error(Errc::invariant_violation, "replicated selection misses the integral by " +
                                                 to_string(sel.errors.back()));
    }
  }
  return sel;
}

}  // namespace famlab::fam
