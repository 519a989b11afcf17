#include <string>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"

namespace famlab::famlimit {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

Rational ratio(std::size_t num, std::size_t den) {
  Rational q(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
  q.canonicalize();
  return q;
}

// g_a(k) = |{ℓ∈P_k : a ≤ r_ℓ}|/|P_k| for one atom, over one period.
fam::PeriodicSimpleFunction atom_function(const BlockFamily& blocks, const ConditionSequence& seq,
                                          std::size_t atom) {
  std::uint64_t L = fam::common_period(blocks.period, seq.period);
  fam::PeriodicSimpleFunction g{L, {}};
  g.values.reserve(L);
  for (std::uint64_t k = 0; k < L; ++k) {
    auto kk = static_cast<Index>(k);
    std::size_t size = blocks.size(kk);
    std::size_t hits = 0;
    for (std::size_t j = 0; j < size; ++j) hits += seq.at(kk, j).test(atom) ? 1 : 0;
    g.values.push_back(ratio(hits, size));
  }
  return g;
}

}  // namespace

void BlockFamily::validate() const {
  if (period == 0 || period > fam::kMaxPeriod || sizes.size() != period) {
    throw Error(Errc::structural, "block family needs one size per residue");
  }
  for (auto s : sizes) {
    if (s == 0) throw Error(Errc::structural, "empty block P_k");
  }
}

void ConditionSequence::validate(const BlockFamily& blocks, std::size_t atom_count) const {
  if (period == 0 || table.size() != period) {
    throw Error(Errc::structural, "condition table needs one row per residue");
  }
  if (period % blocks.period != 0) {
    throw Error(Errc::structural, "condition period must be a multiple of the block period");
  }
  for (std::uint64_t k = 0; k < period; ++k) {
    if (table[k].size() != blocks.size(static_cast<Index>(k))) {
      throw Error(Errc::structural, "row " + std::to_string(k) + " does not match |P_k|");
    }
    for (const auto& e : table[k]) {
      if (e.space_size() != atom_count) throw Error(Errc::structural, "condition over wrong atoms");
      if (e.is_zero()) throw Error(Errc::structural, "zero condition in a sequence");
    }
  }
}

std::vector<Rational> Setting::masses() const { return fam::block_masses(fam, partition); }

std::vector<std::size_t> Setting::positive_blocks() const {
  std::vector<std::size_t> M;
  auto a = masses();
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] > 0) M.push_back(m);
  }
  return M;
}

void Setting::validate() const {
  partition.validate();
  blocks.validate();
  for (const auto& seq : sequences) seq.validate(blocks, algebra.size());
  if (deltas.size() != sequences.size()) {
    throw Error(Errc::structural, "one δ per sequence is required");
  }
}

fam::PeriodicSimpleFunction f_function(const MeasuredAlgebra& algebra, const BlockFamily& blocks,
                                       const ConditionSequence& seq, const Element& r) {
  auto cond = boolalg::conditional(algebra, r);
  std::uint64_t L = fam::common_period(blocks.period, seq.period);
  fam::PeriodicSimpleFunction f{L, {}};
  f.values.reserve(L);
  for (std::uint64_t k = 0; k < L; ++k) {
    auto kk = static_cast<Index>(k);
    std::size_t size = blocks.size(kk);
    Rational total = 0;
    for (std::size_t j = 0; j < size; ++j) total += cond(seq.at(kk, j));
    f.values.push_back(total / Rational(static_cast<unsigned long>(size)));
  }
  return f;
}

Rational success_ratio(const BlockFamily& blocks, const ConditionSequence& seq, const Element& r,
                       Index k) {
  std::size_t size = blocks.size(k);
  std::size_t hits = 0;
  for (std::size_t j = 0; j < size; ++j) hits += boolalg::leq(r, seq.at(k, j)) ? 1 : 0;
  return ratio(hits, size);
}

Rational sequence_integral(const MeasuredAlgebra& algebra, const fam::PeriodicFAM& fam,
                           const BlockFamily& blocks, const ConditionSequence& seq,
                           const Element& r) {
  return fam::integrate(f_function(algebra, blocks, seq, r), fam);
}

std::vector<std::vector<Rational>> c_values(const Setting& s, const Element& r) {
  auto a = s.masses();
  auto M = s.positive_blocks();
  std::vector<std::vector<Rational>> out;
  for (const auto& seq : s.sequences) {
    auto f = f_function(s.algebra, s.blocks, seq, r);
    std::vector<Rational> row;
    for (auto m : M) row.push_back(fam::integrate(f, s.fam, s.partition.block(m)) / a[m]);
    out.push_back(std::move(row));
  }
  return out;
}

AtomProfile::AtomProfile(const Setting& s, const Element& within)
    : within_(within), slot_(s.algebra.size(), npos) {
  auto a = s.masses();
  auto M = s.positive_blocks();
  std::vector<fam::PeriodicSet> B;
  for (auto m : M) B.push_back(s.partition.block(m));
  within.for_each_atom([&](std::size_t atom) {
    slot_[atom] = c_.size();
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> totals;
    for (const auto& seq : s.sequences) {
      auto g = atom_function(s.blocks, seq, atom);
      std::vector<Rational> row;
      Rational total = 0;
      for (std::size_t p = 0; p < M.size(); ++p) {
        Rational part = fam::integrate(g, s.fam, B[p]);
        total += part;
        row.push_back(part / a[M[p]]);
      }
      rows.push_back(std::move(row));
      totals.push_back(total);
    }
    c_.push_back(std::move(rows));
    integral_.push_back(std::move(totals));
  });
}

const std::vector<std::vector<Rational>>& AtomProfile::c(std::size_t atom) const {
  if (atom >= slot_.size() || slot_[atom] == npos) {
    throw Error(Errc::structural, "atom outside the profiled element");
  }
  return c_[slot_[atom]];
}

const Rational& AtomProfile::integral(std::size_t atom, std::size_t i) const {
  if (atom >= slot_.size() || slot_[atom] == npos) {
    throw Error(Errc::structural, "atom outside the profiled element");
  }
  return integral_[slot_[atom]].at(i);
}

Parameters paper_parameters(const Rational& eps, std::span<const Rational> masses,
                            std::size_t istar) {
  if (eps <= 0) throw Error(Errc::precondition_failure, "ε must be positive");
  Rational total(static_cast<unsigned long>(masses.size() + istar));
  Rational half = eps / 2;
  Rational bound = half * half / (2 * total);  // 1/h* must stay below this
  // smallest even h with 1/h < bound
  mpz_class h = ceil(1 / bound);
  if (Rational(h) * bound <= 1) h += 1;
  for (const auto& a : masses) {
    Rational need = 2 * a * (1 - a) / (eps * eps) * total;  // h > need
    mpz_class hm = ceil(need);
    if (Rational(hm) <= need) hm += 1;
    if (hm > h) h = hm;
  }
  if (h % 2 != 0) h += 1;
  if (!h.fits_ulong_p()) throw Error(Errc::capacity, "h* does not fit a machine word");
  Parameters p;
  p.eps = eps;
  p.h_star = h.get_ui();
  // largest 2^-j < ε with (2/h* + ε*)/(ε/2)^2 < 1/(m*+i*)
  Rational two_over_h = Rational(2) / Rational(h);
  Rational e(1);
  for (int j = 0; j < 4096; ++j) {
    if (e < eps && (two_over_h + e) / (half * half) < 1 / total) {
      p.eps_star = e;
      return p;
    }
    e /= 2;
  }
  throw Error(Errc::invariant_violation, "no dyadic ε* satisfies the constraint");
}

}  // namespace famlab::famlimit
