#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "famlab/rational.hpp"

/// Free finitely additive probability measures on the natural numbers,
/// represented on the algebra of eventually periodic sets.
namespace famlab::fam {

using Index = std::int64_t;

inline constexpr std::uint64_t kMaxPeriod = std::uint64_t{1} << 20;

/// A union of residue classes mod `period`, with finitely many points added
/// or removed.
struct PeriodicSet {
  std::uint64_t period = 1;
  std::vector<bool> residues{true};
  std::set<Index> added;
  std::set<Index> removed;

  static PeriodicSet full();
  static PeriodicSet empty();
  static PeriodicSet residue_class(std::uint64_t period, std::uint64_t residue);
  static PeriodicSet classes(std::uint64_t period, std::span<const std::uint64_t> residues);
  static PeriodicSet finite(std::set<Index> points);

  bool contains(Index k) const;
  bool has_residue(std::uint64_t j) const { return residues[j % period]; }
  /// Largest index where the set differs from its periodic part, or -1.
  Index last_exception() const;
};

class PeriodicFAM {
 public:
  PeriodicFAM(std::uint64_t period, std::vector<Rational> weights);
  static PeriodicFAM uniform(std::uint64_t period);

  std::uint64_t period() const noexcept { return period_; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }

  /// Mass of residue j mod `modulus`, where `modulus` is a multiple of period().
  Rational residue_weight(std::uint64_t j, std::uint64_t modulus) const;

 private:
  std::uint64_t period_;
  std::vector<Rational> weights_;
};

/// Ξ(s); finite adjustments carry no mass.
Rational xi(const PeriodicFAM& fam, const PeriodicSet& s);

struct IndexPartition {
  std::uint64_t period = 1;
  std::vector<std::vector<std::uint64_t>> blocks;

  /// Throws Errc::structural unless the blocks partition the residues.
  void validate() const;
  std::size_t block_of(Index k) const;
  PeriodicSet block(std::size_t m) const;
  std::size_t size() const noexcept { return blocks.size(); }
};

/// a_m = Ξ(B_m) for every block.
std::vector<Rational> block_masses(const PeriodicFAM& fam, const IndexPartition& partition);

struct PeriodicSimpleFunction {
  std::uint64_t period = 1;
  std::vector<Rational> values{Rational(0)};

  static PeriodicSimpleFunction constant(const Rational& c);
  static PeriodicSimpleFunction indicator(const PeriodicSet& s);

  const Rational& operator()(Index k) const;
};

PeriodicSimpleFunction linear_combination(const Rational& alpha, const PeriodicSimpleFunction& f,
                                          const Rational& beta, const PeriodicSimpleFunction& g);

/// ∫_over f dΞ
Rational integrate(const PeriodicSimpleFunction& f, const PeriodicFAM& fam,
                   const PeriodicSet& over = PeriodicSet::full());

/// ⟨∫_{B_m} f dΞ : m⟩
std::vector<Rational> partition_decompose(const PeriodicSimpleFunction& f, const PeriodicFAM& fam,
                                          const IndexPartition& partition);

struct Selection {
  std::vector<Index> u;
  /// |avg_u f - (1/Ξ(E)) ∫_E f dΞ| for each supplied f.
  std::vector<Rational> errors;
};

/// A non-empty finite u ⊆ E disjoint from F whose uniform averages match the
/// Ξ_E-integrals of every f. Residues of E are replicated in proportion to
/// their weights inside whole periods beyond F, so the errors are exactly 0.
/// Throws Errc::illegal_region when Ξ(E) = 0.
Selection uniform_approx_select(std::span<const PeriodicSimpleFunction> fs, const PeriodicSet& E,
                                const std::set<Index>& F, const Rational& eps,
                                const PeriodicFAM& fam);

/// lcm with the periodic-algebra cap; throws Errc::unsupported_set past it.
std::uint64_t common_period(std::uint64_t a, std::uint64_t b);

}  // namespace famlab::fam
