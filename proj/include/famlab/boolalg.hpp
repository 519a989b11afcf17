#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "famlab/rational.hpp"

/// Finite atomic Boolean algebras over an atom space, with strictly positive
/// exact-rational probability measures.
namespace famlab::boolalg {

struct AtomSpace {
  std::size_t size = 1;

  friend bool operator==(const AtomSpace&, const AtomSpace&) = default;
};

/// An element of the power-set algebra over `AtomSpace{size}`, stored as a
/// bit-set of atom indices.
class Element {
 public:
  Element() = default;
  explicit Element(std::size_t atom_count);

  static Element zero(std::size_t atom_count) { return Element(atom_count); }
  static Element one(std::size_t atom_count);
  static Element from_atoms(std::size_t atom_count, std::span<const std::size_t> atoms);
  static Element atom(std::size_t atom_count, std::size_t index);

  std::size_t space_size() const noexcept { return size_; }
  AtomSpace space() const noexcept { return AtomSpace{size_}; }

  bool test(std::size_t atom) const;
  void set(std::size_t atom, bool value = true);

  bool is_zero() const noexcept;
  bool is_one() const noexcept;
  std::size_t count() const noexcept;
  std::vector<std::size_t> atoms() const;

  template <class Fn>
  void for_each_atom(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        int tz = __builtin_ctzll(bits);
        fn(w * 64 + static_cast<std::size_t>(tz));
        bits &= bits - 1;
      }
    }
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  Element& operator&=(const Element& other);
  Element& operator|=(const Element& other);
  Element& xor_assign(const Element& other);

  friend bool operator==(const Element&, const Element&) = default;
  friend std::strong_ordering operator<=>(const Element& a, const Element& b);

 private:
  void check_same_space(const Element& other) const;
  void clear_tail() noexcept;

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

Element meet(const Element& a, const Element& b);
Element join(const Element& a, const Element& b);
Element complement(const Element& a);
/// a ∼ b := a ∧ ∼b
Element minus(const Element& a, const Element& b);
bool leq(const Element& a, const Element& b);
bool disjoint(const Element& a, const Element& b);

inline Element operator&(const Element& a, const Element& b) { return meet(a, b); }
inline Element operator|(const Element& a, const Element& b) { return join(a, b); }
inline Element operator~(const Element& a) { return complement(a); }

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

/// Membership pattern of an atom of a generated subalgebra: sigma[j] is
/// false when the atom lies below generator j and true when it lies below
/// its complement.
using Pattern = std::vector<bool>;

struct GeneratedAtom {
  Pattern sigma;
  Element atom;
};

inline constexpr std::size_t kDefaultGeneratorBound = 16;

/// Atoms a_σ = ⋀ b_j^{σ(j)} of the subalgebra generated by `generators`
/// inside the relative algebra below `unit`, ordered by σ
/// lexicographically. Zero meets are dropped.
std::vector<GeneratedAtom> generated_atoms_with_patterns(
    std::span<const Element> generators, const Element& unit,
    std::size_t bound = kDefaultGeneratorBound);

/// Atoms of ⟨generators⟩ in the ambient algebra.
std::vector<Element> generated_atoms(std::span<const Element> generators,
                                     std::size_t bound = kDefaultGeneratorBound);

/// A finite Boolean algebra with a strictly positive probability measure
/// given by per-atom weights. Copies share the weight table.
class MeasuredAlgebra {
 public:
  explicit MeasuredAlgebra(std::vector<Rational> weights);

  static MeasuredAlgebra uniform(std::size_t atom_count);

  std::size_t size() const noexcept { return weights_->size(); }
  AtomSpace space() const noexcept { return AtomSpace{size()}; }
  const std::vector<Rational>& weights() const noexcept { return *weights_; }
  const Rational& weight(std::size_t atom) const { return (*weights_)[atom]; }
  bool is_uniform() const noexcept { return uniform_; }

  Element zero() const { return Element::zero(size()); }
  Element one() const { return Element::one(size()); }

  Rational measure(const Element& a) const;

 private:
  std::shared_ptr<const std::vector<Rational>> weights_;
  bool uniform_ = false;
};

Rational measure(const MeasuredAlgebra& m, const Element& a);

/// The functional a ↦ μ(a ∧ b)/μ(b).
class ConditionalMeasure {
 public:
  ConditionalMeasure(MeasuredAlgebra algebra, Element condition);

  const Element& condition() const noexcept { return condition_; }
  const Rational& condition_measure() const noexcept { return denominator_; }

  Rational operator()(const Element& a) const;

  /// The relative algebra B_{≤b} as a measured algebra of its own: one atom
  /// per atom of b, in increasing index order, weighted by μ_b.
  MeasuredAlgebra relative_algebra() const;

  /// Maps an element below b into the relative algebra's numbering.
  Element to_relative(const Element& a) const;

 private:
  MeasuredAlgebra algebra_;
  Element condition_;
  Rational denominator_;
};

/// Throws Error(Errc::division_by_zero) when μ(b) = 0.
ConditionalMeasure conditional(const MeasuredAlgebra& m, const Element& b);

}  // namespace famlab::boolalg
