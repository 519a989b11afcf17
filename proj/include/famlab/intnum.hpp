#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "famlab/boolalg.hpp"
#include "famlab/rational.hpp"

/// Intersection numbers of families of nonzero elements of a finite algebra.
namespace famlab::intnum {

using boolalg::Element;
using boolalg::MeasuredAlgebra;

/// Largest number of entries of `seq` with a nonzero common meet.
/// Throws Errc::undefined_input on an empty sequence.
std::size_t istar(std::span<const Element> seq);

struct KelleyResult {
  Rational t;                     // max over measures of min_q w(q)
  std::vector<Rational> weights;  // an optimal measure on the atoms
  std::vector<Rational> packing;  // dual certificate, one entry per member of Q
  std::size_t iterations = 0;
};

/// Exact LP lower bound: int(Q) >= t for the optimal t of
/// max t s.t. w >= 0, Σw = 1, w(q) >= t for all q ∈ Q.
KelleyResult kelley_lower(std::span<const Element> Q);

struct UpperResult {
  Rational value;                          // min over tested n of i*(q̄)/n
  std::vector<std::size_t> witness;        // indices into Q of a minimizing sequence
  std::vector<Rational> per_length;        // best i*/n found for n = 1..max_len
  bool partial = false;                    // some length hit the node budget
  std::size_t nodes = 0;
};

inline constexpr std::size_t kDefaultNodeBudget = 2'000'000;

/// Branch and bound over multisets of Q for each length n <= max_len.
UpperResult int_upper(std::span<const Element> Q, std::size_t max_len,
                      std::size_t node_budget = kDefaultNodeBudget);

struct SandwichResult {
  Rational lower;
  Rational upper;
  KelleyResult kelley;
  UpperResult sequences;
  bool closed() const { return lower == upper; }
};

/// kelley_lower and int_upper on the ⊆-minimal members of Q.
SandwichResult sandwich(std::span<const Element> Q, std::size_t max_len,
                        std::size_t node_budget = kDefaultNodeBudget);

/// The ⊆-minimal members of Q, in input order, without duplicates.
std::vector<Element> minimal_elements(std::span<const Element> Q);

inline constexpr std::size_t kMaxThresholdAtoms = 20;

/// {b : μ_s(b) >= delta}, every element of the algebra (at most 2^20).
std::vector<Element> threshold_set(const MeasuredAlgebra& m, const Element& s,
                                   const Rational& delta);

/// The ⊆-minimal members of {b : μ_s(b) >= delta}; all lie below s.
std::vector<Element> threshold_minimal(const MeasuredAlgebra& m, const Element& s,
                                       const Rational& delta);

}  // namespace famlab::intnum
