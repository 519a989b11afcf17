#include <bit>
#include <string>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"
#include "famlab/intnum.hpp"

namespace famlab::famlimit {

AssemblyReport fam_linked_witness(const cylinder::DyadicAlgebra& alg,
                                  std::span<const cylinder::Cylinder> S,
                                  std::span<const Rational> eps_grid) {
  std::size_t n = alg.atom_count();
  if (n > intnum::kMaxThresholdAtoms) {
    throw Error(Errc::capacity, "assembly needs at most 2^20 elements");
  }
  if (S.empty()) throw Error(Errc::coverage, "empty density family");
  std::vector<std::uint64_t> masks;
  std::vector<int> sizes;
  for (const auto& s : S) {
    Element e = alg.embed(s);
    masks.push_back(e.words().empty() ? 0 : e.words()[0]);
    sizes.push_back(std::popcount(masks.back()));
  }

  AssemblyReport rep;
  rep.elements = (std::size_t{1} << n) - 1;
  rep.covered = true;
  rep.bounds_hold = true;
  for (const auto& eps : eps_grid) {
    if (eps <= 0 || eps >= 1) throw Error(Errc::precondition_failure, "ε must lie in (0,1)");
    Rational keep = 1 - eps;
    // b ∈ Q_{s,ε} iff |b∧s| >= (1−ε)|s| since all atoms weigh the same
    std::vector<std::uint64_t> uncovered;
    for (std::uint64_t b = 1; b < (std::uint64_t{1} << n); ++b) {
      bool hit = false;
      for (std::size_t j = 0; j < masks.size() && !hit; ++j) {
        hit = Rational(std::popcount(b & masks[j])) >= keep * sizes[j];
      }
      if (!hit) uncovered.push_back(b);
    }
    if (!uncovered.empty()) {
      std::string list;
      for (std::size_t j = 0; j < uncovered.size() && j < 8; ++j) {
        list += (j ? ", " : "") + std::to_string(uncovered[j]);
      }
      throw Error(Errc::coverage, std::to_string(uncovered.size()) +
                                      " elements outside every Q_{s," + to_string(eps) +
                                      "}, e.g. atom masks " + list);
    }
    for (const auto& s : S) {
      auto Q = intnum::threshold_minimal(alg.algebra(), alg.embed(s), keep);
      AssemblyEntry e{s, eps, Q.size(), intnum::kelley_lower(Q).t, false};
      e.bound_holds = e.kelley >= keep;
      rep.bounds_hold = rep.bounds_hold && e.bound_holds;
      rep.entries.push_back(std::move(e));
    }
  }
  return rep;
}

Element limit_map(const cylinder::DyadicAlgebra& alg, const fam::PeriodicFAM& fam,
                  const BlockFamily& blocks, const ConditionSequence& b, const Element& s,
                  const Rational& eps) {
  return limit_construct(alg.algebra(), fam, blocks, b, s, 1 - eps);
}

}  // namespace famlab::famlimit
