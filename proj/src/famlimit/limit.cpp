#include <string>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"

namespace famlab::famlimit {

Element limit_construct(const MeasuredAlgebra& algebra, const fam::PeriodicFAM& fam,
                        const BlockFamily& blocks, const ConditionSequence& b,
                        const Element& r_star, const Rational& delta) {
  blocks.validate();
  b.validate(blocks, algebra.size());
  if (r_star.is_zero()) throw Error(Errc::precondition_failure, "limit below the zero element");
  auto cond = boolalg::conditional(algebra, r_star);
  std::uint64_t L = fam::common_period(blocks.period, b.period);
  for (std::uint64_t k = 0; k < L; ++k) {
    auto kk = static_cast<Index>(k);
    for (std::size_t j = 0; j < blocks.size(kk); ++j) {
      Rational v = cond(b.at(kk, j));
      if (v < delta) {
        throw Error(Errc::precondition_failure, "μ_{r*}(b_(" + std::to_string(k) + "," +
                                                    std::to_string(j) + ")) = " + to_string(v) +
                                                    " < δ = " + to_string(delta));
      }
    }
  }

  // ∫ f_r dΞ is the μ_r-average of the atom integrals, so the elements all of
  // whose subelements stay above δ are exactly those made of good atoms
  Element out(algebra.size());
  Rational worst = 2;
  std::size_t worst_atom = 0;
  r_star.for_each_atom([&](std::size_t a) {
    Element atom = Element::atom(algebra.size(), a);
    Rational v = sequence_integral(algebra, fam, blocks, b, atom);
    if (v >= delta) out.set(a);
    if (v < worst) {
      worst = v;
      worst_atom = a;
    }
  });
  if (out.is_zero()) {
    throw Error(Errc::invariant_violation,
                "every atom below r* integrates below δ; lowest is atom " +
                    std::to_string(worst_atom) + " at " + to_string(worst));
  }
  return out;
}

}  // namespace famlab::famlimit
