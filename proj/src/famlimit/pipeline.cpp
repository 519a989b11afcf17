#include <string>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"

namespace famlab::famlimit {

WitnessRun prepare_witness(WitnessInput in) {
  Setting& s = in.setting;
  if (in.conditions.size() != s.istar() || in.eps_i.size() != s.istar()) {
    throw Error(Errc::structural, "one condition and one ε_i per sequence are required");
  }
  s.deltas.clear();
  for (const auto& e : in.eps_i) s.deltas.push_back(1 - e);
  s.validate();

  Element r = in.start ? *in.start : s.algebra.one();
  std::vector<Element> limits;
  for (std::size_t i = 0; i < s.istar(); ++i) {
    limits.push_back(
        limit_construct(s.algebra, s.fam, s.blocks, s.sequences[i], in.conditions[i], s.deltas[i]));
    r &= limits.back();
  }
  if (r.is_zero()) throw Error(Errc::precondition_failure, "the limits meet in zero");

  Parameters params;
  if (in.h_star) {
    params = Parameters{in.eps, *in.h_star, in.eps_star ? *in.eps_star : in.eps / 4, true};
  } else {
    params = paper_parameters(in.eps, s.masses(), s.istar());
  }
  GridResult grid = grid_refine(s, r, params.eps_star / 4);
  return WitnessRun{std::move(s), std::move(limits), std::move(r), std::move(grid),
                    std::move(params), {}, {}, {}};
}

WitnessRun run_witness(WitnessInput in, const SearchOptions& opt) {
  std::set<Index> F = in.F;
  std::vector<Rational> eps_i = in.eps_i;
  Rational eps = in.eps;
  WitnessRun out = prepare_witness(std::move(in));
  LemmaTree tree(out.setting, out.grid, out.params, F);
  out.certificate = witness_search(tree, opt);
  out.lemma = verify_certificate(out.certificate, out.setting, F);
  out.characterization = verify_characterization(out.certificate, out.setting, eps_i, eps);
  return out;
}

}  // namespace famlab::famlimit
