#include <algorithm>
#include <set>
#include <string>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"

namespace famlab::famlimit {

LemmaTree::LemmaTree(const Setting& s, GridResult grid, Parameters params, std::set<Index> F)
    : setting_(std::make_shared<const Setting>(s)),
      grid_(std::move(grid)),
      params_(std::move(params)),
      F_(std::move(F)),
      masses_(s.masses()) {
  setting_->validate();
  if (params_.h_star == 0 || params_.h_star % 2 != 0) {
    throw Error(Errc::precondition_failure, "h* must be positive and even");
  }
  if (params_.eps <= 0 || params_.eps_star <= 0) {
    throw Error(Errc::precondition_failure, "ε and ε* must be positive");
  }
  if (grid_.r_star.space_size() != s.algebra.size() || grid_.r_star.is_zero()) {
    throw Error(Errc::precondition_failure, "grid result has no usable r*");
  }
}

NodeState LemmaTree::root() const {
  NodeState n;
  n.r = grid_.r_star;
  n.zsum.assign(setting_->istar(), Rational(0));
  n.counts.assign(setting_->mstar(), 0);
  return n;
}

OddExpansion LemmaTree::expand_odd(const NodeState& rho) const {
  const Setting& s = *setting_;
  std::set<Index> used = F_;
  for (auto p = rho.path; p; p = p->prev) used.insert(p->k);

  std::vector<fam::PeriodicSimpleFunction> fs;
  for (const auto& seq : s.sequences) fs.push_back(f_function(s.algebra, s.blocks, seq, rho.r));
  auto sel = fam::uniform_approx_select(fs, s.partition.block(rho.m), used, params_.eps_star / 4,
                                        s.fam);

  std::vector<Element> gens;
  std::set<Element> seen;
  for (Index k : sel.u) {
    for (const auto& seq : s.sequences) {
      for (std::size_t j = 0; j < s.blocks.size(k); ++j) {
        Element g = rho.r & seq.at(k, j);
        if (seen.insert(g).second) gens.push_back(std::move(g));
      }
    }
  }

  OddExpansion x;
  x.u = std::move(sel.u);
  x.atoms = boolalg::generated_atoms_with_patterns(
      gens, rho.r, std::max(boolalg::kDefaultGeneratorBound, gens.size()));
  auto cond = boolalg::conditional(s.algebra, rho.r);
  Rational total = 0;
  for (const auto& a : x.atoms) {
    x.weights.push_back(cond(a.atom));
    total += x.weights.back();
  }
  if (total != 1) {
    throw Error(Errc::invariant_violation, "pattern atoms carry mass " + to_string(total));
  }
  return x;
}

NodeState LemmaTree::odd_child(const NodeState& rho, const OddExpansion& x, std::size_t sigma,
                               std::size_t kidx) const {
  const Setting& s = *setting_;
  const Element& y = x.atoms.at(sigma).atom;
  Index k = x.u.at(kidx);

  NodeState child;
  if (grid_.in_dstar(s, y)) {
    child.r = y;
  } else {
    // the join of the atoms of y that lie in D* is again in D*
    child.r = Element(s.algebra.size());
    y.for_each_atom([&](std::size_t a) {
      Element atom = Element::atom(s.algebra.size(), a);
      if (grid_.in_dstar(s, atom)) child.r.set(a);
    });
    if (child.r.is_zero()) {
      throw Error(Errc::density_failure, "no member of D* below a pattern atom of measure " +
                                             to_string(s.algebra.measure(y)));
    }
  }
  child.m = rho.m;
  child.path = std::make_shared<const PathStep>(PathStep{rho.m, k, rho.path});
  child.zsum = rho.zsum;
  child.counts = rho.counts;
  child.counts[rho.m] += 1;
  for (std::size_t i = 0; i < s.istar(); ++i) {
    child.z.push_back(success_ratio(s.blocks, s.sequences[i], child.r, k));
    child.zsum[i] += child.z.back();
  }
  return child;
}

std::vector<LemmaTree::Tree::Child> LemmaTree::expand(const NodeState& node,
                                                      std::size_t depth) const {
  std::vector<Tree::Child> kids;
  if (depth % 2 == 0) {
    for (auto m : grid_.M) {
      NodeState n = node;
      n.m = m;
      n.z.clear();
      kids.push_back({std::to_string(m), masses_[m], std::move(n)});
    }
    return kids;
  }
  OddExpansion x = expand_odd(node);
  Rational share = 1 / Rational(static_cast<unsigned long>(x.u.size()));
  for (std::size_t sg = 0; sg < x.atoms.size(); ++sg) {
    for (std::size_t ki = 0; ki < x.u.size(); ++ki) {
      kids.push_back({std::to_string(x.u[ki]) + ":" + std::to_string(sg), x.weights[sg] * share,
                      odd_child(node, x, sg, ki)});
    }
  }
  return kids;
}

LemmaTree::Tree LemmaTree::tree() const {
  return Tree(root(), [this](const NodeState& n, std::size_t d) { return expand(n, d); },
              params_.h_star);
}

LeafEvaluation LemmaTree::evaluate(const NodeState& leaf) const {
  const Setting& s = *setting_;
  Rational half(static_cast<unsigned long>(params_.h_star / 2));
  LeafEvaluation ev;
  ev.in_event = true;
  for (std::size_t m = 0; m < s.mstar(); ++m) {
    ev.V.push_back(Rational(leaf.counts.at(m)) / half);
    if (abs(ev.V.back() - masses_[m]) >= params_.eps) ev.in_event = false;
  }
  for (std::size_t i = 0; i < s.istar(); ++i) {
    ev.Y.push_back(leaf.zsum.at(i) / half);
    if (ev.Y.back() <= s.deltas[i] - params_.eps) ev.in_event = false;
  }
  return ev;
}

std::vector<Index> LemmaTree::chosen(const NodeState& leaf) {
  std::vector<Index> u;
  for (auto p = leaf.path; p; p = p->prev) u.push_back(p->k);
  std::sort(u.begin(), u.end());
  return u;
}

}  // namespace famlab::famlimit
