#include "famlab/cylinder.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "famlab/error.hpp"

namespace famlab::cylinder {

namespace {

MeasuredAlgebra checked_uniform(const std::vector<Coord>& coords) {
  if (coords.size() > kMaxDepth) {
    throw Error(Errc::capacity, "depth " + std::to_string(coords.size()) + " exceeds " +
                                    std::to_string(kMaxDepth));
  }
  std::set<Coord> seen(coords.begin(), coords.end());
  if (seen.size() != coords.size()) throw Error(Errc::structural, "duplicate coordinate");
  return MeasuredAlgebra::uniform(std::size_t{1} << coords.size());
}

// Masks (pattern, value) over atom-index bits selecting the atoms of a cylinder.
std::pair<std::size_t, std::size_t> cylinder_mask(const DyadicAlgebra& alg, const Cylinder& c) {
  std::size_t mask = 0, want = 0;
  for (const auto& [coord, bit] : c.fixed) {
    auto pos = alg.position(coord);
    if (!pos) {
      throw Error(Errc::refinement_needed,
                  "coordinate " + std::to_string(coord) + " outside the algebra's support");
    }
    mask |= std::size_t{1} << *pos;
    if (bit) want |= std::size_t{1} << *pos;
  }
  return {mask, want};
}

}  // namespace

DyadicAlgebra::DyadicAlgebra(std::vector<Coord> coords)
    : coords_(std::move(coords)), algebra_(checked_uniform(coords_)) {}

std::optional<std::size_t> DyadicAlgebra::position(Coord c) const {
  auto it = std::find(coords_.begin(), coords_.end(), c);
  if (it == coords_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - coords_.begin());
}

bool DyadicAlgebra::value(std::size_t atom, Coord c) const {
  auto pos = position(c);
  if (!pos) throw Error(Errc::refinement_needed, "coordinate " + std::to_string(c) + " unknown");
  return (atom >> *pos) & 1U;
}

Element DyadicAlgebra::embed(const Cylinder& c) const {
  auto [mask, want] = cylinder_mask(*this, c);
  Element e(atom_count());
  for (std::size_t a = 0; a < atom_count(); ++a) {
    if ((a & mask) == want) e.set(a);
  }
  return e;
}

Element DyadicAlgebra::embed(const Clopen& c) const {
  Element e(atom_count());
  for (const auto& part : c.parts) e |= embed(part);
  return e;
}

Rational DyadicAlgebra::conditional_leb(const Element& b, const Element& s) const {
  return boolalg::conditional(algebra_, s)(b);
}

DyadicAlgebra DyadicAlgebra::refine(const std::vector<Coord>& extra) const {
  std::vector<Coord> all = coords_;
  all.insert(all.end(), extra.begin(), extra.end());
  return DyadicAlgebra(std::move(all));
}

Element DyadicAlgebra::lift(const Element& b, const DyadicAlgebra& finer) const {
  std::vector<std::size_t> where(depth());
  for (std::size_t j = 0; j < depth(); ++j) {
    auto pos = finer.position(coords_[j]);
    if (!pos) {
      throw Error(Errc::refinement_needed,
                  "target algebra lacks coordinate " + std::to_string(coords_[j]));
    }
    where[j] = *pos;
  }
  Element out(finer.atom_count());
  for (std::size_t a = 0; a < finer.atom_count(); ++a) {
    std::size_t coarse = 0;
    for (std::size_t j = 0; j < depth(); ++j) coarse |= ((a >> where[j]) & 1U) << j;
    if (b.test(coarse)) out.set(a);
  }
  return out;
}

bool DyadicAlgebra::depends_only_on(const Element& b, const std::vector<Coord>& support) const {
  std::size_t keep = 0;
  for (Coord c : support) {
    if (auto pos = position(c)) keep |= std::size_t{1} << *pos;
  }
  std::size_t n = atom_count();
  for (std::size_t a = 0; a < n; ++a) {
    if (b.test(a) != b.test(a & keep)) return false;
  }
  return true;
}

Element DyadicAlgebra::project(const Element& b, const DyadicAlgebra& coarser) const {
  if (!depends_only_on(b, coarser.coords())) {
    throw Error(Errc::structural, "element depends on coordinates outside the target support");
  }
  std::vector<std::size_t> where(coarser.depth());
  for (std::size_t j = 0; j < coarser.depth(); ++j) {
    auto pos = position(coarser.coords()[j]);
    if (!pos) {
      throw Error(Errc::refinement_needed,
                  "coordinate " + std::to_string(coarser.coords()[j]) + " unknown");
    }
    where[j] = *pos;
  }
  Element out(coarser.atom_count());
  for (std::size_t a = 0; a < coarser.atom_count(); ++a) {
    std::size_t fine = 0;
    for (std::size_t j = 0; j < coarser.depth(); ++j) fine |= ((a >> j) & 1U) << where[j];
    if (b.test(fine)) out.set(a);
  }
  return out;
}

std::vector<Cylinder> cylinders_in_order(const DyadicAlgebra& alg, std::size_t max_fixed) {
  std::vector<Coord> sorted = alg.coords();
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  max_fixed = std::min(max_fixed, n);
  std::vector<Cylinder> out;
  for (std::size_t k = 0; k <= max_fixed; ++k) {
    // k-subsets of sorted labels in lexicographic order
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      for (std::size_t v = 0; v < (std::size_t{1} << k); ++v) {
        Cylinder c;
        for (std::size_t i = 0; i < k; ++i) c.fixed[sorted[idx[i]]] = (v >> (k - 1 - i)) & 1U;
        out.push_back(std::move(c));
      }
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

CylinderIndex::CylinderIndex(const DyadicAlgebra& alg, std::size_t max_fixed)
    : atom_count_(alg.atom_count()), cylinders_(cylinders_in_order(alg, max_fixed)) {
  elements_.reserve(cylinders_.size());
  for (const auto& c : cylinders_) elements_.push_back(alg.embed(c));
}

DensityHit CylinderIndex::search(const Element& b, const Rational& eps) const {
  if (b.space_size() != atom_count_) {
    throw Error(Errc::structural, "element does not belong to this dyadic algebra");
  }
  if (b.is_zero()) throw Error(Errc::precondition_failure, "density search on a null element");
  Rational need = 1 - eps;
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const Element& s = elements_[i];
    // uniform weights: Leb_s(b) = |b ∧ s| / |s|
    Rational q(static_cast<unsigned long>((b & s).count()), static_cast<unsigned long>(s.count()));
    q.canonicalize();
    if (q >= need) return DensityHit{cylinders_[i], q, i + 1};
  }
  throw Error(Errc::refinement_needed,
              "no cylinder in the index reaches conditional measure " + to_string(need));
}

DensityHit density_search(const Element& b, const DyadicAlgebra& alg, const Rational& eps,
                          std::optional<std::size_t> max_fixed) {
  if (b.space_size() != alg.atom_count()) {
    throw Error(Errc::structural, "element does not belong to this dyadic algebra");
  }
  return CylinderIndex(alg, max_fixed.value_or(alg.depth())).search(b, eps);
}

}  // namespace famlab::cylinder
