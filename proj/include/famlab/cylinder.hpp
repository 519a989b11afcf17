#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "famlab/boolalg.hpp"
#include "famlab/rational.hpp"

/// Depth-n cylinder model of the measure algebra adding many random reals.
namespace famlab::cylinder {

using Coord = std::int64_t;
using boolalg::Element;
using boolalg::MeasuredAlgebra;

/// A basic cylinder [s]: a finite partial function coords -> {0,1}.
struct Cylinder {
  std::map<Coord, bool> fixed;

  std::size_t size() const noexcept { return fixed.size(); }
  friend bool operator==(const Cylinder&, const Cylinder&) = default;
};

/// A finite union of basic cylinders.
struct Clopen {
  std::vector<Cylinder> parts;
};

inline constexpr std::size_t kMaxDepth = 24;

/// Atoms are the functions coords -> {0,1}; bit j of an atom index is the
/// value at coords()[j]. All atoms have weight 2^-n.
class DyadicAlgebra {
 public:
  explicit DyadicAlgebra(std::vector<Coord> coords);

  const std::vector<Coord>& coords() const noexcept { return coords_; }
  std::size_t depth() const noexcept { return coords_.size(); }
  std::size_t atom_count() const noexcept { return std::size_t{1} << coords_.size(); }
  const MeasuredAlgebra& algebra() const noexcept { return algebra_; }

  std::optional<std::size_t> position(Coord c) const;
  bool value(std::size_t atom, Coord c) const;

  /// Throws Error(Errc::refinement_needed) for a coordinate outside the support.
  Element embed(const Cylinder& c) const;
  Element embed(const Clopen& c) const;

  Rational leb(const Element& b) const { return algebra_.measure(b); }
  /// Leb_s(b) = Leb(b ∧ s)/Leb(s).
  Rational conditional_leb(const Element& b, const Element& s) const;

  /// The algebra over coords() followed by `extra`.
  DyadicAlgebra refine(const std::vector<Coord>& extra) const;

  /// Transports b into `finer`, whose coordinates must include coords().
  Element lift(const Element& b, const DyadicAlgebra& finer) const;

  /// Whether b is determined by the coordinates in `support`.
  bool depends_only_on(const Element& b, const std::vector<Coord>& support) const;

  /// The image of b in the algebra over `support`; requires depends_only_on.
  Element project(const Element& b, const DyadicAlgebra& coarser) const;

 private:
  std::vector<Coord> coords_;
  MeasuredAlgebra algebra_;
};

/// Every basic cylinder fixing at most `max_fixed` coordinates, in search
/// order: fewest fixed coordinates first, then coordinate subsets
/// lexicographically by label, then values lexicographically.
std::vector<Cylinder> cylinders_in_order(const DyadicAlgebra& alg, std::size_t max_fixed);

struct DensityHit {
  Cylinder s;
  Rational conditional;
  std::size_t examined = 0;
};

/// Precomputed cylinders of one algebra in search order, for repeated searches.
class CylinderIndex {
 public:
  CylinderIndex(const DyadicAlgebra& alg, std::size_t max_fixed);

  const std::vector<Cylinder>& cylinders() const noexcept { return cylinders_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }

  DensityHit search(const Element& b, const Rational& eps) const;

 private:
  std::size_t atom_count_;
  std::vector<Cylinder> cylinders_;
  std::vector<Element> elements_;
};

/// First cylinder s in search order with Leb_s(b) >= 1 - eps. `max_fixed`
/// defaults to the full depth, where termination is guaranteed; a smaller
/// bound may fail with Errc::refinement_needed.
DensityHit density_search(const Element& b, const DyadicAlgebra& alg, const Rational& eps,
                          std::optional<std::size_t> max_fixed = std::nullopt);

}  // namespace famlab::cylinder
