#include "famlab/boolalg.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "famlab/error.hpp"

namespace famlab::boolalg {

namespace {

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

}  // namespace

Element::Element(std::size_t atom_count)
    : size_(atom_count), words_(word_count(atom_count), 0) {}

Element Element::one(std::size_t atom_count) {
  Element e(atom_count);
  std::fill(e.words_.begin(), e.words_.end(), ~std::uint64_t{0});
  e.clear_tail();
  return e;
}

Element Element::from_atoms(std::size_t atom_count, std::span<const std::size_t> atoms) {
  Element e(atom_count);
  for (std::size_t a : atoms) e.set(a);
  return e;
}

Element Element::atom(std::size_t atom_count, std::size_t index) {
  Element e(atom_count);
  e.set(index);
  return e;
}

bool Element::test(std::size_t atom) const {
  if (atom >= size_) {
    throw Error(Errc::structural, "atom index " + std::to_string(atom) +
                                      " outside atom space of size " + std::to_string(size_));
  }
  return (words_[atom / 64] >> (atom % 64)) & 1U;
}

void Element::set(std::size_t atom, bool value) {
  if (atom >= size_) {
    throw Error(Errc::structural, "atom index " + std::to_string(atom) +
                                      " outside atom space of size " + std::to_string(size_));
  }
  std::uint64_t mask = std::uint64_t{1} << (atom % 64);
  if (value) {
    words_[atom / 64] |= mask;
  } else {
    words_[atom / 64] &= ~mask;
  }
}

bool Element::is_zero() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool Element::is_one() const noexcept { return count() == size_; }

std::size_t Element::count() const noexcept {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
  return n;
}

std::vector<std::size_t> Element::atoms() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each_atom([&](std::size_t a) { out.push_back(a); });
  return out;
}

void Element::check_same_space(const Element& other) const {
  if (size_ != other.size_) {
    throw Error(Errc::structural, "elements over atom spaces of size " + std::to_string(size_) +
                                      " and " + std::to_string(other.size_));
  }
}

void Element::clear_tail() noexcept {
  if (size_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }
}

Element& Element::operator&=(const Element& other) {
  check_same_space(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

Element& Element::operator|=(const Element& other) {
  check_same_space(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Element& Element::xor_assign(const Element& other) {
  check_same_space(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

std::strong_ordering operator<=>(const Element& a, const Element& b) {
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  return a.words_ <=> b.words_;
}

Element meet(const Element& a, const Element& b) {
  Element out = a;
  out &= b;
  return out;
}

Element join(const Element& a, const Element& b) {
  Element out = a;
  out |= b;
  return out;
}

Element complement(const Element& a) {
  Element out = Element::one(a.space_size());
  out.xor_assign(a);
  return out;
}

Element minus(const Element& a, const Element& b) { return meet(a, complement(b)); }

bool leq(const Element& a, const Element& b) {
  if (a.space_size() != b.space_size()) {
    throw Error(Errc::structural, "comparing elements over different atom spaces");
  }
  auto x = a.words();
  auto y = b.words();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if ((x[i] & ~y[i]) != 0) return false;
  }
  return true;
}

bool disjoint(const Element& a, const Element& b) {
  if (a.space_size() != b.space_size()) {
    throw Error(Errc::structural, "comparing elements over different atom spaces");
  }
  auto x = a.words();
  auto y = b.words();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if ((x[i] & y[i]) != 0) return false;
  }
  return true;
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::size_t h = std::hash<std::size_t>{}(e.space_size());
  for (std::uint64_t w : e.words()) {
    h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::vector<GeneratedAtom> generated_atoms_with_patterns(std::span<const Element> generators,
                                                         const Element& unit,
                                                         std::size_t bound) {
  if (generators.size() > bound) {
    throw Error(Errc::capacity, std::to_string(generators.size()) +
                                    " generators exceed the bound of " + std::to_string(bound));
  }
  for (const auto& g : generators) {
    if (g.space_size() != unit.space_size()) {
      throw Error(Errc::structural, "generator over a different atom space");
    }
  }
  // Each atom of the ambient algebra below `unit` lies in exactly one a_σ;
  // grouping atoms by their membership signature yields the nonzero a_σ.
  std::map<Pattern, Element> groups;
  unit.for_each_atom([&](std::size_t a) {
    Pattern sigma(generators.size());
    for (std::size_t j = 0; j < generators.size(); ++j) sigma[j] = !generators[j].test(a);
    auto [it, inserted] = groups.try_emplace(std::move(sigma), unit.space_size());
    it->second.set(a);
  });
  std::vector<GeneratedAtom> out;
  out.reserve(groups.size());
  for (auto& [sigma, atom] : groups) out.push_back(GeneratedAtom{sigma, std::move(atom)});
  return out;
}

std::vector<Element> generated_atoms(std::span<const Element> generators, std::size_t bound) {
  std::size_t n = generators.empty() ? 0 : generators.front().space_size();
  if (generators.empty()) {
    throw Error(Errc::undefined_input,
                "atom space unknown for an empty generator list; pass a unit element");
  }
  std::vector<Element> out;
  for (auto& g : generated_atoms_with_patterns(generators, Element::one(n), bound)) {
    out.push_back(std::move(g.atom));
  }
  return out;
}

MeasuredAlgebra::MeasuredAlgebra(std::vector<Rational> weights) {
  if (weights.empty()) throw Error(Errc::structural, "atom space must have at least one atom");
  Rational total = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i].canonicalize();
    if (weights[i] <= 0) {
      throw Error(Errc::structural, "atom " + std::to_string(i) + " has non-positive weight " +
                                        to_string(weights[i]));
    }
    total += weights[i];
  }
  if (total != 1) {
    throw Error(Errc::structural, "atom weights sum to " + to_string(total) + ", not 1");
  }
  uniform_ = std::all_of(weights.begin(), weights.end(),
                         [&](const Rational& w) { return w == weights.front(); });
  weights_ = std::make_shared<const std::vector<Rational>>(std::move(weights));
}

MeasuredAlgebra MeasuredAlgebra::uniform(std::size_t atom_count) {
  if (atom_count == 0) throw Error(Errc::structural, "atom space must have at least one atom");
  return MeasuredAlgebra(std::vector<Rational>(atom_count, Rational(1, atom_count)));
}

Rational MeasuredAlgebra::measure(const Element& a) const {
  if (a.space_size() != size()) {
    throw Error(Errc::structural, "element over atom space of size " +
                                      std::to_string(a.space_size()) + ", algebra has " +
                                      std::to_string(size()));
  }
  if (uniform_) return Rational(static_cast<unsigned long>(a.count())) * weights_->front();
  Rational total = 0;
  a.for_each_atom([&](std::size_t i) { total += (*weights_)[i]; });
  return total;
}

Rational measure(const MeasuredAlgebra& m, const Element& a) { return m.measure(a); }

ConditionalMeasure::ConditionalMeasure(MeasuredAlgebra algebra, Element condition)
    : algebra_(std::move(algebra)), condition_(std::move(condition)) {
  denominator_ = algebra_.measure(condition_);
  if (denominator_ == 0) {
    throw Error(Errc::division_by_zero, "conditioning on an event of measure zero");
  }
}

Rational ConditionalMeasure::operator()(const Element& a) const {
  Rational num = algebra_.measure(meet(a, condition_));
  return num / denominator_;
}

MeasuredAlgebra ConditionalMeasure::relative_algebra() const {
  std::vector<Rational> w;
  condition_.for_each_atom([&](std::size_t i) { w.push_back(algebra_.weight(i) / denominator_); });
  return MeasuredAlgebra(std::move(w));
}

Element ConditionalMeasure::to_relative(const Element& a) const {
  if (!leq(a, condition_)) {
    throw Error(Errc::structural, "element is not below the conditioning event");
  }
  Element out(condition_.count());
  std::size_t j = 0;
  condition_.for_each_atom([&](std::size_t i) {
    if (a.test(i)) out.set(j);
    ++j;
  });
  return out;
}

ConditionalMeasure conditional(const MeasuredAlgebra& m, const Element& b) {
  return ConditionalMeasure(m, b);
}

}  // namespace famlab::boolalg
