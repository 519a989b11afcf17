#include <algorithm>
#include <string>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"

namespace famlab::famlimit {

namespace {

Rational flag(bool b) { return Rational(b ? 1 : 0); }

CheckRow row(std::string name, Rational lhs, std::string rel, Rational rhs) {
  bool pass = false;
  if (rel == "<") pass = lhs < rhs;
  else if (rel == "<=") pass = lhs <= rhs;
  else if (rel == ">") pass = lhs > rhs;
  else if (rel == ">=") pass = lhs >= rhs;
  else if (rel == "=") pass = lhs == rhs;
  else throw Error(Errc::structural, "unknown relation " + rel);
  return CheckRow{std::move(name), std::move(lhs), std::move(rel), std::move(rhs), pass};
}

std::vector<Rational> frequencies(const Certificate& c, const Setting& s) {
  std::vector<Rational> out;
  Rational n(static_cast<unsigned long>(c.u.size()));
  for (std::size_t m = 0; m < s.mstar(); ++m) {
    auto B = s.partition.block(m);
    std::size_t hits = 0;
    for (Index k : c.u) hits += B.contains(k) ? 1 : 0;
    out.push_back(Rational(static_cast<unsigned long>(hits)) / n);
  }
  return out;
}

std::vector<Rational> successes(const Certificate& c, const Setting& s) {
  std::vector<Rational> out;
  Rational n(static_cast<unsigned long>(c.u.size()));
  for (const auto& seq : s.sequences) {
    Rational total = 0;
    for (Index k : c.u) total += success_ratio(s.blocks, seq, c.r_plus, k);
    out.push_back(total / n);
  }
  return out;
}

// rows shared by both checks; returns false when the averages cannot be formed
bool common(VerificationReport& rep, const Certificate& c, const Setting& s) {
  rep.add(row("u nonempty", Rational(static_cast<unsigned long>(c.u.size())), ">", 0));
  bool ordered = std::adjacent_find(c.u.begin(), c.u.end(),
                                    [](Index a, Index b) { return a >= b; }) == c.u.end();
  rep.add(row("u increasing", flag(ordered), "=", 1));
  bool natural = std::all_of(c.u.begin(), c.u.end(), [](Index k) { return k >= 0; });
  rep.add(row("u in N", flag(natural), "=", 1));
  bool shaped = c.r_plus.space_size() == s.algebra.size();
  rep.add(row("r+ over the atoms", flag(shaped), "=", 1));
  return !c.u.empty() && natural && shaped;
}

void recorded(VerificationReport& rep, const Certificate& c, const std::vector<Rational>& freq,
              const std::vector<Rational>& succ) {
  rep.add(row("recorded blocks", Rational(static_cast<unsigned long>(c.block_freq.size())), "=",
              Rational(static_cast<unsigned long>(freq.size()))));
  rep.add(row("recorded sequences", Rational(static_cast<unsigned long>(c.success.size())), "=",
              Rational(static_cast<unsigned long>(succ.size()))));
  for (std::size_t m = 0; m < std::min(freq.size(), c.block_freq.size()); ++m) {
    rep.add(row("recorded block " + std::to_string(m), c.block_freq[m], "=", freq[m]));
  }
  for (std::size_t i = 0; i < std::min(succ.size(), c.success.size()); ++i) {
    rep.add(row("recorded sequence " + std::to_string(i), c.success[i], "=", succ[i]));
  }
}

}  // namespace

void VerificationReport::add(CheckRow r) {
  passed = passed && r.pass;
  rows.push_back(std::move(r));
}

VerificationReport verify_certificate(const Certificate& c, const Setting& s,
                                      const std::set<Index>& F) {
  s.validate();
  VerificationReport rep;
  if (!common(rep, c, s)) return rep;
  std::size_t clash = 0;
  for (Index k : c.u) clash += F.count(k);
  rep.add(row("u and F disjoint", Rational(static_cast<unsigned long>(clash)), "=", 0));
  rep.add(row("r+ nonzero", s.algebra.measure(c.r_plus), ">", 0));
  bool below = c.r.space_size() == c.r_plus.space_size() && boolalg::leq(c.r_plus, c.r);
  rep.add(row("r+ below r", flag(below), "=", 1));

  auto a = s.masses();
  auto freq = frequencies(c, s);
  for (std::size_t m = 0; m < freq.size(); ++m) {
    rep.add(row("block " + std::to_string(m), abs(freq[m] - a[m]), "<", c.eps));
  }
  auto succ = successes(c, s);
  for (std::size_t i = 0; i < succ.size(); ++i) {
    rep.add(row("sequence " + std::to_string(i), succ[i], ">=", s.deltas[i] - c.eps));
  }
  recorded(rep, c, freq, succ);
  return rep;
}

VerificationReport verify_characterization(const Certificate& c, const Setting& s,
                                           std::span<const Rational> eps_i, const Rational& eps) {
  s.validate();
  if (eps_i.size() != s.istar()) throw Error(Errc::structural, "one ε_i per sequence is required");
  VerificationReport rep;
  if (!common(rep, c, s)) return rep;
  auto a = s.masses();
  auto freq = frequencies(c, s);
  for (std::size_t m = 0; m < freq.size(); ++m) {
    rep.add(row("block " + std::to_string(m), abs(freq[m] - a[m]), "<", eps));
  }
  auto succ = successes(c, s);
  for (std::size_t i = 0; i < succ.size(); ++i) {
    Rational bound = 1 - eps_i[i] - eps;
    rep.add(row("sequence " + std::to_string(i), succ[i], ">=", bound));
    rep.add(row("sequence " + std::to_string(i) + " strict", succ[i], ">", bound));
  }
  recorded(rep, c, freq, succ);
  return rep;
}

}  // namespace famlab::famlimit
