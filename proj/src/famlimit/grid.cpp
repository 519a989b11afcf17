#include <map>
#include <string>

#include "famlab/error.hpp"
#include "famlab/famlimit.hpp"

namespace famlab::famlimit {

namespace {

using Table = std::vector<std::vector<Rational>>;

// Smallest ℓ/N >= c, i.e. the grid value in [c, c + 1/N).
Rational round_up(const Rational& c, std::uint64_t N) {
  Rational n(static_cast<unsigned long>(N));
  Rational v(ceil(c * n), mpz_class(static_cast<unsigned long>(N)));
  v.canonicalize();
  return v;
}

bool within(const Table& a, const Table& b, const Rational& tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t m = 0; m < a[i].size(); ++m) {
      if (abs(a[i][m] - b[i][m]) >= tol) return false;
    }
  }
  return true;
}

Table average(const AtomProfile& profile, const MeasuredAlgebra& alg, const Element& r) {
  Table out;
  Rational mass = alg.measure(r);
  r.for_each_atom([&](std::size_t a) {
    const Table& c = profile.c(a);
    if (out.empty()) {
      out.assign(c.size(), {});
      for (std::size_t i = 0; i < c.size(); ++i) out[i].assign(c[i].size(), Rational(0));
    }
    Rational w = alg.weight(a) / mass;
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t m = 0; m < c[i].size(); ++m) out[i][m] += w * c[i][m];
    }
  });
  return out;
}

}  // namespace

bool GridResult::in_dstar(const Table& c_of_r) const {
  if (c_of_r.size() != c.size()) throw Error(Errc::structural, "c-table has the wrong shape");
  return within(c_of_r, c, tolerance);
}

bool GridResult::in_dstar(const Setting& s, const Element& r) const {
  return in_dstar(c_values(s, r));
}

GridResult grid_refine(const Setting& s, const Element& r, const Rational& tolerance) {
  s.validate();
  if (tolerance <= 0) throw Error(Errc::precondition_failure, "grid tolerance must be positive");
  if (r.is_zero()) throw Error(Errc::precondition_failure, "grid refinement below zero");

  GridResult out;
  out.M = s.positive_blocks();
  out.tolerance = tolerance;
  mpz_class n = ceil(1 / tolerance);
  if (Rational(n) * tolerance <= 1) n += 1;  // minimal N with 1/N < tolerance
  if (!n.fits_ulong_p()) throw Error(Errc::capacity, "grid too fine");
  out.N = n.get_ui();

  AtomProfile profile(s, r);
  // hypothesis: every r' ≤ r integrates to at least δ_i; by averaging it is
  // enough to look at the atoms
  r.for_each_atom([&](std::size_t a) {
    for (std::size_t i = 0; i < s.istar(); ++i) {
      if (profile.integral(a, i) < s.deltas[i]) {
        throw Error(Errc::precondition_failure,
                    "atom " + std::to_string(a) + " integrates sequence " + std::to_string(i) +
                        " to " + to_string(profile.integral(a, i)) + " < δ = " +
                        to_string(s.deltas[i]));
      }
    }
  });

  Element cur = r;
  for (int step = 0; step < 3; ++step) {
    Table mean = average(profile, s.algebra, cur);
    Table grid = mean;
    for (auto& row : grid) {
      for (auto& v : row) v = round_up(v, out.N);
    }
    GridStep trace{cur, grid, std::nullopt};

    // atoms grouped by their c-vector; the first one outside the box decides
    std::map<Table, Element> classes;
    cur.for_each_atom([&](std::size_t a) {
      const Table& c = profile.c(a);
      auto it = classes.find(c);
      if (it == classes.end()) it = classes.emplace(c, Element(s.algebra.size())).first;
      it->second.set(a);
      if (!trace.outside_atom && !within(c, grid, tolerance)) trace.outside_atom = a;
    });
    out.trace.push_back(trace);
    if (!trace.outside_atom) {
      out.r_star = cur;
      out.c = grid;
      return out;
    }
    // descend to the heaviest class outside the box; ties go to the class
    // holding the lowest atom
    const Element* best = nullptr;
    Rational best_mass = -1;
    std::size_t best_first = 0;
    for (const auto& [c, members] : classes) {
      if (within(c, grid, tolerance)) continue;
      Rational w = s.algebra.measure(members);
      std::size_t first = members.atoms().front();
      if (w > best_mass || (w == best_mass && first < best_first)) {
        best = &members;
        best_mass = w;
        best_first = first;
      }
    }
    cur = *best;
  }
  throw Error(Errc::invariant_violation, "grid refinement did not settle");
}

}  // namespace famlab::famlimit
