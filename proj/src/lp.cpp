#include "famlab/lp.hpp"

#include <string>

#include "famlab/error.hpp"

namespace famlab::lp {

namespace {

constexpr std::size_t kDegenerateRunBeforeBland = 50;

}  // namespace

PackingSolution solve_packing(std::size_t rows, const std::vector<Column>& columns) {
  const std::size_t m = rows;
  const std::size_t n = columns.size();
  for (const auto& col : columns) {
    if (col.empty()) throw Error(Errc::structural, "packing column without rows");
    for (auto r : col) {
      if (r >= m) throw Error(Errc::structural, "packing row index out of range");
    }
  }

  // variables 0..n-1 are structural, n+i is the slack of row i
  std::vector<std::size_t> basis(m);
  std::vector<std::vector<Rational>> binv(m, std::vector<Rational>(m, Rational(0)));
  std::vector<Rational> xb(m, Rational(1));
  for (std::size_t i = 0; i < m; ++i) {
    basis[i] = n + i;
    binv[i][i] = 1;
  }

  PackingSolution sol;
  std::size_t degenerate_run = 0;
  std::vector<Rational> pi(m);
  std::vector<mpz_class> scaled(m);
  std::vector<Rational> d(m);

  while (true) {
    // π = c_B^T B^{-1}
    for (std::size_t i = 0; i < m; ++i) pi[i] = 0;
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] >= n) continue;
      for (std::size_t i = 0; i < m; ++i) {
        if (binv[r][i] != 0) pi[i] += binv[r][i];
      }
    }
    mpz_class denom = 1;
    for (const auto& p : pi) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), p.get_den_mpz_t());
    for (std::size_t i = 0; i < m; ++i) scaled[i] = pi[i].get_num() * (denom / pi[i].get_den());

    // pricing on reduced costs scaled by the common denominator
    std::size_t entering = n + m;
    mpz_class best = 0;
    mpz_class rc;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (j < n) {
        rc = denom;
        for (auto i : columns[j]) rc -= scaled[i];
      } else {
        rc = -scaled[j - n];
      }
      if (rc <= 0) continue;
      if (sol.used_bland) {
        entering = j;
        break;
      }
      if (rc > best) {
        best = rc;
        entering = j;
      }
    }
    if (entering == n + m) break;

    // d = B^{-1} a_entering
    for (std::size_t r = 0; r < m; ++r) {
      if (entering < n) {
        d[r] = 0;
        for (auto i : columns[entering]) d[r] += binv[r][i];
      } else {
        d[r] = binv[r][entering - n];
      }
    }

    std::size_t leave = m;
    Rational theta;
    for (std::size_t r = 0; r < m; ++r) {
      if (d[r] <= 0) continue;
      Rational ratio = xb[r] / d[r];
      if (leave == m || ratio < theta || (ratio == theta && basis[r] < basis[leave])) {
        leave = r;
        theta = ratio;
      }
    }
    if (leave == m) throw Error(Errc::invariant_violation, "packing LP reported unbounded");

    if (theta == 0) {
      if (++degenerate_run > kDegenerateRunBeforeBland) sol.used_bland = true;
    } else {
      degenerate_run = 0;
    }

    Rational piv = d[leave];
    for (std::size_t i = 0; i < m; ++i) {
      if (binv[leave][i] != 0) binv[leave][i] /= piv;
    }
    xb[leave] /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave || d[r] == 0) continue;
      Rational f = d[r];
      for (std::size_t i = 0; i < m; ++i) {
        if (binv[leave][i] != 0) binv[r][i] -= f * binv[leave][i];
      }
      xb[r] -= f * xb[leave];
    }
    basis[leave] = entering;
    ++sol.iterations;
  }

  sol.primal.assign(n, Rational(0));
  sol.value = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) {
      sol.primal[basis[r]] = xb[r];
      sol.value += xb[r];
    }
  }
  sol.dual = pi;
  return sol;
}

}  // namespace famlab::lp
