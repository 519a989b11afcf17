#include "famlab/ptree.hpp"

namespace famlab::ptree {

namespace {

void check_sizes(std::span<const Rational> probs, std::span<const Rational> x) {
  if (probs.size() != x.size()) {
    throw Error(Errc::structural, "random variable and probability space differ in size");
  }
}

}  // namespace

Rational expectation(std::span<const Rational> probs, std::span<const Rational> x) {
  check_sizes(probs, x);
  Rational e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) e += probs[i] * x[i];
  return e;
}

Rational covariance(std::span<const Rational> probs, std::span<const Rational> x,
                    std::span<const Rational> y) {
  check_sizes(probs, x);
  check_sizes(probs, y);
  Rational exy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) exy += probs[i] * x[i] * y[i];
  return exy - expectation(probs, x) * expectation(probs, y);
}

Rational variance(std::span<const Rational> probs, std::span<const Rational> x) {
  return covariance(probs, x, x);
}

Moments moments(std::span<const Rational> probs, std::span<const Rational> x,
                std::span<const Rational> y) {
  return Moments{expectation(probs, x), expectation(probs, y), variance(probs, x),
                 covariance(probs, x, y)};
}

ChebyshevAudit chebyshev_audit(std::span<const Rational> probs, std::span<const Rational> x,
                               const Rational& eps) {
  if (eps <= 0) throw Error(Errc::precondition_failure, "Chebyshev needs eps > 0");
  Rational ex = expectation(probs, x);
  ChebyshevAudit out;
  out.lhs = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (abs(x[i] - ex) >= eps) out.lhs += probs[i];
  }
  out.rhs = variance(probs, x) / (eps * eps);
  out.holds = out.lhs <= out.rhs;
  return out;
}

Distribution binomial(std::size_t n, const Rational& p) {
  if (p < 0 || p > 1) throw Error(Errc::precondition_failure, "p outside [0,1]");
  std::vector<Rational> probs{Rational(1)};
  Rational q = 1 - p;
  for (std::size_t level = 0; level < n; ++level) {
    std::vector<Rational> next(probs.size() + 1, Rational(0));
    for (std::size_t k = 0; k < probs.size(); ++k) {
      next[k] += probs[k] * q;
      next[k + 1] += probs[k] * p;
    }
    probs = std::move(next);
  }
  Distribution d;
  for (std::size_t k = 0; k <= n; ++k) d.values.emplace_back(static_cast<long>(k));
  d.probs = std::move(probs);
  return d;
}

}  // namespace famlab::ptree
