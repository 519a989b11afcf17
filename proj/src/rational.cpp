#include "famlab/rational.hpp"

#include <cctype>
#include <numeric>

#include "famlab/error.hpp"

namespace famlab {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s.front() == '-' || s.front() == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::structural: return "structural error";
    case Errc::capacity: return "capacity error";
    case Errc::division_by_zero: return "division by zero";
    case Errc::refinement_needed: return "refinement needed";
    case Errc::unsupported_set: return "unsupported set";
    case Errc::illegal_region: return "illegal region";
    case Errc::not_materialized: return "not materialized";
    case Errc::undefined_input: return "undefined input";
    case Errc::precondition_failure: return "precondition failure";
    case Errc::density_failure: return "density failure";
    case Errc::invariant_violation: return "invariant violation";
    case Errc::budget_exhausted: return "budget exhausted";
    case Errc::coverage: return "coverage error";
    case Errc::parse: return "parse error";
    case Errc::missing_input: return "missing input";
    case Errc::verification_failed: return "verification failed";
  }
  return "error";
}

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1")
                                                         : text.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-' ||
      den.front() == '+') {
    throw Error(Errc::parse, "malformed rational '" + std::string(text) + "'");
  }
  if (num.front() == '+') num.remove_prefix(1);
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) {
    throw Error(Errc::parse, "zero denominator in '" + std::string(text) + "'");
  }
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

mpz_class ceil(const Rational& value) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

std::int64_t ceil_to_int64(const Rational& value) {
  mpz_class c = ceil(value);
  if (!c.fits_slong_p()) throw Error(Errc::capacity, "integer overflow in ceil");
  return c.get_si();
}

Rational sum(std::span<const Rational> values) {
  Rational total = 0;
  for (const auto& v : values) total += v;
  return total;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b, std::uint64_t limit) {
  if (a == 0 || b == 0) throw Error(Errc::structural, "lcm of zero period");
  std::uint64_t g = std::gcd(a, b);
  std::uint64_t q = a / g;
  if (q > limit / b) throw Error(Errc::capacity, "common period exceeds limit");
  return q * b;
}

}  // namespace famlab
