#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace famlab {

/// Exact rational with arbitrary-precision numerator and denominator.
using Rational = mpq_class;

/// Parses "n", "-n" or "n/d". Throws Error(Errc::parse) on malformed input
/// or a zero denominator. The result is canonical.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" form; integers print with denominator 1.
std::string to_string(const Rational& value);

/// |value|
Rational abs(const Rational& value);

/// Smallest integer >= value.
mpz_class ceil(const Rational& value);

/// Smallest integer >= value, as int64. Throws if it does not fit.
std::int64_t ceil_to_int64(const Rational& value);

Rational sum(std::span<const Rational> values);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

/// Least common multiple; throws Error(Errc::capacity) past `limit`.
std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b,
                      std::uint64_t limit = std::uint64_t{1} << 32);

}  // namespace famlab
