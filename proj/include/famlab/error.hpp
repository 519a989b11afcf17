#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace famlab {

enum class Errc {
  structural,           // mismatched atom spaces, malformed structures
  capacity,             // enumeration bound exceeded
  division_by_zero,     // conditioning on a null event
  refinement_needed,    // cylinder mentions a coordinate outside the support
  unsupported_set,      // set not expressible in the periodic algebra
  illegal_region,       // approximation region of measure zero
  not_materialized,     // tree level not built
  undefined_input,      // e.g. empty sequence for i*
  precondition_failure, // hypothesis of a construction is violated
  density_failure,      // no D*-member below a pattern atom
  invariant_violation,  // an internal identity failed
  budget_exhausted,     // search budget ran out
  coverage,             // density family does not cover the algebra
  parse,                // malformed input file
  missing_input,        // referenced file or label not found
  verification_failed,  // a certificate did not verify
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace famlab
