#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "famlab/rational.hpp"

namespace famlab::lp {

/// Each column is the sorted list of rows where it has a 1.
using Column = std::vector<std::uint32_t>;

struct PackingSolution {
  Rational value;                // max Σ y
  std::vector<Rational> primal;  // y, one per column
  std::vector<Rational> dual;    // π, one per row: min Σ π s.t. Σ_{i∈col} π_i >= 1
  std::size_t iterations = 0;
  bool used_bland = false;
};

/// Solves max Σ_j y_j subject to Σ_{j : i ∈ col_j} y_j <= 1 for every row i
/// and y >= 0, exactly, by the revised simplex method from the slack basis.
/// Pricing is Dantzig's rule; after a run of degenerate pivots it switches
/// to Bland's rule for the rest of the solve. Every column must be non-empty.
PackingSolution solve_packing(std::size_t rows, const std::vector<Column>& columns);

}  // namespace famlab::lp
