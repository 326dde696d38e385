#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace mmot {

/// Equality-form LP  min c.x  s.t.  A x = b, x >= 0,  where every structural
/// column of A has coefficient 1 on a small set of rows (transport
/// polytopes). Columns are indexed 0..n_cols-1 and described lazily.
struct UnitColumnLp {
  int n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> rhs;  // nonnegative
  std::function<double(std::size_t)> cost;
  /// Fills `rows` with the row indices the column touches (coefficient 1).
  std::function<void(std::size_t, std::vector<int>&)> rows_of;
};

struct SimplexSolution {
  double objective = 0.0;
  /// Structural columns with positive value, sorted by column index.
  std::vector<std::pair<std::size_t, double>> basic;
  std::vector<double> duals;  // one per row
  int iterations = 0;
};

/// Two-phase revised simplex with Bland's rule: cycle-free and deterministic
/// (entering = lowest-index improving column, leaving = lowest-index tied
/// basic variable), which makes degenerate vertices reproducible at the cost
/// of speed. Throws NumericalError on breakdown.
SimplexSolution solve_unit_lp(const UnitColumnLp& lp);

}  // namespace mmot
