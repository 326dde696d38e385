#pragma once

#include <cstddef>
#include <functional>

#include "mmot/cost.hpp"
#include "mmot/solver.hpp"

namespace mmot::oracle {

/// Independent brute-force references used by tests. These deliberately do
/// not share code paths with the modules they check; duplicated formulas are
/// the point.
struct OracleConfig {
  int grid_resolution = 100;
  double fd_step = 1e-5;
  std::size_t enumeration_cap = 1000000;

  void validate() const;  // resolution >= 10, fd_step in [1e-8, 1e-3]
};

struct AssignmentResult {
  TransportPlan plan;
  double value = 0.0;
};

/// Best Monge plan over all tuples of permutations, for uniform equal-size
/// marginals. The LP relaxation is never worse than this. Throws CapError
/// when (n!)^(m-1) exceeds the cap and ConfigError for non-uniform inputs.
AssignmentResult enumerate_assignments(const CostTensor& tensor,
                                       const std::vector<DiscreteMeasure>& measures,
                                       const OracleConfig& cfg = {});

/// max over all tuples of sum_i u[i][idx_i] - c[idx].
double exhaustive_dual_check(const CostTensor& tensor, const DualPotentials& u);

/// Central differences along an orthonormal tangent basis at the point.
TangentVector fd_gradient(const std::function<double(const ManifoldPoint&)>& objective,
                          const ManifoldSpec& spec, const ManifoldPoint& point,
                          double fd_step = 1e-5);

}  // namespace mmot::oracle
