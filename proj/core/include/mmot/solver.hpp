#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmot/cost.hpp"
#include "mmot/measure.hpp"

namespace mmot {

enum class PlanSource { exact_lp, sinkhorn_rounded, pushforward };

std::string to_string(PlanSource s);
PlanSource plan_source_from_string(const std::string& s);

/// Sparse coupling over the support tuples; entries carry strictly positive
/// mass and are sorted lexicographically by index tuple.
struct TransportPlan {
  std::vector<int> shape;
  std::vector<std::pair<std::vector<int>, double>> entries;
  PlanSource source = PlanSource::exact_lp;

  double total_mass() const;
  /// i-th marginal weight vectors implied by the entries.
  std::vector<std::vector<double>> marginals() const;
  /// max_i max_k |marginal_i[k] - mu_i.weights[k]|
  std::vector<double> marginal_residuals(const std::vector<DiscreteMeasure>& mu) const;
};

/// One value array per marginal; feasibility means sum_i u[i][idx_i] <= c on
/// every tuple, up to feasibility_residual.
struct DualPotentials {
  std::vector<std::vector<double>> u;
  double feasibility_residual = 0.0;
};

struct SolveReport {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // primal - dual
  int iterations = 0;
  double epsilon = 0.0;  // final regularization; 0 for exact runs
  std::vector<double> marginal_residuals;
};

struct SolveResult {
  TransportPlan plan;
  DualPotentials potentials;
  SolveReport report;
};

/// Exact solution of the discrete Kantorovich LP (variables = support
/// tuples, constraints = marginal blocks). One row of every block after the
/// first is redundant given the others and is dropped to keep the system
/// full-rank; the dropped atoms carry dual value 0. Columns are ordered
/// lexicographically, so ties between optimal vertices resolve
/// reproducibly. Requires prod n_i <= 1e5; throws SizeCapError above that
/// and NumericalError on simplex breakdown.
SolveResult solve_exact(const CostTensor& tensor,
                        const std::vector<DiscreteMeasure>& measures);

struct SinkhornOptions {
  /// Decreasing regularization strengths; empty means geometric 1.0 -> 1e-3
  /// with factor 0.5.
  std::vector<double> epsilon_schedule;
  int max_iter = 2000;  // sweeps per epsilon level
  double tol = 1e-8;    // max L1 marginal residual of the implicit plan
};

std::vector<double> geometric_schedule(double first, double last, double factor);

/// Log-domain multi-marginal Sinkhorn against the product reference measure:
/// cyclically u[i][k] <- -eps * logsumexp over the slice idx_i = k of
/// ((sum_{j != i} u[j] - c)/eps + sum_{j != i} log w_j), which matches
/// marginal i exactly. Plans are rounded to exact marginals by per-marginal
/// scaling plus a product correction on the deficits. No dense kernel is
/// ever exponentiated; everything stays in the log domain. Requires
/// prod n_i <= 1e6. Throws IterationLimitError when the residual tolerance
/// is out of reach at the final epsilon.
SolveResult solve_sinkhorn(const CostTensor& tensor,
                           const std::vector<DiscreteMeasure>& measures,
                           const SinkhornOptions& opts = {});

/// One c-conjugation pass on coordinate i:
///   u[i][k] <- min over tuples with idx_i = k of (c - sum_{j != i} u[j]).
/// Never decreases the dual objective of a feasible input; the output of a
/// full sweep (i = 0..m-1) is feasible with residual <= 1e-12.
DualPotentials c_conjugate(const CostTensor& tensor, DualPotentials u, int i);

/// sum_i <u[i], mu_i.weights>
double dual_objective(const std::vector<DiscreteMeasure>& measures,
                      const DualPotentials& u);

/// Worst violation of sum_i u[i][idx_i] = c[idx] over the plan's support;
/// <= 1e-8 for an exact optimal pair.
double support_equality_check(const TransportPlan& plan,
                              const CostTensor& tensor,
                              const DualPotentials& u);

}  // namespace mmot
