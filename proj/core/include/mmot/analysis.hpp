#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmot/solver.hpp"

namespace mmot {

/// Support of a plan grouped by first-marginal atom, with the mass fraction
/// carried by atoms that have exactly one partner tuple. Discreteness can
/// break graph structure, so this is a measured diagnostic, not an asserted
/// property.
struct MongeMapTable {
  struct AtomRow {
    int atom = 0;
    double mass = 0.0;  // plan mass through this atom
    std::vector<std::pair<std::vector<int>, double>> partners;
  };
  std::vector<AtomRow> rows;
  double graph_fraction = 0.0;
  /// maps[i-1][k]: partner index of first-marginal atom k in marginal i,
  /// or -1 where the atom has several partner tuples.
  std::vector<std::vector<int>> maps;

  bool is_graph() const { return graph_fraction >= 1.0; }
};

MongeMapTable extract_monge(const TransportPlan& plan,
                            const std::vector<DiscreteMeasure>& measures);

/// Pushforward of the plan through the cached per-tuple minimizers: the
/// barycenter candidate nu, the induced two-marginal couplings gamma_i, and
/// their squared-Wasserstein costs.
struct BarycenterResult {
  DiscreteMeasure nu;
  std::vector<TransportPlan> couplings;  // gamma_i, shape {n_i, |nu|}
  std::vector<double> objective;         // cost of gamma_i under d^2
  /// flat tensor entries whose minimizer was flagged non-unique; they enter
  /// nu with their stored representative.
  std::vector<std::size_t> nonunique_entries;
};

BarycenterResult pushforward_barycenter(const TransportPlan& plan,
                                        const CostTensor& tensor,
                                        double merge_tol = 1e-6);

/// One named verification outcome.
struct CheckReport {
  std::string name;
  bool pass = true;
  double worst = 0.0;      // worst residual or violation observed
  double tolerance = 0.0;
  std::string detail;
};

/// Exact squared quadratic Wasserstein distance between two discrete
/// measures (two-marginal LP with cost d^2).
double w22(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Checks the barycenter identity sum_i W2^2(mu_i, nu)/2 = primal and probes
/// local optimality with jittered candidates (support points pushed along
/// random tangents of norm jitter_scale). Findings are reported, not thrown.
CheckReport verify_barycenter_optimality(const BarycenterResult& result,
                                         const std::vector<DiscreteMeasure>& measures,
                                         double primal_value, int jitter_count,
                                         double jitter_scale, std::uint64_t seed);

/// Solves each two-marginal problem (mu_i, nu) independently and compares
/// its optimal value with the cost of gamma_i.
CheckReport verify_two_marginal_optimality(const BarycenterResult& result,
                                           const std::vector<DiscreteMeasure>& measures);

/// Where the plan is a graph and gamma_1 couples each first-marginal atom to
/// a single nu atom, checks that gamma_i links that same nu atom to the
/// atom's partner in marginal i (the maps factor through nu).
CheckReport verify_composition(const MongeMapTable& table,
                               const BarycenterResult& result);

/// Swap inequality on the support: for any two support tuples and any single
/// coordinate swap, c(x') + c(xbar') >= c(x) + c(xbar) - tol. Optimal exact
/// plans satisfy it; a violation means the support could be improved.
CheckReport check_c_monotonicity(const TransportPlan& plan,
                                 const CostTensor& tensor, double tol = 1e-8);

}  // namespace mmot
