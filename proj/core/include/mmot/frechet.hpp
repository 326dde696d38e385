#pragma once

#include <cstdint>
#include <vector>

#include "mmot/cost_family.hpp"
#include "mmot/manifold.hpp"

namespace mmot {

/// Weighted barycenter problem: minimize y -> sum_i w_i f_i(d(x_i, y)).
struct KarcherProblem {
  ManifoldSpec spec;
  std::vector<ManifoldPoint> points;
  std::vector<double> weights;  // empty means all ones
  CostFamily family;            // one profile per point

  void validate() const;  // throws ConfigError (m >= 2, sizes, validity)
  double weight(int i) const {
    return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
  }
  int size() const { return static_cast<int>(points.size()); }
};

struct KarcherOptions {
  int starts = 12;           // random starts added to the data points
  int max_iter = 1000;       // per start
  double grad_tol = 1e-10;
  double value_tol = 1e-9;   // minima within this of the best are kept
  double cluster_tol = 1e-6; // merge radius for near-equal minimizers
  std::uint64_t seed = 0;
};

struct KarcherResult {
  /// Distinct local minima within value_tol of the best, in lexicographic
  /// coordinate order.
  std::vector<ManifoldPoint> minimizers;
  double value = 0.0;
  double grad_norm = 0.0;      // at the best minimizer
  bool unique = true;          // exactly one cluster survived
  double min_cut_margin = 0.0; // min over i of cut_locus_margin(x_i, best)
  int iterations = 0;          // descent iterations summed over starts
};

/// sum_i w_i f_i(d(x_i, y)); total on valid points.
double objective(const KarcherProblem& prob, const ManifoldPoint& y);

/// Riemannian gradient under the convention
///   grad_y f(d(x, y)) = -(f'(d)/d) log_map(y, x)   (d > 0; zero at d = 0).
/// Throws CutLocusError when y sits on the cut locus of some x_i.
TangentVector gradient(const KarcherProblem& prob, const ManifoldPoint& y);

/// Multi-start Riemannian gradient descent with Armijo backtracking. Starts
/// at every data point plus `starts` seeded random points; descent paths that
/// hit a cut locus restart from a slightly perturbed point. Non-uniqueness is
/// reported, never an error. Throws ConvergenceError if no start converges.
KarcherResult solve(const KarcherProblem& prob, const KarcherOptions& opts = {});

/// Exhaustive evaluation over a deterministic grid (sphere: Fibonacci
/// lattice of `grid_resolution` points; torus / euclidean bounding box:
/// `grid_resolution` points per coordinate). Requires dim <= 2. Independent
/// of solve(); used as its oracle. Grid resolution bounds the value error,
/// so flat minima directions below the grid scale are invisible to the
/// unique flag here.
KarcherResult brute_force(const KarcherProblem& prob, int grid_resolution);

/// The deterministic grid brute_force evaluates on; exposed so the objective
/// landscape can be dumped for plotting.
std::vector<ManifoldPoint> scan_grid(const KarcherProblem& prob,
                                     int grid_resolution);

}  // namespace mmot
