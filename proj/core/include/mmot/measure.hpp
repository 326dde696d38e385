#pragma once

#include <vector>

#include "mmot/manifold.hpp"

namespace mmot {

/// Weighted point cloud representing one marginal. Weights are positive and
/// sum to one; support points are pairwise distinct.
struct DiscreteMeasure {
  ManifoldSpec spec;
  std::vector<ManifoldPoint> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }

  /// Throws ConfigError when an invariant fails: weight sum off by more than
  /// 1e-12, nonpositive weights, off-manifold points, or support points
  /// closer than 1e-9.
  void validate() const;

  static DiscreteMeasure uniform(const ManifoldSpec& spec,
                                 std::vector<ManifoldPoint> points);
};

/// n distinct points sampled on the manifold; uniform weights.
DiscreteMeasure random_measure(const ManifoldSpec& spec, int n,
                               std::uint64_t seed);

/// n distinct points near a center: exp of gaussian tangents scaled by
/// spread; uniform weights.
DiscreteMeasure cluster_measure(const ManifoldSpec& spec, int n,
                                const ManifoldPoint& center, double spread,
                                std::uint64_t seed);

}  // namespace mmot
