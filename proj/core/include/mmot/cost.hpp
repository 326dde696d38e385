#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mmot/frechet.hpp"
#include "mmot/measure.hpp"

namespace mmot {

/// Row-major multi-index helpers over a shape (n_1, ..., n_m).
std::size_t shape_total(const std::vector<int>& shape);
std::vector<std::size_t> shape_strides(const std::vector<int>& shape);
std::vector<int> unflatten_index(const std::vector<int>& shape, std::size_t flat);
std::size_t flatten_index(const std::vector<int>& shape,
                          const std::vector<int>& idx);

/// Result of one barycenter-cost evaluation.
struct CostEvaluation {
  double value = 0.0;
  ManifoldPoint ybar;       // best minimizer found
  bool unique = true;
  double min_cut_margin = 0.0;
};

/// Dense m-dimensional array of cost values over support tuples, with the
/// minimizing point and a uniqueness flag cached per entry. Tensors built
/// from a plain value table (two-marginal distances, say) carry no cache.
struct CostTensor {
  ManifoldSpec spec;
  CostFamily family;
  std::vector<int> shape;
  std::vector<double> values;              // row-major
  std::vector<ManifoldPoint> argmin;       // empty when externally supplied
  std::vector<std::uint8_t> unique_flags;  // empty when externally supplied

  std::size_t total() const { return shape_total(shape); }
  int order() const { return static_cast<int>(shape.size()); }
  bool has_argmin() const { return !argmin.empty(); }

  double value_at(const std::vector<int>& idx) const {
    return values[flatten_index(shape, idx)];
  }

  static CostTensor from_values(const ManifoldSpec& spec,
                                std::vector<int> shape,
                                std::vector<double> values);

  /// Flat little-endian dump: magic "MMOTTENS", u32 version, u32 order,
  /// u64 shape entries, then row-major f64 values.
  void write_binary(const std::string& path) const;
  static CostTensor read_binary(const std::string& path);

  /// index tuple, value, unique flag per row.
  void write_csv(const std::string& path) const;
};

struct CostTensorOptions {
  KarcherOptions karcher;
  std::size_t size_cap = 1000000;
};

/// Barycenter cost of one tuple: delegates to the Karcher solver. The value
/// is an upper-bound-tight infimum: value <= sum_i f_i(d(x_i, z)) for every
/// probe z.
CostEvaluation evaluate(const ManifoldSpec& spec, const CostFamily& family,
                        const std::vector<ManifoldPoint>& tuple,
                        const KarcherOptions& opts = {});

/// Evaluates every support tuple of the given marginals. Deterministic for a
/// fixed seed regardless of thread count; entries are independent, so the
/// build parallelizes over them. Throws SizeCapError above opts.size_cap.
CostTensor build_tensor(const ManifoldSpec& spec, const CostFamily& family,
                        const std::vector<DiscreteMeasure>& measures,
                        const CostTensorOptions& opts = {});

/// Gradient of the cost in its first argument via the envelope identity:
/// grad_{x1} c = -(f_1'(d)/d) log_map(x1, ybar) with d = d(x1, ybar).
/// Throws NonUniqueError when the evaluation is flagged non-unique and
/// CutLocusError when ybar sits on the cut locus of x1.
TangentVector cost_gradient_x1(const ManifoldSpec& spec,
                               const CostFamily& family,
                               const std::vector<ManifoldPoint>& tuple,
                               const CostEvaluation& eval);

/// Inverts the envelope gradient back to the minimizer:
/// ybar = exp_{x1}(f_1'^{-1}(|g|) * (-g/|g|)). For the half-square profile
/// this is exp_{x1}(-g).
ManifoldPoint reconstruct_minimizer(const ManifoldSpec& spec,
                                    const CostFunction& f1,
                                    const ManifoldPoint& x1,
                                    const TangentVector& grad);

}  // namespace mmot
