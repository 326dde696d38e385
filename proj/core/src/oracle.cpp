#include "mmot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmot/errors.hpp"

namespace mmot::oracle {

void OracleConfig::validate() const {
  if (grid_resolution < 10) throw ConfigError("oracle grid resolution must be >= 10");
  if (fd_step < 1e-8 || fd_step > 1e-3)
    throw ConfigError("oracle fd_step must lie in [1e-8, 1e-3]");
}

AssignmentResult enumerate_assignments(const CostTensor& tensor,
                                       const std::vector<DiscreteMeasure>& measures,
                                       const OracleConfig& cfg) {
  cfg.validate();
  const int m = tensor.order();
  if (m < 2) throw ConfigError("assignment oracle needs m >= 2");
  const int n = tensor.shape[0];
  for (const auto& mu : measures) {
    if (mu.size() != n)
      throw ConfigError("assignment oracle needs equal-size marginals");
    for (double w : mu.weights)
      if (std::abs(w - 1.0 / n) > 1e-12)
        throw ConfigError("assignment oracle needs uniform marginals");
  }

  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  if (std::pow(factorial, m - 1) > static_cast<double>(cfg.enumeration_cap))
    throw CapError("assignment enumeration exceeds the cap");

  // odometer over (m-1) permutations of 0..n-1
  std::vector<std::vector<int>> sigma(static_cast<std::size_t>(m - 1));
  for (auto& s : sigma) {
    s.resize(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
  }

  std::vector<int> best_flat;  // flattened best assignment, sigma-major
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(m));
  while (true) {
    double value = 0.0;
    for (int k = 0; k < n; ++k) {
      idx[0] = k;
      for (int i = 1; i < m; ++i)
        idx[static_cast<std::size_t>(i)] =
            sigma[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)];
      value += tensor.value_at(idx) / n;
    }
    if (value < best_value) {
      best_value = value;
      best_flat.clear();
      for (const auto& s : sigma) best_flat.insert(best_flat.end(), s.begin(), s.end());
    }
    // advance: next_permutation on the last slot, carrying left
    int slot = m - 2;
    while (slot >= 0 &&
           !std::next_permutation(sigma[static_cast<std::size_t>(slot)].begin(),
                                  sigma[static_cast<std::size_t>(slot)].end()))
      --slot;
    if (slot < 0) break;
  }

  AssignmentResult out;
  out.value = best_value;
  out.plan.shape = tensor.shape;
  out.plan.source = PlanSource::exact_lp;
  for (int k = 0; k < n; ++k) {
    std::vector<int> tuple(static_cast<std::size_t>(m));
    tuple[0] = k;
    for (int i = 1; i < m; ++i)
      tuple[static_cast<std::size_t>(i)] =
          best_flat[static_cast<std::size_t>((i - 1) * n + k)];
    out.plan.entries.emplace_back(std::move(tuple), 1.0 / n);
  }
  std::sort(out.plan.entries.begin(), out.plan.entries.end());
  return out;
}

double exhaustive_dual_check(const CostTensor& tensor, const DualPotentials& u) {
  const auto& shape = tensor.shape;
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(shape.size(), 0);
  for (std::size_t flat = 0; flat < tensor.total(); ++flat) {
    double s = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i)
      s += u.u[i][static_cast<std::size_t>(idx[i])];
    worst = std::max(worst, s - tensor.values[flat]);
    int i = static_cast<int>(shape.size()) - 1;
    while (i >= 0 && ++idx[i] == shape[i]) idx[i--] = 0;
  }
  return worst;
}

TangentVector fd_gradient(const std::function<double(const ManifoldPoint&)>& objective,
                          const ManifoldSpec& spec, const ManifoldPoint& point,
                          double fd_step) {
  Vec g = Vec::Zero(spec.ambient_dim());
  for (const TangentVector& e : tangent_basis(spec, point)) {
    TangentVector step = e;
    step.components *= fd_step;
    const ManifoldPoint plus = exp_map(spec, point, step);
    step.components = -step.components;
    const ManifoldPoint minus = exp_map(spec, point, step);
    const double deriv = (objective(plus) - objective(minus)) / (2.0 * fd_step);
    g += deriv * e.components;
  }
  return TangentVector{point, std::move(g)};
}

}  // namespace mmot::oracle
