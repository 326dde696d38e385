#include "mmot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/errors.hpp"
#include "mmot/parallel.hpp"
#include "mmot/simplex.hpp"

namespace mmot {

std::string to_string(PlanSource s) {
  switch (s) {
    case PlanSource::exact_lp: return "exact_lp";
    case PlanSource::sinkhorn_rounded: return "sinkhorn_rounded";
    case PlanSource::pushforward: return "pushforward";
  }
  return "exact_lp";
}

PlanSource plan_source_from_string(const std::string& s) {
  if (s == "exact_lp") return PlanSource::exact_lp;
  if (s == "sinkhorn_rounded") return PlanSource::sinkhorn_rounded;
  if (s == "pushforward") return PlanSource::pushforward;
  throw ConfigError("unknown plan source: " + s);
}

double TransportPlan::total_mass() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.second;
  return s;
}

std::vector<std::vector<double>> TransportPlan::marginals() const {
  std::vector<std::vector<double>> out;
  for (int n : shape) out.emplace_back(static_cast<std::size_t>(n), 0.0);
  for (const auto& [idx, mass] : entries)
    for (std::size_t i = 0; i < idx.size(); ++i)
      out[i][static_cast<std::size_t>(idx[i])] += mass;
  return out;
}

std::vector<double> TransportPlan::marginal_residuals(
    const std::vector<DiscreteMeasure>& mu) const {
  const auto got = marginals();
  std::vector<double> res(shape.size(), 0.0);
  for (std::size_t i = 0; i < shape.size(); ++i)
    for (std::size_t k = 0; k < got[i].size(); ++k)
      res[i] = std::max(res[i], std::abs(got[i][k] - mu[i].weights[k]));
  return res;
}

namespace {

void check_inputs(const CostTensor& tensor,
                  const std::vector<DiscreteMeasure>& measures,
                  std::size_t cap) {
  if (tensor.shape.size() != measures.size())
    throw ConfigError("tensor order does not match the marginal count");
  for (std::size_t i = 0; i < measures.size(); ++i) {
    measures[i].validate();
    if (measures[i].size() != tensor.shape[i])
      throw ConfigError("marginal size does not match the tensor shape");
  }
  if (tensor.total() > cap)
    throw SizeCapError("instance exceeds the solver size cap");
}

double exhaustive_feasibility_residual(const CostTensor& tensor,
                                       const DualPotentials& u) {
  double worst = 0.0;
  const std::size_t total = tensor.total();
  const auto& shape = tensor.shape;
  std::vector<int> idx(shape.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double s = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i)
      s += u.u[i][static_cast<std::size_t>(idx[i])];
    worst = std::max(worst, s - tensor.values[flat]);
    int i = static_cast<int>(shape.size()) - 1;
    while (i >= 0 && ++idx[i] == shape[i]) idx[i--] = 0;
  }
  return worst;
}

}  // namespace

SolveResult solve_exact(const CostTensor& tensor,
                        const std::vector<DiscreteMeasure>& measures) {
  check_inputs(tensor, measures, 100000);
  const int m = tensor.order();
  const auto& shape = tensor.shape;

  // Row layout: all of block 1, then each later block minus its last atom
  // (those rows are implied by the block sums); dropped atoms get dual 0.
  std::vector<int> row_offset(m);
  int n_rows = 0;
  for (int i = 0; i < m; ++i) {
    row_offset[i] = n_rows;
    n_rows += i == 0 ? shape[i] : shape[i] - 1;
  }

  UnitColumnLp lp;
  lp.n_rows = n_rows;
  lp.n_cols = tensor.total();
  lp.rhs.resize(n_rows);
  for (int i = 0; i < m; ++i) {
    const int kept = i == 0 ? shape[i] : shape[i] - 1;
    for (int k = 0; k < kept; ++k)
      lp.rhs[static_cast<std::size_t>(row_offset[i] + k)] = measures[i].weights[k];
  }
  const std::vector<std::size_t> strides = shape_strides(shape);
  lp.cost = [&tensor](std::size_t col) { return tensor.values[col]; };
  lp.rows_of = [&shape, &strides, &row_offset, m](std::size_t col,
                                                  std::vector<int>& rows) {
    rows.clear();
    for (int i = 0; i < m; ++i) {
      const int k = static_cast<int>((col / strides[i]) % static_cast<std::size_t>(shape[i]));
      if (i == 0 || k < shape[i] - 1) rows.push_back(row_offset[i] + k);
    }
  };

  const SimplexSolution sol = solve_unit_lp(lp);

  SolveResult out;
  out.plan.shape = shape;
  out.plan.source = PlanSource::exact_lp;
  for (const auto& [col, mass] : sol.basic)
    out.plan.entries.emplace_back(unflatten_index(shape, col), mass);

  out.potentials.u.resize(m);
  for (int i = 0; i < m; ++i) {
    out.potentials.u[i].assign(static_cast<std::size_t>(shape[i]), 0.0);
    const int kept = i == 0 ? shape[i] : shape[i] - 1;
    for (int k = 0; k < kept; ++k)
      out.potentials.u[i][static_cast<std::size_t>(k)] =
          sol.duals[static_cast<std::size_t>(row_offset[i] + k)];
  }
  out.potentials.feasibility_residual =
      exhaustive_feasibility_residual(tensor, out.potentials);

  out.report.primal_value = sol.objective;
  out.report.dual_value = dual_objective(measures, out.potentials);
  out.report.gap = out.report.primal_value - out.report.dual_value;
  out.report.iterations = sol.iterations;
  out.report.epsilon = 0.0;
  out.report.marginal_residuals = out.plan.marginal_residuals(measures);
  return out;
}

std::vector<double> geometric_schedule(double first, double last, double factor) {
  if (!(first >= last) || !(factor > 0.0 && factor < 1.0) || !(last > 0.0))
    throw ConfigError("bad epsilon schedule parameters");
  std::vector<double> s;
  for (double e = first; e > last * (1.0 + 1e-12); e *= factor) s.push_back(e);
  s.push_back(last);
  return s;
}

namespace {

// logsumexp over each slice {idx_i = k} of
//   sum_{j != i} (u[j][idx_j]/eps + log w[j][idx_j]) - c/eps,
// evaluated per k with a max shift; result[k] is the slice's log mass.
std::vector<double> slice_logsumexp(const CostTensor& tensor,
                                    const std::vector<std::vector<double>>& f,
                                    int axis) {
  const auto& shape = tensor.shape;
  const int m = tensor.order();
  const std::vector<std::size_t> strides = shape_strides(shape);
  const int nk = shape[axis];
  const std::size_t slice_size = tensor.total() / static_cast<std::size_t>(nk);

  std::vector<double> result(static_cast<std::size_t>(nk));
  parallel_for(static_cast<std::size_t>(nk), [&](std::size_t kb, std::size_t ke) {
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (std::size_t k = kb; k < ke; ++k) {
      // walk the slice twice: max, then shifted accumulation
      double mx = -std::numeric_limits<double>::infinity();
      for (int pass = 0; pass < 2; ++pass) {
        double acc = 0.0;
        std::fill(idx.begin(), idx.end(), 0);
        idx[static_cast<std::size_t>(axis)] = static_cast<int>(k);
        for (std::size_t s = 0; s < slice_size; ++s) {
          std::size_t flat = 0;
          double t = 0.0;
          for (int j = 0; j < m; ++j) {
            flat += static_cast<std::size_t>(idx[j]) * strides[j];
            if (j != axis) t += f[j][static_cast<std::size_t>(idx[j])];
          }
          t -= tensor.values[flat];
          if (pass == 0) {
            mx = std::max(mx, t);
          } else {
            acc += std::exp(t - mx);
          }
          int j = m - 1;
          while (j >= 0) {
            if (j == axis) { --j; continue; }
            if (++idx[j] < shape[j]) break;
            idx[j--] = 0;
          }
        }
        if (pass == 1) result[k] = mx + std::log(acc);
      }
    }
  });
  return result;
}

}  // namespace

SolveResult solve_sinkhorn(const CostTensor& tensor,
                           const std::vector<DiscreteMeasure>& measures,
                           const SinkhornOptions& opts) {
  check_inputs(tensor, measures, 1000000);
  const int m = tensor.order();
  const auto& shape = tensor.shape;
  const std::vector<double> schedule =
      opts.epsilon_schedule.empty() ? geometric_schedule(1.0, 1e-3, 0.5)
                                    : opts.epsilon_schedule;

  std::vector<std::vector<double>> u(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> logw(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    u[i].assign(static_cast<std::size_t>(shape[i]), 0.0);
    logw[i].resize(static_cast<std::size_t>(shape[i]));
    for (int k = 0; k < shape[i]; ++k)
      logw[i][static_cast<std::size_t>(k)] = std::log(measures[i].weights[k]);
  }

  // CostTensor with values scaled by 1/eps is what slice_logsumexp wants;
  // rescale on the fly through f and a scaled view instead of copying.
  CostTensor scaled = CostTensor::from_values(tensor.spec, shape, tensor.values);

  int total_sweeps = 0;
  double final_eps = schedule.back();
  for (double eps : schedule) {
    for (std::size_t t = 0; t < tensor.values.size(); ++t)
      scaled.values[t] = tensor.values[t] / eps;

    const bool last_level = eps == schedule.back();
    int sweep = 0;
    double residual = std::numeric_limits<double>::infinity();
    for (; sweep < opts.max_iter; ++sweep) {
      std::vector<std::vector<double>> f(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        f[i].resize(static_cast<std::size_t>(shape[i]));
        for (int k = 0; k < shape[i]; ++k)
          f[i][static_cast<std::size_t>(k)] =
              u[i][static_cast<std::size_t>(k)] / eps + logw[i][static_cast<std::size_t>(k)];
      }
      for (int i = 0; i < m; ++i) {
        const std::vector<double> lse = slice_logsumexp(scaled, f, i);
        for (int k = 0; k < shape[i]; ++k) {
          u[i][static_cast<std::size_t>(k)] = -eps * lse[static_cast<std::size_t>(k)];
          f[i][static_cast<std::size_t>(k)] =
              u[i][static_cast<std::size_t>(k)] / eps + logw[i][static_cast<std::size_t>(k)];
        }
      }
      ++total_sweeps;

      // marginal residual of the implicit plan (marginal m is exact)
      residual = 0.0;
      for (int i = 0; i + 1 < m; ++i) {
        const std::vector<double> lse = slice_logsumexp(scaled, f, i);
        double l1 = 0.0;
        for (int k = 0; k < shape[i]; ++k)
          l1 += std::abs(std::exp(f[i][static_cast<std::size_t>(k)] +
                                  lse[static_cast<std::size_t>(k)]) -
                         measures[i].weights[k]);
        residual = std::max(residual, l1);
      }
      if (residual <= opts.tol) break;
    }
    if (last_level && residual > opts.tol)
      throw IterationLimitError(
          "sinkhorn did not reach the marginal tolerance at the final epsilon");
  }

  // densify the final plan, then round the marginals exact
  const std::size_t total = tensor.total();
  std::vector<double> gamma(total);
  {
    const std::vector<std::size_t> strides = shape_strides(shape);
    parallel_for(total, [&](std::size_t b, std::size_t e) {
      for (std::size_t flat = b; flat < e; ++flat) {
        double t = -tensor.values[flat] / final_eps;
        for (int j = 0; j < m; ++j) {
          const int k = static_cast<int>((flat / strides[j]) % static_cast<std::size_t>(shape[j]));
          t += u[j][static_cast<std::size_t>(k)] / final_eps +
               logw[j][static_cast<std::size_t>(k)];
        }
        gamma[flat] = std::exp(t);
      }
    });
  }

  const std::vector<std::size_t> strides = shape_strides(shape);
  auto marginal_of = [&](int i) {
    std::vector<double> p(static_cast<std::size_t>(shape[i]), 0.0);
    for (std::size_t flat = 0; flat < total; ++flat)
      p[(flat / strides[i]) % static_cast<std::size_t>(shape[i])] += gamma[flat];
    return p;
  };
  for (int i = 0; i < m; ++i) {
    std::vector<double> p = marginal_of(i);
    std::vector<double> scale(p.size(), 1.0);
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p[k] > measures[i].weights[k])
        scale[k] = measures[i].weights[k] / p[k];
    for (std::size_t flat = 0; flat < total; ++flat)
      gamma[flat] *= scale[(flat / strides[i]) % static_cast<std::size_t>(shape[i])];
  }
  std::vector<std::vector<double>> deficit(static_cast<std::size_t>(m));
  double deficit_total = 0.0;
  for (int i = 0; i < m; ++i) {
    const std::vector<double> p = marginal_of(i);
    deficit[i].resize(p.size());
    double di = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      deficit[i][k] = std::max(0.0, measures[i].weights[k] - p[k]);
      di += deficit[i][k];
    }
    if (i == 0) deficit_total = di;
  }
  if (deficit_total > 0.0) {
    const double denom = std::pow(deficit_total, m - 1);
    for (std::size_t flat = 0; flat < total; ++flat) {
      double corr = 1.0 / denom;
      for (int j = 0; j < m; ++j)
        corr *= deficit[j][(flat / strides[j]) % static_cast<std::size_t>(shape[j])];
      gamma[flat] += corr;
    }
  }

  SolveResult out;
  out.plan.shape = shape;
  out.plan.source = PlanSource::sinkhorn_rounded;
  double primal = 0.0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (gamma[flat] > 0.0)
      out.plan.entries.emplace_back(unflatten_index(shape, flat), gamma[flat]);
    primal += gamma[flat] * tensor.values[flat];
  }

  // feasible dual certificate: conjugate-tighten a copy of the potentials
  DualPotentials pot;
  pot.u = u;
  for (int i = 0; i < m; ++i) pot = c_conjugate(tensor, std::move(pot), i);
  pot.feasibility_residual = exhaustive_feasibility_residual(tensor, pot);
  out.potentials = std::move(pot);

  out.report.primal_value = primal;
  out.report.dual_value = dual_objective(measures, out.potentials);
  out.report.gap = out.report.primal_value - out.report.dual_value;
  out.report.iterations = total_sweeps;
  out.report.epsilon = final_eps;
  out.report.marginal_residuals = out.plan.marginal_residuals(measures);
  return out;
}

DualPotentials c_conjugate(const CostTensor& tensor, DualPotentials u, int i) {
  const auto& shape = tensor.shape;
  const int m = tensor.order();
  if (i < 0 || i >= m) throw ConfigError("c_conjugate coordinate out of range");
  if (static_cast<int>(u.u.size()) != m)
    throw ConfigError("potential count does not match the tensor order");
  const std::vector<std::size_t> strides = shape_strides(shape);

  std::vector<double> best(static_cast<std::size_t>(shape[i]),
                           std::numeric_limits<double>::infinity());
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  for (std::size_t flat = 0; flat < tensor.total(); ++flat) {
    double s = tensor.values[flat];
    for (int j = 0; j < m; ++j)
      if (j != i) s -= u.u[j][static_cast<std::size_t>(idx[j])];
    auto& slot = best[static_cast<std::size_t>(idx[i])];
    slot = std::min(slot, s);
    int j = m - 1;
    while (j >= 0 && ++idx[j] == shape[j]) idx[j--] = 0;
  }
  u.u[static_cast<std::size_t>(i)] = std::move(best);
  return u;
}

double dual_objective(const std::vector<DiscreteMeasure>& measures,
                      const DualPotentials& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < measures.size(); ++i)
    for (int k = 0; k < measures[i].size(); ++k)
      s += u.u[i][static_cast<std::size_t>(k)] * measures[i].weights[k];
  return s;
}

double support_equality_check(const TransportPlan& plan,
                              const CostTensor& tensor,
                              const DualPotentials& u) {
  double worst = 0.0;
  for (const auto& [idx, mass] : plan.entries) {
    double s = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      s += u.u[i][static_cast<std::size_t>(idx[i])];
    worst = std::max(worst, std::abs(s - tensor.value_at(idx)));
  }
  return worst;
}

}  // namespace mmot
