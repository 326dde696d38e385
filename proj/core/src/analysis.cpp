#include "mmot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mmot/errors.hpp"

namespace mmot {

MongeMapTable extract_monge(const TransportPlan& plan,
                            const std::vector<DiscreteMeasure>& measures) {
  const int n1 = plan.shape.empty() ? 0 : plan.shape[0];
  const int m = static_cast<int>(plan.shape.size());
  MongeMapTable table;
  table.rows.resize(static_cast<std::size_t>(n1));
  for (int k = 0; k < n1; ++k) table.rows[static_cast<std::size_t>(k)].atom = k;

  for (const auto& e : plan.entries) {
    auto& row = table.rows[static_cast<std::size_t>(e.first[0])];
    row.mass += e.second;
    row.partners.push_back(e);
  }

  double graph_mass = 0.0;
  table.maps.assign(static_cast<std::size_t>(m - 1),
                    std::vector<int>(static_cast<std::size_t>(n1), -1));
  for (auto& row : table.rows) {
    if (row.partners.size() == 1) {
      graph_mass += row.mass;
      for (int i = 1; i < m; ++i)
        table.maps[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(row.atom)] =
            row.partners.front().first[static_cast<std::size_t>(i)];
    }
  }
  (void)measures;
  table.graph_fraction = graph_mass;  // plan mass sums to one
  return table;
}

BarycenterResult pushforward_barycenter(const TransportPlan& plan,
                                        const CostTensor& tensor,
                                        double merge_tol) {
  if (!tensor.has_argmin())
    throw ConfigError("pushforward needs a tensor with cached minimizers");
  const ManifoldSpec& spec = tensor.spec;
  const int m = static_cast<int>(plan.shape.size());

  // collect the pushed points, then merge clusters closer than merge_tol
  struct Pushed {
    std::size_t flat;
    ManifoldPoint y;
    double mass;
  };
  std::vector<Pushed> pushed;
  BarycenterResult out;
  for (const auto& [idx, mass] : plan.entries) {
    const std::size_t flat = flatten_index(tensor.shape, idx);
    if (!tensor.unique_flags.empty() && tensor.unique_flags[flat] == 0)
      out.nonunique_entries.push_back(flat);
    pushed.push_back(Pushed{flat, tensor.argmin[flat], mass});
  }

  const std::size_t np = pushed.size();
  std::vector<int> cluster(np, -1);
  std::vector<ManifoldPoint> reps;
  // order candidates lexicographically so representatives are deterministic
  std::vector<std::size_t> order(np);
  for (std::size_t i = 0; i < np; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(pushed[a].y.coords, pushed[b].y.coords);
  });
  for (std::size_t oi : order) {
    int found = -1;
    for (std::size_t r = 0; r < reps.size(); ++r)
      if (distance(spec, reps[r], pushed[oi].y) <= merge_tol) {
        found = static_cast<int>(r);
        break;
      }
    if (found < 0) {
      reps.push_back(pushed[oi].y);
      found = static_cast<int>(reps.size()) - 1;
    }
    cluster[oi] = found;
  }

  std::vector<double> nu_weights(reps.size(), 0.0);
  for (std::size_t i = 0; i < np; ++i)
    nu_weights[static_cast<std::size_t>(cluster[i])] += pushed[i].mass;

  out.nu.spec = spec;
  out.nu.points = reps;
  out.nu.weights = nu_weights;

  // gamma_i = pushforward of the plan by (projection_i, minimizer)
  out.couplings.resize(static_cast<std::size_t>(m));
  out.objective.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    std::map<std::pair<int, int>, double> cells;
    for (std::size_t e = 0; e < np; ++e) {
      const auto& idx = plan.entries[e].first;
      cells[{idx[static_cast<std::size_t>(i)], cluster[e]}] += pushed[e].mass;
    }
    TransportPlan& gi = out.couplings[static_cast<std::size_t>(i)];
    gi.shape = {plan.shape[static_cast<std::size_t>(i)], static_cast<int>(reps.size())};
    gi.source = PlanSource::pushforward;
    for (const auto& [cell, mass] : cells)
      gi.entries.emplace_back(std::vector<int>{cell.first, cell.second}, mass);
  }
  return out;
}

namespace {

// two-marginal LP value with cost d^2 between explicit measures
double pairwise_d2_value(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> costs;
  costs.reserve(static_cast<std::size_t>(a.size()) * static_cast<std::size_t>(b.size()));
  for (int x = 0; x < a.size(); ++x)
    for (int y = 0; y < b.size(); ++y) {
      const double d = distance(a.spec, a.points[static_cast<std::size_t>(x)],
                                b.points[static_cast<std::size_t>(y)]);
      costs.push_back(d * d);
    }
  const CostTensor t =
      CostTensor::from_values(a.spec, {a.size(), b.size()}, std::move(costs));
  return solve_exact(t, {a, b}).report.primal_value;
}

}  // namespace

double w22(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return pairwise_d2_value(a, b);
}

CheckReport verify_barycenter_optimality(const BarycenterResult& result,
                                         const std::vector<DiscreteMeasure>& measures,
                                         double primal_value, int jitter_count,
                                         double jitter_scale, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "barycenter_optimality";
  rep.tolerance = 1e-7;

  double b_nu = 0.0;
  for (const auto& mu : measures) b_nu += 0.5 * w22(mu, result.nu);
  const double equality_gap = std::abs(b_nu - primal_value);
  rep.worst = equality_gap;

  double worst_improvement = 0.0;
  for (int j = 0; j < jitter_count; ++j) {
    DiscreteMeasure cand = result.nu;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
    for (auto& p : cand.points) {
      TangentVector t = random_unit_tangent(cand.spec, p, rng);
      t.components *= jitter_scale;
      p = exp_map(cand.spec, p, t);
    }
    double b_cand = 0.0;
    for (const auto& mu : measures) b_cand += 0.5 * w22(mu, cand);
    worst_improvement = std::max(worst_improvement, b_nu - b_cand);
  }
  rep.worst = std::max(rep.worst, worst_improvement);
  rep.pass = equality_gap <= rep.tolerance && worst_improvement <= rep.tolerance;

  std::ostringstream os;
  os << "B(nu)=" << b_nu << " primal=" << primal_value
     << " |gap|=" << equality_gap << " best_jitter_improvement="
     << worst_improvement << " over " << jitter_count << " candidates";
  rep.detail = os.str();
  return rep;
}

CheckReport verify_two_marginal_optimality(const BarycenterResult& result,
                                           const std::vector<DiscreteMeasure>& measures) {
  CheckReport rep;
  rep.name = "two_marginal_optimality";
  rep.tolerance = 1e-7;
  double worst = 0.0;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    // cost of gamma_i under d^2
    double coupling_value = 0.0;
    for (const auto& [cell, mass] : result.couplings[i].entries) {
      const double d = distance(measures[i].spec,
                                measures[i].points[static_cast<std::size_t>(cell[0])],
                                result.nu.points[static_cast<std::size_t>(cell[1])]);
      coupling_value += mass * d * d;
    }
    const double optimal = w22(measures[i], result.nu);
    worst = std::max(worst, std::abs(coupling_value - optimal));
  }
  rep.worst = worst;
  rep.pass = worst <= rep.tolerance;
  std::ostringstream os;
  os << "max |cost(gamma_i) - W22(mu_i, nu)| = " << worst;
  rep.detail = os.str();
  return rep;
}

CheckReport verify_composition(const MongeMapTable& table,
                               const BarycenterResult& result) {
  CheckReport rep;
  rep.name = "composition_structure";
  rep.tolerance = 0.0;

  const int m = static_cast<int>(result.couplings.size());
  // gamma_1 partner of each first-marginal atom; -1 marks a split atom
  std::vector<int> nu_of_atom;
  if (!result.couplings.empty()) {
    const auto& g1 = result.couplings.front();
    nu_of_atom.assign(static_cast<std::size_t>(g1.shape[0]), -1);
    std::vector<int> count(static_cast<std::size_t>(g1.shape[0]), 0);
    for (const auto& [cell, mass] : g1.entries) {
      ++count[static_cast<std::size_t>(cell[0])];
      nu_of_atom[static_cast<std::size_t>(cell[0])] = cell[1];
    }
    for (std::size_t k = 0; k < count.size(); ++k)
      if (count[k] != 1) nu_of_atom[k] = -1;
  }

  double well_posed_mass = 0.0;
  double passing_mass = 0.0;
  for (const auto& row : table.rows) {
    if (row.partners.size() != 1) continue;
    const int y = nu_of_atom[static_cast<std::size_t>(row.atom)];
    if (y < 0) continue;
    well_posed_mass += row.mass;
    bool ok = true;
    for (int i = 1; i < m; ++i) {
      const int partner = table.maps[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(row.atom)];
      bool found = false;
      for (const auto& [cell, mass] : result.couplings[static_cast<std::size_t>(i)].entries)
        if (cell[0] == partner && cell[1] == y && mass > 0.0) {
          found = true;
          break;
        }
      if (!found) {
        ok = false;
        break;
      }
    }
    if (ok) passing_mass += row.mass;
  }

  rep.worst = well_posed_mass - passing_mass;
  rep.pass = passing_mass >= well_posed_mass;
  std::ostringstream os;
  os << "well_posed_mass=" << well_posed_mass << " commuting_mass=" << passing_mass;
  rep.detail = os.str();
  return rep;
}

CheckReport check_c_monotonicity(const TransportPlan& plan,
                                 const CostTensor& tensor, double tol) {
  CheckReport rep;
  rep.name = "c_monotonicity";
  rep.tolerance = tol;
  double worst = 0.0;
  const int m = static_cast<int>(plan.shape.size());
  for (std::size_t a = 0; a < plan.entries.size(); ++a)
    for (std::size_t b = a + 1; b < plan.entries.size(); ++b) {
      const auto& ia = plan.entries[a].first;
      const auto& ib = plan.entries[b].first;
      const double base = tensor.value_at(ia) + tensor.value_at(ib);
      for (int i = 0; i < m; ++i) {
        if (ia[static_cast<std::size_t>(i)] == ib[static_cast<std::size_t>(i)]) continue;
        std::vector<int> sa = ia, sb = ib;
        std::swap(sa[static_cast<std::size_t>(i)], sb[static_cast<std::size_t>(i)]);
        worst = std::max(worst, base - tensor.value_at(sa) - tensor.value_at(sb));
      }
    }
  rep.worst = worst;
  rep.pass = worst <= tol;
  std::ostringstream os;
  os << "worst swap improvement " << worst << " over "
     << plan.entries.size() << " support tuples";
  rep.detail = os.str();
  return rep;
}

}  // namespace mmot
