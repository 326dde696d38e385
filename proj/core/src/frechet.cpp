#include "mmot/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mmot/errors.hpp"

namespace mmot {

void KarcherProblem::validate() const {
  spec.validate();
  if (points.size() < 2) throw ConfigError("Karcher problem needs m >= 2 points");
  if (family.size() != points.size())
    throw ConfigError("cost family size must match point count");
  if (!weights.empty()) {
    if (weights.size() != points.size())
      throw ConfigError("weight count must match point count");
    for (double w : weights)
      if (!(w > 0.0)) throw ConfigError("Karcher weights must be positive");
  }
  for (const auto& p : points)
    if (!is_valid_point(spec, p))
      throw ConfigError("Karcher problem point is not on the manifold");
}

double objective(const KarcherProblem& prob, const ManifoldPoint& y) {
  double s = 0.0;
  for (int i = 0; i < prob.size(); ++i)
    s += prob.weight(i) * prob.family[i].value(distance(prob.spec, prob.points[i], y));
  return s;
}

TangentVector gradient(const KarcherProblem& prob, const ManifoldPoint& y) {
  Vec g = Vec::Zero(prob.spec.ambient_dim());
  for (int i = 0; i < prob.size(); ++i) {
    const double d = distance(prob.spec, prob.points[i], y);
    if (d == 0.0) continue;  // f'(0) = 0 kills the term
    const TangentVector lg = log_map(prob.spec, y, prob.points[i]);
    g -= prob.weight(i) * prob.family[i].derivative_over_t(d) * lg.components;
  }
  return TangentVector{y, std::move(g)};
}

namespace {

struct Candidate {
  ManifoldPoint point;
  double value = 0.0;
  double grad_norm = 0.0;
};

// One gradient-descent run. Returns nothing when the start fails to converge.
std::optional<Candidate> descend(const KarcherProblem& prob, ManifoldPoint y,
                                 const KarcherOptions& opts, Rng& rng,
                                 int& iterations) {
  const double step0 = 1.0 / static_cast<double>(prob.size());
  constexpr double kArmijo = 1e-4;
  int cut_restarts = 0;

  double fy = objective(prob, y);
  for (int it = 0; it < opts.max_iter; ++it) {
    ++iterations;
    TangentVector g{y, Vec()};
    try {
      g = gradient(prob, y);
    } catch (const CutLocusError&) {
      // true minimizers stay clear of cut loci, so nudge and carry on
      if (++cut_restarts > 32) return std::nullopt;
      TangentVector t = random_unit_tangent(prob.spec, y, rng);
      t.components *= 1e-4;
      y = exp_map(prob.spec, y, t);
      fy = objective(prob, y);
      continue;
    }
    const double gnorm = g.norm();
    if (gnorm <= opts.grad_tol)
      return Candidate{y, fy, gnorm};

    double step = step0;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving) {
      TangentVector d{y, -step * g.components};
      ManifoldPoint y_next = exp_map(prob.spec, y, d);
      const double f_next = objective(prob, y_next);
      const double required = kArmijo * step * gnorm * gnorm;
      // below float resolution of the objective the test is noise; accept
      if (f_next <= fy - required || required <= 1e-15 * (1.0 + std::abs(fy))) {
        y = std::move(y_next);
        fy = f_next;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

KarcherResult solve(const KarcherProblem& prob, const KarcherOptions& opts) {
  prob.validate();

  std::vector<Candidate> candidates;
  int iterations = 0;
  const int total_starts = prob.size() + opts.starts;
  for (int s = 0; s < total_starts; ++s) {
    Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(s)));
    ManifoldPoint start = s < prob.size()
                              ? prob.points[static_cast<std::size_t>(s)]
                              : random_point(prob.spec, rng);
    if (auto c = descend(prob, std::move(start), opts, rng, iterations))
      candidates.push_back(std::move(*c));
  }
  if (candidates.empty())
    throw ConvergenceError("no Karcher descent start reached the gradient tolerance");

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, c.value);

  std::vector<Candidate> near_best;
  for (auto& c : candidates)
    if (c.value <= best + opts.value_tol) near_best.push_back(std::move(c));
  std::sort(near_best.begin(), near_best.end(),
            [](const Candidate& a, const Candidate& b) {
              return lex_less(a.point.coords, b.point.coords);
            });

  // greedy merge at cluster_tol; representatives are lexicographically first
  std::vector<Candidate> clusters;
  for (auto& c : near_best) {
    bool merged = false;
    for (auto& rep : clusters)
      if (distance(prob.spec, rep.point, c.point) <= opts.cluster_tol) {
        if (c.value < rep.value) {
          rep.value = c.value;
          rep.grad_norm = c.grad_norm;
        }
        merged = true;
        break;
      }
    if (!merged) clusters.push_back(std::move(c));
  }

  const Candidate* best_cluster = &clusters.front();
  for (const auto& c : clusters)
    if (c.value < best_cluster->value) best_cluster = &c;

  KarcherResult res;
  for (const auto& c : clusters) res.minimizers.push_back(c.point);
  res.value = best_cluster->value;
  res.grad_norm = best_cluster->grad_norm;
  res.unique = clusters.size() == 1;
  res.iterations = iterations;
  res.min_cut_margin = kNoCutLocus;
  for (const auto& x : prob.points)
    res.min_cut_margin = std::min(
        res.min_cut_margin, cut_locus_margin(prob.spec, x, best_cluster->point));
  return res;
}

namespace {

std::vector<ManifoldPoint> sphere_grid(const ManifoldSpec& spec, int resolution) {
  std::vector<ManifoldPoint> grid;
  grid.reserve(resolution);
  if (spec.dim == 1) {
    for (int k = 0; k < resolution; ++k) {
      const double a = 2.0 * M_PI * k / resolution;
      Vec c(2);
      c << std::cos(a), std::sin(a);
      grid.push_back(ManifoldPoint{std::move(c)});
    }
  } else {
    // Fibonacci lattice
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < resolution; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / resolution;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * k;
      Vec c(3);
      c << r * std::cos(a), r * std::sin(a), z;
      c /= c.norm();
      grid.push_back(ManifoldPoint{std::move(c)});
    }
  }
  return grid;
}

std::vector<ManifoldPoint> box_grid(const KarcherProblem& prob, int resolution) {
  const ManifoldSpec& spec = prob.spec;
  const int dim = spec.dim;
  std::vector<double> lo(dim), hi(dim);
  if (spec.kind == ManifoldKind::torus) {
    for (int j = 0; j < dim; ++j) {
      lo[j] = 0.0;
      hi[j] = spec.period[j];
    }
  } else {
    // pad the bounding box of the data; the minimizer lies in the hull
    for (int j = 0; j < dim; ++j) {
      lo[j] = std::numeric_limits<double>::infinity();
      hi[j] = -std::numeric_limits<double>::infinity();
      for (const auto& p : prob.points) {
        lo[j] = std::min(lo[j], p.coords[j]);
        hi[j] = std::max(hi[j], p.coords[j]);
      }
      const double pad = 0.05 * (hi[j] - lo[j]) + 1e-9;
      lo[j] -= pad;
      hi[j] += pad;
    }
  }

  std::vector<ManifoldPoint> grid;
  std::vector<int> idx(dim, 0);
  const bool torus = spec.kind == ManifoldKind::torus;
  while (true) {
    Vec c(dim);
    for (int j = 0; j < dim; ++j) {
      if (torus)
        c[j] = (idx[j] + 0.5) * (hi[j] - lo[j]) / resolution;
      else
        c[j] = resolution == 1
                   ? 0.5 * (lo[j] + hi[j])
                   : lo[j] + (hi[j] - lo[j]) * idx[j] / (resolution - 1);
    }
    grid.push_back(ManifoldPoint{std::move(c)});
    int j = dim - 1;
    while (j >= 0 && ++idx[j] == resolution) idx[j--] = 0;
    if (j < 0) break;
  }
  return grid;
}

}  // namespace

std::vector<ManifoldPoint> scan_grid(const KarcherProblem& prob,
                                     int grid_resolution) {
  prob.validate();
  if (grid_resolution < 10) throw ConfigError("grid resolution must be >= 10");
  if (prob.spec.dim > 2)
    throw ConfigError("grid search supports dim <= 2");
  return prob.spec.kind == ManifoldKind::sphere
             ? sphere_grid(prob.spec, grid_resolution)
             : box_grid(prob, grid_resolution);
}

KarcherResult brute_force(const KarcherProblem& prob, int grid_resolution) {
  const std::vector<ManifoldPoint> grid = scan_grid(prob, grid_resolution);

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values[k] = objective(prob, grid[k]);
    best = std::min(best, values[k]);
  }

  KarcherResult res;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (values[k] <= best + 1e-9) res.minimizers.push_back(grid[k]);
  std::sort(res.minimizers.begin(), res.minimizers.end(),
            [](const ManifoldPoint& a, const ManifoldPoint& b) {
              return lex_less(a.coords, b.coords);
            });
  const ManifoldPoint* best_point = nullptr;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& p : res.minimizers) {
    const double v = objective(prob, p);
    if (v < best_val) {
      best_val = v;
      best_point = &p;
    }
  }
  res.value = best_val;
  res.unique = res.minimizers.size() == 1;
  res.iterations = static_cast<int>(grid.size());
  res.min_cut_margin = kNoCutLocus;
  for (const auto& x : prob.points)
    res.min_cut_margin =
        std::min(res.min_cut_margin, cut_locus_margin(prob.spec, x, *best_point));
  try {
    res.grad_norm = gradient(prob, *best_point).norm();
  } catch (const CutLocusError&) {
    res.grad_norm = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

}  // namespace mmot
