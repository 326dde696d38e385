#include "mmot/measure.hpp"

#include <cmath>

#include "mmot/errors.hpp"

namespace mmot {

void DiscreteMeasure::validate() const {
  spec.validate();
  if (points.empty()) throw ConfigError("measure needs at least one point");
  if (points.size() != weights.size())
    throw ConfigError("measure point/weight counts differ");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ConfigError("measure weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("measure weights must sum to 1 within 1e-12");
  for (const auto& p : points)
    if (!is_valid_point(spec, p))
      throw ConfigError("measure point is not on the manifold");
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      if (distance(spec, points[a], points[b]) <= 1e-9)
        throw ConfigError("measure support points must be pairwise distinct");
}

DiscreteMeasure DiscreteMeasure::uniform(const ManifoldSpec& spec,
                                         std::vector<ManifoldPoint> points) {
  DiscreteMeasure mu;
  mu.spec = spec;
  const int n = static_cast<int>(points.size());
  mu.points = std::move(points);
  mu.weights.assign(n, 1.0 / n);
  // kill the summation residue so the 1e-12 invariant holds for every n
  double sum = 0.0;
  for (int k = 0; k + 1 < n; ++k) sum += mu.weights[k];
  if (n > 0) mu.weights[n - 1] = 1.0 - sum;
  mu.validate();
  return mu;
}

namespace {

// Draws until the candidate is at least min_sep away from everything kept.
ManifoldPoint draw_distinct(const ManifoldSpec& spec, Rng& rng,
                            const std::vector<ManifoldPoint>& kept,
                            const ManifoldPoint* center, double spread) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    ManifoldPoint p;
    if (center) {
      TangentVector t = random_unit_tangent(spec, *center, rng);
      t.components *= spread * std::abs(rng.normal());
      p = exp_map(spec, *center, t);
    } else {
      p = random_point(spec, rng);
    }
    bool ok = true;
    for (const auto& q : kept)
      if (distance(spec, p, q) <= 1e-8) {
        ok = false;
        break;
      }
    if (ok) return p;
  }
  throw NumericalError("could not sample distinct support points");
}

}  // namespace

DiscreteMeasure random_measure(const ManifoldSpec& spec, int n,
                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ManifoldPoint> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k)
    pts.push_back(draw_distinct(spec, rng, pts, nullptr, 0.0));
  return DiscreteMeasure::uniform(spec, std::move(pts));
}

DiscreteMeasure cluster_measure(const ManifoldSpec& spec, int n,
                                const ManifoldPoint& center, double spread,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ManifoldPoint> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k)
    pts.push_back(draw_distinct(spec, rng, pts, &center, spread));
  return DiscreteMeasure::uniform(spec, std::move(pts));
}

}  // namespace mmot
