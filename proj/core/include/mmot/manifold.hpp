#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mmot/rng.hpp"

namespace mmot {

/// Coordinate vector; every supported space embeds in at most R^4.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

enum class ManifoldKind { sphere, torus, euclidean };

/// Margin value reported where a manifold has no cut locus.
inline constexpr double kNoCutLocus = 1e30;

/// Distance to the cut locus below which log maps refuse to pick a geodesic.
inline constexpr double kCutLocusTol = 1e-10;

/// One of the three model spaces: the unit sphere S^n (n = 1, 2) as unit
/// vectors in R^{n+1}, the flat torus T^k with per-coordinate periods, or
/// Euclidean R^k (k in [1, 4]).
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::euclidean;
  int dim = 1;
  Vec period;  // torus only; one positive entry per coordinate

  static ManifoldSpec sphere(int dim);
  static ManifoldSpec torus(int dim);  // all periods 1
  static ManifoldSpec torus(const Vec& period);
  static ManifoldSpec euclidean(int dim);

  /// Length of the coordinate vector: dim + 1 for the sphere, dim otherwise.
  int ambient_dim() const { return kind == ManifoldKind::sphere ? dim + 1 : dim; }

  void validate() const;  // throws ConfigError

  std::string to_json() const;
  static ManifoldSpec from_json(const std::string& text);
};

bool operator==(const ManifoldSpec& a, const ManifoldSpec& b);

/// A point in canonical coordinates: unit vector (sphere), fundamental-domain
/// coordinates in [0, period) (torus), or plain coordinates (euclidean).
struct ManifoldPoint {
  Vec coords;
};

/// A tangent vector in the canonical chart at its base point; sphere
/// components live in the ambient space orthogonal to the base.
struct TangentVector {
  ManifoldPoint base;
  Vec components;

  double norm() const { return components.norm(); }
};

/// Validates coordinates against the spec (unit norm within tol for spheres,
/// fundamental domain for tori, matching length everywhere).
bool is_valid_point(const ManifoldSpec& spec, const ManifoldPoint& p,
                    double tol = 1e-9);

/// Wraps/renormalizes raw coordinates onto the manifold. Throws ConfigError
/// if they are too far off to be a plausible representation (sphere norm
/// deviating by more than 1e-6).
ManifoldPoint canonicalize(const ManifoldSpec& spec, Vec coords);

/// Projects raw components into the tangent space at base.
TangentVector make_tangent(const ManifoldSpec& spec, const ManifoldPoint& base,
                           Vec components);

/// Geodesic distance. Symmetric, zero iff equal; total on valid points.
double distance(const ManifoldSpec& spec, const ManifoldPoint& x,
                const ManifoldPoint& y);

/// Point at arc length |v| along the geodesic leaving x with velocity v.
ManifoldPoint exp_map(const ManifoldSpec& spec, const ManifoldPoint& x,
                      const TangentVector& v);

/// Inverse of exp_map: the unique v with exp_map(x, v) = y and
/// |v| = distance(x, y). Throws CutLocusError when y is within kCutLocusTol
/// of the cut locus of x (sphere: the antipode; torus: any coordinate
/// difference of exactly half a period).
TangentVector log_map(const ManifoldSpec& spec, const ManifoldPoint& x,
                      const ManifoldPoint& y);

/// Nonnegative gap between y and the cut locus of x; kNoCutLocus on
/// Euclidean space.
double cut_locus_margin(const ManifoldSpec& spec, const ManifoldPoint& x,
                        const ManifoldPoint& y);

/// Deterministic sample: uniform w.r.t. surface measure on spheres, uniform
/// in the fundamental domain on tori, uniform in [0,1)^k on Euclidean space
/// (measures there are required to have bounded support).
ManifoldPoint random_point(const ManifoldSpec& spec, Rng& rng);
ManifoldPoint random_point(const ManifoldSpec& spec, std::uint64_t seed);

/// Deterministic random unit tangent at x.
TangentVector random_unit_tangent(const ManifoldSpec& spec,
                                  const ManifoldPoint& x, Rng& rng);

/// Orthonormal basis of the tangent space at x.
std::vector<TangentVector> tangent_basis(const ManifoldSpec& spec,
                                         const ManifoldPoint& x);

/// Lexicographic coordinate order; used to make clustering deterministic.
bool lex_less(const Vec& a, const Vec& b);

}  // namespace mmot
