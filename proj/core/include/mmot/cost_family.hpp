#pragma once

#include <string>
#include <vector>

namespace mmot {

/// Per-marginal cost profile f(t): C^2, strictly increasing and strictly
/// convex on [0, inf) with f(0) = f'(0) = 0. The half-square profile gives
/// the squared-distance barycenter cost; the others generalize it.
struct CostFunction {
  enum class Kind { half_square, power, cosh_minus_one };

  Kind kind = Kind::half_square;
  double exponent = 3.0;  // power only; must be > 2 so f is C^2 at 0

  static CostFunction half_square();
  static CostFunction power(double p);  // throws ConfigError unless p > 2
  static CostFunction cosh_minus_one();

  double value(double t) const;
  double derivative(double t) const;

  /// f'(t)/t extended continuously to t = 0.
  double derivative_over_t(double t) const;

  /// Inverse of f' on [0, inf); recovers a distance from a gradient norm.
  double derivative_inverse(double s) const;

  std::string to_json() const;
  static CostFunction from_json(const std::string& text);
};

bool operator==(const CostFunction& a, const CostFunction& b);

/// One profile per marginal.
using CostFamily = std::vector<CostFunction>;

CostFamily uniform_family(int m, const CostFunction& f);

std::string family_to_json(const CostFamily& family);
CostFamily family_from_json(const std::string& text);

}  // namespace mmot
