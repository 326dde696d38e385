#include "mmot/manifold.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "mmot/errors.hpp"

namespace mmot {

namespace {

// sin(t)/t, stable through t = 0.
double sinc(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

// t/sin(t), stable through t = 0.
double inv_sinc(double t) {
  if (std::abs(t) < 1e-8) return 1.0 + t * t / 6.0;
  return t / std::sin(t);
}

// Wraps a coordinate into [0, period).
double wrap_coord(double c, double period) {
  double w = std::fmod(c, period);
  if (w < 0.0) w += period;
  if (w >= period) w = 0.0;  // fmod can land exactly on period after the add
  return w;
}

// Signed wrapped difference y - x in [-period/2, period/2].
double wrap_diff(double x, double y, double period) {
  return std::remainder(y - x, period);
}

}  // namespace

ManifoldSpec ManifoldSpec::sphere(int dim) {
  ManifoldSpec s;
  s.kind = ManifoldKind::sphere;
  s.dim = dim;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::torus(int dim) {
  ManifoldSpec s;
  s.kind = ManifoldKind::torus;
  s.dim = dim;
  s.period = Vec::Ones(dim);
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::torus(const Vec& period) {
  ManifoldSpec s;
  s.kind = ManifoldKind::torus;
  s.dim = static_cast<int>(period.size());
  s.period = period;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::euclidean(int dim) {
  ManifoldSpec s;
  s.kind = ManifoldKind::euclidean;
  s.dim = dim;
  s.validate();
  return s;
}

void ManifoldSpec::validate() const {
  if (dim < 1) throw ConfigError("manifold dim must be >= 1");
  switch (kind) {
    case ManifoldKind::sphere:
      if (dim > 2) throw ConfigError("sphere supported for dim 1 and 2 only");
      break;
    case ManifoldKind::torus:
      if (dim > 4) throw ConfigError("torus supported for dim <= 4");
      if (period.size() != dim)
        throw ConfigError("torus period must have one entry per coordinate");
      for (int j = 0; j < dim; ++j)
        if (!(period[j] > 0.0)) throw ConfigError("torus periods must be positive");
      break;
    case ManifoldKind::euclidean:
      if (dim > 4) throw ConfigError("euclidean space supported for dim <= 4");
      break;
  }
}

bool operator==(const ManifoldSpec& a, const ManifoldSpec& b) {
  if (a.kind != b.kind || a.dim != b.dim) return false;
  if (a.kind == ManifoldKind::torus) return a.period == b.period;
  return true;
}

std::string ManifoldSpec::to_json() const {
  nlohmann::json j;
  switch (kind) {
    case ManifoldKind::sphere: j["kind"] = "sphere"; break;
    case ManifoldKind::torus: j["kind"] = "torus"; break;
    case ManifoldKind::euclidean: j["kind"] = "euclidean"; break;
  }
  j["dim"] = dim;
  if (kind == ManifoldKind::torus) {
    std::vector<double> p(period.data(), period.data() + period.size());
    j["period"] = p;
  }
  return j.dump();
}

ManifoldSpec ManifoldSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid manifold JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j.contains("dim"))
    throw ConfigError("manifold JSON needs \"kind\" and \"dim\"");
  const std::string kind = j["kind"].get<std::string>();
  const int dim = j["dim"].get<int>();
  if (kind == "sphere") return sphere(dim);
  if (kind == "euclidean") return euclidean(dim);
  if (kind == "torus") {
    if (j.contains("period")) {
      const auto p = j["period"].get<std::vector<double>>();
      if (static_cast<int>(p.size()) != dim)
        throw ConfigError("torus period length must equal dim");
      Vec period(dim);
      for (int k = 0; k < dim; ++k) period[k] = p[k];
      return torus(period);
    }
    return torus(dim);
  }
  throw ConfigError("unknown manifold kind: " + kind);
}

bool is_valid_point(const ManifoldSpec& spec, const ManifoldPoint& p,
                    double tol) {
  if (p.coords.size() != spec.ambient_dim()) return false;
  switch (spec.kind) {
    case ManifoldKind::sphere:
      return std::abs(p.coords.norm() - 1.0) <= tol;
    case ManifoldKind::torus:
      for (int j = 0; j < spec.dim; ++j)
        if (p.coords[j] < 0.0 || p.coords[j] >= spec.period[j]) return false;
      return true;
    case ManifoldKind::euclidean:
      return p.coords.allFinite();
  }
  return false;
}

ManifoldPoint canonicalize(const ManifoldSpec& spec, Vec coords) {
  if (coords.size() != spec.ambient_dim())
    throw ConfigError("point has wrong coordinate count for the manifold");
  switch (spec.kind) {
    case ManifoldKind::sphere: {
      const double n = coords.norm();
      if (std::abs(n - 1.0) > 1e-6)
        throw ConfigError("sphere point norm deviates from 1 by more than 1e-6");
      coords /= n;
      break;
    }
    case ManifoldKind::torus:
      for (int j = 0; j < spec.dim; ++j)
        coords[j] = wrap_coord(coords[j], spec.period[j]);
      break;
    case ManifoldKind::euclidean:
      break;
  }
  return ManifoldPoint{std::move(coords)};
}

TangentVector make_tangent(const ManifoldSpec& spec, const ManifoldPoint& base,
                           Vec components) {
  if (components.size() != spec.ambient_dim())
    throw ConfigError("tangent components have wrong size");
  if (spec.kind == ManifoldKind::sphere)
    components -= base.coords.dot(components) * base.coords;
  return TangentVector{base, std::move(components)};
}

double distance(const ManifoldSpec& spec, const ManifoldPoint& x,
                const ManifoldPoint& y) {
  switch (spec.kind) {
    case ManifoldKind::sphere: {
      const double dot = x.coords.dot(y.coords);
      const Vec perp = y.coords - dot * x.coords;
      return std::atan2(perp.norm(), dot);
    }
    case ManifoldKind::torus: {
      double s = 0.0;
      for (int j = 0; j < spec.dim; ++j) {
        const double d = wrap_diff(x.coords[j], y.coords[j], spec.period[j]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case ManifoldKind::euclidean:
      return (y.coords - x.coords).norm();
  }
  return 0.0;
}

ManifoldPoint exp_map(const ManifoldSpec& spec, const ManifoldPoint& x,
                      const TangentVector& v) {
  switch (spec.kind) {
    case ManifoldKind::sphere: {
      const double theta = v.components.norm();
      if (theta == 0.0) return x;
      Vec c = std::cos(theta) * x.coords + sinc(theta) * v.components;
      c /= c.norm();  // control drift
      return ManifoldPoint{std::move(c)};
    }
    case ManifoldKind::torus: {
      Vec c = x.coords + v.components;
      for (int j = 0; j < spec.dim; ++j) c[j] = wrap_coord(c[j], spec.period[j]);
      return ManifoldPoint{std::move(c)};
    }
    case ManifoldKind::euclidean:
      return ManifoldPoint{x.coords + v.components};
  }
  return x;
}

TangentVector log_map(const ManifoldSpec& spec, const ManifoldPoint& x,
                      const ManifoldPoint& y) {
  switch (spec.kind) {
    case ManifoldKind::sphere: {
      const double dot = x.coords.dot(y.coords);
      const Vec perp = y.coords - dot * x.coords;
      const double theta = std::atan2(perp.norm(), dot);
      if (M_PI - theta <= kCutLocusTol)
        throw CutLocusError("log_map at the antipode: no unique geodesic");
      if (theta == 0.0) return TangentVector{x, Vec::Zero(x.coords.size())};
      // perp has length sin(theta); rescale to arc length.
      return TangentVector{x, perp * inv_sinc(theta)};
    }
    case ManifoldKind::torus: {
      Vec d(spec.dim);
      for (int j = 0; j < spec.dim; ++j) {
        d[j] = wrap_diff(x.coords[j], y.coords[j], spec.period[j]);
        if (spec.period[j] / 2.0 - std::abs(d[j]) <= kCutLocusTol)
          throw CutLocusError(
              "log_map at half-period offset: two equal-length wraps");
      }
      return TangentVector{x, std::move(d)};
    }
    case ManifoldKind::euclidean:
      return TangentVector{x, y.coords - x.coords};
  }
  return TangentVector{x, Vec()};
}

double cut_locus_margin(const ManifoldSpec& spec, const ManifoldPoint& x,
                        const ManifoldPoint& y) {
  switch (spec.kind) {
    case ManifoldKind::sphere:
      return M_PI - distance(spec, x, y);
    case ManifoldKind::torus: {
      double margin = kNoCutLocus;
      for (int j = 0; j < spec.dim; ++j) {
        const double d = std::abs(wrap_diff(x.coords[j], y.coords[j], spec.period[j]));
        margin = std::min(margin, spec.period[j] / 2.0 - d);
      }
      return margin;
    }
    case ManifoldKind::euclidean:
      return kNoCutLocus;
  }
  return kNoCutLocus;
}

ManifoldPoint random_point(const ManifoldSpec& spec, Rng& rng) {
  const int n = spec.ambient_dim();
  Vec c(n);
  switch (spec.kind) {
    case ManifoldKind::sphere: {
      double norm = 0.0;
      do {
        for (int j = 0; j < n; ++j) c[j] = rng.normal();
        norm = c.norm();
      } while (norm < 1e-8);
      c /= norm;
      break;
    }
    case ManifoldKind::torus:
      for (int j = 0; j < n; ++j) c[j] = rng.uniform(0.0, spec.period[j]);
      break;
    case ManifoldKind::euclidean:
      for (int j = 0; j < n; ++j) c[j] = rng.uniform();
      break;
  }
  return ManifoldPoint{std::move(c)};
}

ManifoldPoint random_point(const ManifoldSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return random_point(spec, rng);
}

TangentVector random_unit_tangent(const ManifoldSpec& spec,
                                  const ManifoldPoint& x, Rng& rng) {
  const int n = spec.ambient_dim();
  Vec c(n);
  double norm = 0.0;
  do {
    for (int j = 0; j < n; ++j) c[j] = rng.normal();
    if (spec.kind == ManifoldKind::sphere) c -= x.coords.dot(c) * x.coords;
    norm = c.norm();
  } while (norm < 1e-8);
  return TangentVector{x, c / norm};
}

std::vector<TangentVector> tangent_basis(const ManifoldSpec& spec,
                                         const ManifoldPoint& x) {
  std::vector<TangentVector> basis;
  switch (spec.kind) {
    case ManifoldKind::sphere: {
      if (spec.dim == 1) {
        Vec t(2);
        t << -x.coords[1], x.coords[0];
        basis.push_back(TangentVector{x, std::move(t)});
      } else {
        // axis least aligned with x, Gram-Schmidt, then the cross product
        int axis = 0;
        for (int j = 1; j < 3; ++j)
          if (std::abs(x.coords[j]) < std::abs(x.coords[axis])) axis = j;
        Vec b1 = Vec::Zero(3);
        b1[axis] = 1.0;
        b1 -= x.coords.dot(b1) * x.coords;
        b1 /= b1.norm();
        Vec b2(3);
        b2[0] = x.coords[1] * b1[2] - x.coords[2] * b1[1];
        b2[1] = x.coords[2] * b1[0] - x.coords[0] * b1[2];
        b2[2] = x.coords[0] * b1[1] - x.coords[1] * b1[0];
        basis.push_back(TangentVector{x, std::move(b1)});
        basis.push_back(TangentVector{x, std::move(b2)});
      }
      break;
    }
    case ManifoldKind::torus:
    case ManifoldKind::euclidean:
      for (int j = 0; j < spec.dim; ++j) {
        Vec e = Vec::Zero(spec.dim);
        e[j] = 1.0;
        basis.push_back(TangentVector{x, std::move(e)});
      }
      break;
  }
  return basis;
}

bool lex_less(const Vec& a, const Vec& b) {
  const int n = static_cast<int>(std::min(a.size(), b.size()));
  for (int j = 0; j < n; ++j) {
    if (a[j] < b[j]) return true;
    if (a[j] > b[j]) return false;
  }
  return a.size() < b.size();
}

}  // namespace mmot
