#include "mmot/cost_family.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "mmot/errors.hpp"

namespace mmot {

CostFunction CostFunction::half_square() { return CostFunction{Kind::half_square, 2.0}; }

CostFunction CostFunction::power(double p) {
  if (!(p > 2.0))
    throw ConfigError("power cost requires exponent > 2 (use half_square for 2)");
  return CostFunction{Kind::power, p};
}

CostFunction CostFunction::cosh_minus_one() {
  return CostFunction{Kind::cosh_minus_one, 2.0};
}

double CostFunction::value(double t) const {
  switch (kind) {
    case Kind::half_square: return 0.5 * t * t;
    case Kind::power: return std::pow(t, exponent) / exponent;
    case Kind::cosh_minus_one: return std::cosh(t) - 1.0;
  }
  return 0.0;
}

double CostFunction::derivative(double t) const {
  switch (kind) {
    case Kind::half_square: return t;
    case Kind::power: return std::pow(t, exponent - 1.0);
    case Kind::cosh_minus_one: return std::sinh(t);
  }
  return 0.0;
}

double CostFunction::derivative_over_t(double t) const {
  switch (kind) {
    case Kind::half_square: return 1.0;
    case Kind::power: return std::pow(t, exponent - 2.0);
    case Kind::cosh_minus_one:
      if (std::abs(t) < 1e-8) return 1.0 + t * t / 6.0;
      return std::sinh(t) / t;
  }
  return 0.0;
}

double CostFunction::derivative_inverse(double s) const {
  switch (kind) {
    case Kind::half_square: return s;
    case Kind::power: return std::pow(s, 1.0 / (exponent - 1.0));
    case Kind::cosh_minus_one: return std::asinh(s);
  }
  return 0.0;
}

bool operator==(const CostFunction& a, const CostFunction& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == CostFunction::Kind::power) return a.exponent == b.exponent;
  return true;
}

std::string CostFunction::to_json() const {
  nlohmann::json j;
  switch (kind) {
    case Kind::half_square: j["f"] = "half_square"; break;
    case Kind::power:
      j["f"] = "power";
      j["p"] = exponent;
      break;
    case Kind::cosh_minus_one: j["f"] = "cosh_minus_one"; break;
  }
  return j.dump();
}

namespace {

CostFunction cost_from_json_obj(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("f"))
    throw ConfigError("cost entry must be an object with an \"f\" field");
  const std::string f = j["f"].get<std::string>();
  if (f == "half_square") return CostFunction::half_square();
  if (f == "cosh_minus_one") return CostFunction::cosh_minus_one();
  if (f == "power") {
    if (!j.contains("p")) throw ConfigError("power cost needs \"p\"");
    return CostFunction::power(j["p"].get<double>());
  }
  throw ConfigError("unknown cost profile: " + f);
}

}  // namespace

CostFunction CostFunction::from_json(const std::string& text) {
  try {
    return cost_from_json_obj(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cost JSON: ") + e.what());
  }
}

CostFamily uniform_family(int m, const CostFunction& f) {
  return CostFamily(static_cast<std::size_t>(m), f);
}

std::string family_to_json(const CostFamily& family) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : family) arr.push_back(nlohmann::json::parse(f.to_json()));
  return arr.dump();
}

CostFamily family_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid cost family JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("cost family JSON must be an array");
  CostFamily family;
  for (const auto& entry : j) family.push_back(cost_from_json_obj(entry));
  return family;
}

}  // namespace mmot
