#include "mmot/io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmot/errors.hpp"

namespace mmot {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid ") + what + " JSON: " + e.what());
  }
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(static_cast<int>(a.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json points_to_json(const std::vector<ManifoldPoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(vec_to_json(p.coords));
  return a;
}

json measure_to_json_obj(const DiscreteMeasure& mu) {
  json j;
  j["spec"] = json::parse(mu.spec.to_json());
  j["points"] = points_to_json(mu.points);
  j["weights"] = mu.weights;
  return j;
}

DiscreteMeasure measure_from_json_obj(const json& j) {
  DiscreteMeasure mu;
  mu.spec = ManifoldSpec::from_json(j.at("spec").dump());
  for (const auto& p : j.at("points"))
    mu.points.push_back(canonicalize(mu.spec, vec_from_json(p)));
  mu.weights = j.at("weights").get<std::vector<double>>();
  mu.validate();
  return mu;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw ConfigError("short write to " + path);
}

std::string measure_to_json(const DiscreteMeasure& mu) {
  return measure_to_json_obj(mu).dump(2);
}

DiscreteMeasure measure_from_json(const std::string& text) {
  return measure_from_json_obj(parse(text, "measure"));
}

std::string measures_to_json(const std::vector<DiscreteMeasure>& mus) {
  json j;
  j["marginals"] = json::array();
  for (const auto& mu : mus) j["marginals"].push_back(measure_to_json_obj(mu));
  return j.dump(2);
}

std::vector<DiscreteMeasure> measures_from_json(const std::string& text) {
  const json j = parse(text, "measures");
  std::vector<DiscreteMeasure> out;
  for (const auto& entry : j.at("marginals"))
    out.push_back(measure_from_json_obj(entry));
  return out;
}

std::string plan_to_json(const TransportPlan& plan) {
  json j;
  j["shape"] = plan.shape;
  j["source"] = to_string(plan.source);
  json entries = json::array();
  for (const auto& [idx, mass] : plan.entries)
    entries.push_back(json::array({idx, mass}));
  j["entries"] = std::move(entries);
  return j.dump(2);
}

TransportPlan plan_from_json(const std::string& text) {
  const json j = parse(text, "plan");
  TransportPlan plan;
  plan.shape = j.at("shape").get<std::vector<int>>();
  plan.source = plan_source_from_string(j.at("source").get<std::string>());
  for (const auto& e : j.at("entries"))
    plan.entries.emplace_back(e.at(0).get<std::vector<int>>(), e.at(1).get<double>());
  return plan;
}

void write_plan_csv(const std::string& path, const TransportPlan& plan) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.precision(17);
  for (std::size_t i = 0; i < plan.shape.size(); ++i) out << "i" << (i + 1) << ",";
  out << "mass\n";
  for (const auto& [idx, mass] : plan.entries) {
    for (int v : idx) out << v << ",";
    out << mass << "\n";
  }
}

std::string potentials_to_json(const DualPotentials& u) {
  json j;
  j["u"] = u.u;
  j["feasibility_residual"] = u.feasibility_residual;
  return j.dump(2);
}

DualPotentials potentials_from_json(const std::string& text) {
  const json j = parse(text, "potentials");
  DualPotentials u;
  u.u = j.at("u").get<std::vector<std::vector<double>>>();
  u.feasibility_residual = j.at("feasibility_residual").get<double>();
  return u;
}

void write_potentials_csv(const std::string& path, const DualPotentials& u) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.precision(17);
  out << "marginal,index,u\n";
  for (std::size_t i = 0; i < u.u.size(); ++i)
    for (std::size_t k = 0; k < u.u[i].size(); ++k)
      out << i << "," << k << "," << u.u[i][k] << "\n";
}

std::string report_to_json(const SolveReport& report) {
  json j;
  j["primal_value"] = report.primal_value;
  j["dual_value"] = report.dual_value;
  j["gap"] = report.gap;
  j["iterations"] = report.iterations;
  j["epsilon"] = report.epsilon;
  j["marginal_residuals"] = report.marginal_residuals;
  return j.dump(2);
}

SolveReport report_from_json(const std::string& text) {
  const json j = parse(text, "report");
  SolveReport r;
  r.primal_value = j.at("primal_value").get<double>();
  r.dual_value = j.at("dual_value").get<double>();
  r.gap = j.at("gap").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.epsilon = j.at("epsilon").get<double>();
  r.marginal_residuals = j.at("marginal_residuals").get<std::vector<double>>();
  return r;
}

std::string karcher_result_to_json(const KarcherResult& result) {
  json j;
  j["minimizers"] = points_to_json(result.minimizers);
  j["value"] = result.value;
  j["grad_norm"] = result.grad_norm;
  j["unique"] = result.unique;
  j["min_cut_margin"] = result.min_cut_margin;
  j["iterations"] = result.iterations;
  return j.dump(2);
}

std::string monge_table_to_json(const MongeMapTable& table) {
  json j;
  j["graph_fraction"] = table.graph_fraction;
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r;
    r["atom"] = row.atom;
    r["mass"] = row.mass;
    json partners = json::array();
    for (const auto& [idx, mass] : row.partners)
      partners.push_back(json::array({idx, mass}));
    r["partners"] = std::move(partners);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["maps"] = table.maps;
  return j.dump(2);
}

std::string barycenter_to_json(const BarycenterResult& result) {
  json j;
  j["nu"] = json::parse(measure_to_json(result.nu));
  json couplings = json::array();
  for (const auto& g : result.couplings) couplings.push_back(json::parse(plan_to_json(g)));
  j["couplings"] = std::move(couplings);
  j["objective"] = result.objective;
  j["nonunique_entries"] = result.nonunique_entries;
  return j.dump(2);
}

std::string checks_to_json(const std::vector<CheckReport>& checks) {
  json arr = json::array();
  bool all_pass = true;
  for (const auto& c : checks) {
    json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["worst"] = c.worst;
    j["tolerance"] = c.tolerance;
    j["detail"] = c.detail;
    arr.push_back(std::move(j));
    all_pass = all_pass && c.pass;
  }
  json out;
  out["checks"] = std::move(arr);
  out["all_pass"] = all_pass;
  return out.dump(2);
}

std::string tensor_argmin_to_json(const CostTensor& tensor) {
  json j;
  j["points"] = points_to_json(tensor.argmin);
  std::vector<int> unique(tensor.unique_flags.begin(), tensor.unique_flags.end());
  j["unique"] = unique;
  return j.dump();
}

void tensor_argmin_from_json(const std::string& text, CostTensor& tensor) {
  const json j = parse(text, "tensor argmin");
  tensor.argmin.clear();
  for (const auto& p : j.at("points"))
    tensor.argmin.push_back(ManifoldPoint{vec_from_json(p)});
  tensor.unique_flags.clear();
  for (const auto& f : j.at("unique"))
    tensor.unique_flags.push_back(static_cast<std::uint8_t>(f.get<int>()));
  if (tensor.argmin.size() != tensor.total() ||
      tensor.unique_flags.size() != tensor.total())
    throw ConfigError("tensor argmin cache does not match the tensor shape");
}

}  // namespace mmot
