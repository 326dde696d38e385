#include "mmot/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmot/analysis.hpp"
#include "mmot/errors.hpp"
#include "mmot/io.hpp"
#include "mmot/oracle.hpp"

namespace mmot {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct GeneratorCfg {
  std::string kind;  // uniform_random | cluster
  int n = 0;
  std::uint64_t seed = 0;
  double spread = 0.3;
  std::optional<Vec> center;
};

struct MarginalCfg {
  std::optional<DiscreteMeasure> explicit_measure;
  std::optional<GeneratorCfg> generator;
};

struct SolverCfg {
  std::string method = "exact";  // exact | sinkhorn
  SinkhornOptions sinkhorn;
  std::optional<double> gap_tol;
};

struct RunConfig {
  ManifoldSpec manifold;
  std::vector<MarginalCfg> marginals;
  CostFamily family;
  SolverCfg solver;
  KarcherOptions karcher;
  std::size_t size_cap = 1000000;
  std::vector<std::string> verifications;  // resolved list
  std::optional<double> min_graph_fraction;
  std::string output_dir;
  json echo;  // resolved config for persistence
};

json load_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cannot parse ") + path + ": " + e.what());
  }
}

ManifoldSpec manifold_from(const json& j) {
  if (!j.contains("manifold")) throw ConfigError("config needs a \"manifold\" object");
  return ManifoldSpec::from_json(j.at("manifold").dump());
}

KarcherOptions karcher_from(const json& j) {
  KarcherOptions k;
  if (!j.contains("karcher")) return k;
  const json& kj = j.at("karcher");
  if (kj.contains("starts")) k.starts = kj.at("starts").get<int>();
  if (kj.contains("max_iter")) k.max_iter = kj.at("max_iter").get<int>();
  if (kj.contains("grad_tol")) k.grad_tol = kj.at("grad_tol").get<double>();
  if (kj.contains("value_tol")) k.value_tol = kj.at("value_tol").get<double>();
  if (kj.contains("cluster_tol")) k.cluster_tol = kj.at("cluster_tol").get<double>();
  if (kj.contains("seed")) k.seed = kj.at("seed").get<std::uint64_t>();
  return k;
}

CostFamily family_from(const json& j, int m) {
  if (!j.contains("cost")) throw ConfigError("config needs a \"cost\" entry");
  const json& cj = j.at("cost");
  CostFamily family;
  if (cj.is_array()) {
    family = family_from_json(cj.dump());
    if (static_cast<int>(family.size()) != m)
      throw ConfigError("cost array length must match the marginal count");
  } else {
    family = uniform_family(m, CostFunction::from_json(cj.dump()));
  }
  return family;
}

void require_schema(const json& j) {
  if (!j.contains("schema") || j.at("schema").get<int>() != 1)
    throw ConfigError("config must declare \"schema\": 1");
}

RunConfig load_run_config(const std::string& path) {
  const json j = load_json_file(path);
  require_schema(j);

  RunConfig cfg;
  cfg.manifold = manifold_from(j);

  if (!j.contains("marginals") || !j.at("marginals").is_array() ||
      j.at("marginals").size() < 2)
    throw ConfigError("config needs at least two marginals");
  for (const auto& mj : j.at("marginals")) {
    MarginalCfg mc;
    if (mj.contains("generator")) {
      const json& g = mj.at("generator");
      GeneratorCfg gc;
      gc.kind = g.at("kind").get<std::string>();
      if (gc.kind != "uniform_random" && gc.kind != "cluster")
        throw ConfigError("unknown generator kind: " + gc.kind);
      gc.n = g.at("n").get<int>();
      if (gc.n < 1) throw ConfigError("generator n must be >= 1");
      if (!g.contains("seed"))
        throw ConfigError("generator seeds are mandatory for reproducibility");
      gc.seed = g.at("seed").get<std::uint64_t>();
      if (g.contains("spread")) gc.spread = g.at("spread").get<double>();
      if (g.contains("center")) {
        const auto c = g.at("center").get<std::vector<double>>();
        Vec v(static_cast<int>(c.size()));
        for (int i = 0; i < v.size(); ++i) v[i] = c[static_cast<std::size_t>(i)];
        gc.center = v;
      }
      mc.generator = std::move(gc);
    } else if (mj.contains("points")) {
      DiscreteMeasure mu;
      mu.spec = cfg.manifold;
      for (const auto& p : mj.at("points")) {
        const auto c = p.get<std::vector<double>>();
        Vec v(static_cast<int>(c.size()));
        for (int i = 0; i < v.size(); ++i) v[i] = c[static_cast<std::size_t>(i)];
        mu.points.push_back(canonicalize(cfg.manifold, v));
      }
      if (mj.contains("weights")) {
        mu.weights = mj.at("weights").get<std::vector<double>>();
      } else {
        mu = DiscreteMeasure::uniform(cfg.manifold, std::move(mu.points));
      }
      mu.validate();
      mc.explicit_measure = std::move(mu);
    } else {
      throw ConfigError("each marginal needs \"points\" or a \"generator\"");
    }
    cfg.marginals.push_back(std::move(mc));
  }

  cfg.family = family_from(j, static_cast<int>(cfg.marginals.size()));
  cfg.karcher = karcher_from(j);

  if (j.contains("solver")) {
    const json& sj = j.at("solver");
    cfg.solver.method = sj.value("method", std::string("exact"));
    if (cfg.solver.method != "exact" && cfg.solver.method != "sinkhorn")
      throw ConfigError("solver method must be exact or sinkhorn");
    if (sj.contains("epsilon_schedule")) {
      const json& ej = sj.at("epsilon_schedule");
      if (ej.is_array()) {
        cfg.solver.sinkhorn.epsilon_schedule = ej.get<std::vector<double>>();
      } else {
        cfg.solver.sinkhorn.epsilon_schedule =
            geometric_schedule(ej.value("first", 1.0), ej.value("last", 1e-3),
                               ej.value("factor", 0.5));
      }
    }
    if (sj.contains("max_iter")) cfg.solver.sinkhorn.max_iter = sj.at("max_iter").get<int>();
    if (sj.contains("tol")) cfg.solver.sinkhorn.tol = sj.at("tol").get<double>();
    if (sj.contains("gap_tol")) cfg.solver.gap_tol = sj.at("gap_tol").get<double>();
  }

  if (j.contains("size_cap")) cfg.size_cap = j.at("size_cap").get<std::size_t>();
  if (j.contains("min_graph_fraction"))
    cfg.min_graph_fraction = j.at("min_graph_fraction").get<double>();

  if (j.contains("verifications")) {
    cfg.verifications = j.at("verifications").get<std::vector<std::string>>();
  } else if (cfg.solver.method == "exact") {
    cfg.verifications = {"report_consistency",     "marginal_feasibility",
                         "weak_duality",           "duality_gap",
                         "dual_feasibility",       "support_equality",
                         "vertex_support_bound",   "c_monotonicity",
                         "monge_graph",            "barycenter_optimality",
                         "two_marginal_optimality", "composition"};
  } else {
    cfg.verifications = {"report_consistency", "marginal_feasibility",
                         "weak_duality", "duality_gap", "dual_feasibility",
                         "monge_graph"};
  }

  if (!j.contains("output_dir"))
    throw ConfigError("config needs an \"output_dir\"");
  cfg.output_dir = j.at("output_dir").get<std::string>();

  cfg.echo = j;
  cfg.echo["resolved_verifications"] = cfg.verifications;
  cfg.echo["resolved_method"] = cfg.solver.method;
  return cfg;
}

std::vector<DiscreteMeasure> materialize(const RunConfig& cfg) {
  std::vector<DiscreteMeasure> out;
  for (const auto& mc : cfg.marginals) {
    if (mc.explicit_measure) {
      out.push_back(*mc.explicit_measure);
    } else {
      const GeneratorCfg& g = *mc.generator;
      if (g.kind == "uniform_random") {
        out.push_back(random_measure(cfg.manifold, g.n, g.seed));
      } else {
        const ManifoldPoint center =
            g.center ? canonicalize(cfg.manifold, *g.center)
                     : random_point(cfg.manifold, mix_seed(g.seed, 0xC0FFEE));
        out.push_back(cluster_measure(cfg.manifold, g.n, center, g.spread, g.seed));
      }
    }
  }
  return out;
}

double sinkhorn_gap_bound(const SolveReport& report, const std::vector<int>& shape) {
  double log_total = 0.0;
  for (int n : shape) log_total += std::log(static_cast<double>(n));
  return 5.0 * report.epsilon * std::max(log_total, 1.0);
}

std::vector<CheckReport> run_verifications(
    const RunConfig& cfg, const CostTensor& tensor,
    const std::vector<DiscreteMeasure>& measures, const TransportPlan& plan,
    const DualPotentials& potentials, const SolveReport& report) {
  std::vector<CheckReport> checks;
  const bool exact = plan.source == PlanSource::exact_lp;

  std::optional<MongeMapTable> monge;
  std::optional<BarycenterResult> bary;
  auto get_monge = [&]() -> const MongeMapTable& {
    if (!monge) monge = extract_monge(plan, measures);
    return *monge;
  };
  auto get_bary = [&]() -> const BarycenterResult& {
    if (!bary) bary = pushforward_barycenter(plan, tensor);
    return *bary;
  };

  for (const std::string& name : cfg.verifications) {
    CheckReport c;
    c.name = name;
    if (name == "report_consistency") {
      double primal = 0.0;
      for (const auto& [idx, mass] : plan.entries)
        primal += mass * tensor.value_at(idx);
      const double dual = dual_objective(measures, potentials);
      c.tolerance = 1e-9;
      c.worst = std::max(std::abs(primal - report.primal_value),
                         std::abs(dual - report.dual_value));
      c.pass = c.worst <= c.tolerance;
      c.detail = "recomputed primal/dual match the persisted report";
    } else if (name == "marginal_feasibility") {
      c.tolerance = 1e-9;
      c.worst = 0.0;
      for (double r : plan.marginal_residuals(measures))
        c.worst = std::max(c.worst, r);
      c.pass = c.worst <= c.tolerance;
      c.detail = "plan marginals reproduce the input weights";
    } else if (name == "weak_duality") {
      c.tolerance = 1e-9;
      c.worst = std::max(0.0, -(report.primal_value - report.dual_value));
      c.pass = c.worst <= c.tolerance;
      c.detail = "dual value does not exceed the primal value";
    } else if (name == "duality_gap") {
      c.tolerance = exact ? 1e-8
                          : cfg.solver.gap_tol.value_or(
                                sinkhorn_gap_bound(report, plan.shape));
      c.worst = report.gap;
      c.pass = report.gap <= c.tolerance;
      c.detail = exact ? "exact LP certificate" : "entropic gap bound";
    } else if (name == "dual_feasibility") {
      c.tolerance = 1e-9;
      c.worst = std::max(0.0, oracle::exhaustive_dual_check(tensor, potentials));
      c.pass = c.worst <= c.tolerance;
      c.detail = "sum_i u_i <= c on every tuple";
    } else if (name == "support_equality") {
      if (!exact) {
        c.pass = true;
        c.detail = "skipped: only meaningful for exact plans";
      } else {
        c.tolerance = 1e-8;
        c.worst = support_equality_check(plan, tensor, potentials);
        c.pass = c.worst <= c.tolerance;
        c.detail = "sum_i u_i = c on the support";
      }
    } else if (name == "vertex_support_bound") {
      if (!exact) {
        c.pass = true;
        c.detail = "skipped: only meaningful for exact plans";
      } else {
        int bound = 1;
        for (int n : plan.shape) bound += n - 1;
        c.tolerance = static_cast<double>(bound);
        c.worst = static_cast<double>(plan.entries.size());
        c.pass = static_cast<int>(plan.entries.size()) <= bound;
        c.detail = "entry count within the vertex support bound";
      }
    } else if (name == "c_monotonicity") {
      if (!exact) {
        c.pass = true;
        c.detail = "skipped: only meaningful for exact plans";
      } else {
        c = check_c_monotonicity(plan, tensor);
      }
    } else if (name == "monge_graph") {
      const MongeMapTable& t = get_monge();
      c.tolerance = cfg.min_graph_fraction.value_or(0.0);
      c.worst = t.graph_fraction;
      c.pass = t.graph_fraction >= c.tolerance - 1e-12;
      c.detail = "graph_fraction=" + std::to_string(t.graph_fraction);
    } else if (name == "barycenter_optimality") {
      c = verify_barycenter_optimality(get_bary(), measures,
                                       report.primal_value, 10, 0.05,
                                       cfg.karcher.seed);
      if (!exact) {
        // entropic primal is only eps-close, report without failing
        c.pass = true;
        c.detail += " (informational for entropic runs)";
      }
    } else if (name == "two_marginal_optimality") {
      c = verify_two_marginal_optimality(get_bary(), measures);
      if (!exact) {
        c.pass = true;
        c.detail += " (informational for entropic runs)";
      }
    } else if (name == "composition") {
      const MongeMapTable& t = get_monge();
      c = verify_composition(t, get_bary());
      if (!t.is_graph()) {
        c.pass = true;
        c.detail += " (plan is not a graph; check limited to well-posed mass)";
      }
    } else {
      throw ConfigError("unknown verification: " + name);
    }
    if (c.name.empty()) c.name = name;
    checks.push_back(std::move(c));
  }
  return checks;
}

void persist_tensor(const fs::path& dir, const CostTensor& tensor) {
  tensor.write_binary((dir / "tensor.bin").string());
  tensor.write_csv((dir / "tensor.csv").string());
  write_file((dir / "tensor_argmin.json").string(), tensor_argmin_to_json(tensor));
  json meta;
  meta["spec"] = json::parse(tensor.spec.to_json());
  meta["family"] = json::parse(family_to_json(tensor.family));
  meta["shape"] = tensor.shape;
  write_file((dir / "tensor_meta.json").string(), meta.dump(2));
}

CostTensor load_tensor(const fs::path& dir) {
  CostTensor t = CostTensor::read_binary((dir / "tensor.bin").string());
  const json meta = load_json_file((dir / "tensor_meta.json").string());
  t.spec = ManifoldSpec::from_json(meta.at("spec").dump());
  t.family = family_from_json(meta.at("family").dump());
  tensor_argmin_from_json(read_file((dir / "tensor_argmin.json").string()), t);
  return t;
}

int cmd_solve(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path);
  const std::vector<DiscreteMeasure> measures = materialize(cfg);

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_file((dir / "config.json").string(), cfg.echo.dump(2));
  write_file((dir / "measures.json").string(), measures_to_json(measures));

  CostTensorOptions topts;
  topts.karcher = cfg.karcher;
  topts.size_cap = cfg.size_cap;
  const CostTensor tensor = build_tensor(cfg.manifold, cfg.family, measures, topts);
  persist_tensor(dir, tensor);

  SolveResult sol;
  if (cfg.solver.method == "exact") {
    sol = solve_exact(tensor, measures);
    // c-conjugate tightening keeps the certificate canonical
    for (int i = 0; i < tensor.order(); ++i)
      sol.potentials = c_conjugate(tensor, std::move(sol.potentials), i);
    sol.potentials.feasibility_residual =
        std::max(0.0, oracle::exhaustive_dual_check(tensor, sol.potentials));
    sol.report.dual_value = dual_objective(measures, sol.potentials);
    sol.report.gap = sol.report.primal_value - sol.report.dual_value;
  } else {
    sol = solve_sinkhorn(tensor, measures, cfg.solver.sinkhorn);
  }

  write_file((dir / "plan.json").string(), plan_to_json(sol.plan));
  write_plan_csv((dir / "plan.csv").string(), sol.plan);
  write_file((dir / "potentials.json").string(), potentials_to_json(sol.potentials));
  write_potentials_csv((dir / "potentials.csv").string(), sol.potentials);
  write_file((dir / "report.json").string(), report_to_json(sol.report));

  const MongeMapTable monge = extract_monge(sol.plan, measures);
  write_file((dir / "monge.json").string(), monge_table_to_json(monge));
  const BarycenterResult bary = pushforward_barycenter(sol.plan, tensor);
  write_file((dir / "barycenter.json").string(), barycenter_to_json(bary));

  const std::vector<CheckReport> checks = run_verifications(
      cfg, tensor, measures, sol.plan, sol.potentials, sol.report);
  write_file((dir / "verification.json").string(), checks_to_json(checks));

  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
              << "\n";
    all_pass = all_pass && c.pass;
  }
  std::cout << "run directory: " << dir.string() << "\n";
  return all_pass ? 0 : 1;
}

int cmd_gen(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path);
  const std::vector<DiscreteMeasure> measures = materialize(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_file((dir / "measures.json").string(), measures_to_json(measures));
  std::cout << "wrote " << (dir / "measures.json").string() << "\n";
  return 0;
}

int cmd_karcher(const std::string& config_path) {
  const json j = load_json_file(config_path);
  require_schema(j);
  KarcherProblem prob;
  prob.spec = manifold_from(j);
  if (!j.contains("points") || j.at("points").size() < 2)
    throw ConfigError("karcher config needs at least two points");
  for (const auto& p : j.at("points")) {
    const auto c = p.get<std::vector<double>>();
    Vec v(static_cast<int>(c.size()));
    for (int i = 0; i < v.size(); ++i) v[i] = c[static_cast<std::size_t>(i)];
    prob.points.push_back(canonicalize(prob.spec, v));
  }
  if (j.contains("weights"))
    prob.weights = j.at("weights").get<std::vector<double>>();
  prob.family = family_from(j, static_cast<int>(prob.points.size()));
  prob.validate();

  const KarcherOptions opts = karcher_from(j);
  if (!j.contains("output_dir")) throw ConfigError("config needs an \"output_dir\"");
  const fs::path dir(j.at("output_dir").get<std::string>());
  fs::create_directories(dir);

  const KarcherResult result = solve(prob, opts);
  write_file((dir / "karcher.json").string(), karcher_result_to_json(result));

  if (j.contains("grid_scan") && prob.spec.dim <= 2) {
    const int resolution = j.at("grid_scan").value("resolution", 200);
    std::ofstream out(dir / "scan.csv");
    out.precision(17);
    for (int i = 0; i < prob.spec.ambient_dim(); ++i) out << "c" << i << ",";
    out << "objective\n";
    for (const auto& p : scan_grid(prob, resolution)) {
      for (int i = 0; i < p.coords.size(); ++i) out << p.coords[i] << ",";
      out << objective(prob, p) << "\n";
    }
  }
  std::cout << "value " << result.value << " unique "
            << (result.unique ? "true" : "false") << " minimizers "
            << result.minimizers.size() << "\n";
  return 0;
}

int cmd_verify(const std::string& run_dir) {
  const fs::path dir(run_dir);
  if (!fs::exists(dir / "config.json"))
    throw ConfigError("no run found at " + run_dir);

  // rebuild the verification context from persisted artifacts only
  const json echo = load_json_file((dir / "config.json").string());
  RunConfig cfg;
  cfg.manifold = manifold_from(echo);
  cfg.verifications = echo.at("resolved_verifications").get<std::vector<std::string>>();
  cfg.solver.method = echo.at("resolved_method").get<std::string>();
  if (echo.contains("solver") && echo.at("solver").contains("gap_tol"))
    cfg.solver.gap_tol = echo.at("solver").at("gap_tol").get<double>();
  if (echo.contains("min_graph_fraction"))
    cfg.min_graph_fraction = echo.at("min_graph_fraction").get<double>();
  cfg.karcher = karcher_from(echo);

  const std::vector<DiscreteMeasure> measures =
      measures_from_json(read_file((dir / "measures.json").string()));
  const CostTensor tensor = load_tensor(dir);
  const TransportPlan plan = plan_from_json(read_file((dir / "plan.json").string()));
  const DualPotentials potentials =
      potentials_from_json(read_file((dir / "potentials.json").string()));
  const SolveReport report = report_from_json(read_file((dir / "report.json").string()));

  const std::vector<CheckReport> checks =
      run_verifications(cfg, tensor, measures, plan, potentials, report);
  write_file((dir / "verification_rerun.json").string(), checks_to_json(checks));

  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
              << "\n";
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"multi-marginal optimal transport on manifolds"};
  app.require_subcommand(1);

  std::string config_path;
  std::string run_dir;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "build the cost tensor, solve, analyze and verify");
  solve_cmd->add_option("-c,--config", config_path, "run configuration JSON")
      ->required();
  CLI::App* karcher_cmd =
      app.add_subcommand("karcher", "solve one barycenter problem");
  karcher_cmd->add_option("-c,--config", config_path, "karcher configuration JSON")
      ->required();
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "re-run the verification reports of a persisted run");
  verify_cmd->add_option("run_dir", run_dir, "run directory")->required();
  CLI::App* gen_cmd =
      app.add_subcommand("gen", "emit generated measures only");
  gen_cmd->add_option("-c,--config", config_path, "run configuration JSON")
      ->required();

  std::vector<const char*> argv;
  argv.push_back("mmot");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(config_path);
    if (karcher_cmd->parsed()) return cmd_karcher(config_path);
    if (verify_cmd->parsed()) return cmd_verify(run_dir);
    if (gen_cmd->parsed()) return cmd_gen(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace mmot
