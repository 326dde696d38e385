#pragma once

#include <string>

#include "mmot/analysis.hpp"
#include "mmot/frechet.hpp"
#include "mmot/measure.hpp"
#include "mmot/solver.hpp"

namespace mmot {

std::string read_file(const std::string& path);            // ConfigError
void write_file(const std::string& path, const std::string& content);

std::string measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const std::string& text);

std::string measures_to_json(const std::vector<DiscreteMeasure>& mus);
std::vector<DiscreteMeasure> measures_from_json(const std::string& text);

/// {"shape": [...], "source": "...", "entries": [[[i1,...,im], mass], ...]}
std::string plan_to_json(const TransportPlan& plan);
TransportPlan plan_from_json(const std::string& text);
void write_plan_csv(const std::string& path, const TransportPlan& plan);

/// {"u": [[...], ...], "feasibility_residual": r}
std::string potentials_to_json(const DualPotentials& u);
DualPotentials potentials_from_json(const std::string& text);
void write_potentials_csv(const std::string& path, const DualPotentials& u);

std::string report_to_json(const SolveReport& report);
SolveReport report_from_json(const std::string& text);

std::string karcher_result_to_json(const KarcherResult& result);

std::string monge_table_to_json(const MongeMapTable& table);

std::string barycenter_to_json(const BarycenterResult& result);

std::string checks_to_json(const std::vector<CheckReport>& checks);

/// Cached tensor minimizers: {"points": [[...], ...], "unique": [0/1, ...]}
std::string tensor_argmin_to_json(const CostTensor& tensor);
void tensor_argmin_from_json(const std::string& text, CostTensor& tensor);

}  // namespace mmot
