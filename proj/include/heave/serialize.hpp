#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "heave/evolution.hpp"
#include "heave/graph.hpp"
#include "heave/matrix.hpp"
#include "heave/simulate.hpp"
#include "heave/var.hpp"

// JSON wire formats. Graphs are {"n", "edges" (0-based pairs),
// "node_names"}; hierarchies are {"levels"}; matrices are dense row-major
// nested arrays. ordered_json keeps key order stable so identical inputs
// serialize byte-identically.

namespace heave::serialize {

using json = nlohmann::ordered_json;

json graph_to_json(const graph::Digraph& g, const std::vector<std::string>& node_names = {});
graph::Digraph graph_from_json(const json& j);

json hierarchy_to_json(const graph::Hierarchy& h);
graph::Hierarchy hierarchy_from_json(const json& j);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json estimate_to_json(const var::RecurrenceEstimate& est);
var::RecurrenceEstimate estimate_from_json(const json& j);

json network_to_json(const var::CausalNetwork& net,
                     const std::vector<std::string>& node_names = {});
var::CausalNetwork network_from_json(const json& j);

json process_spec_to_json(const sim::ProcessSpec& spec);
sim::ProcessSpec process_spec_from_json(const json& j);

json ground_truth_to_json(const sim::GroundTruth& truth);
sim::GroundTruth ground_truth_from_json(const json& j);  // panel not included

json ea_config_to_json(const ea::EAConfig& cfg);
ea::EAConfig ea_config_from_json(const json& j);

json population_to_json(const ea::Population& pop);
ea::Population population_from_json(const json& j, ea::Variant variant);

void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

}  // namespace heave::serialize
