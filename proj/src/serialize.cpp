#include "heave/serialize.hpp"

#include <fstream>

#include "heave/error.hpp"

namespace heave::serialize {

json graph_to_json(const graph::Digraph& g, const std::vector<std::string>& node_names) {
    json j;
    j["n"] = g.n;
    json edges = json::array();
    for (int i = 0; i < g.n; ++i) {
        for (int k = 0; k < g.n; ++k) {
            if (g.edge(i, k)) edges.push_back(json::array({i, k}));
        }
    }
    j["edges"] = std::move(edges);
    if (!node_names.empty()) j["node_names"] = node_names;
    return j;
}

graph::Digraph graph_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("edges")) {
        throw ValidationError("graph json: missing 'n' or 'edges'");
    }
    graph::Digraph g(j.at("n").get<int>());
    for (const auto& e : j.at("edges")) {
        const int from = e.at(0).get<int>();
        const int to = e.at(1).get<int>();
        if (from < 0 || from >= g.n || to < 0 || to >= g.n) {
            throw ValidationError("graph json: edge endpoint out of range");
        }
        g.set_edge(from, to);
    }
    return g;
}

json hierarchy_to_json(const graph::Hierarchy& h) { return json{{"levels", h.levels}}; }

graph::Hierarchy hierarchy_from_json(const json& j) {
    if (!j.contains("levels")) throw ValidationError("hierarchy json: missing 'levels'");
    return graph::Hierarchy(j.at("levels").get<std::vector<int>>());
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("matrix json: expected nested arrays");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.at(0).size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<int>(row.size()) != cols) {
            throw ValidationError("matrix json: ragged rows");
        }
        for (int c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

json estimate_to_json(const var::RecurrenceEstimate& est) {
    json j;
    j["coefficients"] = matrix_to_json(est.coefficients);
    j["intercept"] = est.intercept;
    j["std_errors"] = matrix_to_json(est.std_errors);
    j["residual_cov"] = matrix_to_json(est.residual_cov);
    j["fit_score"] = est.fit_score;
    return j;
}

var::RecurrenceEstimate estimate_from_json(const json& j) {
    var::RecurrenceEstimate est;
    est.coefficients = matrix_from_json(j.at("coefficients"));
    est.intercept = j.at("intercept").get<std::vector<double>>();
    est.std_errors = matrix_from_json(j.at("std_errors"));
    est.residual_cov = matrix_from_json(j.at("residual_cov"));
    est.fit_score = j.at("fit_score").get<double>();
    return est;
}

json network_to_json(const var::CausalNetwork& net, const std::vector<std::string>& node_names) {
    json j;
    j["graph"] = graph_to_json(net.graph, node_names);
    j["alpha"] = net.alpha;
    j["t_values"] = matrix_to_json(net.t_values);
    return j;
}

var::CausalNetwork network_from_json(const json& j) {
    var::CausalNetwork net;
    net.graph = graph_from_json(j.at("graph"));
    net.alpha = j.at("alpha").get<double>();
    net.t_values = matrix_from_json(j.at("t_values"));
    return net;
}

json process_spec_to_json(const sim::ProcessSpec& spec) {
    json j;
    j["n_nodes"] = spec.n_nodes;
    j["edge_prob"] = spec.edge_prob;
    j["t_steps"] = spec.resolved_t_steps();
    j["margin"] = spec.margin;
    j["seed"] = spec.seed;
    return j;
}

sim::ProcessSpec process_spec_from_json(const json& j) {
    sim::ProcessSpec spec;
    spec.n_nodes = j.at("n_nodes").get<int>();
    spec.edge_prob = j.at("edge_prob").get<double>();
    spec.t_steps = j.at("t_steps").get<int>();
    spec.margin = j.at("margin").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
}

json ground_truth_to_json(const sim::GroundTruth& truth) {
    json j;
    j["recurrence"] = matrix_to_json(truth.recurrence);
    j["covariance"] = matrix_to_json(truth.covariance);
    j["hierarchy"] = hierarchy_to_json(truth.hierarchy);
    j["network"] = graph_to_json(truth.network, truth.panel.node_names);
    return j;
}

sim::GroundTruth ground_truth_from_json(const json& j) {
    sim::GroundTruth truth;
    truth.recurrence = matrix_from_json(j.at("recurrence"));
    truth.covariance = matrix_from_json(j.at("covariance"));
    truth.hierarchy = hierarchy_from_json(j.at("hierarchy"));
    truth.network = graph_from_json(j.at("network"));
    return truth;
}

json ea_config_to_json(const ea::EAConfig& cfg) {
    json j;
    j["population_size"] = cfg.population_size;
    j["mutation_prob"] = cfg.mutation_prob;
    j["step_mean"] = cfg.step_mean;
    j["generations"] = cfg.generations;
    j["alpha"] = cfg.alpha;
    j["seed"] = cfg.seed;
    j["variant"] = ea::variant_name(cfg.variant);
    j["threads"] = cfg.threads;
    return j;
}

ea::EAConfig ea_config_from_json(const json& j) {
    ea::EAConfig cfg;
    if (j.contains("population_size")) cfg.population_size = j.at("population_size").get<int>();
    if (j.contains("mutation_prob")) cfg.mutation_prob = j.at("mutation_prob").get<double>();
    if (j.contains("step_mean")) cfg.step_mean = j.at("step_mean").get<double>();
    if (j.contains("generations")) cfg.generations = j.at("generations").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("variant")) cfg.variant = ea::variant_from_name(j.at("variant").get<std::string>());
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    return cfg;
}

json population_to_json(const ea::Population& pop) {
    json members = json::array();
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
        json m;
        m["values"] = pop.members[i].values;
        if (i < pop.scores.size()) m["score"] = pop.scores[i];
        members.push_back(std::move(m));
    }
    return json{{"members", std::move(members)}};
}

ea::Population population_from_json(const json& j, ea::Variant variant) {
    ea::Population pop;
    for (const auto& m : j.at("members")) {
        ea::Genotype g;
        g.variant = variant;
        g.values = m.at("values").get<std::vector<int>>();
        pop.members.push_back(std::move(g));
        if (m.contains("score")) pop.scores.push_back(m.at("score").get<double>());
    }
    return pop;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write json file: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed while writing json file: " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open json file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed json in " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace heave::serialize
