#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "heave/csv.hpp"
#include "heave/error.hpp"
#include "heave/linalg.hpp"
#include "heave/metrics.hpp"
#include "heave/serialize.hpp"
#include "heave/sha256.hpp"

namespace heave::cli {

namespace fs = std::filesystem;
using serialize::json;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("failed while writing " + path.string());
}

int max_level(const graph::Hierarchy& h) {
    int height = 0;
    for (const int v : h.levels) height = std::max(height, v);
    return height;
}

}  // namespace

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------- simulate

SimulateSummary cmd_simulate(const SimulateArgs& args) {
    sim::validate_spec(args.spec);
    const sim::GroundTruth truth = sim::make_ground_truth(args.spec);
    ensure_dir(args.out_dir);

    csv::write_panel(args.out_dir / "panel.csv", truth.panel);
    serialize::write_json_file(args.out_dir / "truth.json", serialize::ground_truth_to_json(truth));
    serialize::write_json_file(args.out_dir / "spec.json",
                               serialize::process_spec_to_json(args.spec));

    SimulateSummary summary;
    summary.n_nodes = args.spec.n_nodes;
    summary.t_steps = args.spec.resolved_t_steps();
    summary.off_diagonal_links = truth.network.edge_count_off_diagonal();
    summary.effective_link_rate =
        static_cast<double>(summary.off_diagonal_links) /
        (static_cast<double>(summary.n_nodes) * (summary.n_nodes - 1));
    summary.spectral_radius = linalg::spectral_radius(truth.recurrence);
    return summary;
}

// -------------------------------------------------------------------- fit

namespace {

std::string trace_csv(const std::vector<ea::GenerationTrace>& traces) {
    std::string out = "generation,mean_fstar,best_fstar,mean_hscore,mean_f1\n";
    for (const auto& t : traces) {
        out += std::to_string(t.generation);
        out += ',';
        out += csv::format_double(t.mean_fstar);
        out += ',';
        out += csv::format_double(t.best_fstar);
        out += ',';
        if (t.mean_hscore) out += csv::format_double(*t.mean_hscore);
        out += ',';
        if (t.mean_f1) out += csv::format_double(*t.mean_f1);
        out += '\n';
    }
    return out;
}

json terminal_window_json(const ea::RunResult& result, const ea::EAConfig& cfg,
                          const var::PanelContext& ctx, int first_generation) {
    // Networks of every window member, memoized by genotype; converged
    // populations collapse to a handful of fits.
    std::map<std::vector<int>, graph::Digraph> networks;
    json generations = json::array();
    int generation = first_generation;
    for (const auto& pop : result.terminal_window) {
        json members = json::array();
        for (std::size_t i = 0; i < pop.members.size(); ++i) {
            const ea::Genotype& g = pop.members[i];
            auto it = networks.find(g.values);
            if (it == networks.end()) {
                const graph::ConstraintMatrix mask = ea::constraint_from_genotype(g);
                const var::RecurrenceEstimate est = var::fit_masked(ctx, &mask, cfg.threads);
                it = networks.emplace(g.values, var::extract_network(est, cfg.alpha).graph).first;
            }
            json m;
            m["values"] = g.values;
            m["score"] = pop.scores[i];
            m["network"] = serialize::graph_to_json(it->second);
            members.push_back(std::move(m));
        }
        json gen;
        gen["generation"] = generation++;
        gen["members"] = std::move(members);
        generations.push_back(std::move(gen));
    }
    json j;
    j["variant"] = ea::variant_name(cfg.variant);
    j["alpha"] = cfg.alpha;
    j["f_unconstrained"] = result.f_unconstrained;
    j["node_names"] = ctx.names;
    j["generations"] = std::move(generations);
    return j;
}

}  // namespace

FitSummary cmd_fit(const FitArgs& args) {
    const var::TimeSeriesPanel panel = csv::read_panel(args.panel_path, args.returns_from_prices);
    ea::EAConfig cfg = args.config;
    cfg.generations = cfg.resolved_generations(panel.n_series());
    ea::validate_config(cfg, panel.n_series());

    const ea::RunResult result = ea::run(panel, cfg);
    const var::PanelContext ctx = var::make_context(panel);
    ensure_dir(args.out_dir);

    write_text_file(args.out_dir / "trace.csv", trace_csv(result.traces));
    serialize::write_json_file(args.out_dir / "best_network.json",
                               serialize::network_to_json(result.best_network, ctx.names));
    serialize::write_json_file(args.out_dir / "best_hierarchy.json",
                               serialize::hierarchy_to_json(result.best_hierarchy));
    const int first_window_generation =
        cfg.generations - static_cast<int>(result.terminal_window.size()) + 1;
    serialize::write_json_file(args.out_dir / "terminal_population.json",
                               terminal_window_json(result, cfg, ctx, first_window_generation));

    json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["command"] = "fit";
    manifest["created_utc"] = iso8601_utc_now();
    manifest["seed"] = cfg.seed;
    manifest["config"] = serialize::ea_config_to_json(cfg);
    json input;
    input["path"] = args.panel_path.string();
    input["sha256"] = sha256_file_hex(args.panel_path);
    input["rows"] = panel.t_steps();
    input["cols"] = panel.n_series();
    input["log_returns"] = args.returns_from_prices;
    manifest["input"] = std::move(input);
    manifest["outputs"] = json::array({"trace.csv", "best_network.json", "best_hierarchy.json",
                                       "terminal_population.json"});
    serialize::write_json_file(args.out_dir / "manifest.json", manifest);

    FitSummary summary;
    summary.f_unconstrained = result.f_unconstrained;
    const double best_score =
        *std::max_element(result.final_population.scores.begin(),
                          result.final_population.scores.end());
    summary.best_f_star = best_score / result.f_unconstrained;
    summary.best_link_count = result.best_network.graph.edge_count_off_diagonal();
    summary.best_height = max_level(result.best_hierarchy);
    summary.generations = cfg.generations;
    return summary;
}

// --------------------------------------------------------------- evaluate

namespace {

struct StoredWindow {
    ea::Variant variant = ea::Variant::floating;
    double alpha = 0.05;
    double f_unconstrained = 0.0;
    std::vector<std::string> node_names;
    // Per generation: (values, score, network graph) triples.
    struct Member {
        std::vector<int> values;
        double score = 0.0;
        graph::Digraph network;
    };
    std::vector<std::vector<Member>> generations;
};

StoredWindow read_window(const fs::path& results_dir) {
    const json j = serialize::read_json_file(results_dir / "terminal_population.json");
    StoredWindow w;
    w.variant = ea::variant_from_name(j.at("variant").get<std::string>());
    w.alpha = j.at("alpha").get<double>();
    w.f_unconstrained = j.at("f_unconstrained").get<double>();
    w.node_names = j.at("node_names").get<std::vector<std::string>>();
    for (const auto& gen : j.at("generations")) {
        std::vector<StoredWindow::Member> members;
        for (const auto& m : gen.at("members")) {
            StoredWindow::Member member;
            member.values = m.at("values").get<std::vector<int>>();
            member.score = m.at("score").get<double>();
            member.network = serialize::graph_from_json(m.at("network"));
            members.push_back(std::move(member));
        }
        w.generations.push_back(std::move(members));
    }
    if (w.generations.empty()) throw ValidationError("terminal population holds no generations");
    return w;
}

}  // namespace

EvaluateReport cmd_evaluate(const EvaluateArgs& args) {
    const StoredWindow window = read_window(args.results_dir);
    const json truth_json = serialize::read_json_file(args.truth_dir / "truth.json");
    const sim::GroundTruth truth = serialize::ground_truth_from_json(truth_json);

    const int n = static_cast<int>(window.node_names.size());
    if (truth.hierarchy.size() != n) {
        throw ValidationError("evaluate: truth has " + std::to_string(truth.hierarchy.size()) +
                              " nodes but results have " + std::to_string(n));
    }

    EvaluateReport report;
    double sum_fstar = 0.0, sum_h = 0.0, sum_f1 = 0.0, sum_best = 0.0;
    int members = 0;
    const StoredWindow::Member* best_member = nullptr;
    for (const auto& gen : window.generations) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& m : gen) {
            sum_fstar += m.score / window.f_unconstrained;
            sum_h += metrics::h_score(m.network, truth.hierarchy);
            sum_f1 += metrics::f1_score(m.network, truth.network);
            best = std::max(best, m.score);
            if (best_member == nullptr || m.score > best_member->score) best_member = &m;
            ++members;
        }
        sum_best += best / window.f_unconstrained;
    }
    report.members_evaluated = members;
    report.generations_evaluated = static_cast<int>(window.generations.size());
    report.f_star_mean = sum_fstar / members;
    report.h_score_mean = sum_h / members;
    report.f1_mean = sum_f1 / members;
    report.f_star_best_mean = sum_best / report.generations_evaluated;

    report.best_member.f_raw = best_member->score;
    report.best_member.f_star = best_member->score / window.f_unconstrained;
    report.best_member.h_score = metrics::h_score(best_member->network, truth.hierarchy);
    report.best_member.f1 = metrics::f1_score(best_member->network, truth.network);
    report.best_member.link_count = best_member->network.edge_count_off_diagonal();
    report.best_member.mean_degree = report.best_member.link_count / n;

    json j;
    j["f_star_mean"] = report.f_star_mean;
    j["f_star_best_mean"] = report.f_star_best_mean;
    j["h_score_mean"] = report.h_score_mean;
    j["f1_mean"] = report.f1_mean;
    j["generations_evaluated"] = report.generations_evaluated;
    j["members_evaluated"] = report.members_evaluated;
    j["best_member"] = json{{"f_raw", report.best_member.f_raw},
                            {"f_star", report.best_member.f_star},
                            {"h_score", *report.best_member.h_score},
                            {"f1", *report.best_member.f1},
                            {"link_count", report.best_member.link_count},
                            {"mean_degree", report.best_member.mean_degree}};
    const fs::path report_path =
        args.report_path.empty() ? args.results_dir / "report.json" : args.report_path;
    serialize::write_json_file(report_path, j);
    return report;
}

// ---------------------------------------------------------------- analyze

namespace {

std::vector<int> out_degrees(const graph::Digraph& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.n), 0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && g.edge(i, j)) ++deg[static_cast<std::size_t>(i)];
    return deg;
}

std::vector<int> in_degrees(const graph::Digraph& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.n), 0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && g.edge(i, j)) ++deg[static_cast<std::size_t>(j)];
    return deg;
}

std::string ccdf_csv_rows(const metrics::DegreeCcdf& ccdf, const std::string& prefix) {
    std::string out;
    const auto emit = [&](const char* kind, const std::vector<std::pair<int, double>>& series) {
        for (const auto& [degree, fraction] : series) {
            out += prefix + kind + ',' + std::to_string(degree) + ',' +
                   csv::format_double(fraction) + '\n';
        }
    };
    emit("in", ccdf.in_ccdf);
    emit("out", ccdf.out_ccdf);
    emit("total", ccdf.total_ccdf);
    return out;
}

}  // namespace

AnalyzeReport cmd_analyze(const AnalyzeArgs& args) {
    const StoredWindow window = read_window(args.results_dir);
    const json manifest = serialize::read_json_file(args.results_dir / "manifest.json");

    fs::path panel_path = args.panel_override
                              ? *args.panel_override
                              : fs::path(manifest.at("input").at("path").get<std::string>());
    const bool log_returns = manifest.at("input").at("log_returns").get<bool>();
    if (!args.panel_override) {
        const std::string recorded = manifest.at("input").at("sha256").get<std::string>();
        const std::string actual = sha256_file_hex(panel_path);
        if (recorded != actual) {
            throw ValidationError("analyze: panel content at " + panel_path.string() +
                                  " differs from the fitted panel (digest mismatch)");
        }
    }
    const var::TimeSeriesPanel panel = csv::read_panel(panel_path, log_returns);
    const int n = panel.n_series();
    if (static_cast<int>(window.node_names.size()) != n) {
        throw ValidationError("analyze: panel and results disagree on node count");
    }

    // Unconstrained reference model at the same significance level.
    const var::RecurrenceEstimate var_est = var::fit_var(panel, args.threads);
    const var::CausalNetwork var_net = var::extract_network(var_est, window.alpha);
    const std::vector<int> var_out = out_degrees(var_net.graph);
    const std::vector<int> var_in = in_degrees(var_net.graph);
    const int var_links = var_net.graph.edge_count_off_diagonal();

    // Terminal window samples.
    std::vector<graph::Digraph> samples;
    std::vector<double> sample_scores;
    for (const auto& gen : window.generations) {
        for (const auto& m : gen) {
            samples.push_back(m.network);
            sample_scores.push_back(m.score);
        }
    }
    const metrics::HierarchySummary hierarchy_summary = metrics::summarize_population(samples);

    std::vector<double> dag_out_mean(static_cast<std::size_t>(n), 0.0);
    std::vector<double> dag_in_mean(static_cast<std::size_t>(n), 0.0);
    double links_sum = 0.0;
    for (const auto& g : samples) {
        const std::vector<int> od = out_degrees(g);
        const std::vector<int> id = in_degrees(g);
        for (int i = 0; i < n; ++i) {
            dag_out_mean[static_cast<std::size_t>(i)] += od[static_cast<std::size_t>(i)];
            dag_in_mean[static_cast<std::size_t>(i)] += id[static_cast<std::size_t>(i)];
        }
        links_sum += g.edge_count_off_diagonal();
    }
    const double n_samples = static_cast<double>(samples.size());
    for (int i = 0; i < n; ++i) {
        dag_out_mean[static_cast<std::size_t>(i)] /= n_samples;
        dag_in_mean[static_cast<std::size_t>(i)] /= n_samples;
    }

    AnalyzeReport report;
    report.f_var = var_est.fit_score;
    report.var_links = var_links;
    report.f_mean_dag =
        std::accumulate(sample_scores.begin(), sample_scores.end(), 0.0) / n_samples;
    report.f_star_mean_dag = report.f_mean_dag / window.f_unconstrained;
    report.mean_dag_links = links_sum / n_samples;
    report.mean_dag_height =
        std::accumulate(hierarchy_summary.sample_heights.begin(),
                        hierarchy_summary.sample_heights.end(), 0.0) /
        static_cast<double>(hierarchy_summary.sample_heights.size());
    report.mean_cv_h = std::accumulate(hierarchy_summary.cv.begin(), hierarchy_summary.cv.end(),
                                       0.0) / static_cast<double>(n);
    report.link_ratio = var_links > 0 ? report.mean_dag_links / var_links : 0.0;

    // Best DAG row from the persisted best network.
    const var::CausalNetwork best_net =
        serialize::network_from_json(serialize::read_json_file(args.results_dir / "best_network.json"));
    const auto best_score_it = std::max_element(sample_scores.begin(), sample_scores.end());
    report.f_best_dag = *best_score_it;
    report.f_star_best_dag = report.f_best_dag / window.f_unconstrained;
    report.best_dag_links = best_net.graph.edge_count_off_diagonal();
    report.best_dag_height = max_level(graph::canonicalize(best_net.graph));

    // Node attribute table for the correlation heat map.
    std::vector<std::pair<std::string, std::vector<double>>> attributes;
    attributes.emplace_back("dag_out_degree", dag_out_mean);
    attributes.emplace_back("dag_in_degree", dag_in_mean);
    attributes.emplace_back("hierarchy_level", hierarchy_summary.mean_level);
    attributes.emplace_back("var_out_degree", std::vector<double>(var_out.begin(), var_out.end()));
    attributes.emplace_back("var_in_degree", std::vector<double>(var_in.begin(), var_in.end()));

    std::optional<std::string> first_metadata_name;
    if (args.metadata_csv) {
        const auto metadata = read_metadata_csv(*args.metadata_csv);
        for (const auto& [column, by_name] : metadata) {
            std::vector<double> values(static_cast<std::size_t>(n), 0.0);
            std::vector<std::string> missing;
            for (int i = 0; i < n; ++i) {
                const auto it = by_name.find(window.node_names[static_cast<std::size_t>(i)]);
                if (it == by_name.end()) {
                    missing.push_back(window.node_names[static_cast<std::size_t>(i)]);
                } else {
                    values[static_cast<std::size_t>(i)] = it->second;
                }
            }
            std::vector<std::string> unmatched;
            for (const auto& [name, value] : by_name) {
                (void)value;
                if (std::find(window.node_names.begin(), window.node_names.end(), name) ==
                    window.node_names.end()) {
                    unmatched.push_back(name);
                }
            }
            if (!missing.empty() || !unmatched.empty()) {
                std::string msg = "analyze: metadata join failed for column '" + column + "':";
                if (!missing.empty()) {
                    msg += " nodes without metadata:";
                    for (const auto& name : missing) msg += ' ' + name;
                    msg += ';';
                }
                if (!unmatched.empty()) {
                    msg += " metadata rows without nodes:";
                    for (const auto& name : unmatched) msg += ' ' + name;
                }
                throw ValidationError(msg);
            }
            if (!first_metadata_name) first_metadata_name = column;
            attributes.emplace_back(column, std::move(values));
        }
    }

    const fs::path out_dir = args.out_dir.empty() ? args.results_dir / "analysis" : args.out_dir;
    ensure_dir(out_dir);

    // Pairwise Spearman table with significance stars.
    {
        std::string table = "attribute_a,attribute_b,rho,p_value,stars\n";
        for (std::size_t a = 0; a < attributes.size(); ++a) {
            for (std::size_t b = a + 1; b < attributes.size(); ++b) {
                double rho = std::numeric_limits<double>::quiet_NaN();
                double p = std::numeric_limits<double>::quiet_NaN();
                try {
                    std::tie(rho, p) = metrics::spearman(attributes[a].second, attributes[b].second);
                } catch (const ValidationError&) {
                    // constant attribute: correlation undefined, row kept as nan
                }
                table += attributes[a].first + ',' + attributes[b].first + ',';
                table += std::isnan(rho) ? "nan" : csv::format_double(rho);
                table += ',';
                table += std::isnan(p) ? "nan" : csv::format_double(p);
                table += ',';
                table += std::isnan(p) ? "" : metrics::significance_stars(p);
                table += '\n';
            }
        }
        write_text_file(out_dir / "spearman.csv", table);
    }

    {
        const auto rho_result = metrics::spearman(hierarchy_summary.mean_level, dag_out_mean);
        report.spearman_hierarchy_out_degree = rho_result.first;
    }

    // Smoothed out-degree ratio and its metadata correlation.
    std::vector<double> ratio(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        ratio[static_cast<std::size_t>(i)] = dag_out_mean[static_cast<std::size_t>(i)] /
                                             (var_out[static_cast<std::size_t>(i)] + 1.0);
    }
    {
        std::string table = "node,name,dag_out_degree_mean,var_out_degree,smoothed_ratio";
        if (first_metadata_name) table += ',' + *first_metadata_name;
        table += '\n';
        const std::vector<double>* metadata_values = nullptr;
        if (first_metadata_name) {
            for (const auto& [name, values] : attributes) {
                if (name == *first_metadata_name) metadata_values = &values;
            }
        }
        for (int i = 0; i < n; ++i) {
            table += std::to_string(i) + ',' + window.node_names[static_cast<std::size_t>(i)] +
                     ',' + csv::format_double(dag_out_mean[static_cast<std::size_t>(i)]) + ',' +
                     std::to_string(var_out[static_cast<std::size_t>(i)]) + ',' +
                     csv::format_double(ratio[static_cast<std::size_t>(i)]);
            if (metadata_values != nullptr) {
                table += ',' + csv::format_double((*metadata_values)[static_cast<std::size_t>(i)]);
            }
            table += '\n';
        }
        write_text_file(out_dir / "degree_ratio.csv", table);
        if (metadata_values != nullptr) {
            try {
                report.spearman_ratio_metadata = metrics::spearman(ratio, *metadata_values).first;
            } catch (const ValidationError&) {
                report.spearman_ratio_metadata.reset();
            }
        }
    }

    // Per-node canonical-level statistics across the terminal samples.
    {
        json hs;
        hs["node_names"] = window.node_names;
        hs["mean_level"] = hierarchy_summary.mean_level;
        hs["sd_level"] = hierarchy_summary.sd_level;
        hs["cv"] = hierarchy_summary.cv;
        hs["height"] = hierarchy_summary.height;
        hs["sample_heights"] = hierarchy_summary.sample_heights;
        serialize::write_json_file(out_dir / "hierarchy_summary.json", hs);
    }

    // Degree CCDFs for the unconstrained model and every terminal sample.
    write_text_file(out_dir / "ccdf_var.csv",
                    "kind,degree,fraction\n" + ccdf_csv_rows(metrics::degree_ccdf(var_net.graph), ""));
    {
        std::string body = "sample,kind,degree,fraction\n";
        for (std::size_t s = 0; s < samples.size(); ++s) {
            body += ccdf_csv_rows(metrics::degree_ccdf(samples[s]), std::to_string(s) + ",");
        }
        write_text_file(out_dir / "ccdf_samples.csv", body);
    }

    json summary;
    summary["var"] = json{{"f", report.f_var},
                          {"links", report.var_links},
                          {"mean_degree", static_cast<double>(report.var_links) / n}};
    summary["mean_dag"] = json{{"f", report.f_mean_dag},
                               {"f_star", report.f_star_mean_dag},
                               {"links", report.mean_dag_links},
                               {"mean_degree", report.mean_dag_links / n},
                               {"height", report.mean_dag_height},
                               {"cv_h", report.mean_cv_h}};
    summary["best_dag"] = json{{"f", report.f_best_dag},
                               {"f_star", report.f_star_best_dag},
                               {"links", report.best_dag_links},
                               {"mean_degree", static_cast<double>(report.best_dag_links) / n},
                               {"height", report.best_dag_height}};
    summary["link_ratio"] = report.link_ratio;
    summary["spearman_hierarchy_out_degree"] = report.spearman_hierarchy_out_degree;
    if (report.spearman_ratio_metadata) {
        summary["spearman_ratio_" + *first_metadata_name] = *report.spearman_ratio_metadata;
    }
    summary["samples"] = static_cast<int>(samples.size());
    serialize::write_json_file(out_dir / "summary.json", summary);
    return report;
}

// -------------------------------------------------------------- benchmark

namespace {

RunScores window_scores(const std::vector<ea::GenerationTrace>& traces) {
    const std::size_t take = std::min<std::size_t>(5, traces.size());
    RunScores s;
    for (std::size_t i = traces.size() - take; i < traces.size(); ++i) {
        s.f_star += traces[i].mean_fstar;
        s.f_star_best += traces[i].best_fstar;
        if (traces[i].mean_hscore) s.h_score += *traces[i].mean_hscore;
        if (traces[i].mean_f1) s.f1 += *traces[i].mean_f1;
    }
    const double k = static_cast<double>(take);
    s.f_star /= k;
    s.f_star_best /= k;
    s.h_score /= k;
    s.f1 /= k;
    return s;
}

}  // namespace

BenchmarkReport cmd_benchmark(const BenchmarkArgs& args) {
    if (args.n_datasets < 1) throw ValidationError("benchmark: need at least 1 dataset");
    if (args.variants.empty()) throw ValidationError("benchmark: no variants requested");

    BenchmarkReport report;
    report.variants.resize(args.variants.size());
    for (std::size_t v = 0; v < args.variants.size(); ++v) {
        report.variants[v].variant = args.variants[v];
    }

    std::vector<std::vector<std::vector<ea::GenerationTrace>>> traces(
        args.variants.size());  // [variant][dataset][generation]

    for (int d = 0; d < args.n_datasets; ++d) {
        sim::ProcessSpec spec;
        spec.n_nodes = args.n_nodes;
        spec.edge_prob = args.edge_prob;
        spec.t_steps = args.t_steps;
        spec.seed = args.base_seed + static_cast<std::uint64_t>(d);
        const sim::GroundTruth truth = sim::make_ground_truth(spec);

        for (std::size_t v = 0; v < args.variants.size(); ++v) {
            ea::EAConfig cfg;
            cfg.population_size = args.population_size;
            cfg.mutation_prob = args.mutation_prob;
            cfg.step_mean = args.step_mean;
            cfg.generations = args.generations;
            cfg.alpha = args.alpha;
            cfg.seed = args.base_seed + 1000 + static_cast<std::uint64_t>(d);
            cfg.variant = args.variants[v];
            cfg.threads = args.threads;
            const ea::RunResult result = ea::run(truth.panel, cfg, &truth);
            report.variants[v].per_dataset.push_back(window_scores(result.traces));
            traces[v].push_back(result.traces);
        }
    }

    // Across-dataset means and bootstrapped 95% CIs per generation.
    for (std::size_t v = 0; v < args.variants.size(); ++v) {
        VariantBenchmark& vb = report.variants[v];
        const double nd = static_cast<double>(args.n_datasets);
        for (const auto& s : vb.per_dataset) {
            vb.mean.f_star += s.f_star / nd;
            vb.mean.f_star_best += s.f_star_best / nd;
            vb.mean.h_score += s.h_score / nd;
            vb.mean.f1 += s.f1 / nd;
        }
        const std::size_t n_gens = traces[v].front().size();
        Rng ci_rng(args.base_seed + 777);
        for (std::size_t g = 0; g < n_gens; ++g) {
            std::vector<double> fstar, hscore, f1;
            for (int d = 0; d < args.n_datasets; ++d) {
                const auto& t = traces[v][static_cast<std::size_t>(d)][g];
                fstar.push_back(t.mean_fstar);
                if (t.mean_hscore) hscore.push_back(*t.mean_hscore);
                if (t.mean_f1) f1.push_back(*t.mean_f1);
            }
            ea::GenerationTrace mean_trace;
            mean_trace.generation = traces[v].front()[g].generation;
            mean_trace.mean_fstar =
                std::accumulate(fstar.begin(), fstar.end(), 0.0) / fstar.size();
            double best_sum = 0.0;
            for (int d = 0; d < args.n_datasets; ++d) {
                best_sum += traces[v][static_cast<std::size_t>(d)][g].best_fstar;
            }
            mean_trace.best_fstar = best_sum / nd;
            if (!hscore.empty()) {
                mean_trace.mean_hscore =
                    std::accumulate(hscore.begin(), hscore.end(), 0.0) / hscore.size();
            }
            if (!f1.empty()) {
                mean_trace.mean_f1 = std::accumulate(f1.begin(), f1.end(), 0.0) / f1.size();
            }
            vb.mean_trace.push_back(mean_trace);
            if (args.n_datasets >= 2) {
                vb.fstar_ci.push_back(metrics::bootstrap_mean_ci(fstar, 0.95, 1000, ci_rng));
                if (!hscore.empty()) {
                    vb.hscore_ci.push_back(metrics::bootstrap_mean_ci(hscore, 0.95, 1000, ci_rng));
                }
                if (!f1.empty()) {
                    vb.f1_ci.push_back(metrics::bootstrap_mean_ci(f1, 0.95, 1000, ci_rng));
                }
            }
        }
    }

    if (!args.out_dir.empty()) {
        ensure_dir(args.out_dir);
        {
            std::string body = "variant,dataset,generation,mean_fstar,mean_hscore,mean_f1\n";
            for (std::size_t v = 0; v < args.variants.size(); ++v) {
                for (int d = 0; d < args.n_datasets; ++d) {
                    for (const auto& t : traces[v][static_cast<std::size_t>(d)]) {
                        body += std::string(ea::variant_name(args.variants[v])) + ',' +
                                std::to_string(d) + ',' + std::to_string(t.generation) + ',' +
                                csv::format_double(t.mean_fstar) + ',';
                        if (t.mean_hscore) body += csv::format_double(*t.mean_hscore);
                        body += ',';
                        if (t.mean_f1) body += csv::format_double(*t.mean_f1);
                        body += '\n';
                    }
                }
            }
            write_text_file(args.out_dir / "per_dataset_traces.csv", body);
        }
        json summary;
        summary["tool"] = kToolName;
        summary["version"] = kToolVersion;
        summary["n_nodes"] = args.n_nodes;
        summary["n_datasets"] = args.n_datasets;
        summary["base_seed"] = args.base_seed;
        json per_variant = json::object();
        for (const auto& vb : report.variants) {
            per_variant[ea::variant_name(vb.variant)] =
                json{{"f_star", vb.mean.f_star},
                     {"f_star_best", vb.mean.f_star_best},
                     {"h_score", vb.mean.h_score},
                     {"f1", vb.mean.f1}};
        }
        summary["final_5_generation_means"] = std::move(per_variant);
        serialize::write_json_file(args.out_dir / "summary.json", summary);

        for (const auto& vb : report.variants) {
            std::string body =
                "generation,mean_fstar,fstar_lo,fstar_hi,mean_hscore,hscore_lo,hscore_hi,"
                "mean_f1,f1_lo,f1_hi\n";
            for (std::size_t g = 0; g < vb.mean_trace.size(); ++g) {
                const auto& t = vb.mean_trace[g];
                body += std::to_string(t.generation) + ',' + csv::format_double(t.mean_fstar);
                body += ',';
                if (g < vb.fstar_ci.size()) {
                    body += csv::format_double(vb.fstar_ci[g].first) + ',' +
                            csv::format_double(vb.fstar_ci[g].second);
                } else {
                    body += ',';
                }
                body += ',';
                if (t.mean_hscore) body += csv::format_double(*t.mean_hscore);
                body += ',';
                if (g < vb.hscore_ci.size()) {
                    body += csv::format_double(vb.hscore_ci[g].first) + ',' +
                            csv::format_double(vb.hscore_ci[g].second);
                } else {
                    body += ',';
                }
                body += ',';
                if (t.mean_f1) body += csv::format_double(*t.mean_f1);
                body += ',';
                if (g < vb.f1_ci.size()) {
                    body += csv::format_double(vb.f1_ci[g].first) + ',' +
                            csv::format_double(vb.f1_ci[g].second);
                } else {
                    body += ',';
                }
                body += '\n';
            }
            write_text_file(args.out_dir /
                                ("trace_" + std::string(ea::variant_name(vb.variant)) + ".csv"),
                            body);
        }
    }
    return report;
}

// ------------------------------------------------------------------ utils

std::map<std::string, std::map<std::string, double>> read_metadata_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metadata file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("metadata csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 2) {
        throw ValidationError("metadata csv needs a name column plus at least one value column");
    }

    std::map<std::string, std::map<std::string, double>> columns;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != header.size()) {
            throw ValidationError("metadata csv line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(header.size()) + " cells");
        }
        for (std::size_t c = 1; c < cells.size(); ++c) {
            try {
                columns[header[c]][cells[0]] = std::stod(cells[c]);
            } catch (const std::exception&) {
                throw ValidationError("metadata csv line " + std::to_string(line_no) +
                                      ", column '" + header[c] + "': not numeric");
            }
        }
    }
    if (columns.empty()) throw ValidationError("metadata csv has no data rows");
    return columns;
}

}  // namespace heave::cli
