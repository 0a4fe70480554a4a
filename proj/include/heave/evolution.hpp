#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "heave/graph.hpp"
#include "heave/rng.hpp"
#include "heave/simulate.hpp"
#include "heave/var.hpp"

// The evolutionary loop: genotype variants over hierarchies and
// orderings, rank-proportional parent selection, uniform/order crossover,
// geometric-step mutation, and full generational replacement scored by
// the constrained VAR fit.

namespace heave::ea {

enum class Variant { floating, bounded, canonical, ordering };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct Genotype {
    Variant variant = Variant::floating;
    std::vector<int> values;  // hierarchy levels, or a permutation for ordering

    int size() const { return static_cast<int>(values.size()); }
    bool operator==(const Genotype&) const = default;
};

struct EAConfig {
    int population_size = 30;
    double mutation_prob = 0.10;  // per-node chance, split evenly between up and down
    double step_mean = 0.0;       // geometric mean step; 0 resolves to max(1, N/10)
    int generations = 0;          // 0 resolves to 5 * N
    double alpha = 0.05;          // significance level for network extraction
    std::uint64_t seed = 1;
    Variant variant = Variant::floating;
    int threads = 1;

    double resolved_step_mean(int n_nodes) const {
        return step_mean > 0.0 ? step_mean : std::max(1.0, n_nodes / 10.0);
    }
    int resolved_generations(int n_nodes) const {
        return generations > 0 ? generations : 5 * n_nodes;
    }
};

void validate_config(const EAConfig& cfg, int n_nodes);

struct Population {
    std::vector<Genotype> members;
    std::vector<double> scores;  // constrained fit score per member
};

struct GenerationTrace {
    int generation = 0;
    double mean_fstar = 0.0;
    double best_fstar = 0.0;
    std::optional<double> mean_hscore;  // simulation benchmarks only
    std::optional<double> mean_f1;
};

// Hierarchy variants draw levels uniformly from {1..N}; the ordering
// variant draws uniform random permutations.
Population init_population(int n_nodes, const EAConfig& cfg, Rng& rng);

// R_i = |{j : f_j < f_i}| + 0.5 |{j : f_j = f_i}| + 1, the equality count
// including i itself, so ties share identical fitness and the total is
// n(n+3)/2.
std::vector<double> rank_fitness(const std::vector<double>& scores);

// Two independent draws (with replacement) proportional to rank fitness.
std::pair<Genotype, Genotype> select_parents(const Population& pop, Rng& rng);

// Elementwise coin-flip mixture of the parents.
Genotype crossover_hierarchy(const Genotype& a, const Genotype& b, Rng& rng);

// Coin-selected positions copy parent A; the gaps fill left to right with
// parent B's elements in B's order, skipping those already placed.
Genotype crossover_ordering(const Genotype& a, const Genotype& b, Rng& rng);

Genotype crossover(const Genotype& a, const Genotype& b, Rng& rng);

// Per node: +step with probability p/2, -step with probability p/2, where
// the step is geometric with mean cfg.step_mean. The bounded variant
// clamps to [1, N]; floating and canonical stay unbounded.
Genotype mutate_hierarchy(const Genotype& x, const EAConfig& cfg, Rng& rng);

// Selected elements are displaced by their signed step (left to right,
// clamped at the ends); always yields a valid permutation.
Genotype mutate_ordering(const Genotype& x, const EAConfig& cfg, Rng& rng);

Genotype mutate(const Genotype& x, const EAConfig& cfg, Rng& rng);

graph::ConstraintMatrix constraint_from_genotype(const Genotype& g);

// Per-genotype evaluation with memoization. Evaluations are pure in the
// panel, so converged populations hit the cache heavily. When ground
// truth is attached, per-member H and F1 scores are recorded alongside.
class Evaluator {
public:
    Evaluator(const var::PanelContext& ctx, const EAConfig& cfg,
              const sim::GroundTruth* truth);
    ~Evaluator();

    struct Result {
        double score = 0.0;
        std::optional<double> h_score;
        std::optional<double> f1;
        std::vector<int> canonical_levels;  // canonical variant only
    };

    // Evaluates (or recalls) every genotype; distinct new genotypes are
    // fitted in parallel across cfg.threads workers.
    std::vector<const Result*> evaluate_all(const std::vector<Genotype>& members);

    const var::PanelContext& context() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct StepResult {
    Population next;    // reproduction pool (canonical variant: replaced levels)
    Population scored;  // genotypes exactly as evaluated, paired with scores
    GenerationTrace trace;
};

// One (N,N)-replacement generation: children built from rank-selected
// parents via crossover + mutation, scored through the evaluator. Child c
// of generation g draws from substream (seed, g, c), so threading never
// changes the result. The canonical variant replaces each child's levels
// with the canonical hierarchy of its significant network after scoring.
StepResult step_generation(const Population& pop, Evaluator& evaluator, const EAConfig& cfg,
                           int generation, double f_unconstrained);

struct RunResult {
    std::vector<GenerationTrace> traces;
    Population final_population;
    var::CausalNetwork best_network;   // best final member at cfg.alpha
    graph::Hierarchy best_hierarchy;   // canonical hierarchy of that network
    double f_unconstrained = 0.0;
    std::vector<Population> terminal_window;  // last <= 5 scored populations
};

// Full run: scores a fresh population, then cfg.generations replacement
// steps. Deterministic given cfg.seed.
RunResult run(const var::TimeSeriesPanel& panel, const EAConfig& cfg,
              const sim::GroundTruth* truth = nullptr);

}  // namespace heave::ea
