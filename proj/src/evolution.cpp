#include "heave/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "heave/error.hpp"
#include "heave/metrics.hpp"
#include "heave/parallel.hpp"

namespace heave::ea {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::floating: return "floating";
        case Variant::bounded: return "bounded";
        case Variant::canonical: return "canonical";
        case Variant::ordering: return "ordered";
    }
    return "floating";
}

Variant variant_from_name(const std::string& name) {
    if (name == "floating") return Variant::floating;
    if (name == "bounded") return Variant::bounded;
    if (name == "canonical") return Variant::canonical;
    if (name == "ordered" || name == "ordering") return Variant::ordering;
    throw ValidationError("unknown variant '" + name +
                          "' (expected floating|bounded|canonical|ordered)");
}

void validate_config(const EAConfig& cfg, int n_nodes) {
    if (n_nodes < 2) throw ValidationError("ea config: need at least 2 nodes");
    if (cfg.population_size < 2) throw ValidationError("ea config: population size must be >= 2");
    if (cfg.mutation_prob < 0.0 || cfg.mutation_prob > 1.0) {
        throw ValidationError("ea config: mutation probability must lie in [0,1]");
    }
    if (cfg.step_mean != 0.0 && cfg.step_mean < 1.0) {
        throw ValidationError("ea config: mean step size must be >= 1");
    }
    if (cfg.generations < 0) throw ValidationError("ea config: generations must be positive");
    if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
        throw ValidationError("ea config: alpha must lie strictly in (0,1)");
    }
    if (cfg.threads < 1) throw ValidationError("ea config: threads must be >= 1");
}

Population init_population(int n_nodes, const EAConfig& cfg, Rng& rng) {
    if (n_nodes < 2) throw ValidationError("init_population: need at least 2 nodes");
    Population pop;
    pop.members.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int m = 0; m < cfg.population_size; ++m) {
        Genotype g;
        g.variant = cfg.variant;
        g.values.resize(static_cast<std::size_t>(n_nodes));
        if (cfg.variant == Variant::ordering) {
            std::iota(g.values.begin(), g.values.end(), 0);
            // Fisher-Yates, uniform over permutations.
            for (int i = n_nodes - 1; i > 0; --i) {
                std::swap(g.values[static_cast<std::size_t>(i)],
                          g.values[static_cast<std::size_t>(rng.uniform_int(0, i))]);
            }
        } else {
            for (auto& v : g.values) v = rng.uniform_int(1, n_nodes);
        }
        pop.members.push_back(std::move(g));
    }
    return pop;
}

std::vector<double> rank_fitness(const std::vector<double>& scores) {
    if (scores.empty()) throw ValidationError("rank_fitness: empty score list");
    for (const double s : scores) {
        if (!std::isfinite(s)) throw ValidationError("rank_fitness: non-finite score");
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> fitness(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        const double group = static_cast<double>(j - i + 1);
        const double value = static_cast<double>(i) + 0.5 * group + 1.0;
        for (std::size_t k = i; k <= j; ++k) fitness[idx[k]] = value;
        i = j + 1;
    }
    return fitness;
}

namespace {

std::vector<double> cumulative_fitness(const std::vector<double>& scores) {
    std::vector<double> cumulative = rank_fitness(scores);
    for (std::size_t i = 1; i < cumulative.size(); ++i) cumulative[i] += cumulative[i - 1];
    return cumulative;
}

std::size_t sample_index(const std::vector<double>& cumulative, Rng& rng) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cumulative.begin(), static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
}

void require_same_shape(const Genotype& a, const Genotype& b) {
    if (a.variant != b.variant || a.values.size() != b.values.size()) {
        throw ValidationError("crossover: parents must share variant and length");
    }
}

// Signed mutation draw: +1 with probability p/2, -1 with probability p/2.
int mutation_sign(double p, Rng& rng) {
    const double u = rng.uniform();
    if (u < p / 2.0) return 1;
    if (u < p) return -1;
    return 0;
}

}  // namespace

std::pair<Genotype, Genotype> select_parents(const Population& pop, Rng& rng) {
    if (pop.members.empty()) throw ValidationError("select_parents: empty population");
    if (pop.scores.size() != pop.members.size()) {
        throw ValidationError("select_parents: population has no scores");
    }
    const std::vector<double> cumulative = cumulative_fitness(pop.scores);
    const std::size_t first = sample_index(cumulative, rng);
    const std::size_t second = sample_index(cumulative, rng);
    return {pop.members[first], pop.members[second]};
}

Genotype crossover_hierarchy(const Genotype& a, const Genotype& b, Rng& rng) {
    require_same_shape(a, b);
    if (a.variant == Variant::ordering) {
        throw ValidationError("crossover_hierarchy: ordering genotypes need crossover_ordering");
    }
    Genotype child;
    child.variant = a.variant;
    child.values.resize(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        child.values[i] = rng.bernoulli(0.5) ? a.values[i] : b.values[i];
    }
    return child;
}

Genotype crossover_ordering(const Genotype& a, const Genotype& b, Rng& rng) {
    require_same_shape(a, b);
    if (a.variant != Variant::ordering) {
        throw ValidationError("crossover_ordering: expected ordering genotypes");
    }
    const std::size_t n = a.values.size();
    Genotype child;
    child.variant = Variant::ordering;
    child.values.assign(n, -1);
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.bernoulli(0.5)) {
            child.values[i] = a.values[i];
            used[static_cast<std::size_t>(a.values[i])] = true;
        }
    }
    // Fill the gaps with parent B's elements, highest order first.
    std::size_t from_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (child.values[i] != -1) continue;
        while (used[static_cast<std::size_t>(b.values[from_b])]) ++from_b;
        child.values[i] = b.values[from_b];
        used[static_cast<std::size_t>(b.values[from_b])] = true;
    }
    return child;
}

Genotype crossover(const Genotype& a, const Genotype& b, Rng& rng) {
    return a.variant == Variant::ordering ? crossover_ordering(a, b, rng)
                                          : crossover_hierarchy(a, b, rng);
}

Genotype mutate_hierarchy(const Genotype& x, const EAConfig& cfg, Rng& rng) {
    if (x.variant == Variant::ordering) {
        throw ValidationError("mutate_hierarchy: ordering genotypes need mutate_ordering");
    }
    const int n = x.size();
    const double step_mean = cfg.resolved_step_mean(n);
    Genotype out = x;
    for (auto& v : out.values) {
        const int sign = mutation_sign(cfg.mutation_prob, rng);
        if (sign == 0) continue;
        v += sign * rng.geometric(step_mean);
        if (x.variant == Variant::bounded) v = std::clamp(v, 1, n);
    }
    return out;
}

Genotype mutate_ordering(const Genotype& x, const EAConfig& cfg, Rng& rng) {
    if (x.variant != Variant::ordering) {
        throw ValidationError("mutate_ordering: expected an ordering genotype");
    }
    const int n = x.size();
    const double step_mean = cfg.resolved_step_mean(n);
    // Draws are per original position; shifts apply left to right.
    std::vector<int> shift(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const int sign = mutation_sign(cfg.mutation_prob, rng);
        if (sign != 0) shift[static_cast<std::size_t>(i)] = sign * rng.geometric(step_mean);
    }
    Genotype out = x;
    for (int i = 0; i < n; ++i) {
        if (shift[static_cast<std::size_t>(i)] == 0) continue;
        const int element = x.values[static_cast<std::size_t>(i)];
        const auto it = std::find(out.values.begin(), out.values.end(), element);
        const int current = static_cast<int>(it - out.values.begin());
        const int destination = std::clamp(current + shift[static_cast<std::size_t>(i)], 0, n - 1);
        out.values.erase(it);
        out.values.insert(out.values.begin() + destination, element);
    }
    return out;
}

Genotype mutate(const Genotype& x, const EAConfig& cfg, Rng& rng) {
    return x.variant == Variant::ordering ? mutate_ordering(x, cfg, rng)
                                          : mutate_hierarchy(x, cfg, rng);
}

graph::ConstraintMatrix constraint_from_genotype(const Genotype& g) {
    if (g.variant == Variant::ordering) {
        return graph::constraint_from_ordering(graph::Ordering(g.values));
    }
    return graph::constraint_from_hierarchy(graph::Hierarchy(g.values));
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (const int x : v) {
            h ^= static_cast<std::size_t>(static_cast<unsigned>(x)) + 0x9e3779b97f4a7c15ull +
                 (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace

struct Evaluator::Impl {
    const var::PanelContext& ctx;
    EAConfig cfg;
    const sim::GroundTruth* truth;
    bool need_network;
    std::unordered_map<std::vector<int>, Result, VecHash> cache;

    Impl(const var::PanelContext& context, const EAConfig& config, const sim::GroundTruth* gt)
        : ctx(context), cfg(config), truth(gt),
          need_network(gt != nullptr || config.variant == Variant::canonical) {}

    Result compute(const Genotype& g) const {
        const graph::ConstraintMatrix mask = constraint_from_genotype(g);
        Result r;
        if (!need_network) {
            r.score = var::masked_fit_score(ctx, mask);
            return r;
        }
        const var::RecurrenceEstimate est = var::fit_masked(ctx, &mask, 1);
        r.score = est.fit_score;
        const var::CausalNetwork net = var::extract_network(est, cfg.alpha);
        if (truth != nullptr) {
            r.h_score = metrics::h_score(net.graph, truth->hierarchy);
            r.f1 = metrics::f1_score(net.graph, truth->network);
        }
        if (cfg.variant == Variant::canonical) {
            r.canonical_levels = graph::canonicalize(net.graph).levels;
        }
        return r;
    }
};

Evaluator::Evaluator(const var::PanelContext& ctx, const EAConfig& cfg,
                     const sim::GroundTruth* truth)
    : impl_(std::make_unique<Impl>(ctx, cfg, truth)) {}

Evaluator::~Evaluator() = default;

const var::PanelContext& Evaluator::context() const { return impl_->ctx; }

std::vector<const Evaluator::Result*> Evaluator::evaluate_all(
    const std::vector<Genotype>& members) {
    // Insert placeholders for unseen genotypes first, then fill them in
    // parallel; unordered_map references stay valid because the parallel
    // phase never touches the map structure.
    std::vector<std::pair<const Genotype*, Result*>> pending;
    std::vector<const Result*> out(members.size(), nullptr);
    for (const auto& g : members) {
        auto [it, inserted] = impl_->cache.try_emplace(g.values);
        if (inserted) pending.emplace_back(&g, &it->second);
    }
    parallel_for(static_cast<int>(pending.size()), impl_->cfg.threads, [&](int i) {
        auto& [genotype, slot] = pending[static_cast<std::size_t>(i)];
        *slot = impl_->compute(*genotype);
    });
    for (std::size_t i = 0; i < members.size(); ++i) {
        out[i] = &impl_->cache.at(members[i].values);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generation stepping

StepResult step_generation(const Population& pop, Evaluator& evaluator, const EAConfig& cfg,
                           int generation, double f_unconstrained) {
    if (pop.members.empty() || pop.scores.size() != pop.members.size()) {
        throw ValidationError("step_generation: population must be scored");
    }
    if (!(f_unconstrained > 0.0)) {
        throw ValidationError("step_generation: unconstrained fit score must be positive");
    }
    const std::vector<double> cumulative = cumulative_fitness(pop.scores);

    StepResult result;
    result.next.members.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int c = 0; c < cfg.population_size; ++c) {
        Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(generation),
                                 static_cast<std::uint64_t>(c));
        const Genotype& parent_a = pop.members[sample_index(cumulative, rng)];
        const Genotype& parent_b = pop.members[sample_index(cumulative, rng)];
        Genotype child = crossover(parent_a, parent_b, rng);
        child = mutate(child, cfg, rng);
        result.next.members.push_back(std::move(child));
    }

    std::vector<const Evaluator::Result*> evals;
    try {
        evals = evaluator.evaluate_all(result.next.members);
    } catch (const Error& e) {
        throw NumericalError("generation " + std::to_string(generation) +
                             ": child evaluation failed: " + e.what());
    }
    result.next.scores.resize(result.next.members.size());
    double sum = 0.0, sum_h = 0.0, sum_f1 = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    bool have_h = true, have_f1 = true;
    for (std::size_t i = 0; i < result.next.members.size(); ++i) {
        const Evaluator::Result& r = *evals[i];
        result.next.scores[i] = r.score;
        sum += r.score;
        best = std::max(best, r.score);
        if (r.h_score) sum_h += *r.h_score; else have_h = false;
        if (r.f1) sum_f1 += *r.f1; else have_f1 = false;
    }
    result.scored = result.next;
    for (std::size_t i = 0; i < result.next.members.size(); ++i) {
        if (!evals[i]->canonical_levels.empty()) {
            result.next.members[i].values = evals[i]->canonical_levels;
        }
    }
    const double count = static_cast<double>(result.next.members.size());
    result.trace.generation = generation;
    result.trace.mean_fstar = sum / count / f_unconstrained;
    result.trace.best_fstar = best / f_unconstrained;
    if (have_h) result.trace.mean_hscore = sum_h / count;
    if (have_f1) result.trace.mean_f1 = sum_f1 / count;
    return result;
}

RunResult run(const var::TimeSeriesPanel& panel, const EAConfig& cfg,
              const sim::GroundTruth* truth) {
    const var::PanelContext ctx = var::make_context(panel);
    validate_config(cfg, ctx.n);
    const int generations = cfg.resolved_generations(ctx.n);

    RunResult result;
    result.f_unconstrained = var::fit_masked(ctx, nullptr, cfg.threads).fit_score;
    if (!(result.f_unconstrained > 0.0)) {
        throw NumericalError("run: unconstrained fit score is not positive; "
                             "f* standardization is undefined");
    }

    Evaluator evaluator(ctx, cfg, truth);

    // Generation 0: fresh population, scored. Substream (seed, 0, m)
    // drives member m's draw.
    Population pop;
    pop.members.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int m = 0; m < cfg.population_size; ++m) {
        Rng rng = Rng::substream(cfg.seed, 0, static_cast<std::uint64_t>(m));
        EAConfig one = cfg;
        one.population_size = 1;
        Population single = init_population(ctx.n, one, rng);
        pop.members.push_back(std::move(single.members.front()));
    }
    {
        const auto evals = evaluator.evaluate_all(pop.members);
        pop.scores.resize(pop.members.size());
        for (std::size_t i = 0; i < pop.members.size(); ++i) {
            pop.scores[i] = evals[i]->score;
            if (!evals[i]->canonical_levels.empty()) {
                pop.members[i].values = evals[i]->canonical_levels;
            }
        }
    }

    result.traces.reserve(static_cast<std::size_t>(generations));
    std::vector<Population> window;
    for (int g = 1; g <= generations; ++g) {
        StepResult step = step_generation(pop, evaluator, cfg, g, result.f_unconstrained);
        pop = std::move(step.next);
        result.traces.push_back(step.trace);
        window.push_back(std::move(step.scored));
        if (window.size() > 5) window.erase(window.begin());
    }
    result.final_population = window.back();
    result.terminal_window = std::move(window);

    // Best final member: full fit for the published network.
    const Population& final_scored = result.final_population;
    const auto best_it =
        std::max_element(final_scored.scores.begin(), final_scored.scores.end());
    const Genotype& best =
        final_scored.members[static_cast<std::size_t>(best_it - final_scored.scores.begin())];
    const graph::ConstraintMatrix mask = constraint_from_genotype(best);
    const var::RecurrenceEstimate est = var::fit_masked(ctx, &mask, cfg.threads);
    result.best_network = var::extract_network(est, cfg.alpha);
    result.best_hierarchy = graph::canonicalize(result.best_network.graph);
    return result;
}

}  // namespace heave::ea
