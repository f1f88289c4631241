#pragma once

#include "dungeon/error.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/metrics.hpp"
#include "dungeon/ranking.hpp"
#include "dungeon/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dungeon {

struct GAParams {
    double mutation_rate = 0.5;
    int tournament_size = 2;
    int elite_count = 1;
    int population_size = 20;
    int generations = 500;
    int evaluation_budget = 10000;

    void validate() const
    {
        auto fail = [](const std::string& what) { throw Error(Errc::InvalidParams, what); };
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
            fail("mutation_rate must lie in [0,1]");
        }
        if (tournament_size < 1) {
            fail("tournament_size must be at least 1");
        }
        if (elite_count < 0) {
            fail("elite_count must be non-negative");
        }
        if (population_size < 2) {
            fail("population_size must be at least 2");
        }
        if (2 * elite_count >= population_size) {
            fail("elites must leave room for offspring");
        }
        if (generations < 1) {
            fail("generations must be at least 1");
        }
        if (evaluation_budget < population_size) {
            fail("evaluation_budget must cover the initial population");
        }
    }

    friend bool operator==(const GAParams&, const GAParams&) = default;
};

struct Individual {
    GridMap map;
    MetricVector metrics;
    bool feasible = false;
    FitnessVector fitness;
};

struct Population {
    std::vector<Individual> feasible;
    std::vector<Individual> infeasible;

    std::size_t size() const noexcept { return feasible.size() + infeasible.size(); }
};

struct GenerationRecord {
    int generation = 0;
    /// Lowest fitness sum in the feasible sub-population; NaN while it is empty.
    double best_fitness_sum = 0;
    double mean_fitness_sum = 0;
    int feasible_count = 0;
};

struct OptimisationHistory {
    std::vector<GenerationRecord> rows;

    std::string to_csv() const
    {
        std::string out = "generation,best_fitness_sum,mean_fitness_sum,feasible_count\n";
        char buf[128];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%d\n", r.generation, r.best_fitness_sum,
                r.mean_fitness_sum, r.feasible_count);
            out += buf;
        }
        return out;
    }
};

/// Counts metric evaluations against a fixed budget.
class EvaluationBudget {
public:
    explicit EvaluationBudget(int limit)
        : limit_(limit)
    {
    }

    int used() const noexcept { return used_; }
    int remaining() const noexcept { return limit_ - used_; }

    void consume()
    {
        if (used_ >= limit_) {
            throw Error(Errc::BudgetExhausted, "evaluation budget exhausted");
        }
        ++used_;
    }

private:
    int limit_;
    int used_ = 0;
};

inline Individual evaluate(const GridMap& map, const TargetSet& targets, EvaluationBudget& budget)
{
    budget.consume();
    Individual ind;
    ind.map = map;
    FeasibilityReport report;
    ind.metrics = compute_metrics_any(map, &report);
    ind.feasible = report.feasible;
    ind.fitness = fitness(ind.metrics, targets, ind.feasible);
    return ind;
}

inline void route(Population& pop, Individual ind)
{
    (ind.feasible ? pop.feasible : pop.infeasible).push_back(std::move(ind));
}

namespace detail {

inline std::vector<FitnessVector> fitnesses(std::span<const Individual> xs)
{
    std::vector<FitnessVector> f;
    f.reserve(xs.size());
    for (const auto& x : xs) {
        f.push_back(x.fitness);
    }
    return f;
}

inline std::vector<std::size_t> rank_individuals(std::span<const Individual> xs)
{
    const auto f = fitnesses(xs);
    return copeland_rank(f);
}

inline GenerationRecord record(int generation, const Population& pop)
{
    GenerationRecord rec;
    rec.generation = generation;
    rec.feasible_count = static_cast<int>(pop.feasible.size());
    if (pop.feasible.empty()) {
        rec.best_fitness_sum = std::numeric_limits<double>::quiet_NaN();
        rec.mean_fitness_sum = std::numeric_limits<double>::quiet_NaN();
        return rec;
    }
    double best = std::numeric_limits<double>::infinity();
    double total = 0;
    for (const auto& ind : pop.feasible) {
        const double s = ind.fitness.sum();
        best = std::min(best, s);
        total += s;
    }
    rec.best_fitness_sum = best;
    rec.mean_fitness_sum = total / static_cast<double>(pop.feasible.size());
    return rec;
}

} // namespace detail

inline Population init_population(const TargetSet& targets, const GAParams& params, Rng& rng,
    EvaluationBudget& budget)
{
    params.validate();
    if (targets.empty()) {
        throw Error(Errc::EmptyTargetSet, "optimisation needs at least one exemplar");
    }
    Population pop;
    for (int i = 0; i < params.population_size; ++i) {
        route(pop, evaluate(random_map(rng), targets, budget));
    }
    return pop;
}

/// k draws with replacement; the winner is the contestant ranked first by
/// majority voting.
inline const Individual& tournament_select(std::span<const Individual> subpop, int k, Rng& rng)
{
    if (subpop.empty()) {
        throw Error(Errc::EmptySubpopulation, "tournament over an empty sub-population");
    }
    k = std::max(k, 1);
    std::vector<std::size_t> drawn;
    std::vector<FitnessVector> contestants;
    drawn.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        drawn.push_back(rng.index(subpop.size()));
        contestants.push_back(subpop[drawn.back()].fitness);
    }
    if (k == 1) {
        return subpop[drawn.front()];
    }
    return subpop[drawn[copeland_rank(contestants).front()]];
}

/// Entrance and exit each come from one of the parents, every other cell from
/// either parent with equal probability.
inline GridMap crossover(const GridMap& a, const GridMap& b, Rng& rng)
{
    if (!is_structurally_valid(a) || !is_structurally_valid(b)) {
        throw Error(Errc::StructurallyInvalidParent, "crossover parents need one entrance and one exit");
    }
    const int entrance_a = a.find_first(TileKind::Entrance)->index();
    const int entrance_b = b.find_first(TileKind::Entrance)->index();
    const int exit_a = a.find_first(TileKind::Exit)->index();
    const int exit_b = b.find_first(TileKind::Exit)->index();

    const int entrance = rng.coin() ? entrance_a : entrance_b;
    const bool exit_from_a = rng.coin();
    int exit = exit_from_a ? exit_a : exit_b;
    if (exit == entrance) {
        exit = exit_from_a ? exit_b : exit_a;
    }
    if (exit == entrance) {
        exit = static_cast<int>(rng.index(kCells - 1));
        if (exit >= entrance) {
            ++exit;
        }
    }

    GridMap child;
    for (int i = 0; i < kCells; ++i) {
        if (i == entrance) {
            child.set(i, TileKind::Entrance);
        } else if (i == exit) {
            child.set(i, TileKind::Exit);
        } else {
            TileKind t = rng.coin() ? a[i] : b[i];
            if (t == TileKind::Entrance || t == TileKind::Exit) {
                t = TileKind::Floor;
            }
            child.set(i, t);
        }
    }
    return child;
}

/// With probability mutation_rate, swaps a random cell with a random
/// in-bounds 4-neighbour.
inline GridMap mutate(GridMap map, const GAParams& params, Rng& rng)
{
    if (!rng.bernoulli(params.mutation_rate)) {
        return map;
    }
    const Position p = Position::from_index(static_cast<int>(rng.index(kCells)));
    Position options[4];
    std::size_t n = 0;
    for (const auto& [dr, dc] : kSteps) {
        const Position q{p.row + dr, p.col + dc};
        if (q.in_bounds()) {
            options[n++] = q;
        }
    }
    const Position q = options[rng.index(n)];
    const TileKind t = map.at(p);
    map.set(p, map.at(q));
    map.set(q, t);
    return map;
}

namespace detail {

/// Elites: lowest fitness sum, ties resolved by majority-vote rank.
inline std::vector<std::size_t> elite_indices(std::span<const Individual> sub, int count)
{
    auto order = rank_individuals(sub);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sub[a].fitness.sum() < sub[b].fitness.sum();
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(count, 0))));
    return order;
}

inline std::vector<Individual> best_of(std::vector<Individual> pool, std::size_t keep)
{
    const auto order = rank_individuals(pool);
    std::vector<Individual> out;
    out.reserve(keep);
    for (std::size_t k = 0; k < keep && k < order.size(); ++k) {
        out.push_back(std::move(pool[order[k]]));
    }
    return out;
}

} // namespace detail

/// One generation: breed, evaluate and route children, then rebuild each
/// sub-population from its elites plus the majority-vote best of its merged
/// pool (survivors and children).
inline Population step_generation(const Population& pop, const TargetSet& targets,
    const GAParams& params, Rng& rng, EvaluationBudget& budget)
{
    if (budget.remaining() <= 0) {
        throw Error(Errc::BudgetExhausted, "evaluation budget exhausted");
    }
    const int n_children = std::min(params.population_size, budget.remaining());

    Population children;
    const std::size_t nf = pop.feasible.size() >= 2 ? pop.feasible.size() : 0;
    const std::size_t ni = pop.infeasible.size() >= 2 ? pop.infeasible.size() : 0;
    for (int c = 0; c < n_children; ++c) {
        GridMap child;
        if (nf + ni == 0) {
            child = random_map(rng);
        } else {
            const auto& parents = rng.index(nf + ni) < nf ? pop.feasible : pop.infeasible;
            const auto& p1 = tournament_select(parents, params.tournament_size, rng);
            const auto& p2 = tournament_select(parents, params.tournament_size, rng);
            child = mutate(crossover(p1.map, p2.map, rng), params, rng);
        }
        route(children, evaluate(child, targets, budget));
    }

    struct Side {
        std::vector<Individual> elites;
        std::vector<Individual> pool;
    };
    auto split = [&](const std::vector<Individual>& old, std::vector<Individual>& kids) {
        Side side;
        const auto elite = detail::elite_indices(old, params.elite_count);
        std::vector<bool> is_elite(old.size(), false);
        for (auto e : elite) {
            is_elite[e] = true;
            side.elites.push_back(old[e]);
        }
        for (std::size_t i = 0; i < old.size(); ++i) {
            if (!is_elite[i]) {
                side.pool.push_back(old[i]);
            }
        }
        for (auto& k : kids) {
            side.pool.push_back(std::move(k));
        }
        return side;
    };
    Side feas = split(pop.feasible, children.feasible);
    Side infeas = split(pop.infeasible, children.infeasible);

    const std::size_t slots = static_cast<std::size_t>(params.population_size) - feas.elites.size()
        - infeas.elites.size();
    const std::size_t pooled = feas.pool.size() + infeas.pool.size();
    std::size_t share_f = pooled == 0
        ? 0
        : static_cast<std::size_t>(std::llround(static_cast<double>(slots)
              * static_cast<double>(feas.pool.size()) / static_cast<double>(pooled)));
    share_f = std::min(share_f, feas.pool.size());
    std::size_t share_i = slots - share_f;
    if (share_i > infeas.pool.size()) {
        share_i = infeas.pool.size();
        share_f = slots - share_i;
    }

    Population next;
    next.feasible = std::move(feas.elites);
    for (auto& ind : detail::best_of(std::move(feas.pool), share_f)) {
        next.feasible.push_back(std::move(ind));
    }
    next.infeasible = std::move(infeas.elites);
    for (auto& ind : detail::best_of(std::move(infeas.pool), share_i)) {
        next.infeasible.push_back(std::move(ind));
    }
    return next;
}

struct OptimisationResult {
    std::vector<Individual> final_feasible;
    std::vector<Individual> final_infeasible;
    OptimisationHistory history;
    int evaluations = 0;
};

/// A fresh run from a random population. Generation 0 is the initial
/// population; the loop stops at `generations` records or when the budget is
/// spent, whichever comes first.
inline OptimisationResult run_optimisation(const TargetSet& targets, const GAParams& params, Rng& rng)
{
    if (targets.empty()) {
        throw Error(Errc::EmptyTargetSet, "optimisation needs at least one exemplar");
    }
    params.validate();
    EvaluationBudget budget(params.evaluation_budget);
    Population pop = init_population(targets, params, rng, budget);
    OptimisationResult result;
    result.history.rows.push_back(detail::record(0, pop));
    for (int g = 1; g < params.generations && budget.remaining() > 0; ++g) {
        pop = step_generation(pop, targets, params, rng, budget);
        result.history.rows.push_back(detail::record(g, pop));
    }
    result.final_feasible = std::move(pop.feasible);
    result.final_infeasible = std::move(pop.infeasible);
    result.evaluations = budget.used();
    return result;
}

/// The individual with the lowest fitness sum (the elite), or nullptr.
inline const Individual* best_individual(std::span<const Individual> xs)
{
    if (xs.empty()) {
        return nullptr;
    }
    const auto elite = detail::elite_indices(xs, 1);
    return &xs[elite.front()];
}

inline std::vector<GridMap> random_suggestions(int n, Rng& rng)
{
    std::vector<GridMap> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) {
        out.push_back(random_feasible_map(rng));
    }
    return out;
}

/// Majority-vote top n of the final feasible population, padded with
/// feasible random maps when it is short.
inline std::vector<GridMap> select_suggestions(std::span<const Individual> final_feasible, int n, Rng& rng)
{
    std::vector<GridMap> out;
    const auto order = detail::rank_individuals(final_feasible);
    for (std::size_t k = 0; k < order.size() && static_cast<int>(out.size()) < n; ++k) {
        out.push_back(final_feasible[order[k]].map);
    }
    while (static_cast<int>(out.size()) < n) {
        out.push_back(random_feasible_map(rng));
    }
    return out;
}

} // namespace dungeon
