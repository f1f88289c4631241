#pragma once

#include "dungeon/error.hpp"
#include "dungeon/evolution.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/metrics.hpp"
#include "dungeon/ranking.hpp"
#include "dungeon/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dungeon::bench {

struct BenchResult {
    std::filesystem::path target_path;
    GridMap best_map;
    double final_best_fitness_sum = 0.0;
    OptimisationHistory history;
    std::uint64_t seed = 0;
    /// No feasible individual survived; best_map is the infeasible elite.
    bool infeasible_best = false;
    int evaluations = 0;
};

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::InvalidMap, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A target that is a valid, feasible level.
inline GridMap load_target(const std::filesystem::path& path)
{
    GridMap map = parse_map(read_file(path));
    validate_structure(map);
    if (!feasibility(map).feasible) {
        throw Error(Errc::InfeasibleForM1, path.string() + ": no path from entrance to exit");
    }
    return map;
}

inline BenchResult run_bench(const GridMap& target, std::uint64_t seed, GAParams params)
{
    TargetSet targets{{compute_metrics(target)}};
    Rng rng(seed);
    auto run = run_optimisation(targets, params, rng);
    BenchResult r;
    r.seed = seed;
    r.evaluations = run.evaluations;
    r.history = std::move(run.history);
    if (const auto* best = best_individual(run.final_feasible)) {
        r.best_map = best->map;
        r.final_best_fitness_sum = best->fitness.sum();
    } else {
        r.infeasible_best = true;
        if (const auto* inf = best_individual(run.final_infeasible)) {
            r.best_map = inf->map;
            r.final_best_fitness_sum = inf->fitness.sum();
        }
    }
    return r;
}

/// Best feasible fitness sum of the first generation that had a feasible member.
inline double initial_best(const OptimisationHistory& h)
{
    for (const auto& row : h.rows) {
        if (row.feasible_count > 0) {
            return row.best_fitness_sum;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct RandomSearchResult {
    /// Fitness sum of the majority-vote (Copeland) best feasible sample.
    double copeland_best_sum = std::numeric_limits<double>::quiet_NaN();
    /// Lowest fitness sum among feasible samples.
    double min_sum = std::numeric_limits<double>::quiet_NaN();
    int feasible_samples = 0;
};

/// Same-budget baseline: `samples` independent random maps.
inline RandomSearchResult random_search(const TargetSet& targets, int samples, Rng& rng)
{
    std::vector<FitnessVector> feas;
    for (int i = 0; i < samples; ++i) {
        const GridMap m = random_map(rng);
        FeasibilityReport rep;
        const auto metrics = compute_metrics_any(m, &rep);
        if (rep.feasible) {
            feas.push_back(fitness(metrics, targets, true));
        }
    }
    RandomSearchResult r;
    r.feasible_samples = static_cast<int>(feas.size());
    if (feas.empty()) {
        return r;
    }
    r.copeland_best_sum = feas[copeland_rank(feas).front()].sum();
    r.min_sum = feas.front().sum();
    for (const auto& f : feas) {
        r.min_sum = std::min(r.min_sum, f.sum());
    }
    return r;
}

// ---------------------------------------------------------------------------
// parameter sweeps

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

inline const std::vector<std::string>& tunable_parameters()
{
    static const std::vector<std::string> names{
        "mutation_rate", "tournament_size", "elite_count", "population_size", "generations"};
    return names;
}

inline void set_parameter(GAParams& p, std::string_view name, double v)
{
    auto as_int = [&] {
        if (v != std::floor(v)) {
            throw Error(Errc::InvalidParams, std::string(name) + " must be an integer");
        }
        return static_cast<int>(v);
    };
    if (name == "mutation_rate") {
        p.mutation_rate = v;
    } else if (name == "tournament_size") {
        p.tournament_size = as_int();
    } else if (name == "elite_count") {
        p.elite_count = as_int();
    } else if (name == "population_size") {
        p.population_size = as_int();
    } else if (name == "generations") {
        p.generations = as_int();
    } else {
        throw Error(Errc::InvalidParams, "unknown parameter '" + std::string(name) + "'");
    }
}

/// Parses `name=v1,v2;name=v3`. Whitespace around tokens is ignored.
inline std::vector<GridAxis> parse_grid(std::string_view spec)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
            s.remove_prefix(1);
        }
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
            s.remove_suffix(1);
        }
        return s;
    };
    auto split = [](std::string_view s, char sep) {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == sep) {
                out.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        }
        return out;
    };
    std::vector<GridAxis> axes;
    for (auto part : split(spec, ';')) {
        part = trim(part);
        if (part.empty()) {
            continue;
        }
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::InvalidParams, "grid axis '" + std::string(part) + "' lacks '='");
        }
        GridAxis axis{std::string(trim(part.substr(0, eq))), {}};
        if (std::find(tunable_parameters().begin(), tunable_parameters().end(), axis.name)
            == tunable_parameters().end()) {
            throw Error(Errc::InvalidParams, "unknown parameter '" + axis.name + "'");
        }
        for (auto tok : split(part.substr(eq + 1), ',')) {
            tok = trim(tok);
            if (tok.empty()) {
                continue;
            }
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(std::string(tok), &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) {
                throw Error(Errc::InvalidParams, "bad value '" + std::string(tok) + "' for " + axis.name);
            }
            axis.values.push_back(v);
        }
        if (axis.values.empty()) {
            throw Error(Errc::InvalidParams, "no values for " + axis.name);
        }
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) {
        throw Error(Errc::InvalidParams, "empty parameter grid");
    }
    return axes;
}

/// Cartesian product of the axes applied on top of `base`.
inline std::vector<GAParams> expand_grid(const std::vector<GridAxis>& axes, const GAParams& base)
{
    std::vector<GAParams> out{base};
    for (const auto& axis : axes) {
        std::vector<GAParams> next;
        for (const auto& p : out) {
            for (double v : axis.values) {
                GAParams q = p;
                set_parameter(q, axis.name, v);
                next.push_back(q);
            }
        }
        out = std::move(next);
    }
    for (const auto& p : out) {
        p.validate();
    }
    return out;
}

struct TuneRow {
    GAParams params;
    double mean = 0.0;
    double sd = 0.0;
    int runs = 0;
    /// Runs that ended without a feasible individual; excluded from mean and sd.
    int infeasible_runs = 0;
};

/// Seeds 0..seeds-1 per combination; rows ranked by mean final best sum.
inline std::vector<TuneRow> tune(const GridMap& target, const std::vector<GAParams>& combos, int seeds)
{
    std::vector<TuneRow> rows;
    for (const auto& p : combos) {
        TuneRow row;
        row.params = p;
        std::vector<double> finals;
        for (int s = 0; s < seeds; ++s) {
            const auto r = run_bench(target, static_cast<std::uint64_t>(s), p);
            ++row.runs;
            if (r.infeasible_best) {
                ++row.infeasible_runs;
            } else {
                finals.push_back(r.final_best_fitness_sum);
            }
        }
        std::sort(finals.begin(), finals.end());
        if (finals.empty()) {
            row.mean = std::numeric_limits<double>::infinity();
        } else {
            row.mean = std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(finals.size());
            double ss = 0.0;
            for (double f : finals) {
                ss += (f - row.mean) * (f - row.mean);
            }
            row.sd = finals.size() > 1 ? std::sqrt(ss / static_cast<double>(finals.size() - 1)) : 0.0;
        }
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const TuneRow& a, const TuneRow& b) { return a.mean < b.mean; });
    return rows;
}

inline std::string tune_table(const std::vector<TuneRow>& rows)
{
    std::string out = "rank,mutation_rate,tournament_size,elite_count,population_size,generations,"
                      "evaluation_budget,runs,mean_best_fitness_sum,sd_best_fitness_sum,infeasible_runs\n";
    char buf[256];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::snprintf(buf, sizeof buf, "%zu,%g,%d,%d,%d,%d,%d,%d,%.9g,%.9g,%d\n", i + 1, r.params.mutation_rate,
            r.params.tournament_size, r.params.elite_count, r.params.population_size, r.params.generations,
            r.params.evaluation_budget, r.runs, r.mean, r.sd, r.infeasible_runs);
        out += buf;
    }
    return out;
}

} // namespace dungeon::bench
