#pragma once

#include "dungeon/error.hpp"
#include "dungeon/evolution.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/metrics.hpp"
#include "dungeon/ranking.hpp"
#include "dungeon/rng.hpp"
#include "dungeon/session.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Scripted designers that drive whole sessions without a browser. They
// exist to exercise the session loop and the log statistics; they are not
// models of human behaviour.

namespace dungeon::sim {

inline constexpr std::array<std::string_view, 3> kPolicies{"keep-everything", "keep-best-k", "random-tagger"};

inline bool known_policy(std::string_view name) noexcept
{
    return std::find(kPolicies.begin(), kPolicies.end(), name) != kPolicies.end();
}

struct Options {
    std::string policy = "keep-everything";
    int sessions = 1;
    std::uint64_t seed = 0;
    /// Forces every simulated designer into one group.
    std::optional<SessionMode> mode;
    std::optional<int> budget;
    /// Suggestions liked per iteration by keep-best-k; the best one is also kept.
    int k = 2;
    /// Safety net for policies that might never keep anything.
    int max_iterations = 50;
};

struct SessionOutcome {
    std::string user_id;
    Session session;
    /// Initial design plus every iterate call.
    int iterations_to_complete = 0;
};

struct GroupAggregate {
    int sessions = 0;
    double mean_likes_per_iteration = 0.0;
    double mean_edits = 0.0;
    double mean_iterations_to_complete = 0.0;
    double mean_blank_creations = 0.0;
};

struct SimulationResult {
    std::vector<SessionOutcome> outcomes;
    std::optional<GroupAggregate> ga;
    std::optional<GroupAggregate> control;
};

/// A user id for designer `i`, optionally searched until it hashes into `mode`.
inline std::string simulated_user_id(std::uint64_t seed, int i, std::optional<SessionMode> mode)
{
    for (int salt = 0;; ++salt) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "sim-%llu-%d-%d", static_cast<unsigned long long>(seed), i, salt);
        if (!mode || assign_mode(buf) == *mode) {
            return buf;
        }
    }
}

namespace detail {

// Cycles random tiles, keeping only edits after which the map is still a
// valid level.
inline GridMap random_edits(GridMap map, int edits, Rng& rng)
{
    for (int e = 0; e < edits; ++e) {
        const auto pos = Position::from_index(static_cast<int>(rng.index(kCells)));
        GridMap next = cycle_tile(map, pos);
        if (is_structurally_valid(next) && is_feasible(next)) {
            map = std::move(next);
        }
    }
    return map;
}

inline std::vector<Decision> decide(const Options& opt, const Session& s, Rng& rng)
{
    std::vector<Decision> out;
    const auto& cards = s.current_suggestions;
    if (opt.policy == "keep-everything") {
        for (std::size_t i = 0; i < cards.size(); ++i) {
            out.push_back({static_cast<int>(i), cards[i].current, true, true});
        }
        return out;
    }
    if (opt.policy == "keep-best-k") {
        TargetSet targets;
        for (const auto& m : s.liked) {
            targets.exemplars.push_back(compute_metrics(m));
        }
        std::vector<double> sums;
        for (const auto& c : cards) {
            sums.push_back(fitness(compute_metrics(c.current), targets, true).sum());
        }
        std::vector<std::size_t> order(cards.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sums[a] < sums[b]; });
        const auto take = std::min<std::size_t>(static_cast<std::size_t>(std::max(opt.k, 0)), order.size());
        for (std::size_t r = 0; r < take; ++r) {
            out.push_back({static_cast<int>(order[r]), cards[order[r]].current, true, r == 0});
        }
        return out;
    }
    // random-tagger
    for (std::size_t i = 0; i < cards.size(); ++i) {
        const bool liked = rng.bernoulli(0.3);
        const bool kept = rng.bernoulli(0.15);
        if (!liked && !kept) {
            continue;
        }
        const int edits = static_cast<int>(rng.index(6));
        out.push_back({static_cast<int>(i), random_edits(cards[i].current, edits, rng), liked, kept});
    }
    return out;
}

inline GroupAggregate aggregate(const std::vector<const SessionOutcome*>& group)
{
    GroupAggregate g;
    g.sessions = static_cast<int>(group.size());
    if (group.empty()) {
        return g;
    }
    // per-session means first, sorted before summing so the result does not
    // depend on session order
    std::vector<double> likes;
    std::vector<double> edits;
    std::vector<double> iters;
    std::vector<double> blanks;
    for (const auto* o : group) {
        const auto& its = o->session.log.iterations;
        int like_total = 0;
        double edit_total = 0.0;
        int edit_count = 0;
        for (const auto& rec : its) {
            like_total += rec.likes;
            for (int e : rec.edits_of_liked) {
                edit_total += e;
                ++edit_count;
            }
            for (int e : rec.edits_of_kept) {
                edit_total += e;
                ++edit_count;
            }
        }
        likes.push_back(its.empty() ? 0.0 : static_cast<double>(like_total) / static_cast<double>(its.size()));
        edits.push_back(edit_count == 0 ? 0.0 : edit_total / edit_count);
        iters.push_back(o->iterations_to_complete);
        blanks.push_back(o->session.log.blank_creations);
    }
    auto mean = [](std::vector<double> xs) {
        std::sort(xs.begin(), xs.end());
        return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    };
    g.mean_likes_per_iteration = mean(likes);
    g.mean_edits = mean(edits);
    g.mean_iterations_to_complete = mean(iters);
    g.mean_blank_creations = mean(blanks);
    return g;
}

} // namespace detail

/// One full session for designer `i`.
inline SessionOutcome simulate_session(const Options& opt, int i)
{
    if (!known_policy(opt.policy)) {
        throw Error(Errc::InvalidParams, "unknown policy '" + opt.policy + "'");
    }
    const std::uint64_t stream = derive_seed(opt.seed, static_cast<std::uint64_t>(i));
    Rng rng(derive_seed(stream, 0xD351'6E5EULL));
    GAParams params;
    if (opt.budget) {
        params.evaluation_budget = *opt.budget;
    }
    char id[32];
    std::snprintf(id, sizeof id, "sim-%04d", i);

    SessionOutcome out;
    out.user_id = simulated_user_id(opt.seed, i, opt.mode);
    Session s = new_session(out.user_id, stream, params, id);
    s = submit_initial(std::move(s), random_feasible_map(rng)).session;
    out.iterations_to_complete = 1;
    while (!s.complete && out.iterations_to_complete <= opt.max_iterations) {
        const auto decisions = detail::decide(opt, s, rng);
        s = iterate(std::move(s), decisions).session;
        ++out.iterations_to_complete;
    }
    out.session = std::move(s);
    return out;
}

inline SimulationResult simulate(const Options& opt)
{
    if (!known_policy(opt.policy)) {
        throw Error(Errc::InvalidParams, "unknown policy '" + opt.policy + "'");
    }
    SimulationResult r;
    for (int i = 0; i < opt.sessions; ++i) {
        r.outcomes.push_back(simulate_session(opt, i));
    }
    std::vector<const SessionOutcome*> ga;
    std::vector<const SessionOutcome*> control;
    for (const auto& o : r.outcomes) {
        (o.session.mode == SessionMode::GA ? ga : control).push_back(&o);
    }
    if (!ga.empty()) {
        r.ga = detail::aggregate(ga);
    }
    if (!control.empty()) {
        r.control = detail::aggregate(control);
    }
    return r;
}

inline nlohmann::ordered_json aggregate_to_json(const GroupAggregate& g)
{
    nlohmann::ordered_json j;
    j["sessions"] = g.sessions;
    j["mean_likes_per_iteration"] = g.mean_likes_per_iteration;
    j["mean_edits"] = g.mean_edits;
    j["mean_iterations_to_complete"] = g.mean_iterations_to_complete;
    j["mean_blank_creations"] = g.mean_blank_creations;
    return j;
}

/// Aggregate document; groups without sessions are omitted.
inline nlohmann::ordered_json result_to_json(const Options& opt, const SimulationResult& r)
{
    nlohmann::ordered_json j;
    j["policy"] = opt.policy;
    j["seed"] = opt.seed;
    j["sessions"] = r.outcomes.size();
    auto groups = nlohmann::ordered_json::object();
    if (r.ga) {
        groups[std::string(mode_name(SessionMode::GA))] = aggregate_to_json(*r.ga);
    }
    if (r.control) {
        groups[std::string(mode_name(SessionMode::Control))] = aggregate_to_json(*r.control);
    }
    j["groups"] = std::move(groups);
    return j;
}

} // namespace dungeon::sim
