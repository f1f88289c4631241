#pragma once

#include "dungeon/error.hpp"
#include "dungeon/evolution.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/metrics.hpp"
#include "dungeon/rng.hpp"

#include "json.hpp"

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dungeon {

inline constexpr int kLevelGoal = 5;
inline constexpr int kSuggestionCount = 8;

enum class SessionMode { GA, Control };

constexpr std::string_view mode_name(SessionMode m) noexcept
{
    return m == SessionMode::GA ? "ga" : "control";
}

inline std::optional<SessionMode> mode_from_name(std::string_view s) noexcept
{
    if (s == "ga") {
        return SessionMode::GA;
    }
    if (s == "control") {
        return SessionMode::Control;
    }
    return std::nullopt;
}

struct Suggestion {
    GridMap original;
    GridMap current;

    friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct IterationRecord {
    int iteration = 0;
    int likes = 0;
    int keeps = 0;
    std::vector<int> edits_of_liked;
    std::vector<int> edits_of_kept;
    bool blank_used = false;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct SessionLog {
    SessionMode group = SessionMode::GA;
    std::vector<IterationRecord> iterations;
    /// Mid-session blank-canvas designs; the mandatory first design is not counted.
    int blank_creations = 0;
    bool complete = false;

    friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

struct Session {
    std::string id;
    std::string user_id;
    SessionMode mode = SessionMode::GA;
    std::uint64_t seed = 0;
    GAParams params;

    std::vector<GridMap> liked;
    std::vector<GridMap> levels;
    std::vector<Suggestion> current_suggestions;
    int iteration = 0;
    SessionLog log;
    bool complete = false;
    /// A blank-canvas map was submitted during the current iteration.
    bool blank_pending = false;

    friend bool operator==(const Session&, const Session&) = default;
};

struct Decision {
    int index = 0;
    GridMap edited;
    bool liked = false;
    bool kept = false;
};

struct StepResult {
    Session session;
    std::vector<GridMap> suggestions;
    /// Kept maps dropped because the level list was already full.
    int ignored_keeps = 0;
};

// ---------------------------------------------------------------------------

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// GA for an even FNV-1a hash, control otherwise.
inline SessionMode assign_mode(std::string_view user_id)
{
    if (user_id.empty()) {
        throw Error(Errc::EmptyUserId, "user id must not be empty");
    }
    return (fnv1a64(user_id) & 1U) == 0 ? SessionMode::GA : SessionMode::Control;
}

inline std::string make_session_id()
{
    static std::atomic<std::uint64_t> counter{0};
    std::random_device rd;
    const std::uint64_t hi = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    const std::uint64_t v = splitmix64(hi ^ counter.fetch_add(1));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline Session new_session(std::string user_id, std::uint64_t seed, GAParams params = {},
    std::string id = {})
{
    Session s;
    s.mode = assign_mode(user_id);
    s.user_id = std::move(user_id);
    s.seed = seed;
    params.validate();
    s.params = params;
    s.id = id.empty() ? make_session_id() : std::move(id);
    s.log.group = s.mode;
    return s;
}

namespace detail {

inline void require_valid_level(const GridMap& map, std::string_view what)
{
    if (!is_structurally_valid(map)) {
        throw Error(Errc::InvalidMap, std::string(what) + " needs exactly one entrance and one exit");
    }
    if (!feasibility(map).feasible) {
        throw Error(Errc::InvalidMap, std::string(what) + " has no path from entrance to exit");
    }
}

/// Suggestions for the session's current iteration. Each iteration draws
/// from its own stream so replays reproduce them exactly.
inline std::vector<GridMap> produce_suggestions(const Session& s)
{
    Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(s.iteration)));
    if (s.mode == SessionMode::Control) {
        return random_suggestions(kSuggestionCount, rng);
    }
    TargetSet targets;
    for (const auto& m : s.liked) {
        targets.exemplars.push_back(compute_metrics(m));
    }
    const auto result = run_optimisation(targets, s.params, rng);
    return select_suggestions(result.final_feasible, kSuggestionCount, rng);
}

inline std::vector<GridMap> install_suggestions(Session& s)
{
    auto maps = produce_suggestions(s);
    s.current_suggestions.clear();
    for (const auto& m : maps) {
        s.current_suggestions.push_back({m, m});
    }
    return maps;
}

inline void finish_if_full(Session& s)
{
    if (static_cast<int>(s.levels.size()) >= kLevelGoal) {
        s.complete = true;
        s.log.complete = true;
    }
}

} // namespace detail

/// The designer's first level: stored as liked and as level 1.
inline StepResult submit_initial(Session s, const GridMap& map)
{
    if (s.iteration != 0 || !s.levels.empty()) {
        throw Error(Errc::NotAtStart, "the initial design was already submitted");
    }
    detail::require_valid_level(map, "initial design");
    s.liked.push_back(map);
    s.levels.push_back(map);
    s.iteration = 1;
    StepResult out;
    out.suggestions = detail::install_suggestions(s);
    out.session = std::move(s);
    return out;
}

inline StepResult iterate(Session s, const std::vector<Decision>& decisions)
{
    if (s.complete) {
        throw Error(Errc::SessionComplete, "session already holds five levels");
    }
    if (s.iteration == 0) {
        throw Error(Errc::NotStarted, "submit an initial design first");
    }
    std::vector<bool> seen(s.current_suggestions.size(), false);
    for (const auto& d : decisions) {
        if (d.index < 0 || d.index >= static_cast<int>(s.current_suggestions.size())) {
            throw Error(Errc::UnknownSuggestionIndex,
                "no suggestion with index " + std::to_string(d.index));
        }
        if (seen[static_cast<std::size_t>(d.index)]) {
            throw Error(Errc::DuplicateDecision,
                "suggestion " + std::to_string(d.index) + " appears twice");
        }
        seen[static_cast<std::size_t>(d.index)] = true;
        if (d.liked || d.kept) {
            detail::require_valid_level(d.edited, "suggestion " + std::to_string(d.index));
        }
    }

    IterationRecord rec;
    rec.iteration = s.iteration;
    StepResult out;
    for (const auto& d : decisions) {
        auto& slot = s.current_suggestions[static_cast<std::size_t>(d.index)];
        slot.current = d.edited;
        if (!d.liked && !d.kept) {
            continue;
        }
        const int edits = edit_distance(slot.original, d.edited);
        s.liked.push_back(d.edited);
        if (d.liked) {
            ++rec.likes;
            rec.edits_of_liked.push_back(edits);
        }
        if (d.kept) {
            if (static_cast<int>(s.levels.size()) < kLevelGoal) {
                s.levels.push_back(d.edited);
                ++rec.keeps;
                rec.edits_of_kept.push_back(edits);
            } else {
                ++out.ignored_keeps;
            }
        }
    }
    rec.blank_used = s.blank_pending;
    s.blank_pending = false;
    s.log.iterations.push_back(std::move(rec));

    detail::finish_if_full(s);
    if (!s.complete) {
        ++s.iteration;
        out.suggestions = detail::install_suggestions(s);
    }
    out.session = std::move(s);
    return out;
}

/// A from-scratch design; treated as both liked and kept.
inline Session submit_blank(Session s, const GridMap& map)
{
    if (s.complete) {
        throw Error(Errc::SessionComplete, "session already holds five levels");
    }
    if (s.iteration == 0) {
        throw Error(Errc::NotStarted, "submit an initial design first");
    }
    detail::require_valid_level(map, "blank-canvas design");
    s.liked.push_back(map);
    s.levels.push_back(map);
    ++s.log.blank_creations;
    s.blank_pending = true;
    detail::finish_if_full(s);
    if (s.complete) {
        IterationRecord rec;
        rec.iteration = s.iteration;
        rec.blank_used = true;
        s.log.iterations.push_back(std::move(rec));
        s.blank_pending = false;
    }
    return s;
}

// ---------------------------------------------------------------------------
// log and final-screen documents
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json log_to_json(const SessionLog& log)
{
    nlohmann::ordered_json doc;
    doc["group"] = std::string(mode_name(log.group));
    doc["blank_creations"] = log.blank_creations;
    auto iterations = nlohmann::ordered_json::array();
    for (const auto& r : log.iterations) {
        nlohmann::ordered_json it;
        it["iteration"] = r.iteration;
        it["likes"] = r.likes;
        it["keeps"] = r.keeps;
        it["edits_of_liked"] = r.edits_of_liked;
        it["edits_of_kept"] = r.edits_of_kept;
        it["blank_used"] = r.blank_used;
        iterations.push_back(std::move(it));
    }
    doc["iterations"] = std::move(iterations);
    doc["complete"] = log.complete;
    return doc;
}

inline std::string export_log(const Session& s)
{
    return log_to_json(s.log).dump(2) + "\n";
}

inline SessionLog parse_log(std::string_view text)
{
    const auto doc = nlohmann::json::parse(text);
    SessionLog log;
    auto group = mode_from_name(doc.at("group").get<std::string>());
    if (!group) {
        throw Error(Errc::Journal, "unknown group in log document");
    }
    log.group = *group;
    log.blank_creations = doc.at("blank_creations").get<int>();
    log.complete = doc.at("complete").get<bool>();
    for (const auto& it : doc.at("iterations")) {
        IterationRecord r;
        r.iteration = it.at("iteration").get<int>();
        r.likes = it.at("likes").get<int>();
        r.keeps = it.at("keeps").get<int>();
        r.edits_of_liked = it.at("edits_of_liked").get<std::vector<int>>();
        r.edits_of_kept = it.at("edits_of_kept").get<std::vector<int>>();
        r.blank_used = it.at("blank_used").get<bool>();
        log.iterations.push_back(std::move(r));
    }
    return log;
}

/// The five levels then the last suggestion set, each block headed by a
/// `level N` or `suggestion N` line and followed by a blank line.
inline std::string export_final_screen(const Session& s)
{
    if (!s.complete) {
        throw Error(Errc::SessionIncomplete, "final screen is available once five levels are kept");
    }
    std::string out;
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
        out += "level " + std::to_string(i + 1) + "\n" + serialize_map(s.levels[i]) + "\n";
    }
    for (std::size_t i = 0; i < s.current_suggestions.size(); ++i) {
        out += "suggestion " + std::to_string(i + 1) + "\n"
            + serialize_map(s.current_suggestions[i].current) + "\n";
    }
    return out;
}

struct FinalScreen {
    std::vector<GridMap> levels;
    std::vector<GridMap> suggestions;
};

inline FinalScreen parse_final_screen(std::string_view text)
{
    FinalScreen screen;
    std::size_t pos = 0;
    auto next_line = [&]() -> std::optional<std::string_view> {
        if (pos >= text.size()) {
            return std::nullopt;
        }
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    while (auto header = next_line()) {
        if (header->empty()) {
            continue;
        }
        std::string body;
        for (int r = 0; r < kSide; ++r) {
            auto line = next_line();
            if (!line) {
                throw Error(Errc::WrongDimensions, "truncated map block");
            }
            body.append(*line).push_back('\n');
        }
        auto map = parse_map(body);
        if (header->starts_with("level ")) {
            screen.levels.push_back(map);
        } else if (header->starts_with("suggestion ")) {
            screen.suggestions.push_back(map);
        } else {
            throw Error(Errc::Journal, "unknown block header: " + std::string(*header));
        }
    }
    return screen;
}

} // namespace dungeon
