#pragma once

#include "dungeon/error.hpp"
#include "dungeon/evolution.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/session.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

// Append-only session journal: one JSON object per line. Replaying the
// events in order through the session operations rebuilds the session
// exactly, since every suggestion set is a pure function of (seed,
// iteration, liked maps).

namespace dungeon::journal {

using json = nlohmann::ordered_json;

inline json map_to_json(const GridMap& m)
{
    return map_rows(m);
}

inline GridMap map_from_json(const nlohmann::json& j)
{
    const auto& rows = j.is_object() ? j.at("rows") : j;
    if (!rows.is_array()) {
        throw Error(Errc::WrongDimensions, "map must be a list of 12 row strings");
    }
    std::string text;
    for (const auto& r : rows) {
        if (!r.is_string()) {
            throw Error(Errc::WrongDimensions, "map rows must be strings");
        }
        text += r.get<std::string>();
        text += '\n';
    }
    return parse_map(text);
}

inline json params_to_json(const GAParams& p)
{
    json j;
    j["mutation_rate"] = p.mutation_rate;
    j["tournament_size"] = p.tournament_size;
    j["elite_count"] = p.elite_count;
    j["population_size"] = p.population_size;
    j["generations"] = p.generations;
    j["evaluation_budget"] = p.evaluation_budget;
    return j;
}

inline GAParams params_from_json(const nlohmann::json& j)
{
    GAParams p;
    p.mutation_rate = j.at("mutation_rate").get<double>();
    p.tournament_size = j.at("tournament_size").get<int>();
    p.elite_count = j.at("elite_count").get<int>();
    p.population_size = j.at("population_size").get<int>();
    p.generations = j.at("generations").get<int>();
    p.evaluation_budget = j.at("evaluation_budget").get<int>();
    return p;
}

inline json created(const Session& s)
{
    json j;
    j["event"] = "session-created";
    j["session_id"] = s.id;
    j["user_id"] = s.user_id;
    j["seed"] = s.seed;
    j["params"] = params_to_json(s.params);
    return j;
}

inline json initial_submitted(const GridMap& map)
{
    json j;
    j["event"] = "initial-submitted";
    j["map"] = map_to_json(map);
    return j;
}

inline json iterated(const std::vector<Decision>& decisions)
{
    json j;
    j["event"] = "iterated";
    auto arr = json::array();
    for (const auto& d : decisions) {
        json e;
        e["index"] = d.index;
        e["map"] = map_to_json(d.edited);
        e["liked"] = d.liked;
        e["kept"] = d.kept;
        arr.push_back(std::move(e));
    }
    j["decisions"] = std::move(arr);
    return j;
}

inline json blank_submitted(const GridMap& map)
{
    json j;
    j["event"] = "blank-submitted";
    j["map"] = map_to_json(map);
    return j;
}

inline json completed()
{
    json j;
    j["event"] = "completed";
    return j;
}

inline std::vector<Decision> decisions_from_json(const nlohmann::json& arr)
{
    std::vector<Decision> out;
    for (const auto& e : arr) {
        Decision d;
        d.index = e.at("index").get<int>();
        d.edited = map_from_json(e.at("map"));
        d.liked = e.value("liked", false);
        d.kept = e.value("kept", false);
        out.push_back(std::move(d));
    }
    return out;
}

/// Rebuilds a session from its journal lines.
inline Session replay(std::string_view text)
{
    std::optional<Session> s;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        nlohmann::json ev;
        try {
            ev = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            // a torn final line from a crash mid-write is dropped
            if (in.peek() == std::char_traits<char>::eof()) {
                break;
            }
            throw Error(Errc::Journal, "journal line " + std::to_string(lineno) + ": " + e.what());
        }
        const auto kind = ev.at("event").get<std::string>();
        if (kind == "session-created") {
            s = new_session(ev.at("user_id").get<std::string>(), ev.at("seed").get<std::uint64_t>(),
                params_from_json(ev.at("params")), ev.at("session_id").get<std::string>());
            continue;
        }
        if (!s) {
            throw Error(Errc::Journal, "journal does not start with session-created");
        }
        if (kind == "initial-submitted") {
            s = submit_initial(std::move(*s), map_from_json(ev.at("map"))).session;
        } else if (kind == "iterated") {
            s = iterate(std::move(*s), decisions_from_json(ev.at("decisions"))).session;
        } else if (kind == "blank-submitted") {
            s = submit_blank(std::move(*s), map_from_json(ev.at("map")));
        } else if (kind == "completed") {
            if (!s->complete) {
                throw Error(Errc::Journal, "completed event on an incomplete session");
            }
        } else {
            throw Error(Errc::Journal, "unknown journal event '" + kind + "'");
        }
    }
    if (!s) {
        throw Error(Errc::Journal, "empty journal");
    }
    return *s;
}

class JournalFile {
public:
    explicit JournalFile(std::filesystem::path path)
        : path_(std::move(path))
    {
    }

    const std::filesystem::path& path() const noexcept { return path_; }

    void append(const json& event) const
    {
        std::ofstream out(path_, std::ios::app | std::ios::binary);
        if (!out) {
            throw Error(Errc::Journal, "cannot open journal " + path_.string());
        }
        out << event.dump() << '\n';
        out.flush();
        if (!out) {
            throw Error(Errc::Journal, "cannot write journal " + path_.string());
        }
    }

    std::string read() const
    {
        std::ifstream in(path_, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

private:
    std::filesystem::path path_;
};

} // namespace dungeon::journal
