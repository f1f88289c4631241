#pragma once

#include "dungeon/error.hpp"
#include "dungeon/journal.hpp"
#include "dungeon/session.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dungeon::service {

using json = nlohmann::ordered_json;

struct Config {
    /// Journal directory; sessions live only in memory when unset.
    std::optional<std::filesystem::path> data_dir;
    /// Overrides GAParams::evaluation_budget for every new session.
    std::optional<int> budget;
    /// Seed for sessions created without one; random when unset.
    std::optional<std::uint64_t> default_seed;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

struct ApiError {
    std::string code;
    int http_status = 500;
};

inline ApiError api_error_for(Errc e)
{
    switch (e) {
    case Errc::EmptyUserId: return {"empty_user_id", 422};
    case Errc::WrongDimensions:
    case Errc::UnknownGlyph:
    case Errc::EntranceCount:
    case Errc::ExitCount:
    case Errc::StructurallyInvalid:
    case Errc::InvalidMap: return {"invalid_map", 422};
    case Errc::UnknownSuggestionIndex: return {"unknown_suggestion_index", 422};
    case Errc::DuplicateDecision: return {"duplicate_decision", 422};
    case Errc::NotAtStart: return {"not_at_start", 409};
    case Errc::NotStarted: return {"not_started", 409};
    case Errc::SessionComplete: return {"session_complete", 409};
    case Errc::SessionIncomplete: return {"session_incomplete", 409};
    case Errc::InvalidParams: return {"invalid_params", 422};
    default: return {std::string(errc_name(e)), 500};
    }
}

inline Response error_response(const std::string& code, int status, const std::string& message)
{
    json body;
    body["code"] = code;
    body["message"] = message;
    return {status, body.dump(), "application/json"};
}

inline Response error_response(const Error& e)
{
    const auto api = api_error_for(e.code());
    return error_response(api.code, api.http_status, e.what());
}

inline json api_map(const GridMap& m)
{
    json j;
    j["rows"] = map_rows(m);
    return j;
}

inline json api_maps(const std::vector<GridMap>& maps)
{
    auto arr = json::array();
    for (const auto& m : maps) {
        arr.push_back(api_map(m));
    }
    return arr;
}

/// Client-visible state. Never carries the session mode.
inline json state_json(const Session& s)
{
    json j;
    j["session_id"] = s.id;
    j["iteration"] = s.iteration;
    j["levels"] = api_maps(s.levels);
    auto suggestions = json::array();
    for (const auto& sg : s.current_suggestions) {
        json card;
        card["original"] = api_map(sg.original);
        card["current"] = api_map(sg.current);
        suggestions.push_back(std::move(card));
    }
    j["suggestions"] = std::move(suggestions);
    j["liked_count"] = s.liked.size();
    j["complete"] = s.complete;
    return j;
}

class SessionStore {
public:
    explicit SessionStore(Config config = {})
        : config_(std::move(config))
    {
        if (config_.data_dir) {
            std::filesystem::create_directories(*config_.data_dir);
            recover();
        }
    }

    const Config& config() const noexcept { return config_; }

    std::size_t size() const
    {
        std::shared_lock lock(index_mutex_);
        return sessions_.size();
    }

    std::optional<Session> snapshot(const std::string& id) const
    {
        auto entry = find(id);
        if (!entry) {
            return std::nullopt;
        }
        std::shared_lock lock(entry->mutex);
        return entry->session;
    }

    Response create(std::string_view body)
    {
        return guarded([&]() -> Response {
            const auto req = parse_body(body);
            if (!req.is_object() || !req.contains("user_id") || !req["user_id"].is_string()) {
                return error_response("bad_request", 400, "body needs a string user_id");
            }
            std::uint64_t seed;
            if (req.contains("seed") && !req["seed"].is_null()) {
                if (!req["seed"].is_number_integer()) {
                    return error_response("bad_request", 400, "seed must be an integer");
                }
                seed = req["seed"].get<std::uint64_t>();
            } else if (config_.default_seed) {
                seed = *config_.default_seed;
            } else {
                std::random_device rd;
                seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
            }
            GAParams params;
            if (config_.budget) {
                params.evaluation_budget = *config_.budget;
            }
            Session s = new_session(req["user_id"].get<std::string>(), seed, params);

            auto entry = std::make_shared<Entry>();
            if (config_.data_dir) {
                entry->journal.emplace(*config_.data_dir / (s.id + ".jsonl"));
                entry->journal->append(journal::created(s));
            }
            entry->session = s;
            {
                std::unique_lock lock(index_mutex_);
                sessions_[s.id] = entry;
            }
            json out;
            out["session_id"] = s.id;
            out["iteration"] = s.iteration;
            out["levels"] = json::array();
            out["complete"] = false;
            return {201, out.dump()};
        });
    }

    Response submit_initial(const std::string& id, std::string_view body)
    {
        return mutate(id, [&](const Session& current, Entry& entry) -> std::pair<Session, Response> {
            const auto req = parse_body(body);
            const GridMap map = journal::map_from_json(req.at("map"));
            auto step = dungeon::submit_initial(current, map);
            record(entry, journal::initial_submitted(map));
            json out;
            out["suggestions"] = api_maps(step.suggestions);
            out["iteration"] = step.session.iteration;
            out["levels"] = api_maps(step.session.levels);
            out["complete"] = false;
            return {std::move(step.session), {200, out.dump()}};
        });
    }

    Response iterate(const std::string& id, std::string_view body)
    {
        return mutate(id, [&](const Session& current, Entry& entry) -> std::pair<Session, Response> {
            const auto req = parse_body(body);
            std::vector<Decision> decisions;
            if (req.contains("decisions")) {
                decisions = journal::decisions_from_json(req.at("decisions"));
            }
            auto step = dungeon::iterate(current, decisions);
            record(entry, journal::iterated(decisions));
            json out;
            out["complete"] = step.session.complete;
            out["iteration"] = step.session.iteration;
            out["levels"] = api_maps(step.session.levels);
            if (step.session.complete) {
                record(entry, journal::completed());
            } else {
                out["suggestions"] = api_maps(step.suggestions);
            }
            if (step.ignored_keeps > 0) {
                out["ignored_keeps"] = step.ignored_keeps;
            }
            return {std::move(step.session), {200, out.dump()}};
        });
    }

    Response blank(const std::string& id, std::string_view body)
    {
        return mutate(id, [&](const Session& current, Entry& entry) -> std::pair<Session, Response> {
            const auto req = parse_body(body);
            const GridMap map = journal::map_from_json(req.at("map"));
            Session next = dungeon::submit_blank(current, map);
            record(entry, journal::blank_submitted(map));
            if (next.complete) {
                record(entry, journal::completed());
            }
            Response r{200, state_json(next).dump()};
            return {std::move(next), std::move(r)};
        });
    }

    Response state(const std::string& id) const
    {
        return read(id, [](const Session& s) { return Response{200, state_json(s).dump()}; });
    }

    Response log(const std::string& id) const
    {
        return read(id, [](const Session& s) { return Response{200, export_log(s)}; });
    }

    Response final_screen(const std::string& id) const
    {
        return read(id, [](const Session& s) {
            return Response{200, export_final_screen(s), "text/plain; charset=utf-8"};
        });
    }

private:
    struct Entry {
        mutable std::shared_mutex mutex;
        Session session;
        std::optional<journal::JournalFile> journal;
        std::vector<journal::json> pending;
    };

    static nlohmann::json parse_body(std::string_view body)
    {
        if (body.empty()) {
            return nlohmann::json::object();
        }
        return nlohmann::json::parse(body);
    }

    static void record(Entry& entry, journal::json event) { entry.pending.push_back(std::move(event)); }

    template <class F>
    static Response guarded(F&& f)
    {
        try {
            return f();
        } catch (const Error& e) {
            return error_response(e);
        } catch (const nlohmann::json::exception& e) {
            return error_response("bad_request", 400, e.what());
        } catch (const std::exception& e) {
            return error_response("internal", 500, e.what());
        }
    }

    std::shared_ptr<Entry> find(const std::string& id) const
    {
        std::shared_lock lock(index_mutex_);
        auto it = sessions_.find(id);
        return it == sessions_.end() ? nullptr : it->second;
    }

    static Response not_found(const std::string& id)
    {
        return error_response("not_found", 404, "no session '" + id + "'");
    }

    template <class F>
    Response read(const std::string& id, F&& f) const
    {
        auto entry = find(id);
        if (!entry) {
            return not_found(id);
        }
        return guarded([&] {
            std::shared_lock lock(entry->mutex);
            return f(entry->session);
        });
    }

    // Runs a transition on a copy; the journal is written before the new
    // state is committed, so a failure leaves both untouched.
    template <class F>
    Response mutate(const std::string& id, F&& f)
    {
        auto entry = find(id);
        if (!entry) {
            return not_found(id);
        }
        std::unique_lock lock(entry->mutex);
        entry->pending.clear();
        return guarded([&]() -> Response {
            auto [next, response] = f(entry->session, *entry);
            if (entry->journal) {
                for (const auto& ev : entry->pending) {
                    entry->journal->append(ev);
                }
            }
            entry->pending.clear();
            entry->session = std::move(next);
            return response;
        });
    }

    void recover()
    {
        for (const auto& file : std::filesystem::directory_iterator(*config_.data_dir)) {
            if (file.path().extension() != ".jsonl") {
                continue;
            }
            journal::JournalFile jf(file.path());
            auto entry = std::make_shared<Entry>();
            entry->session = journal::replay(jf.read());
            entry->journal.emplace(file.path());
            sessions_[entry->session.id] = std::move(entry);
        }
    }

    Config config_;
    mutable std::shared_mutex index_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

/// Registers the /api routes on `server`.
inline void mount(httplib::Server& server, SessionStore& store)
{
    auto send = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Post("/api/sessions", [&store, send](const httplib::Request& req, httplib::Response& res) {
        send(res, store.create(req.body));
    });
    server.Post(R"(/api/sessions/([^/]+)/initial)",
        [&store, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.submit_initial(req.matches[1], req.body));
        });
    server.Post(R"(/api/sessions/([^/]+)/iterate)",
        [&store, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.iterate(req.matches[1], req.body));
        });
    server.Post(R"(/api/sessions/([^/]+)/blank)",
        [&store, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.blank(req.matches[1], req.body));
        });
    server.Get(R"(/api/sessions/([^/]+)/log)",
        [&store, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.log(req.matches[1]));
        });
    server.Get(R"(/api/sessions/([^/]+)/export)",
        [&store, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.final_screen(req.matches[1]));
        });
    server.Get(R"(/api/sessions/([^/]+))",
        [&store, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.state(req.matches[1]));
        });
    server.set_read_timeout(120, 0);
    server.set_write_timeout(120, 0);
}

} // namespace dungeon::service
