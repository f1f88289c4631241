// dungeon: metric inspection, benchmark runs, parameter sweeps, scripted
// sessions, group statistics, and the session HTTP service.

#include "dungeon/bench.hpp"
#include "dungeon/error.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/metrics.hpp"
#include "dungeon/service.hpp"
#include "dungeon/session.hpp"
#include "dungeon/simulate.hpp"
#include "dungeon/stats.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dungeon;

namespace {

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

int cmd_metrics(const std::string& path)
{
    const GridMap map = parse_map(bench::read_file(path));
    const auto m = compute_metrics(map);
    std::cout << metrics_csv_header() << '\n' << metrics_csv_row(m) << '\n';
    return 0;
}

struct BenchArgs {
    std::string target;
    std::uint64_t seed = 0;
    int evals = 10000;
    std::string out;
    std::string history;
};

int cmd_bench(const BenchArgs& a)
{
    const GridMap target = bench::load_target(a.target);
    GAParams params;
    params.evaluation_budget = a.evals;
    auto r = bench::run_bench(target, a.seed, params);
    r.target_path = a.target;
    if (!a.out.empty()) {
        write_file(a.out, serialize_map(r.best_map));
    }
    if (!a.history.empty()) {
        write_file(a.history, r.history.to_csv());
    }
    std::printf("target,seed,evaluations,generations,final_best_fitness_sum,feasible\n");
    std::printf("%s,%llu,%d,%zu,%.9g,%s\n", a.target.c_str(), static_cast<unsigned long long>(a.seed),
        r.evaluations, r.history.rows.size(), r.final_best_fitness_sum, r.infeasible_best ? "false" : "true");
    if (r.infeasible_best) {
        std::fprintf(stderr, "no feasible individual survived; wrote the infeasible elite\n");
        return 2;
    }
    return 0;
}

int cmd_tune(const std::string& target_path, const std::string& grid, int seeds, int evals)
{
    const GridMap target = bench::load_target(target_path);
    GAParams base;
    base.evaluation_budget = evals;
    const auto combos = bench::expand_grid(bench::parse_grid(grid), base);
    std::cout << bench::tune_table(bench::tune(target, combos, seeds));
    return 0;
}

struct SimulateArgs {
    std::string policy;
    int sessions = 1;
    std::uint64_t seed = 0;
    std::string mode;
    std::optional<int> budget;
    int k = 2;
    std::string logs;
};

int cmd_simulate(const SimulateArgs& a)
{
    sim::Options opt;
    opt.policy = a.policy;
    opt.sessions = a.sessions;
    opt.seed = a.seed;
    opt.budget = a.budget;
    opt.k = a.k;
    if (!sim::known_policy(a.policy)) {
        std::fprintf(stderr, "unknown policy '%s'\n", a.policy.c_str());
        return 1;
    }
    if (!a.mode.empty()) {
        opt.mode = mode_from_name(a.mode);
        if (!opt.mode) {
            std::fprintf(stderr, "unknown mode '%s' (ga or control)\n", a.mode.c_str());
            return 1;
        }
    }
    const auto result = sim::simulate(opt);
    if (!a.logs.empty()) {
        for (const auto& o : result.outcomes) {
            write_file(fs::path(a.logs) / (o.session.id + ".log.json"), export_log(o.session));
        }
    }
    std::cout << sim::result_to_json(opt, result).dump(2) << '\n';
    return 0;
}

// One value per line or comma separated; a non-numeric first line is a header.
std::vector<double> read_column(const std::string& path)
{
    std::istringstream in(bench::read_file(path));
    std::vector<double> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            if (b == std::string::npos) {
                continue;
            }
            cell = cell.substr(b, cell.find_last_not_of(" \t\r") - b + 1);
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size()) {
                if (first) {
                    break;
                }
                throw std::runtime_error(path + ": not a number: '" + cell + "'");
            }
            out.push_back(v);
        }
        first = false;
    }
    return out;
}

int cmd_stats(const std::string& a, const std::string& b)
{
    const auto xa = read_column(a);
    const auto xb = read_column(b);
    const auto r = welch_t(xa, xb);
    std::printf("n_a,n_b,mean_a,mean_b,sd_a,sd_b,t,dof\n");
    std::printf("%zu,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", xa.size(), xb.size(), r.mean_a, r.mean_b, r.sd_a,
        r.sd_b, r.t, r.dof);
    return 0;
}

struct ServeArgs {
    std::string addr = "127.0.0.1:8080";
    std::string data;
    std::optional<int> budget;
    std::optional<std::uint64_t> seed;
    std::string static_dir;
};

int cmd_serve(const ServeArgs& a)
{
    const auto colon = a.addr.rfind(':');
    if (colon == std::string::npos) {
        std::fprintf(stderr, "--addr must be host:port\n");
        return 1;
    }
    const std::string host = a.addr.substr(0, colon);
    const int port = std::stoi(a.addr.substr(colon + 1));

    service::Config cfg;
    if (!a.data.empty()) {
        cfg.data_dir = a.data;
    }
    cfg.budget = a.budget;
    cfg.default_seed = a.seed;
    service::SessionStore store(cfg);

    httplib::Server server;
    // SO_REUSEADDR only, so a busy port fails to bind
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    service::mount(server, store);
    if (!a.static_dir.empty() && !server.set_mount_point("/", a.static_dir)) {
        std::fprintf(stderr, "static directory %s not found\n", a.static_dir.c_str());
        return 1;
    }
    if (!server.bind_to_port(host, port)) {
        std::fprintf(stderr, "cannot bind %s\n", a.addr.c_str());
        return 1;
    }
    std::fprintf(stderr, "listening on %s (%zu sessions recovered)\n", a.addr.c_str(), store.size());
    return server.listen_after_bind() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Evolve and inspect 12x12 dungeon maps"};
    app.require_subcommand(1);

    std::string metrics_path;
    auto* metrics = app.add_subcommand("metrics", "Print M1..M31 of a map as CSV");
    metrics->add_option("map", metrics_path, "Map file")->required();

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Evolve toward a single target map");
    bench_cmd->add_option("--target", bench_args.target, "Target map file")->required();
    bench_cmd->add_option("--seed", bench_args.seed, "RNG seed");
    bench_cmd->add_option("--evals", bench_args.evals, "Evaluation budget")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--out", bench_args.out, "Write the best map here");
    bench_cmd->add_option("--history", bench_args.history, "Write the history CSV here");

    std::string tune_target;
    std::string tune_grid;
    int tune_seeds = 30;
    int tune_evals = 10000;
    auto* tune_cmd = app.add_subcommand("tune", "Sweep GA parameters over seeds");
    tune_cmd->add_option("--target", tune_target, "Target map file")->required();
    tune_cmd->add_option("--grid", tune_grid, "e.g. mutation_rate=0.1,0.5;tournament_size=2,3")->required();
    tune_cmd->add_option("--seeds", tune_seeds, "Seeds per combination")->check(CLI::PositiveNumber);
    tune_cmd->add_option("--evals", tune_evals, "Evaluation budget per run")->check(CLI::PositiveNumber);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Run scripted designer sessions");
    sim_cmd->add_option("--policy", sim_args.policy, "keep-everything, keep-best-k or random-tagger")->required();
    sim_cmd->add_option("--sessions", sim_args.sessions, "Number of sessions")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--seed", sim_args.seed, "RNG seed");
    sim_cmd->add_option("--mode", sim_args.mode, "Force every session into ga or control");
    sim_cmd->add_option("--budget", sim_args.budget, "Evaluation budget per iteration");
    sim_cmd->add_option("--k", sim_args.k, "Likes per iteration for keep-best-k");
    sim_cmd->add_option("--logs", sim_args.logs, "Write each session log into this directory");

    std::string stats_a;
    std::string stats_b;
    auto* stats_cmd = app.add_subcommand("stats", "Welch's t-test on two groups");
    stats_cmd->add_option("--a", stats_a, "CSV of group A values")->required();
    stats_cmd->add_option("--b", stats_b, "CSV of group B values")->required();

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Run the session HTTP service");
    serve_cmd->add_option("--addr", serve_args.addr, "host:port")->envname("DUNGEON_ADDR");
    serve_cmd->add_option("--data", serve_args.data, "Journal directory")->envname("DUNGEON_DATA");
    serve_cmd->add_option("--budget", serve_args.budget, "Evaluation budget per iteration")
        ->envname("DUNGEON_BUDGET");
    serve_cmd->add_option("--seed", serve_args.seed, "Seed for sessions that do not send one")
        ->envname("DUNGEON_SEED");
    serve_cmd->add_option("--static", serve_args.static_dir, "Serve a web client from this directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*metrics) {
            return cmd_metrics(metrics_path);
        }
        if (*bench_cmd) {
            return cmd_bench(bench_args);
        }
        if (*tune_cmd) {
            return cmd_tune(tune_target, tune_grid, tune_seeds, tune_evals);
        }
        if (*sim_cmd) {
            return cmd_simulate(sim_args);
        }
        if (*stats_cmd) {
            return cmd_stats(stats_a, stats_b);
        }
        if (*serve_cmd) {
            return cmd_serve(serve_args);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", std::string(errc_name(e.code())).c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
