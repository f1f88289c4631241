#pragma once

// Slow, independent re-implementations used as test oracles. They work on
// the serialized text of a map and share no code with the library beyond
// serialize_map.

#include "dungeon/grid.hpp"
#include "dungeon/metrics.hpp"
#include "dungeon/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

namespace oracle {

inline constexpr int N = 12;
inline constexpr int kUnreached = std::numeric_limits<int>::max();

struct Grid {
    char g[N][N];

    explicit Grid(const dungeon::GridMap& m)
    {
        const std::string text = dungeon::serialize_map(m);
        for (int r = 0; r < N; ++r) {
            for (int c = 0; c < N; ++c) {
                g[r][c] = text[static_cast<std::size_t>(r * (N + 1) + c)];
            }
        }
    }

    bool open(int r, int c) const { return r >= 0 && r < N && c >= 0 && c < N && g[r][c] != '#'; }

    int count(char ch) const
    {
        int n = 0;
        for (auto& row : g) {
            for (char x : row) {
                n += x == ch;
            }
        }
        return n;
    }

    void find(char ch, int& r0, int& c0) const
    {
        for (int r = 0; r < N; ++r) {
            for (int c = 0; c < N; ++c) {
                if (g[r][c] == ch) {
                    r0 = r;
                    c0 = c;
                    return;
                }
            }
        }
        r0 = c0 = -1;
    }
};

/// Step distances from every listed source by repeated relaxation sweeps.
inline std::vector<std::vector<int>> relax_distances(const Grid& g, const std::vector<std::pair<int, int>>& sources)
{
    std::vector<std::vector<int>> d(N, std::vector<int>(N, kUnreached));
    for (auto [r, c] : sources) {
        d[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = 0;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < N; ++r) {
            for (int c = 0; c < N; ++c) {
                if (!g.open(r, c)) {
                    continue;
                }
                const int dr[4] = {1, -1, 0, 0};
                const int dc[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nr = r + dr[k];
                    const int nc = c + dc[k];
                    if (!g.open(nr, nc)) {
                        continue;
                    }
                    const int via = d[static_cast<std::size_t>(nr)][static_cast<std::size_t>(nc)];
                    auto& mine = d[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
                    if (via != kUnreached && via + 1 < mine) {
                        mine = via + 1;
                        changed = true;
                    }
                }
            }
        }
    }
    return d;
}

/// Shortest entrance-to-exit path in tiles, or 0 when there is none.
inline int path_tiles(const Grid& g)
{
    int sr, sc, xr, xc;
    g.find('S', sr, sc);
    g.find('X', xr, xc);
    const auto d = relax_distances(g, {{sr, sc}});
    const int steps = d[static_cast<std::size_t>(xr)][static_cast<std::size_t>(xc)];
    return steps == kUnreached ? 0 : steps + 1;
}

inline double m1(const Grid& g) { return path_tiles(g) / 144.0; }

inline double m2(const Grid& g)
{
    const int w = g.count('#');
    return static_cast<double>(w) / (144 - w);
}

/// Tiles enclosed in at least one direction (the corridor tile set).
inline bool corridor_tile(const Grid& g, int r, int c)
{
    if (!g.open(r, c)) {
        return false;
    }
    const bool horiz = !g.open(r - 1, c) && !g.open(r + 1, c);
    const bool vert = !g.open(r, c - 1) && !g.open(r, c + 1);
    return horiz || vert;
}

/// Passable, non-corridor tiles not connected (through such tiles) to any 2x2 open block.
inline int dead_tiles(const Grid& g)
{
    int label[N][N];
    for (auto& row : label) {
        for (int& x : row) {
            x = -1;
        }
    }
    // labels by min-propagation over the non-corridor open tiles
    for (int r = 0; r < N; ++r) {
        for (int c = 0; c < N; ++c) {
            if (g.open(r, c) && !corridor_tile(g, r, c)) {
                label[r][c] = r * N + c;
            }
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < N; ++r) {
            for (int c = 0; c < N; ++c) {
                if (label[r][c] < 0) {
                    continue;
                }
                const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
                for (auto& n : nbr) {
                    if (n[0] < 0 || n[0] >= N || n[1] < 0 || n[1] >= N) {
                        continue;
                    }
                    const int other = label[n[0]][n[1]];
                    if (other >= 0 && other < label[r][c]) {
                        label[r][c] = other;
                        changed = true;
                    }
                }
            }
        }
    }
    std::vector<bool> chamber(N * N, false);
    for (int r = 0; r + 1 < N; ++r) {
        for (int c = 0; c + 1 < N; ++c) {
            if (g.open(r, c) && g.open(r + 1, c) && g.open(r, c + 1) && g.open(r + 1, c + 1)) {
                chamber[static_cast<std::size_t>(label[r][c])] = true;
            }
        }
    }
    int dead = 0;
    for (int r = 0; r < N; ++r) {
        for (int c = 0; c < N; ++c) {
            if (label[r][c] >= 0 && !chamber[static_cast<std::size_t>(label[r][c])]) {
                ++dead;
            }
        }
    }
    return dead;
}

inline double m14(const Grid& g) { return dead_tiles(g) / 144.0; }
inline double m17(const Grid& g) { return g.count('E') / 144.0; }
inline double m18(const Grid& g) { return g.count('T') / 144.0; }

struct Halves {
    int left = 0, right = 0, top = 0, bottom = 0, total = 0;
};

inline Halves halves(const Grid& g, char ch)
{
    Halves h;
    for (int r = 0; r < N; ++r) {
        for (int c = 0; c < N; ++c) {
            if (g.g[r][c] != ch) {
                continue;
            }
            ++h.total;
            (c < 6 ? h.left : h.right) += 1;
            (r < 6 ? h.top : h.bottom) += 1;
        }
    }
    return h;
}

inline double safe_div(int num, int den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

/// M21..M31 in order.
inline std::vector<double> symmetry(const Grid& g)
{
    const Halves w = halves(g, '#');
    const Halves e = halves(g, 'E');
    const Halves t = halves(g, 'T');
    std::vector<double> out{
        safe_div(std::abs(w.left - w.right), w.total),
        safe_div(std::abs(w.top - w.bottom), w.total),
        safe_div(std::abs(e.left - e.right), e.total),
        safe_div(std::abs(e.top - e.bottom), e.total),
        safe_div(std::abs(t.left - t.right), t.total),
        safe_div(std::abs(t.top - t.bottom), t.total),
        safe_div(std::abs(t.left - e.right), t.total + e.total),
        safe_div(std::abs(t.top - e.bottom), t.total + e.total),
    };
    int lr = 0, tb = 0, tr = 0;
    for (int r = 0; r < N; ++r) {
        for (int c = 0; c < N; ++c) {
            lr += g.g[r][c] == g.g[r][N - 1 - c];
            tb += g.g[r][c] == g.g[N - 1 - r][c];
            tr += g.g[r][c] == g.g[c][r];
        }
    }
    out.push_back(lr / 144.0);
    out.push_back(tb / 144.0);
    out.push_back(tr / 144.0);
    return out;
}

/// Grows a window around the entrance one ring at a time and stops at the
/// first ring that would include `ch`.
inline double window_fraction(const Grid& g, char ch)
{
    int er, ec;
    g.find('S', er, ec);
    int best_area = 0;
    for (int rad = 0; rad < N; ++rad) {
        int area = 0;
        bool clear = true;
        for (int r = 0; r < N; ++r) {
            for (int c = 0; c < N; ++c) {
                if (std::abs(r - er) <= rad && std::abs(c - ec) <= rad) {
                    ++area;
                    clear = clear && g.g[r][c] != ch;
                }
            }
        }
        if (!clear) {
            break;
        }
        best_area = area;
    }
    return best_area / 144.0;
}

struct Safety {
    double mean = 0, sd = 0;
};

inline Safety safety(const Grid& g)
{
    int sr, sc;
    g.find('S', sr, sc);
    std::vector<std::pair<int, int>> enemies;
    std::vector<std::pair<int, int>> treasures;
    for (int r = 0; r < N; ++r) {
        for (int c = 0; c < N; ++c) {
            if (g.g[r][c] == 'E') {
                enemies.emplace_back(r, c);
            }
            if (g.g[r][c] == 'T') {
                treasures.emplace_back(r, c);
            }
        }
    }
    if (treasures.empty()) {
        return {};
    }
    const auto de = relax_distances(g, {{sr, sc}});
    std::vector<double> s;
    for (auto [r, c] : treasures) {
        const int a = de[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        if (a == kUnreached) {
            s.push_back(0.0);
            continue;
        }
        int best = kUnreached;
        for (auto en : enemies) {
            const auto dn = relax_distances(g, {en});
            best = std::min(best, dn[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        }
        s.push_back(best == kUnreached ? 1.0 : static_cast<double>(best - a) / (best + a));
    }
    double mean = 0;
    for (double x : s) {
        mean += x;
    }
    mean /= static_cast<double>(s.size());
    double var = 0;
    for (double x : s) {
        var += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(var / static_cast<double>(s.size()))};
}

/// Goal-programming distances, exemplar loop outermost.
inline std::vector<double> fitness(const dungeon::MetricVector& m, const std::vector<dungeon::MetricVector>& ex,
    bool feasible)
{
    const int first = feasible ? 1 : 2;
    std::vector<double> out(static_cast<std::size_t>(32 - first), std::numeric_limits<double>::infinity());
    for (const auto& t : ex) {
        for (int i = first; i <= 31; ++i) {
            auto& slot = out[static_cast<std::size_t>(i - first)];
            slot = std::min(slot, std::fabs(m(i) - t(i)));
        }
    }
    return out;
}

/// Copeland scores from a full pairwise vote matrix.
inline std::vector<int> copeland(const std::vector<std::vector<double>>& pop)
{
    const std::size_t n = pop.size();
    std::vector<std::vector<int>> beats(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            int better = 0, worse = 0;
            for (std::size_t k = 0; k < pop[i].size(); ++k) {
                better += pop[i][k] < pop[j][k];
                worse += pop[i][k] > pop[j][k];
            }
            beats[i][j] = better > worse;
        }
    }
    std::vector<int> score(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            score[i] += beats[i][j] - beats[j][i];
        }
    }
    return score;
}

} // namespace oracle
