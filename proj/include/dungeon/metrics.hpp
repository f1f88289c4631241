#pragma once

#include "dungeon/error.hpp"
#include "dungeon/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

namespace dungeon {

inline constexpr int kMetricCount = 31;

/// M1..M31, addressed with the 1-based metric number.
class MetricVector {
public:
    double operator()(int i) const noexcept { return values_[static_cast<std::size_t>(i - 1)]; }
    double& operator()(int i) noexcept { return values_[static_cast<std::size_t>(i - 1)]; }

    const std::array<double, kMetricCount>& values() const noexcept { return values_; }

    friend bool operator==(const MetricVector&, const MetricVector&) = default;

private:
    std::array<double, kMetricCount> values_{};
};

struct Corridor {
    std::vector<Position> tiles;
    int length = 0;
};

struct Chamber {
    std::vector<Position> tiles;
    int height = 0;
    int width = 0;

    /// Bounding-box area.
    int area() const noexcept { return height * width; }
    double squareness() const noexcept
    {
        const int side = std::min(height, width);
        return static_cast<double>(area()) / static_cast<double>(side * side);
    }
};

struct Segmentation {
    std::vector<Corridor> corridors;
    std::vector<Chamber> chambers;
    std::vector<Position> dead;
};

struct SymmetryCounts {
    struct Halves {
        int left = 0, right = 0, top = 0, bottom = 0, total = 0;
    };
    Halves wall, treasure, enemy;
};

namespace detail {

inline bool blocked(const GridMap& map, int r, int c) noexcept
{
    if (r < 0 || r >= kSide || c < 0 || c >= kSide) {
        return true;
    }
    return !passable(map.at(r, c));
}

inline void require_structure(const GridMap& map)
{
    try {
        validate_structure(map);
    } catch (const Error& e) {
        throw Error(Errc::StructurallyInvalid, e.what());
    }
}

inline double ratio_or_zero(double num, double den) noexcept
{
    return den == 0.0 ? 0.0 : num / den;
}

struct Summary {
    double max = 0, min = 0, mean = 0;
};

template <class T>
Summary summarize(const std::vector<T>& xs)
{
    if (xs.empty()) {
        return {};
    }
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    double sum = 0;
    for (auto x : xs) {
        sum += static_cast<double>(x);
    }
    return {static_cast<double>(*hi), static_cast<double>(*lo), sum / static_cast<double>(xs.size())};
}

} // namespace detail

// ---------------------------------------------------------------------------
// corridor / chamber / dead-tile segmentation
// ---------------------------------------------------------------------------

inline Segmentation segment(const GridMap& map)
{
    detail::require_structure(map);
    using detail::blocked;

    // A tile is horizontally enclosed when both vertical neighbours are blocked
    // (walls or the grid edge), and vertically enclosed symmetrically.
    std::array<bool, kCells> h_enclosed{};
    std::array<bool, kCells> v_enclosed{};
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            if (!passable(map.at(r, c))) {
                continue;
            }
            const int i = r * kSide + c;
            h_enclosed[static_cast<std::size_t>(i)] = blocked(map, r - 1, c) && blocked(map, r + 1, c);
            v_enclosed[static_cast<std::size_t>(i)] = blocked(map, r, c - 1) && blocked(map, r, c + 1);
        }
    }

    Segmentation seg;
    std::array<bool, kCells> in_corridor{};

    for (int r = 0; r < kSide; ++r) {
        int c = 0;
        while (c < kSide) {
            if (!h_enclosed[static_cast<std::size_t>(r * kSide + c)]) {
                ++c;
                continue;
            }
            Corridor run;
            while (c < kSide && h_enclosed[static_cast<std::size_t>(r * kSide + c)]) {
                run.tiles.push_back({r, c});
                in_corridor[static_cast<std::size_t>(r * kSide + c)] = true;
                ++c;
            }
            run.length = static_cast<int>(run.tiles.size());
            seg.corridors.push_back(std::move(run));
        }
    }
    for (int c = 0; c < kSide; ++c) {
        int r = 0;
        while (r < kSide) {
            const auto i = static_cast<std::size_t>(r * kSide + c);
            // Tiles enclosed both ways were already emitted as a horizontal
            // run of length one.
            if (!v_enclosed[i] || h_enclosed[i]) {
                ++r;
                continue;
            }
            Corridor run;
            while (r < kSide) {
                const auto j = static_cast<std::size_t>(r * kSide + c);
                if (!v_enclosed[j] || h_enclosed[j]) {
                    break;
                }
                run.tiles.push_back({r, c});
                in_corridor[j] = true;
                ++r;
            }
            run.length = static_cast<int>(run.tiles.size());
            seg.corridors.push_back(std::move(run));
        }
    }

    std::array<int, kCells> component;
    component.fill(-1);
    std::vector<std::vector<Position>> components;
    for (int start = 0; start < kCells; ++start) {
        const auto s = static_cast<std::size_t>(start);
        if (!passable(map[start]) || in_corridor[s] || component[s] >= 0) {
            continue;
        }
        const int id = static_cast<int>(components.size());
        std::vector<Position> tiles;
        std::vector<int> stack{start};
        component[s] = id;
        while (!stack.empty()) {
            const Position p = Position::from_index(stack.back());
            stack.pop_back();
            tiles.push_back(p);
            for (const auto& [dr, dc] : kSteps) {
                const Position n{p.row + dr, p.col + dc};
                if (!n.in_bounds()) {
                    continue;
                }
                const auto ni = static_cast<std::size_t>(n.index());
                if (passable(map.at(n)) && !in_corridor[ni] && component[ni] < 0) {
                    component[ni] = id;
                    stack.push_back(n.index());
                }
            }
        }
        std::sort(tiles.begin(), tiles.end(),
            [](Position a, Position b) { return a.index() < b.index(); });
        components.push_back(std::move(tiles));
    }

    std::vector<bool> has_block(components.size(), false);
    for (int r = 0; r + 1 < kSide; ++r) {
        for (int c = 0; c + 1 < kSide; ++c) {
            if (passable(map.at(r, c)) && passable(map.at(r + 1, c)) && passable(map.at(r, c + 1))
                && passable(map.at(r + 1, c + 1))) {
                // corridor tiles can never sit inside a 2x2 passable block
                has_block[static_cast<std::size_t>(component[static_cast<std::size_t>(r * kSide + c)])] = true;
            }
        }
    }

    for (std::size_t id = 0; id < components.size(); ++id) {
        auto& tiles = components[id];
        if (!has_block[id]) {
            seg.dead.insert(seg.dead.end(), tiles.begin(), tiles.end());
            continue;
        }
        int r0 = kSide, r1 = -1, c0 = kSide, c1 = -1;
        for (auto p : tiles) {
            r0 = std::min(r0, p.row);
            r1 = std::max(r1, p.row);
            c0 = std::min(c0, p.col);
            c1 = std::max(c1, p.col);
        }
        seg.chambers.push_back({std::move(tiles), r1 - r0 + 1, c1 - c0 + 1});
    }
    std::sort(seg.dead.begin(), seg.dead.end(),
        [](Position a, Position b) { return a.index() < b.index(); });
    return seg;
}

// ---------------------------------------------------------------------------
// entrance window, treasure safety, symmetry
// ---------------------------------------------------------------------------

/// Area fraction of the largest Chebyshev window around the entrance that
/// holds no tile of `kind`. The window is clipped to the grid.
inline double entrance_clear_fraction(const GridMap& map, TileKind kind)
{
    if (kind != TileKind::Enemy && kind != TileKind::Treasure) {
        throw Error(Errc::InvalidKind, "entrance window is defined for Enemy and Treasure only");
    }
    detail::require_structure(map);
    if (map.count(kind) == 0) {
        return 1.0;
    }
    const Position e = *map.find_first(TileKind::Entrance);
    int nearest = kSide;
    for (int i = 0; i < kCells; ++i) {
        if (map[i] != kind) {
            continue;
        }
        const Position p = Position::from_index(i);
        nearest = std::min(nearest, std::max(std::abs(p.row - e.row), std::abs(p.col - e.col)));
    }
    const int radius = nearest - 1;
    const int h = std::min(kSide - 1, e.row + radius) - std::max(0, e.row - radius) + 1;
    const int w = std::min(kSide - 1, e.col + radius) - std::max(0, e.col - radius) + 1;
    return static_cast<double>(h * w) / kCells;
}

struct SafetyStats {
    double mean = 0;
    double sd = 0;
};

/// Per-treasure safety (d_enemy - d_entrance) / (d_enemy + d_entrance), in
/// steps. No enemies, or no enemy reachable from the treasure, scores 1; a
/// treasure unreachable from the entrance scores 0.
inline SafetyStats treasure_safety(const GridMap& map)
{
    detail::require_structure(map);
    std::vector<Position> treasures;
    std::vector<Position> enemies;
    for (int i = 0; i < kCells; ++i) {
        if (map[i] == TileKind::Treasure) {
            treasures.push_back(Position::from_index(i));
        } else if (map[i] == TileKind::Enemy) {
            enemies.push_back(Position::from_index(i));
        }
    }
    if (treasures.empty()) {
        return {};
    }
    const auto from_entrance = bfs_distances(map, *map.find_first(TileKind::Entrance));

    // Multi-source distance to the nearest enemy; paths are symmetric.
    std::array<int, kCells> to_enemy;
    to_enemy.fill(-1);
    {
        std::array<int, kCells> queue{};
        int head = 0, tail = 0;
        for (auto p : enemies) {
            to_enemy[static_cast<std::size_t>(p.index())] = 0;
            queue[static_cast<std::size_t>(tail++)] = p.index();
        }
        while (head < tail) {
            const int cur = queue[static_cast<std::size_t>(head++)];
            const Position p = Position::from_index(cur);
            for (const auto& [dr, dc] : kSteps) {
                const Position n{p.row + dr, p.col + dc};
                if (!n.in_bounds() || !passable(map.at(n))) {
                    continue;
                }
                auto& d = to_enemy[static_cast<std::size_t>(n.index())];
                if (d < 0) {
                    d = to_enemy[static_cast<std::size_t>(cur)] + 1;
                    queue[static_cast<std::size_t>(tail++)] = n.index();
                }
            }
        }
    }

    std::vector<double> scores;
    scores.reserve(treasures.size());
    for (auto t : treasures) {
        const int de = from_entrance[static_cast<std::size_t>(t.index())];
        const int dn = to_enemy[static_cast<std::size_t>(t.index())];
        double s;
        if (de < 0) {
            s = 0.0;
        } else if (enemies.empty() || dn < 0) {
            s = 1.0;
        } else {
            s = static_cast<double>(dn - de) / static_cast<double>(dn + de);
            s = std::clamp(s, -1.0, 1.0);
        }
        scores.push_back(s);
    }
    double mean = 0;
    for (double s : scores) {
        mean += s;
    }
    mean /= static_cast<double>(scores.size());
    double var = 0;
    for (double s : scores) {
        var += (s - mean) * (s - mean);
    }
    var /= static_cast<double>(scores.size());
    return {mean, std::sqrt(var)};
}

inline SymmetryCounts symmetry_counts(const GridMap& map) noexcept
{
    SymmetryCounts sc;
    constexpr int half = kSide / 2;
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            SymmetryCounts::Halves* h = nullptr;
            switch (map.at(r, c)) {
            case TileKind::Wall: h = &sc.wall; break;
            case TileKind::Treasure: h = &sc.treasure; break;
            case TileKind::Enemy: h = &sc.enemy; break;
            default: break;
            }
            if (h == nullptr) {
                continue;
            }
            ++h->total;
            ++(c < half ? h->left : h->right);
            ++(r < half ? h->top : h->bottom);
        }
    }
    return sc;
}

// ---------------------------------------------------------------------------
// the metric vector
// ---------------------------------------------------------------------------

namespace detail {

inline MetricVector compute_metrics_impl(const GridMap& map, const FeasibilityReport& report)
{
    MetricVector m;
    const double n = kCells;

    m(1) = report.path_tiles ? *report.path_tiles / n : 0.0;

    const int walls = map.count(TileKind::Wall);
    m(2) = static_cast<double>(walls) / static_cast<double>(kCells - walls);

    const Segmentation seg = segment(map);
    std::vector<int> lengths;
    for (const auto& c : seg.corridors) {
        lengths.push_back(c.length);
    }
    const auto cs = summarize(lengths);
    m(3) = static_cast<double>(lengths.size());
    m(4) = cs.max;
    m(5) = cs.min;
    m(6) = cs.mean;

    std::vector<int> areas;
    std::vector<double> squareness;
    for (const auto& ch : seg.chambers) {
        areas.push_back(ch.area());
        squareness.push_back(ch.squareness());
    }
    const auto as = summarize(areas);
    const auto ss = summarize(squareness);
    m(7) = static_cast<double>(areas.size());
    m(8) = as.max;
    m(9) = as.min;
    m(10) = as.mean;
    m(11) = ss.max;
    m(12) = ss.min;
    m(13) = ss.mean;

    m(14) = static_cast<double>(seg.dead.size()) / n;

    m(15) = entrance_clear_fraction(map, TileKind::Enemy);
    m(16) = entrance_clear_fraction(map, TileKind::Treasure);

    m(17) = map.count(TileKind::Enemy) / n;
    m(18) = map.count(TileKind::Treasure) / n;

    const auto safety = treasure_safety(map);
    m(19) = safety.mean;
    m(20) = safety.sd;

    const auto sc = symmetry_counts(map);
    auto lr = [](const SymmetryCounts::Halves& h) {
        return ratio_or_zero(std::abs(h.left - h.right), h.total);
    };
    auto tb = [](const SymmetryCounts::Halves& h) {
        return ratio_or_zero(std::abs(h.top - h.bottom), h.total);
    };
    m(21) = lr(sc.wall);
    m(22) = tb(sc.wall);
    m(23) = lr(sc.enemy);
    m(24) = tb(sc.enemy);
    m(25) = lr(sc.treasure);
    m(26) = tb(sc.treasure);
    const double te = sc.treasure.total + sc.enemy.total;
    m(27) = ratio_or_zero(std::abs(sc.treasure.left - sc.enemy.right), te);
    m(28) = ratio_or_zero(std::abs(sc.treasure.top - sc.enemy.bottom), te);

    int lr_match = 0, tb_match = 0, tr_match = 0;
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            const TileKind t = map.at(r, c);
            lr_match += t == map.at(r, kSide - 1 - c) ? 1 : 0;
            tb_match += t == map.at(kSide - 1 - r, c) ? 1 : 0;
            tr_match += t == map.at(c, r) ? 1 : 0;
        }
    }
    m(29) = lr_match / n;
    m(30) = tb_match / n;
    m(31) = tr_match / n;
    return m;
}

} // namespace detail

/// All 31 metrics. The map must be structurally valid and feasible.
inline MetricVector compute_metrics(const GridMap& map)
{
    detail::require_structure(map);
    const auto report = feasibility(map);
    if (!report.feasible) {
        throw Error(Errc::InfeasibleForM1, "path length is undefined for an infeasible map");
    }
    return detail::compute_metrics_impl(map, report);
}

/// Metrics for a map that may be infeasible. M1 is left at zero when no path
/// exists; infeasible individuals are ranked without it.
inline MetricVector compute_metrics_any(const GridMap& map, FeasibilityReport* report_out = nullptr)
{
    detail::require_structure(map);
    const auto report = feasibility(map);
    if (report_out != nullptr) {
        *report_out = report;
    }
    return detail::compute_metrics_impl(map, report);
}

inline std::string metrics_csv_header()
{
    std::string h;
    for (int i = 1; i <= kMetricCount; ++i) {
        if (i > 1) {
            h += ',';
        }
        h += 'M' + std::to_string(i);
    }
    return h;
}

/// Nine significant digits, comma-separated.
inline std::string metrics_csv_row(const MetricVector& m)
{
    std::string row;
    char buf[32];
    for (int i = 1; i <= kMetricCount; ++i) {
        if (i > 1) {
            row += ',';
        }
        std::snprintf(buf, sizeof buf, "%.9g", m(i));
        row += buf;
    }
    return row;
}

} // namespace dungeon
