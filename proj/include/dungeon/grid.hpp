#pragma once

#include "dungeon/error.hpp"
#include "dungeon/rng.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dungeon {

inline constexpr int kSide = 12;
inline constexpr int kCells = kSide * kSide;

enum class TileKind : std::uint8_t { Wall, Floor, Treasure, Enemy, Entrance, Exit };

inline constexpr int kTileKinds = 6;

constexpr bool passable(TileKind t) noexcept { return t != TileKind::Wall; }

constexpr char glyph(TileKind t) noexcept
{
    constexpr std::array<char, kTileKinds> glyphs{'#', '.', 'T', 'E', 'S', 'X'};
    return glyphs[static_cast<std::size_t>(t)];
}

constexpr std::optional<TileKind> tile_from_glyph(char c) noexcept
{
    switch (c) {
    case '#': return TileKind::Wall;
    case '.': return TileKind::Floor;
    case 'T': return TileKind::Treasure;
    case 'E': return TileKind::Enemy;
    case 'S': return TileKind::Entrance;
    case 'X': return TileKind::Exit;
    default: return std::nullopt;
    }
}

constexpr std::string_view tile_name(TileKind t) noexcept
{
    constexpr std::array<std::string_view, kTileKinds> names{
        "Wall", "Floor", "Treasure", "Enemy", "Entrance", "Exit"};
    return names[static_cast<std::size_t>(t)];
}

/// Wall -> Floor -> Treasure -> Enemy -> Entrance -> Exit -> Wall.
constexpr TileKind next_in_cycle(TileKind t) noexcept
{
    return static_cast<TileKind>((static_cast<int>(t) + 1) % kTileKinds);
}

struct Position {
    int row = 0;
    int col = 0;

    constexpr bool in_bounds() const noexcept
    {
        return row >= 0 && row < kSide && col >= 0 && col < kSide;
    }
    constexpr int index() const noexcept { return row * kSide + col; }
    static constexpr Position from_index(int i) noexcept { return {i / kSide, i % kSide}; }

    friend constexpr bool operator==(const Position&, const Position&) = default;
};

class GridMap {
public:
    GridMap() { tiles_.fill(TileKind::Floor); }

    static GridMap filled(TileKind t)
    {
        GridMap m;
        m.tiles_.fill(t);
        return m;
    }

    TileKind at(Position p) const noexcept { return tiles_[static_cast<std::size_t>(p.index())]; }
    TileKind at(int row, int col) const noexcept { return at(Position{row, col}); }
    TileKind operator[](int index) const noexcept { return tiles_[static_cast<std::size_t>(index)]; }

    void set(Position p, TileKind t) noexcept { tiles_[static_cast<std::size_t>(p.index())] = t; }
    void set(int row, int col, TileKind t) noexcept { set(Position{row, col}, t); }
    void set(int index, TileKind t) noexcept { tiles_[static_cast<std::size_t>(index)] = t; }

    const std::array<TileKind, kCells>& tiles() const noexcept { return tiles_; }

    int count(TileKind t) const noexcept
    {
        return static_cast<int>(std::count(tiles_.begin(), tiles_.end(), t));
    }

    std::optional<Position> find_first(TileKind t) const noexcept
    {
        auto it = std::find(tiles_.begin(), tiles_.end(), t);
        if (it == tiles_.end()) {
            return std::nullopt;
        }
        return Position::from_index(static_cast<int>(it - tiles_.begin()));
    }

    friend bool operator==(const GridMap&, const GridMap&) = default;

private:
    std::array<TileKind, kCells> tiles_{};
};

struct FeasibilityReport {
    bool feasible = false;
    std::optional<int> path_tiles;
};

// ---------------------------------------------------------------------------
// text format
// ---------------------------------------------------------------------------

inline GridMap parse_map(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) {
                lines.push_back(text.substr(start));
            }
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
    }
    if (lines.size() != kSide) {
        throw Error(Errc::WrongDimensions,
            "expected 12 lines, got " + std::to_string(lines.size()));
    }
    for (std::size_t r = 0; r < lines.size(); ++r) {
        if (lines[r].size() != kSide) {
            throw Error(Errc::WrongDimensions, "line " + std::to_string(r + 1) + " has "
                    + std::to_string(lines[r].size()) + " characters, expected 12");
        }
    }
    GridMap map;
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            const char ch = lines[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            auto kind = tile_from_glyph(ch);
            if (!kind) {
                throw Error(Errc::UnknownGlyph, std::string("unknown glyph '") + ch + "' at line "
                        + std::to_string(r + 1) + ", column " + std::to_string(c + 1));
            }
            map.set(r, c, *kind);
        }
    }
    return map;
}

/// Twelve rows of twelve glyphs, each row newline-terminated.
inline std::string serialize_map(const GridMap& map)
{
    std::string out;
    out.reserve(kSide * (kSide + 1));
    for (int r = 0; r < kSide; ++r) {
        for (int c = 0; c < kSide; ++c) {
            out.push_back(glyph(map.at(r, c)));
        }
        out.push_back('\n');
    }
    return out;
}

inline std::vector<std::string> map_rows(const GridMap& map)
{
    std::vector<std::string> rows;
    rows.reserve(kSide);
    for (int r = 0; r < kSide; ++r) {
        std::string row;
        for (int c = 0; c < kSide; ++c) {
            row.push_back(glyph(map.at(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// structure and paths
// ---------------------------------------------------------------------------

inline void validate_structure(const GridMap& map)
{
    const int entrances = map.count(TileKind::Entrance);
    if (entrances != 1) {
        throw Error(Errc::EntranceCount, "map has " + std::to_string(entrances) + " entrances");
    }
    const int exits = map.count(TileKind::Exit);
    if (exits != 1) {
        throw Error(Errc::ExitCount, "map has " + std::to_string(exits) + " exits");
    }
}

inline bool is_structurally_valid(const GridMap& map) noexcept
{
    return map.count(TileKind::Entrance) == 1 && map.count(TileKind::Exit) == 1;
}

inline constexpr std::array<std::array<int, 2>, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

/// BFS step counts from `from` over 4-connected passable tiles; -1 where unreachable.
inline std::array<int, kCells> bfs_distances(const GridMap& map, Position from)
{
    std::array<int, kCells> dist;
    dist.fill(-1);
    if (!passable(map.at(from))) {
        return dist;
    }
    std::array<int, kCells> queue{};
    int head = 0;
    int tail = 0;
    dist[static_cast<std::size_t>(from.index())] = 0;
    queue[static_cast<std::size_t>(tail++)] = from.index();
    while (head < tail) {
        const int cur = queue[static_cast<std::size_t>(head++)];
        const Position p = Position::from_index(cur);
        for (const auto& [dr, dc] : kSteps) {
            const Position n{p.row + dr, p.col + dc};
            if (!n.in_bounds() || !passable(map.at(n))) {
                continue;
            }
            auto& d = dist[static_cast<std::size_t>(n.index())];
            if (d < 0) {
                d = dist[static_cast<std::size_t>(cur)] + 1;
                queue[static_cast<std::size_t>(tail++)] = n.index();
            }
        }
    }
    return dist;
}

inline FeasibilityReport feasibility(const GridMap& map)
{
    try {
        validate_structure(map);
    } catch (const Error& e) {
        throw Error(Errc::StructurallyInvalid, e.what());
    }
    const Position entrance = *map.find_first(TileKind::Entrance);
    const Position exit = *map.find_first(TileKind::Exit);
    const auto dist = bfs_distances(map, entrance);
    const int steps = dist[static_cast<std::size_t>(exit.index())];
    if (steps < 0) {
        return {false, std::nullopt};
    }
    return {true, steps + 1};
}

inline bool is_feasible(const GridMap& map) noexcept
{
    if (!is_structurally_valid(map)) {
        return false;
    }
    return feasibility(map).feasible;
}

// ---------------------------------------------------------------------------
// editing and generation
// ---------------------------------------------------------------------------

inline GridMap cycle_tile(GridMap map, Position pos)
{
    if (!pos.in_bounds()) {
        throw Error(Errc::OutOfBounds, "position (" + std::to_string(pos.row) + ","
                + std::to_string(pos.col) + ") is outside the grid");
    }
    map.set(pos, next_in_cycle(map.at(pos)));
    return map;
}

inline int edit_distance(const GridMap& a, const GridMap& b) noexcept
{
    int diff = 0;
    for (int i = 0; i < kCells; ++i) {
        diff += a[i] != b[i] ? 1 : 0;
    }
    return diff;
}

struct TileDistribution {
    double wall = 0.35;
    double floor = 0.45;
    double treasure = 0.10;
    // enemy takes the remainder
};

/// Entrance and exit at distinct uniform cells, every other cell i.i.d.
/// Always structurally valid; feasibility is not guaranteed.
inline GridMap random_map(Rng& rng, const TileDistribution& dist = {})
{
    GridMap map;
    const int entrance = static_cast<int>(rng.index(kCells));
    int exit = static_cast<int>(rng.index(kCells - 1));
    if (exit >= entrance) {
        ++exit;
    }
    for (int i = 0; i < kCells; ++i) {
        if (i == entrance) {
            map.set(i, TileKind::Entrance);
            continue;
        }
        if (i == exit) {
            map.set(i, TileKind::Exit);
            continue;
        }
        const double u = rng.uniform();
        TileKind t = TileKind::Enemy;
        if (u < dist.wall) {
            t = TileKind::Wall;
        } else if (u < dist.wall + dist.floor) {
            t = TileKind::Floor;
        } else if (u < dist.wall + dist.floor + dist.treasure) {
            t = TileKind::Treasure;
        }
        map.set(i, t);
    }
    return map;
}

/// Rejection-samples random_map until a feasible map appears.
inline GridMap random_feasible_map(Rng& rng, int max_attempts = 10000)
{
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        GridMap m = random_map(rng);
        if (feasibility(m).feasible) {
            return m;
        }
    }
    throw Error(Errc::PaddingExhausted,
        "no feasible random map after " + std::to_string(max_attempts) + " attempts");
}

} // namespace dungeon
