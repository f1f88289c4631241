#pragma once

#include "dungeon/grid.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <unistd.h>

namespace testing_support {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(DUNGEON_FIXTURES) / rel; }

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline dungeon::GridMap rows(std::initializer_list<const char*> lines)
{
    std::string text;
    for (const char* l : lines) {
        text += l;
        text += '\n';
    }
    return dungeon::parse_map(text);
}

/// All floor with the entrance at (0,0) and the exit at (11,11).
inline dungeon::GridMap all_floor()
{
    dungeon::GridMap m;
    m.set(0, 0, dungeon::TileKind::Entrance);
    m.set(11, 11, dungeon::TileKind::Exit);
    return m;
}

inline dungeon::GridMap load(const std::string& rel) { return dungeon::parse_map(slurp(fixture(rel))); }

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir()
    {
        static int n = 0;
        path = std::filesystem::temp_directory_path()
            / ("dungeon-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

} // namespace testing_support
