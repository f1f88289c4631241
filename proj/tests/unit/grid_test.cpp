#include "dungeon/error.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/rng.hpp"

#include "support/helpers.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <map>
#include <string>

using namespace dungeon;
using testing_support::all_floor;
using testing_support::rows;

namespace {

Errc code_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no dungeon::Error thrown";
    return Errc::Journal;
}

} // namespace

TEST(Grid, ParseSerializeRoundTrip)
{
    const std::string text = testing_support::slurp(testing_support::fixture("benchmarks/c_balanced.map"));
    const GridMap m = parse_map(text);
    EXPECT_EQ(serialize_map(m), text);
    EXPECT_EQ(parse_map(serialize_map(m)), m);
}

TEST(Grid, ParseAcceptsMissingTrailingNewlineAndCrlf)
{
    std::string text = serialize_map(all_floor());
    EXPECT_EQ(parse_map(text.substr(0, text.size() - 1)), all_floor());
    std::string crlf;
    for (char c : text) {
        if (c == '\n') {
            crlf += '\r';
        }
        crlf += c;
    }
    EXPECT_EQ(parse_map(crlf), all_floor());
}

TEST(Grid, ParseErrors)
{
    EXPECT_EQ(code_of([] { parse_map("S..X\n"); }), Errc::WrongDimensions);
    std::string text = serialize_map(all_floor());
    EXPECT_EQ(code_of([&] { parse_map(text + "............\n"); }), Errc::WrongDimensions);
    std::string bad = text;
    bad[5] = 'q';
    EXPECT_EQ(code_of([&] { parse_map(bad); }), Errc::UnknownGlyph);
    std::string wide = text;
    wide.insert(3, ".");
    EXPECT_EQ(code_of([&] { parse_map(wide); }), Errc::WrongDimensions);
}

TEST(Grid, StructuralValidity)
{
    GridMap m = all_floor();
    EXPECT_NO_THROW(validate_structure(m));
    m.set(5, 5, TileKind::Entrance);
    EXPECT_EQ(code_of([&] { validate_structure(m); }), Errc::EntranceCount);
    EXPECT_FALSE(is_structurally_valid(m));
    GridMap n = all_floor();
    n.set(11, 11, TileKind::Floor);
    EXPECT_EQ(code_of([&] { validate_structure(n); }), Errc::ExitCount);
    EXPECT_EQ(code_of([&] { feasibility(n); }), Errc::StructurallyInvalid);
}

TEST(Grid, CycleOrderWrapsAround)
{
    GridMap m = GridMap::filled(TileKind::Wall);
    const std::string expected = ".TESX#";
    for (char g : expected) {
        m = cycle_tile(m, {3, 4});
        EXPECT_EQ(glyph(m.at(3, 4)), g);
    }
    EXPECT_EQ(code_of([&] { cycle_tile(m, {12, 0}); }), Errc::OutOfBounds);
    EXPECT_EQ(code_of([&] { cycle_tile(m, {0, -1}); }), Errc::OutOfBounds);
}

TEST(Grid, FeasibilityExamples)
{
    const auto r = feasibility(all_floor());
    EXPECT_TRUE(r.feasible);
    ASSERT_TRUE(r.path_tiles);
    EXPECT_EQ(*r.path_tiles, 23);

    const GridMap walled = rows({
        "S#..........",
        "##..........",
        "............",
        "............",
        "............",
        "............",
        "............",
        "............",
        "............",
        "............",
        "............",
        "...........X",
    });
    const auto w = feasibility(walled);
    EXPECT_FALSE(w.feasible);
    EXPECT_FALSE(w.path_tiles);

    // enemies and treasure are passable
    const GridMap through = rows({
        "SETE.X######",
        "############",
        "############",
        "############",
        "############",
        "############",
        "############",
        "############",
        "############",
        "############",
        "############",
        "############",
    });
    EXPECT_EQ(feasibility(through).path_tiles, 6);
}

TEST(Grid, BfsMatchesRelaxationOracle)
{
    Rng rng(11);
    for (int n = 0; n < 300; ++n) {
        const GridMap m = random_map(rng);
        const oracle::Grid g(m);
        const int expected = oracle::path_tiles(g);
        const auto r = feasibility(m);
        EXPECT_EQ(r.feasible, expected > 0);
        EXPECT_EQ(r.path_tiles.value_or(0), expected);
    }
}

TEST(Grid, EditDistanceCountsDifferingCells)
{
    GridMap a = all_floor();
    GridMap b = a;
    EXPECT_EQ(edit_distance(a, b), 0);
    b = cycle_tile(b, {4, 4});
    b = cycle_tile(b, {4, 4});
    b.set(7, 2, TileKind::Wall);
    EXPECT_EQ(edit_distance(a, b), 2);
}

TEST(Grid, RandomMapsAreStructurallyValid)
{
    Rng rng(3);
    std::map<TileKind, int> counts;
    const int maps = 2000;
    for (int n = 0; n < maps; ++n) {
        const GridMap m = random_map(rng);
        ASSERT_TRUE(is_structurally_valid(m));
        for (auto t : m.tiles()) {
            ++counts[t];
        }
    }
    // 142 free cells per map drawn at 35/45/10/10 percent
    const double free_cells = 142.0 * maps;
    EXPECT_NEAR(counts[TileKind::Wall] / free_cells, 0.35, 0.01);
    EXPECT_NEAR(counts[TileKind::Floor] / free_cells, 0.45, 0.01);
    EXPECT_NEAR(counts[TileKind::Treasure] / free_cells, 0.10, 0.01);
    EXPECT_NEAR(counts[TileKind::Enemy] / free_cells, 0.10, 0.01);
}

TEST(Grid, RandomFeasibleMap)
{
    Rng rng(5);
    for (int n = 0; n < 50; ++n) {
        EXPECT_TRUE(is_feasible(random_feasible_map(rng)));
    }
}

TEST(Rng, SeededStreamsAreReproducible)
{
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.next(), b.next());
    }
    Rng c(9);
    for (int i = 0; i < 10000; ++i) {
        const auto v = c.index(7);
        ASSERT_LT(v, 7u);
        const double u = c.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}
