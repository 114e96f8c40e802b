#include <catch2/catch_amalgamated.hpp>

#include "polyex/occupancy.hpp"

#include <random>
#include <sstream>

using namespace polyex;

namespace {

Point pt(long x, long y) { return Point{Rat(x), Rat(y)}; }

TruthGrid empty_room(int w, int h) {
    TruthGrid g;
    g.width = w;
    g.height = h;
    g.resolution = 1;
    g.occupied.assign(static_cast<size_t>(w) * h, 0);
    for (int x = 0; x < w; ++x) {
        g.set_occupied({x, 0}, true);
        g.set_occupied({x, h - 1}, true);
    }
    for (int y = 0; y < h; ++y) {
        g.set_occupied({0, y}, true);
        g.set_occupied({w - 1, y}, true);
    }
    return g;
}

SensorSpec default_sensor() {
    SensorSpec s;
    s.max_range = 100.0;
    s.fov_deg = 360.0;
    s.angular_res_deg = 1.0;
    return s;
}

// Belief grids built cell by cell; big values give exact p in {0, 1}.
void mark_free(OccupancyGrid& g, const GridCell& c, double l = -2.0) { g.set_logodds(c, l); }
void mark_occ(OccupancyGrid& g, const GridCell& c, double l = 2.0) { g.set_logodds(c, l); }

}  // namespace

TEST_CASE("log-odds updates match the inverse sensor model") {
    OccupancyGrid g(3, 3, Rat(1));
    SensorSpec spec;
    const GridCell c{1, 1};

    SECTION("one miss with p_miss = 0.4") {
        g.add_logodds(c, spec.miss_logodds());
        CHECK_THAT(g.logodds(c), Catch::Matchers::WithinAbs(std::log(0.4 / 0.6), 1e-12));
        CHECK_THAT(g.prob(c), Catch::Matchers::WithinAbs(0.4, 1e-12));
        CHECK(g.classify(c) == CellClass::Free);
    }
    SECTION("one hit with p_hit = 0.7") {
        g.add_logodds(c, spec.hit_logodds());
        CHECK_THAT(g.prob(c), Catch::Matchers::WithinAbs(0.7, 1e-12));
        CHECK(g.classify(c) == CellClass::Occupied);
    }
    SECTION("hit then equal-strength miss cancels back to unknown") {
        SensorSpec sym;
        sym.p_hit = 0.7;
        sym.p_miss = 0.3;
        g.add_logodds(c, sym.hit_logodds());
        g.add_logodds(c, sym.miss_logodds());
        CHECK_THAT(g.prob(c), Catch::Matchers::WithinAbs(0.5, 1e-12));
        CHECK(g.classify(c) == CellClass::Unknown);
    }
    SECTION("clamping at l_max") {
        for (int i = 0; i < 100; ++i) g.add_logodds(c, spec.hit_logodds());
        CHECK(g.logodds(c) == g.l_max());
    }
}

TEST_CASE("scan in an open room reports max range everywhere") {
    TruthGrid truth;
    truth.width = truth.height = 11;
    truth.resolution = 1;
    truth.occupied.assign(121, 0);
    SensorSpec spec = default_sensor();
    spec.max_range = 3.0;
    std::mt19937 rng(1);
    Scan scan = simulate_scan(truth, {5, 5}, spec, rng);
    CHECK(static_cast<int>(scan.beams.size()) == spec.beam_count());
    for (const Beam& b : scan.beams) {
        CHECK_FALSE(b.hit);
        CHECK(b.range == spec.max_range);
    }
}

TEST_CASE("scan hits a wall two cells ahead") {
    TruthGrid truth = empty_room(11, 11);
    truth.set_occupied({7, 5}, true);
    SensorSpec spec = default_sensor();
    spec.fov_deg = 0.0;  // single forward beam
    std::mt19937 rng(1);
    Scan scan = simulate_scan(truth, {5, 5}, spec, rng);
    REQUIRE(scan.beams.size() == 1);
    CHECK(scan.beams[0].hit);
    CHECK_THAT(scan.beams[0].range, Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK(scan.beams[0].hit_cell == GridCell{7, 5});
}

TEST_CASE("scan from an occupied cell is rejected") {
    TruthGrid truth = empty_room(5, 5);
    SensorSpec spec = default_sensor();
    std::mt19937 rng(1);
    CHECK_THROWS_AS(simulate_scan(truth, {0, 0}, spec, rng), std::invalid_argument);
}

TEST_CASE("coarse angular resolution leaves gaps in a distant wall") {
    TruthGrid truth = empty_room(41, 21);
    SensorSpec fine = default_sensor();
    fine.angular_res_deg = 0.5;
    SensorSpec coarse = default_sensor();
    coarse.angular_res_deg = 20.0;

    std::mt19937 rng(1);
    const GridCell pose{20, 10};
    OccupancyGrid fine_grid(41, 21, Rat(1)), coarse_grid(41, 21, Rat(1));
    integrate_scan(fine_grid, simulate_scan(truth, pose, fine, rng), fine);
    integrate_scan(coarse_grid, simulate_scan(truth, pose, coarse, rng), coarse);

    // Count unobserved free cells: the fine sweep covers every one of them,
    // the coarse sweep leaves gaps between beams.
    int fine_unknown = 0, coarse_unknown = 0;
    for (int y = 0; y < 21; ++y) {
        for (int x = 0; x < 41; ++x) {
            if (truth.is_occupied({x, y})) continue;
            if (fine_grid.is_unknown({x, y})) ++fine_unknown;
            if (coarse_grid.is_unknown({x, y})) ++coarse_unknown;
        }
    }
    CHECK(fine_unknown == 0);
    CHECK(coarse_unknown > 0);
}

TEST_CASE("noise-free scans never mark a truly free cell occupied") {
    TruthGrid truth = empty_room(15, 15);
    truth.set_occupied({4, 9}, true);
    truth.set_occupied({9, 3}, true);
    SensorSpec spec = default_sensor();
    spec.angular_res_deg = 0.25;
    OccupancyGrid grid(15, 15, Rat(1));
    std::mt19937 rng(7);
    for (const GridCell pose : {GridCell{7, 7}, GridCell{2, 2}, GridCell{11, 11}}) {
        for (int rep = 0; rep < 3; ++rep) {
            integrate_scan(grid, simulate_scan(truth, pose, spec, rng), spec);
        }
    }
    for (int y = 0; y < 15; ++y) {
        for (int x = 0; x < 15; ++x) {
            if (!truth.is_occupied({x, y})) CHECK_FALSE(grid.is_occupied({x, y}));
        }
    }
}

TEST_CASE("entropy is non-increasing under repeated scans from one pose") {
    TruthGrid truth = empty_room(15, 15);
    SensorSpec spec = default_sensor();
    spec.max_range = 4.0;
    OccupancyGrid grid(15, 15, Rat(1));
    std::mt19937 rng(3);
    double last = map_entropy(grid);
    for (int rep = 0; rep < 6; ++rep) {
        integrate_scan(grid, simulate_scan(truth, {7, 7}, spec, rng), spec);
        const double now = map_entropy(grid);
        CHECK(now <= last + 1e-12);
        last = now;
    }
}

TEST_CASE("map entropy values") {
    SECTION("unknown cells carry one bit each") {
        OccupancyGrid g(10, 10, Rat(1));
        CHECK_THAT(map_entropy(g), Catch::Matchers::WithinAbs(100.0, 1e-12));
    }
    SECTION("fully decided cells carry none") {
        OccupancyGrid g(10, 10, Rat(1), 1e9);
        for (int y = 0; y < 10; ++y) {
            for (int x = 0; x < 10; ++x) g.set_logodds({x, y}, (x + y) % 2 ? 1e9 : -1e9);
        }
        CHECK_THAT(map_entropy(g), Catch::Matchers::WithinAbs(0.0, 1e-9));
    }
    SECTION("one cell at p = 0.25") {
        OccupancyGrid g(5, 5, Rat(1), 1e9);
        for (int y = 0; y < 5; ++y) {
            for (int x = 0; x < 5; ++x) g.set_logodds({x, y}, -1e9);
        }
        g.set_logodds({2, 2}, std::log(0.25 / 0.75));
        CHECK_THAT(map_entropy(g), Catch::Matchers::WithinAbs(0.811278124459, 1e-9));
    }
}

TEST_CASE("frontiers: fully known grid has none") {
    OccupancyGrid g(8, 8, Rat(1));
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) mark_free(g, {x, y});
    }
    CHECK(extract_frontiers(g, 1).empty());
}

TEST_CASE("frontiers: sensing-range arc in a half-observed room") {
    TruthGrid truth = empty_room(15, 15);
    SensorSpec spec = default_sensor();
    spec.max_range = 4.0;
    spec.angular_res_deg = 0.5;
    OccupancyGrid grid(15, 15, Rat(1));
    std::mt19937 rng(5);
    integrate_scan(grid, simulate_scan(truth, {7, 7}, spec, rng), spec);

    auto frontiers = extract_frontiers(grid, 3);
    REQUIRE(!frontiers.empty());
    for (const Frontier& f : frontiers) {
        CHECK(f.size >= 3);
        CHECK(f.goal == f.cells[f.size / 2]);
        for (const GridCell& c : f.cells) {
            CHECK(grid.is_free(c));
            bool touches_unknown = false;
            for (const GridCell& d : kFourNeighbors) {
                if (grid.is_unknown(c + d)) touches_unknown = true;
            }
            CHECK(touches_unknown);
        }
    }
}

TEST_CASE("frontiers: tiny artifacts fall below the size threshold") {
    // Two one-cell pockets walled in except toward single free cells.
    OccupancyGrid g(9, 5, Rat(1));
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 9; ++x) mark_free(g, {x, y});
    }
    auto pocket = [&](GridCell hole) {
        g.set_logodds(hole, 0.0);  // unknown
        mark_occ(g, {hole.x - 1, hole.y});
        mark_occ(g, {hole.x + 1, hole.y});
        mark_occ(g, {hole.x, hole.y + 1});
        // the cell below stays free: a single frontier cell
    };
    pocket({2, 3});
    pocket({6, 3});

    auto detail = extract_frontiers_detailed(g, 3, {});
    CHECK(detail.kept.empty());
    CHECK(detail.discarded_small.size() == 2);
    for (const Frontier& f : detail.discarded_small) CHECK(f.size < 3);
}

TEST_CASE("frontier touching a blocking vertex is discarded") {
    OccupancyGrid g(9, 9, Rat(1));
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 9; ++x) mark_free(g, {x, y});
    }
    for (int x = 3; x < 9; ++x) g.set_logodds({x, 6}, 0.0);  // unknown band
    // Frontier cells are now the free row below the band.
    auto plain = extract_frontiers_detailed(g, 3, {});
    REQUIRE(plain.kept.size() == 1);

    auto filtered = extract_frontiers_detailed(g, 3, {GridCell{5, 6}});
    CHECK(filtered.kept.empty());
    REQUIRE(filtered.discarded_blocking.size() == 1);
    CHECK(filtered.discarded_blocking[0].kind == FrontierKind::BlockingVertexAdjacent);
}

TEST_CASE("grid blocking vertex: the four-neighbor pattern") {
    // Wall corner: one observed wall arm, one unknown arm, a frontier cell on
    // the shadow side, a plain free cell on the other.
    OccupancyGrid g(7, 7, Rat(1));
    for (int y = 0; y < 7; ++y) {
        for (int x = 0; x < 7; ++x) mark_free(g, {x, y});
    }
    const GridCell corner{3, 3};
    mark_occ(g, corner);
    mark_occ(g, {4, 3});              // observed wall arm (east)
    g.set_logodds({3, 4}, 0.0);       // unknown wall continuation (north)
    g.set_logodds({2, 4}, 0.0);       // shadow: makes (2,3) a frontier
    // south (3,2) and west (2,3) free; (2,3) is a frontier via (2,4).

    auto bvs = detect_grid_blocking_vertices(g);
    REQUIRE(bvs.size() == 1);
    CHECK(bvs[0].cell == corner);
    CHECK(bvs[0].unknown_dir == GridCell{0, 1});
    CHECK(bvs[0].extension_dir == GridCell{0, -1});

    // A shortlisted cell with two occupied neighbors is rejected.
    mark_occ(g, {5, 3});
    bool cell_5_3_detected = false;
    for (const auto& bv : detect_grid_blocking_vertices(g)) {
        if (bv.cell == GridCell{4, 3}) cell_5_3_detected = true;
    }
    CHECK_FALSE(cell_5_3_detected);
}

TEST_CASE("no blocking vertices in a fully known convex room") {
    TruthGrid truth = empty_room(11, 11);
    SensorSpec spec = default_sensor();
    spec.angular_res_deg = 0.25;
    OccupancyGrid grid(11, 11, Rat(1));
    std::mt19937 rng(2);
    integrate_scan(grid, simulate_scan(truth, {5, 5}, spec, rng), spec);
    CHECK(detect_grid_blocking_vertices(grid).empty());
}

TEST_CASE("rasterized L-shape yields one blocking vertex from the upper arm") {
    OrthoPolygon P = validate_polygon(
        {pt(0, 0), pt(4, 0), pt(4, 2), pt(2, 2), pt(2, 4), pt(0, 4)});
    TruthGrid truth = rasterize_polygon(P, parse_rational("1/4"), 2);
    SensorSpec spec = default_sensor();
    spec.angular_res_deg = 0.2;
    spec.max_range = 100.0;

    // Start near (1, 3.1) in the upper arm, off the diagonal through the
    // reflex corner so the shadow boundary is crisp.
    GridCell pose{0, 0};
    for (int y = 0; y < truth.height; ++y) {
        for (int x = 0; x < truth.width; ++x) {
            const Point c = truth.cell_center({x, y});
            if (c.x == parse_rational("9/8") && c.y == parse_rational("25/8")) pose = {x, y};
        }
    }
    REQUIRE(!truth.is_occupied(pose));

    OccupancyGrid grid(truth.width, truth.height, truth.resolution);
    std::mt19937 rng(4);
    integrate_scan(grid, simulate_scan(truth, pose, spec, rng), spec);
    auto bvs = detect_grid_blocking_vertices(grid);
    REQUIRE(bvs.size() == 1);
    // The corner cell sits just outside the polygon corner (2,2).
    const Point corner = truth.cell_center(bvs[0].cell);
    CHECK(rat_abs(corner.x - 2) <= parse_rational("3/8"));
    CHECK(rat_abs(corner.y - 2) <= parse_rational("3/8"));
}

TEST_CASE("goal synthesis: extension offset and middle frontier cell") {
    OccupancyGrid g(11, 11, Rat(1));
    for (int y = 0; y < 11; ++y) {
        for (int x = 0; x < 11; ++x) mark_free(g, {x, y});
    }
    const GridCell pose{5, 1};

    SECTION("blocking vertex goal offset into free space") {
        const GridCell corner{3, 5};
        mark_occ(g, corner);
        mark_occ(g, {4, 5});
        g.set_logodds({3, 6}, 0.0);
        g.set_logodds({2, 6}, 0.0);
        REQUIRE(detect_grid_blocking_vertices(g).size() == 1);

        GoalSynthesisParams params;
        params.goal_offset = 2;
        params.min_frontier_size = 100;  // suppress frontier goals here
        auto goals = synthesize_goals(g, pose, params);
        REQUIRE(goals.size() == 1);
        CHECK(goals[0].kind == NodeKind::ExtensionGoal);
        CHECK(goals[0].cell == GridCell{3, 3});  // two cells along the extension
    }

    SECTION("frontier goal is the middle cell of the cluster") {
        for (int x = 2; x <= 8; ++x) g.set_logodds({x, 7}, 0.0);  // 7-cell frontier below
        for (int x = 0; x < 11; ++x) {
            if (x < 2 || x > 8) mark_occ(g, {x, 7});
        }
        for (int x = 0; x < 11; ++x) mark_occ(g, {x, 8});
        GoalSynthesisParams params;
        params.min_frontier_size = 3;
        auto goals = synthesize_goals(g, pose, params);
        REQUIRE(goals.size() == 1);
        CHECK(goals[0].kind == NodeKind::FrontierGoal);
        CHECK(goals[0].cell == GridCell{5, 6});  // middle of the 7-cell row
    }

    SECTION("unreachable goals are dropped") {
        for (int x = 0; x < 11; ++x) mark_occ(g, {x, 4});  // impassable wall
        for (int x = 2; x <= 8; ++x) g.set_logodds({x, 7}, 0.0);
        GoalSynthesisParams params;
        params.min_frontier_size = 3;
        CHECK(synthesize_goals(g, pose, params).empty());
    }
}

TEST_CASE("PGM round trip preserves the map") {
    TruthGrid truth = empty_room(9, 6);
    truth.set_occupied({4, 3}, true);
    for (bool binary : {false, true}) {
        std::stringstream ss;
        truth_to_pgm(ss, truth, binary, "test map");
        TruthGrid back = truth_from_pgm(ss, truth.resolution);
        REQUIRE(back.width == truth.width);
        REQUIRE(back.height == truth.height);
        for (int y = 0; y < truth.height; ++y) {
            for (int x = 0; x < truth.width; ++x) {
                CHECK(back.is_occupied({x, y}) == truth.is_occupied({x, y}));
            }
        }
    }
}

TEST_CASE("belief exports carry the three cell classes") {
    OccupancyGrid g(3, 1, Rat(1));
    mark_free(g, {0, 0});
    mark_occ(g, {1, 0});
    std::stringstream pgm;
    belief_to_pgm(pgm, g, false);
    PgmImage img = read_pgm(pgm);
    CHECK(img.values[0] == 255);
    CHECK(img.values[1] == 0);
    CHECK(img.values[2] == 128);

    std::stringstream csv;
    belief_to_csv(csv, g);
    std::string line;
    std::getline(csv, line);
    CHECK(line.find("0.5") != std::string::npos);
}
