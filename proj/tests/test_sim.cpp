#include <catch2/catch_amalgamated.hpp>

#include "polyex/sim.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace polyex;

namespace {

const std::string kWorlds = std::string(POLYEX_SOURCE_DIR) + "/worlds";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Scenario grid_l6(int p = 1, const char* alpha = "1", unsigned seed = 0) {
    std::istringstream in(
        "mode = grid\n"
        "p = " + std::to_string(p) + "\n"
        "start = 1 3\n"
        "alpha = " + std::string(alpha) + "\n"
        "seed = " + std::to_string(seed) + "\n"
        "grid.resolution = 1/4\n"
        "sensor.max_range = 1.5\n"
        "sensor.angular_resolution = 1\n"
        "thresholds.min_frontier_size = 2\n");
    Scenario s = parse_scenario(in);
    s.world_path = kWorlds + "/l6.poly";
    s.name = "grid_l6";
    return s;
}

}  // namespace

TEST_CASE("scenario parser reads every field") {
    std::istringstream in(
        "# comment line\n"
        "world = maps/test.poly\n"
        "mode = grid\n"
        "p = 3\n"
        "start = cell 7 9\n"
        "alpha = 3/2\n"
        "seed = 11\n"
        "grid.resolution = 0.25\n"
        "sensor.max_range = 4.5\n"
        "sensor.fov = 180\n"
        "sensor.angular_resolution = 0.395\n"
        "sensor.p_hit = 0.75\n"
        "sensor.p_miss = 0.35\n"
        "sensor.sigma = 0.0\n"
        "thresholds.min_frontier_size = 4\n"
        "thresholds.goal_offset = 3\n"
        "planner.spacing = 3\n"
        "planner.width = 1\n"
        "planner.depth = 2\n");
    Scenario s = parse_scenario(in, "/base");
    CHECK(s.world_path == "/base/maps/test.poly");
    CHECK(s.mode == WorldMode::Grid);
    CHECK(s.p == 3);
    CHECK(s.start_is_cell);
    CHECK(s.start_cell == GridCell{7, 9});
    CHECK(s.alpha == parse_rational("3/2"));
    CHECK(s.seed == 11);
    CHECK(s.grid_resolution == parse_rational("1/4"));
    CHECK(s.sensor.fov_deg == 180.0);
    CHECK(s.goals.min_frontier_size == 4);
    CHECK(s.goals.goal_offset == 3);
    CHECK(s.corridor.spacing == 3);
    CHECK(s.corridor.depth == 2);
}

TEST_CASE("scenario parser rejects junk") {
    std::istringstream bad_mode("mode = diagonal\n");
    CHECK_THROWS_AS(parse_scenario(bad_mode), ScenarioError);
    std::istringstream bad_key("speed = 9\n");
    CHECK_THROWS_AS(parse_scenario(bad_key), ScenarioError);
    std::istringstream no_eq("just words\n");
    CHECK_THROWS_AS(parse_scenario(no_eq), ScenarioError);
}

TEST_CASE("geometric scenario: unit square is explored standing still") {
    Scenario s;
    s.world_path = kWorlds + "/square.poly";
    s.start_point = Point{parse_rational("1/2"), parse_rational("1/2")};
    RunRecord rec = run_scenario(s);
    CHECK(rec.completed);
    CHECK(rec.makespan == 0);
    CHECK(rec.node_count == 1);
}

TEST_CASE("invalid scenarios are rejected with clear errors") {
    Scenario s;
    s.world_path = kWorlds + "/nonexistent.poly";
    CHECK_THROWS_AS(run_scenario(s), PolygonError);

    Scenario t;
    t.world_path = kWorlds + "/l6.poly";
    t.start_point = Point{Rat(3), Rat(3)};  // inside the removed quadrant
    CHECK_THROWS_AS(run_scenario(t), ScenarioError);

    Scenario g = grid_l6();
    g.start_point = Point{Rat(3), Rat(3)};
    CHECK_THROWS_AS(run_scenario(g), ScenarioError);
}

TEST_CASE("unit-speed accounting along every trajectory") {
    Scenario s = load_scenario_file(kWorlds + "/scenarios/l6_geometric.scn");
    RunRecord rec = run_scenario(s);
    REQUIRE(rec.geometric);
    for (const auto& traj : rec.geometric->trajectories) {
        for (size_t i = 1; i < traj.size(); ++i) {
            const Rat dt = traj[i].first - traj[i - 1].first;
            const Rat dist = l1_dist(traj[i].second, traj[i - 1].second);
            CHECK(dt == dist);
        }
    }
}

TEST_CASE("geometric coverage: every boundary point is seen") {
    for (const char* world : {"/l6.poly", "/ushape.poly", "/pinwheel.poly"}) {
        Scenario s;
        s.world_path = kWorlds + world;
        s.start_point = std::string(world) == "/pinwheel.poly"
                            ? Point{Rat(5), Rat(5)}
                            : Point{Rat(1), Rat(3)};
        if (std::string(world) == "/ushape.poly") {
            s.start_point = Point{Rat(3), parse_rational("1/2")};
        }
        s.p = 2;
        RunRecord rec = run_scenario(s);
        REQUIRE(rec.completed);
        REQUIRE(rec.geo_world);
        const double cov = boundary_coverage(*rec.polygon, rec.geo_world->sensed_positions(), 32);
        INFO("world " << world);
        CHECK(cov >= 0.999);
    }
}

TEST_CASE("grid scenario explores the rasterized L-shape completely") {
    RunRecord rec = run_scenario(grid_l6());
    REQUIRE(rec.completed);
    REQUIRE(rec.grid_world);
    const auto& world = *rec.grid_world;
    const auto& belief = world.belief();
    const auto& truth = world.truth();

    // Every reachable free cell is known free, and the walls bounding them
    // are known occupied.
    REQUIRE(rec.grid);
    const GridCell start = rec.grid->nodes[0].pos;
    std::set<GridCell> reach;
    std::vector<GridCell> queue{start};
    reach.insert(start);
    for (size_t head = 0; head < queue.size(); ++head) {
        for (const GridCell& d : kFourNeighbors) {
            const GridCell n = queue[head] + d;
            if (!truth.in_bounds(n) || truth.is_occupied(n) || reach.count(n)) continue;
            reach.insert(n);
            queue.push_back(n);
        }
    }
    for (const GridCell& c : reach) {
        CHECK(belief.is_free(c));
        for (const GridCell& d : kFourNeighbors) {
            const GridCell n = c + d;
            if (truth.in_bounds(n) && truth.is_occupied(n)) {
                CHECK(belief.is_occupied(n));
            }
        }
    }

    // Entropy decreases monotonically on a noise-free run.
    for (size_t i = 1; i < rec.entropy_timeline.size(); ++i) {
        CHECK(rec.entropy_timeline[i].second <= rec.entropy_timeline[i - 1].second + 1e-9);
    }
    CHECK(rec.final_entropy < map_entropy(OccupancyGrid(truth.width, truth.height, Rat(1))));
}

TEST_CASE("four-branch corridor world: makespan shrinks with more robots") {
    Scenario s = load_scenario_file(kWorlds + "/scenarios/cross_grid.scn");
    std::map<int, Rat> makespan;
    for (int p : {1, 2, 4}) {
        Scenario sp = s;
        sp.p = p;
        RunRecord rec = run_scenario(sp);
        REQUIRE(rec.completed);
        makespan[p] = rec.makespan;
    }
    CHECK(makespan[4] < makespan[2]);
    CHECK(makespan[2] < makespan[1]);
}

TEST_CASE("budget factor: longer paths, better maps") {
    RunRecord base = run_scenario(grid_l6(1, "1"));
    RunRecord rich = run_scenario(grid_l6(1, "2"));
    REQUIRE(base.completed);
    REQUIRE(rich.completed);
    CHECK(rich.makespan <= 2 * base.makespan);
    CHECK(rich.final_entropy <= base.final_entropy + 1e-9);
}

TEST_CASE("batch produces one record per scenario and seed") {
    Scenario a = grid_l6(1, "1", 5);
    Scenario b;
    b.world_path = kWorlds + "/square.poly";
    b.start_point = Point{parse_rational("1/2"), parse_rational("1/2")};
    b.name = "square";

    auto records = run_batch({a, b}, 3);
    CHECK(records.size() == 6);
    CHECK(records[0].scenario.seed == 5);
    CHECK(records[1].scenario.seed == 6);

    // Same scenario, same seed: identical metrics.
    auto twice = run_batch({a, a}, 1);
    REQUIRE(twice.size() == 2);
    CHECK(twice[0].makespan == twice[1].makespan);
    CHECK(twice[0].final_entropy == twice[1].final_entropy);

    // Per-scenario failures are isolated.
    Scenario bad = a;
    bad.world_path = kWorlds + "/missing.poly";
    std::vector<std::string> errors;
    auto mixed = run_batch({bad, b}, 1, &errors);
    CHECK(mixed.size() == 1);
    CHECK(errors.size() == 1);
}

TEST_CASE("artifact sets are byte-identical across identical runs") {
    namespace fs = std::filesystem;
    const fs::path tmp = fs::temp_directory_path() / "polyex_sim_test";
    fs::remove_all(tmp);

    for (const Scenario& s :
         {grid_l6(1, "1", 3), load_scenario_file(kWorlds + "/scenarios/l6_geometric.scn")}) {
        RunRecord r1 = run_scenario(s);
        RunRecord r2 = run_scenario(s);
        const std::string d1 = (tmp / (s.name + "_a")).string();
        const std::string d2 = (tmp / (s.name + "_b")).string();
        write_artifacts(r1, d1);
        write_artifacts(r2, d2);
        for (const auto& entry : fs::directory_iterator(d1)) {
            const std::string file = entry.path().filename().string();
            INFO(s.name << "/" << file);
            CHECK(read_file(d1 + "/" + file) == read_file(d2 + "/" + file));
            REQUIRE(fs::exists(fs::path(d2) / file));
        }
        CHECK(fs::exists(fs::path(d1) / "metrics.csv"));
        CHECK(fs::exists(fs::path(d1) / "tree.dot"));
        CHECK(fs::exists(fs::path(d1) / "trajectories.csv"));
        CHECK(fs::exists(fs::path(d1) / "overview.svg"));
    }
    fs::remove_all(tmp);
}

TEST_CASE("metrics stream records bounds and per-robot distances") {
    Scenario s = load_scenario_file(kWorlds + "/scenarios/l6_geometric.scn");
    s.p = 2;
    RunRecord rec = run_scenario(s);
    std::ostringstream os;
    write_metrics_csv(os, rec);
    const std::string text = os.str();
    CHECK(text.find("# seed=0") != std::string::npos);
    CHECK(text.find("competitive_bound,") != std::string::npos);
    CHECK(text.find("single_robot_ratio,") != std::string::npos);
    CHECK(text.find("tree_bound_holds,1") != std::string::npos);
    CHECK(text.find("robot_1_distance,") != std::string::npos);
}
