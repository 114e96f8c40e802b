#pragma once

// Scenario execution: parses scenario files, binds the world model to the
// exploration engine, and writes run artifacts (metrics, entropy timeline,
// tree, trajectories, map snapshots, overview figure). Artifacts depend only
// on the scenario and seed, byte for byte; wall-clock time is reported on
// stdout only.

#include "polyex/explorer.hpp"
#include "polyex/render.hpp"
#include "polyex/world_geometric.hpp"
#include "polyex/world_grid.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace polyex {

enum class WorldMode { Geometric, Grid };

struct Scenario {
    std::string name = "scenario";
    std::string world_path;
    WorldMode mode = WorldMode::Geometric;
    int p = 1;
    Point start_point{Rat(0), Rat(0)};
    GridCell start_cell{};
    bool start_is_cell = false;
    Rat alpha = 1;
    unsigned seed = 0;
    Rat grid_resolution = Rat(1, 4);  // rasterization pitch / PGM cell size
    SensorSpec sensor;
    GoalSynthesisParams goals;
    double l_max = 5.0;
    CorridorParams corridor = CorridorParams{2, 2, 1, 0.0};

    void validate() const {
        if (p < 1) throw std::invalid_argument("p must be >= 1");
        if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
        if (world_path.empty()) throw std::invalid_argument("scenario has no world");
        sensor.validate();
    }
};

class ScenarioError : public std::runtime_error {
  public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses "key = value" lines; '#' starts a comment. Relative world paths
/// resolve against `base_dir`.
inline Scenario parse_scenario(std::istream& in, const std::string& base_dir = "") {
    Scenario s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::istringstream probe(line);
            std::string tok;
            if (probe >> tok) throw ScenarioError("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            const auto e = v.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto fail = [&](const std::string& why) {
            throw ScenarioError("line " + std::to_string(lineno) + ": " + why);
        };
        try {
            if (key == "world") {
                s.world_path = value;
                if (!base_dir.empty() && !value.empty() && value.front() != '/') {
                    s.world_path = base_dir + "/" + value;
                }
            } else if (key == "mode") {
                if (value == "geometric") {
                    s.mode = WorldMode::Geometric;
                } else if (value == "grid") {
                    s.mode = WorldMode::Grid;
                } else {
                    fail("unknown mode '" + value + "'");
                }
            } else if (key == "p") {
                s.p = std::stoi(value);
            } else if (key == "start") {
                std::istringstream v(value);
                std::string first;
                v >> first;
                if (first == "cell") {
                    int x, y;
                    if (!(v >> x >> y)) fail("start cell needs two integers");
                    s.start_cell = GridCell{x, y};
                    s.start_is_cell = true;
                } else {
                    std::string second;
                    if (!(v >> second)) fail("start needs two coordinates");
                    s.start_point = Point{parse_rational(first), parse_rational(second)};
                    s.start_is_cell = false;
                }
            } else if (key == "alpha") {
                s.alpha = parse_rational(value);
            } else if (key == "seed") {
                s.seed = static_cast<unsigned>(std::stoul(value));
            } else if (key == "grid.resolution") {
                s.grid_resolution = parse_rational(value);
            } else if (key == "sensor.max_range") {
                s.sensor.max_range = std::stod(value);
            } else if (key == "sensor.fov") {
                s.sensor.fov_deg = std::stod(value);
            } else if (key == "sensor.angular_resolution") {
                s.sensor.angular_res_deg = std::stod(value);
            } else if (key == "sensor.p_hit") {
                s.sensor.p_hit = std::stod(value);
            } else if (key == "sensor.p_miss") {
                s.sensor.p_miss = std::stod(value);
            } else if (key == "sensor.sigma") {
                s.sensor.sigma = std::stod(value);
            } else if (key == "sensor.l_max") {
                s.l_max = std::stod(value);
            } else if (key == "thresholds.min_frontier_size") {
                s.goals.min_frontier_size = std::stoi(value);
            } else if (key == "thresholds.goal_offset") {
                s.goals.goal_offset = std::stoi(value);
            } else if (key == "planner.spacing") {
                s.corridor.spacing = std::stoi(value);
            } else if (key == "planner.width") {
                s.corridor.width = std::stoi(value);
            } else if (key == "planner.depth") {
                s.corridor.depth = std::stoi(value);
            } else if (key == "planner.reward_angular_resolution") {
                s.corridor.reward_angular_res_deg = std::stod(value);
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    return s;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    const std::filesystem::path p(path);
    Scenario s = parse_scenario(in, p.parent_path().string());
    s.name = p.stem().string();
    return s;
}

struct RunRecord {
    Scenario scenario;
    bool completed = false;
    Rat makespan = 0, c_tree = 0, d_max = 0;
    std::vector<Rat> robot_distance;
    int node_count = 0;
    int abandoned_goals = 0;
    double final_entropy = 0.0;  // grid mode; 0 in geometric mode
    std::vector<std::pair<Rat, double>> entropy_timeline;
    double wall_seconds = 0.0;   // reporting only, never written to artifacts

    std::optional<GeometricResult> geometric;
    std::optional<OrthoPolygon> polygon;
    std::optional<GridResult> grid;
    std::shared_ptr<GridWorld> grid_world;
    std::shared_ptr<GeometricWorld> geo_world;
};

inline GridCell locate_start_cell(const TruthGrid& truth, const Scenario& s) {
    if (s.start_is_cell) return s.start_cell;
    // Map a world point onto its cell.
    const Rat fx = (s.start_point.x - truth.origin_x) / truth.resolution;
    const Rat fy = (s.start_point.y - truth.origin_y) / truth.resolution;
    auto floor_rat = [](const Rat& r) {
        const BigInt num = boost::multiprecision::numerator(r);
        const BigInt den = boost::multiprecision::denominator(r);
        BigInt q = num / den;
        if (q * den != num && num < 0) q -= 1;
        return static_cast<int>(q.template convert_to<long>());
    };
    return GridCell{floor_rat(fx), floor_rat(fy)};
}

inline RunRecord run_scenario(const Scenario& s) {
    s.validate();
    RunRecord rec;
    rec.scenario = s;
    const auto t0 = std::chrono::steady_clock::now();

    if (s.mode == WorldMode::Geometric) {
        OrthoPolygon P = load_polygon_file(s.world_path);
        if (s.start_is_cell) throw ScenarioError("geometric mode expects a point start");
        if (!P.contains(s.start_point)) throw ScenarioError("start outside the polygon");
        auto world = std::make_shared<GeometricWorld>(P);
        auto res = ExplorationEngine<GeometricWorld>::explore(*world, s.p, s.start_point);
        rec.completed = res.completed;
        rec.makespan = res.makespan;
        rec.c_tree = res.c_tree;
        rec.d_max = res.d_max;
        rec.robot_distance = res.robot_distance;
        rec.node_count = static_cast<int>(res.nodes.size());
        rec.abandoned_goals = res.abandoned_goals;
        rec.polygon = P;
        rec.geo_world = world;
        rec.geometric = std::move(res);
    } else {
        TruthGrid truth;
        if (s.world_path.size() > 4 && s.world_path.substr(s.world_path.size() - 4) == ".pgm") {
            std::ifstream in(s.world_path, std::ios::binary);
            if (!in) throw ScenarioError("cannot open world file: " + s.world_path);
            truth = truth_from_pgm(in, s.grid_resolution);
        } else {
            OrthoPolygon P = load_polygon_file(s.world_path);
            truth = rasterize_polygon(P, s.grid_resolution, 2);
        }
        const GridCell start = locate_start_cell(truth, s);
        if (!truth.in_bounds(start) || truth.is_occupied(start)) {
            throw ScenarioError("start cell is not free");
        }
        GridWorldConfig cfg;
        cfg.sensor = s.sensor;
        cfg.goals = s.goals;
        cfg.l_max = s.l_max;
        cfg.alpha = s.alpha;
        cfg.corridor = s.corridor;
        cfg.seed = s.seed;
        auto world = std::make_shared<GridWorld>(truth, cfg);
        auto res = ExplorationEngine<GridWorld>::explore(*world, s.p, start);
        rec.completed = res.completed;
        rec.makespan = res.makespan;
        rec.c_tree = res.c_tree;
        rec.d_max = res.d_max;
        rec.robot_distance = res.robot_distance;
        rec.node_count = static_cast<int>(res.nodes.size());
        rec.abandoned_goals = res.abandoned_goals;
        rec.entropy_timeline = world->entropy_log();
        rec.final_entropy = rec.entropy_timeline.empty() ? map_entropy(world->belief())
                                                         : rec.entropy_timeline.back().second;
        rec.grid_world = world;
        rec.grid = std::move(res);
    }

    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// One record per scenario and repetition; seeds advance by one per
/// repetition. Failures are isolated per run.
inline std::vector<RunRecord> run_batch(const std::vector<Scenario>& scenarios, int repetitions,
                                        std::vector<std::string>* errors = nullptr) {
    std::vector<RunRecord> out;
    for (const Scenario& base : scenarios) {
        for (int rep = 0; rep < repetitions; ++rep) {
            Scenario s = base;
            s.seed = base.seed + static_cast<unsigned>(rep);
            try {
                out.push_back(run_scenario(s));
            } catch (const std::exception& e) {
                if (errors) errors->push_back(s.name + ": " + e.what());
            }
        }
    }
    return out;
}

// --- artifacts -------------------------------------------------------------------

inline std::string artifact_header(const RunRecord& rec) {
    std::ostringstream os;
    os << "seed=" << rec.scenario.seed << " scenario=" << rec.scenario.name;
    return os.str();
}

inline void write_metrics_csv(std::ostream& os, const RunRecord& rec) {
    os << "# " << artifact_header(rec) << "\n";
    os << "key,value\n";
    os << "seed," << rec.scenario.seed << "\n";
    os << "mode," << (rec.scenario.mode == WorldMode::Geometric ? "geometric" : "grid") << "\n";
    os << "p," << rec.scenario.p << "\n";
    os << "alpha," << to_double(rec.scenario.alpha) << "\n";
    os << "completed," << (rec.completed ? 1 : 0) << "\n";
    os << "makespan," << to_double(rec.makespan) << "\n";
    os << "c_tree," << to_double(rec.c_tree) << "\n";
    os << "d_max," << to_double(rec.d_max) << "\n";
    os << "nodes," << rec.node_count << "\n";
    os << "abandoned_goals," << rec.abandoned_goals << "\n";
    os << "competitive_bound," << competitive_bound(rec.scenario.p) << "\n";
    os << "single_robot_ratio," << std::sqrt(2.0) << "\n";
    const double tb =
        tree_exploration_bound(to_double(rec.c_tree), to_double(rec.d_max), rec.scenario.p);
    os << "tree_bound," << tb << "\n";
    os << "tree_bound_holds,"
       << (tree_bound_holds(rec.makespan, rec.c_tree, rec.d_max, rec.scenario.p) ? 1 : 0) << "\n";
    os << "final_entropy," << rec.final_entropy << "\n";
    for (size_t r = 0; r < rec.robot_distance.size(); ++r) {
        os << "robot_" << r << "_distance," << to_double(rec.robot_distance[r]) << "\n";
    }
}

inline void write_entropy_csv(std::ostream& os, const RunRecord& rec) {
    os << "# " << artifact_header(rec) << "\n";
    os << "t,bits\n";
    for (const auto& [t, bits] : rec.entropy_timeline) {
        os << to_double(t) << "," << bits << "\n";
    }
}

/// Writes the full artifact set into `dir` (created if needed):
/// metrics.csv, entropy.csv, tree.dot, trajectories.csv, overview.svg, and
/// in grid mode map_final.pgm / map_final.csv / map_truth.pgm.
inline void write_artifacts(const RunRecord& rec, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const std::string& file, bool binary = false) {
        std::ofstream os(dir + "/" + file, binary ? std::ios::binary : std::ios::out);
        if (!os) throw std::runtime_error("cannot write artifact: " + dir + "/" + file);
        return os;
    };

    {
        auto os = open("metrics.csv");
        write_metrics_csv(os, rec);
    }
    {
        auto os = open("entropy.csv");
        write_entropy_csv(os, rec);
    }
    const std::string header = artifact_header(rec);
    if (rec.geometric) {
        {
            auto os = open("tree.dot");
            os << tree_to_dot<GeometricWorld>(*rec.geometric, header);
        }
        {
            auto os = open("trajectories.csv");
            os << trajectories_to_csv<GeometricWorld>(*rec.geometric, header);
        }
        {
            auto os = open("overview.svg");
            os << render_geometric_svg(*rec.polygon, *rec.geometric, RenderSpec{}, header);
        }
    }
    if (rec.grid) {
        {
            auto os = open("tree.dot");
            os << tree_to_dot<GridWorld>(*rec.grid, header);
        }
        {
            auto os = open("trajectories.csv");
            os << trajectories_to_csv<GridWorld>(*rec.grid, header);
        }
        {
            auto os = open("overview.svg");
            os << render_grid_svg(*rec.grid_world, *rec.grid, RenderSpec{}, header);
        }
        {
            auto os = open("map_final.pgm");
            belief_to_pgm(os, rec.grid_world->belief(), false, header);
        }
        {
            auto os = open("map_final.csv");
            belief_to_csv(os, rec.grid_world->belief(), header);
        }
        {
            auto os = open("map_truth.pgm");
            truth_to_pgm(os, rec.grid_world->truth(), false, header);
        }
    }
}

/// Sampled fraction of boundary points seen from at least one sensing
/// position of a finished geometric run.
inline double boundary_coverage(const OrthoPolygon& P, const std::vector<Point>& sensed,
                                int samples_per_edge = 16) {
    std::vector<VisibilityPolygon> vps;
    vps.reserve(sensed.size());
    for (const Point& x : sensed) vps.push_back(visibility_polygon(P, x));
    long total = 0, seen = 0;
    for (int e = 0; e < P.size(); ++e) {
        const Segment edge = P.edge(e);
        for (int i = 0; i <= samples_per_edge; ++i) {
            const Rat t = Rat(i) / samples_per_edge;
            const Point q{edge.a.x + t * (edge.b.x - edge.a.x),
                          edge.a.y + t * (edge.b.y - edge.a.y)};
            ++total;
            for (const auto& vp : vps) {
                if (vp.contains(q)) {
                    ++seen;
                    break;
                }
            }
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(seen) / static_cast<double>(total);
}

}  // namespace polyex
