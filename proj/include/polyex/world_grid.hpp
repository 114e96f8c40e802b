#pragma once

// Occupancy-grid world for the exploration engine. Sensing simulates a scan
// against the ground truth, folds it into the shared belief map, and
// synthesizes blocking-vertex and frontier goals; motion follows shortest
// paths through known free space, optionally stretched into informative
// detours when the budget factor exceeds one. Scans also fire at fixed
// distance intervals along paths.

#include "polyex/explorer.hpp"
#include "polyex/infogain.hpp"
#include "polyex/occupancy.hpp"

#include <random>
#include <utility>
#include <vector>

namespace polyex {

struct GridWorldConfig {
    SensorSpec sensor;
    GoalSynthesisParams goals;
    double l_max = 5.0;
    Rat alpha = 1;  // path budget factor; 1 disables detours
    CorridorParams corridor;
    unsigned seed = 0;
};

class GridWorld {
  public:
    using Position = GridCell;
    using GoalKey = GridCell;

    struct Goal {
        Position pos;
        GoalKey key;
        NodeKind kind;
        Rat measure;
    };
    struct SenseResult {
        std::vector<Goal> goals;
        std::vector<std::vector<GoalRelation>> rel;
    };
    struct PathResult {
        std::vector<Position> waypoints;  // corner points, consecutive runs axis-aligned
        Rat length = 0;
        bool reachable = true;
        std::vector<std::pair<Rat, Position>> scan_stops;
    };

    GridWorld(TruthGrid truth, GridWorldConfig cfg)
        : truth_(std::move(truth)), cfg_(std::move(cfg)),
          belief_(truth_.width, truth_.height, truth_.resolution, cfg_.l_max),
          rng_(cfg_.seed) {
        cfg_.sensor.validate();
        if (cfg_.alpha < 1) throw std::invalid_argument("alpha must be >= 1");
    }

    SenseResult sense(const GridCell& from, const Rat& now) {
        observe(from, now);
        SenseResult sr;
        for (const GridGoal& g : synthesize_goals(belief_, from, cfg_.goals)) {
            sr.goals.push_back(Goal{g.cell, g.cell, g.kind, Rat(0)});
        }
        sr.rel.assign(sr.goals.size(),
                      std::vector<GoalRelation>(sr.goals.size(), GoalRelation::Disjoint));
        return sr;
    }

    void observe(const GridCell& pose, const Rat& now) {
        Scan scan = simulate_scan(truth_, pose, cfg_.sensor, rng_);
        integrate_scan(belief_, scan, cfg_.sensor);
        ++scans_;
        entropy_log_.emplace_back(now, map_entropy(belief_));
    }

    PathResult plan_path(const GridCell& a, const GridCell& b) {
        std::vector<GridCell> cells;
        if (cfg_.alpha > 1 && !(a == b)) {
            auto direct = grid_bfs_path(belief_, a, b);
            if (!direct) return PathResult{{}, 0, false, {}};
            cells = informative_goto(belief_, cfg_.sensor, a, b, cfg_.alpha, cfg_.corridor).cells;
        } else {
            auto direct = grid_bfs_path(belief_, a, b);
            if (!direct) return PathResult{{}, 0, false, {}};
            cells = std::move(*direct);
        }

        PathResult out;
        out.length = Rat(static_cast<long>(cells.size()) - 1) * belief_.resolution();

        // Scan stops every max_range/2 of travel, strictly inside the path.
        const double res = to_double(belief_.resolution());
        const int interval = std::max(1, static_cast<int>(std::floor(cfg_.sensor.max_range / 2.0 / res)));
        for (size_t i = interval; i + 1 < cells.size(); i += interval) {
            out.scan_stops.emplace_back(Rat(static_cast<long>(i)) * belief_.resolution(), cells[i]);
        }

        // Merge collinear runs into corner waypoints.
        for (const GridCell& c : cells) {
            const size_t n = out.waypoints.size();
            if (n >= 2) {
                const GridCell& q = out.waypoints[n - 1];
                const GridCell& r = out.waypoints[n - 2];
                if ((r.x == q.x && q.x == c.x) || (r.y == q.y && q.y == c.y)) {
                    out.waypoints.back() = c;
                    continue;
                }
            }
            out.waypoints.push_back(c);
        }
        return out;
    }

    Rat segment_length(const GridCell& a, const GridCell& b) const {
        return Rat(std::abs(a.x - b.x) + std::abs(a.y - b.y)) * belief_.resolution();
    }

    std::pair<double, double> cell_xy(const GridCell& c) const {
        const Point p = truth_.cell_center(c);
        return {to_double(p.x), to_double(p.y)};
    }

    static std::pair<double, double> to_xy(const GridCell& c) {
        return {c.x + 0.5, c.y + 0.5};
    }

    const OccupancyGrid& belief() const { return belief_; }
    const TruthGrid& truth() const { return truth_; }
    const std::vector<std::pair<Rat, double>>& entropy_log() const { return entropy_log_; }
    int scans_integrated() const { return scans_; }
    const GridWorldConfig& config() const { return cfg_; }

  private:
    TruthGrid truth_;
    GridWorldConfig cfg_;
    OccupancyGrid belief_;
    std::mt19937 rng_;
    std::vector<std::pair<Rat, double>> entropy_log_;
    int scans_ = 0;
};

using GridResult = ExplorationEngine<GridWorld>::Result;

}  // namespace polyex
