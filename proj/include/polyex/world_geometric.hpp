#pragma once

// Exact-polygon world for the exploration engine: sensing returns the
// blocking vertices visible from a node (clockwise by their hidden sides)
// together with the pairwise containment/overlap relations of their foreign
// polygons; motion follows shortest rectilinear paths.

#include "polyex/explorer.hpp"
#include "polyex/geodesic.hpp"
#include "polyex/geometry.hpp"

#include <tuple>
#include <utility>
#include <vector>

namespace polyex {

class GeometricWorld {
  public:
    using Position = Point;

    struct GoalKey {
        int vertex_index = -1;
        int hidden_edge = -1;
        bool operator<(const GoalKey& o) const {
            return std::tie(vertex_index, hidden_edge) < std::tie(o.vertex_index, o.hidden_edge);
        }
    };

    struct Goal {
        Position pos;
        GoalKey key;
        NodeKind kind;
        Rat measure;  // foreign polygon area
    };

    struct SenseResult {
        std::vector<Goal> goals;                        // clockwise
        std::vector<std::vector<GoalRelation>> rel;     // rel[i][j], i < j meaningful
    };

    struct PathResult {
        std::vector<Position> waypoints;
        Rat length = 0;
        bool reachable = true;
        std::vector<std::pair<Rat, Position>> scan_stops;  // unused in geometric mode
    };

    explicit GeometricWorld(OrthoPolygon polygon) : polygon_(std::move(polygon)) {}

    const OrthoPolygon& polygon() const { return polygon_; }

    SenseResult sense(const Point& from, const Rat& /*now*/) {
        sensed_from_.push_back(from);
        std::vector<BlockingVertex> bvs = blocking_vertices(polygon_, from);
        sort_clockwise(polygon_, from, bvs);

        SenseResult sr;
        std::vector<OrthoPolygon> fps;
        fps.reserve(bvs.size());
        for (const auto& bv : bvs) {
            fps.push_back(foreign_polygon(polygon_, bv, from).foreign);
            Goal g;
            g.pos = bv.extension_goal;
            g.key = GoalKey{bv.vertex_index, bv.hidden_edge};
            g.kind = NodeKind::ExtensionGoal;
            g.measure = fps.back().area();
            sr.goals.push_back(g);
        }
        const int m = static_cast<int>(bvs.size());
        sr.rel.assign(m, std::vector<GoalRelation>(m, GoalRelation::Disjoint));
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const bool ij = region_subset(fps[i], fps[j]);
                const bool ji = region_subset(fps[j], fps[i]);
                GoalRelation r;
                if (ij && ji) {
                    r = GoalRelation::FirstContainsSecond;  // equal: clockwise-later joins earlier
                } else if (ij) {
                    r = GoalRelation::SecondContainsFirst;
                } else if (ji) {
                    r = GoalRelation::FirstContainsSecond;
                } else if (regions_overlap(fps[i], fps[j])) {
                    r = GoalRelation::Overlap;
                } else {
                    r = GoalRelation::Disjoint;
                }
                sr.rel[i][j] = r;
                sr.rel[j][i] = r;
            }
        }
        return sr;
    }

    PathResult plan_path(const Point& a, const Point& b) {
        GeoPath g = rectilinear_goto(polygon_, a, b);
        return PathResult{std::move(g.waypoints), g.length, true, {}};
    }

    Rat segment_length(const Point& a, const Point& b) const { return l1_dist(a, b); }

    void observe(const Point& /*pos*/, const Rat& /*t*/) {}

    static std::pair<double, double> to_xy(const Point& p) {
        return {to_double(p.x), to_double(p.y)};
    }

    /// Every position the engine sensed from; basis for coverage checks.
    const std::vector<Point>& sensed_positions() const { return sensed_from_; }

  private:
    OrthoPolygon polygon_;
    std::vector<Point> sensed_from_;
};

using GeometricResult = ExplorationEngine<GeometricWorld>::Result;

inline GeometricResult explore_polygon(const OrthoPolygon& P, const Point& start, int p,
                                       GeometricWorld* world_out = nullptr) {
    if (!P.contains(start)) throw std::invalid_argument("start outside polygon");
    GeometricWorld world(P);
    auto res = ExplorationEngine<GeometricWorld>::explore(world, p, start);
    if (world_out) *world_out = world;
    return res;
}

}  // namespace polyex
