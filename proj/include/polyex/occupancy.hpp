#pragma once

// Occupancy-grid world model: log-odds belief map, ray-cast sensing with
// finite range and angular resolution, frontier extraction, grid blocking
// vertex detection, goal synthesis, and map entropy. Grids use y-up cell
// coordinates; PGM files store the top row first.

#include "polyex/explorer.hpp"
#include "polyex/geometry.hpp"
#include "polyex/rational.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyex {

struct GridCell {
    int x = 0, y = 0;

    bool operator==(const GridCell& o) const { return x == o.x && y == o.y; }
    bool operator!=(const GridCell& o) const { return !(*this == o); }
    bool operator<(const GridCell& o) const { return x != o.x ? x < o.x : y < o.y; }
};

inline GridCell operator+(const GridCell& a, const GridCell& b) {
    return GridCell{a.x + b.x, a.y + b.y};
}

inline constexpr GridCell kFourNeighbors[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
inline constexpr GridCell kEightNeighbors[8] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                                {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

enum class CellClass { Unknown, Free, Occupied };

class OccupancyGrid {
  public:
    OccupancyGrid() = default;
    OccupancyGrid(int width, int height, Rat resolution, double l_max = 5.0)
        : width_(width), height_(height), resolution_(std::move(resolution)), l_max_(l_max),
          logodds_(static_cast<size_t>(width) * height, 0.0) {
        if (width <= 0 || height <= 0) throw std::invalid_argument("empty grid");
        if (l_max <= 0) throw std::invalid_argument("l_max must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    const Rat& resolution() const { return resolution_; }
    double l_max() const { return l_max_; }

    bool in_bounds(const GridCell& c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }

    double logodds(const GridCell& c) const { return logodds_[index(c)]; }

    void set_logodds(const GridCell& c, double l) {
        logodds_[index(c)] = std::clamp(l, -l_max_, l_max_);
    }

    void add_logodds(const GridCell& c, double delta) {
        set_logodds(c, logodds_[index(c)] + delta);
    }

    double prob(const GridCell& c) const { return 1.0 / (1.0 + std::exp(-logodds(c))); }

    // Unobserved cells sit at exactly zero; the band also absorbs
    // floating-point residue of symmetric hit/miss cancellation.
    static constexpr double kUnknownBand = 1e-9;

    CellClass classify(const GridCell& c) const {
        const double l = logodds(c);
        if (std::abs(l) <= kUnknownBand) return CellClass::Unknown;
        return l < 0.0 ? CellClass::Free : CellClass::Occupied;
    }

    bool is_free(const GridCell& c) const {
        return in_bounds(c) && classify(c) == CellClass::Free;
    }
    bool is_unknown(const GridCell& c) const {
        return in_bounds(c) && classify(c) == CellClass::Unknown;
    }
    bool is_occupied(const GridCell& c) const {
        return in_bounds(c) && classify(c) == CellClass::Occupied;
    }

  private:
    size_t index(const GridCell& c) const {
        if (!in_bounds(c)) throw std::out_of_range("grid cell out of bounds");
        return static_cast<size_t>(c.y) * width_ + c.x;
    }

    int width_ = 0, height_ = 0;
    Rat resolution_ = 1;
    double l_max_ = 5.0;
    std::vector<double> logodds_;
};

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Total map uncertainty in bits.
inline double map_entropy(const OccupancyGrid& grid) {
    double bits = 0.0;
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            bits += binary_entropy(grid.prob(GridCell{x, y}));
        }
    }
    return bits;
}

// --- ground truth ----------------------------------------------------------

struct TruthGrid {
    int width = 0, height = 0;
    Rat resolution = 1;
    Rat origin_x = 0, origin_y = 0;  // world coordinates of cell (0,0)'s corner
    std::vector<std::uint8_t> occupied;

    bool in_bounds(const GridCell& c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }
    bool is_occupied(const GridCell& c) const {
        return occupied[static_cast<size_t>(c.y) * width + c.x] != 0;
    }
    void set_occupied(const GridCell& c, bool v) {
        occupied[static_cast<size_t>(c.y) * width + c.x] = v ? 1 : 0;
    }
    Point cell_center(const GridCell& c) const {
        return Point{origin_x + resolution * (2 * c.x + 1) / 2,
                     origin_y + resolution * (2 * c.y + 1) / 2};
    }
};

/// Rasterizes a polygon onto a truth grid: a cell is free iff its center is
/// strictly interior. A border of occupied cells frames the map.
inline TruthGrid rasterize_polygon(const OrthoPolygon& P, const Rat& resolution, int border = 1) {
    Rat minx = P.vertex(0).x, maxx = minx, miny = P.vertex(0).y, maxy = miny;
    for (const Point& v : P.vertices()) {
        minx = std::min(minx, v.x);
        maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    auto cells_for = [&](const Rat& span) {
        const Rat n = span / resolution;
        const BigInt num = boost::multiprecision::numerator(n);
        const BigInt den = boost::multiprecision::denominator(n);
        BigInt q = num / den;
        if (q * den != num) q += 1;
        return q.template convert_to<int>();
    };
    TruthGrid g;
    g.resolution = resolution;
    g.width = cells_for(maxx - minx) + 2 * border;
    g.height = cells_for(maxy - miny) + 2 * border;
    g.origin_x = minx - resolution * border;
    g.origin_y = miny - resolution * border;
    g.occupied.assign(static_cast<size_t>(g.width) * g.height, 1);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const GridCell c{x, y};
            if (P.interior_contains(g.cell_center(c))) g.set_occupied(c, false);
        }
    }
    return g;
}

// --- sensing ----------------------------------------------------------------

struct SensorSpec {
    double max_range = 5.0;           // meters
    double fov_deg = 360.0;
    double angular_res_deg = 0.395;
    double p_hit = 0.7;
    double p_miss = 0.4;
    double sigma = 0.0;               // range noise std dev, meters

    void validate() const {
        if (!(p_hit > 0.5 && p_hit < 1.0)) throw std::invalid_argument("p_hit must be in (0.5, 1)");
        if (!(p_miss > 0.0 && p_miss < 0.5)) throw std::invalid_argument("p_miss must be in (0, 0.5)");
        if (!(angular_res_deg > 0.0)) throw std::invalid_argument("angular resolution must be positive");
        if (!(max_range > 0.0)) throw std::invalid_argument("max range must be positive");
    }
    int beam_count() const { return static_cast<int>(std::floor(fov_deg / angular_res_deg)) + 1; }
    double hit_logodds() const { return std::log(p_hit / (1.0 - p_hit)); }
    double miss_logodds() const { return std::log(p_miss / (1.0 - p_miss)); }
};

struct Beam {
    double angle_deg = 0.0;
    double range = 0.0;  // meters, to the hit cell's center (max_range on a miss)
    bool hit = false;
    GridCell hit_cell;   // valid when hit
};

struct Scan {
    GridCell pose;
    double heading_deg = 0.0;
    std::vector<Beam> beams;
};

namespace detail {

struct RayCell {
    GridCell cell;
    double entry;  // distance from the pose center, meters
};

/// Supercover traversal from the center of `start`: every cell the ray
/// passes through is reported in entry order; at exact corner crossings both
/// side cells are reported before the diagonal one. The start cell itself is
/// not reported.
inline std::vector<RayCell> traverse_ray(const GridCell& start, double angle_rad,
                                         double max_dist_m, double resolution, int width,
                                         int height) {
    std::vector<RayCell> out;
    const double dx = std::cos(angle_rad), dy = std::sin(angle_rad);
    const double max_cells = max_dist_m / resolution;

    int cx = start.x, cy = start.y;
    const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();
    // Parametrize by distance in cell units from the cell center.
    double t_max_x = step_x == 0 ? inf : 0.5 / std::abs(dx);
    double t_max_y = step_y == 0 ? inf : 0.5 / std::abs(dy);
    const double t_delta_x = step_x == 0 ? inf : 1.0 / std::abs(dx);
    const double t_delta_y = step_y == 0 ? inf : 1.0 / std::abs(dy);

    auto emit = [&](int x, int y, double t) {
        if (t > max_cells) return false;
        if (x < 0 || x >= width || y < 0 || y >= height) return false;
        out.push_back(RayCell{GridCell{x, y}, t * resolution});
        return true;
    };

    for (;;) {
        if (t_max_x < t_max_y) {
            const double t = t_max_x;
            cx += step_x;
            t_max_x += t_delta_x;
            if (!emit(cx, cy, t)) return out;
        } else if (t_max_y < t_max_x) {
            const double t = t_max_y;
            cy += step_y;
            t_max_y += t_delta_y;
            if (!emit(cx, cy, t)) return out;
        } else {
            if (t_max_x == inf) return out;
            // Exact corner: pass through both side cells.
            const double t = t_max_x;
            const bool a = emit(cx + step_x, cy, t);
            const bool b = emit(cx, cy + step_y, t);
            cx += step_x;
            cy += step_y;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
            if (!(a || b)) return out;
            if (!emit(cx, cy, t)) return out;
        }
    }
}

}  // namespace detail

/// Simulates one scan against the ground truth. Beams report the entry
/// distance of the first occupied cell; sigma adds Gaussian range noise.
inline Scan simulate_scan(const TruthGrid& truth, const GridCell& pose, const SensorSpec& spec,
                          std::mt19937& rng, double heading_deg = 0.0) {
    spec.validate();
    if (!truth.in_bounds(pose)) throw std::invalid_argument("pose outside the map");
    if (truth.is_occupied(pose)) throw std::invalid_argument("pose inside an obstacle");

    Scan scan;
    scan.pose = pose;
    scan.heading_deg = heading_deg;
    const double res = to_double(truth.resolution);
    const int n = spec.beam_count();
    std::normal_distribution<double> noise(0.0, spec.sigma);
    for (int i = 0; i < n; ++i) {
        const double angle_deg = heading_deg - spec.fov_deg / 2.0 + i * spec.angular_res_deg;
        const double angle_rad = angle_deg * M_PI / 180.0;
        Beam beam;
        beam.angle_deg = angle_deg;
        beam.range = spec.max_range;
        beam.hit = false;
        for (const auto& rc :
             detail::traverse_ray(pose, angle_rad, spec.max_range, res, truth.width, truth.height)) {
            if (truth.is_occupied(rc.cell)) {
                beam.range = std::min(spec.max_range, rc.entry + res / 2.0);
                beam.hit = true;
                beam.hit_cell = rc.cell;
                break;
            }
        }
        if (spec.sigma > 0.0) {
            beam.range = std::clamp(beam.range + noise(rng), 0.0, spec.max_range);
        }
        scan.beams.push_back(beam);
    }
    return scan;
}

/// Folds a scan into the belief map. Within one scan each cell is updated at
/// most once; hits take priority over misses.
inline void integrate_scan(OccupancyGrid& grid, const Scan& scan, const SensorSpec& spec) {
    const double res = to_double(grid.resolution());
    std::set<GridCell> hits, misses;
    misses.insert(scan.pose);  // the robot observes its own cell as free
    for (const Beam& beam : scan.beams) {
        const double angle_rad = beam.angle_deg * M_PI / 180.0;
        const auto cells = detail::traverse_ray(scan.pose, angle_rad,
                                                beam.hit ? spec.max_range : beam.range, res,
                                                grid.width(), grid.height());
        if (beam.hit && spec.sigma == 0.0) {
            // Noise-free: stop exactly at the reported hit cell.
            for (const auto& rc : cells) {
                if (rc.cell == beam.hit_cell) {
                    hits.insert(rc.cell);
                    break;
                }
                misses.insert(rc.cell);
            }
        } else {
            // Noisy (or miss): the perturbed range decides; the last cell
            // within range takes the hit.
            const GridCell* last = nullptr;
            for (const auto& rc : cells) {
                if (rc.entry > beam.range) break;
                if (last) misses.insert(*last);
                last = &rc.cell;
            }
            if (last) {
                if (beam.hit) {
                    hits.insert(*last);
                } else {
                    misses.insert(*last);
                }
            }
        }
    }
    for (const GridCell& c : hits) grid.add_logodds(c, spec.hit_logodds());
    for (const GridCell& c : misses) {
        if (!hits.count(c)) grid.add_logodds(c, spec.miss_logodds());
    }
}

// --- frontiers ---------------------------------------------------------------

inline bool is_frontier_cell(const OccupancyGrid& grid, const GridCell& c) {
    if (!grid.is_free(c)) return false;
    for (const GridCell& d : kFourNeighbors) {
        if (grid.is_unknown(c + d)) return true;
    }
    return false;
}

enum class FrontierKind { SensingRange, BlockingVertexAdjacent };

struct Frontier {
    std::vector<GridCell> cells;  // row-major order
    GridCell goal;                // middle cell
    int size = 0;
    FrontierKind kind = FrontierKind::SensingRange;
};

struct FrontierExtraction {
    std::vector<Frontier> kept;
    std::vector<Frontier> discarded_small;
    std::vector<Frontier> discarded_blocking;
};

/// Frontier cells clustered by 8-connectivity. Clusters below `min_size` and
/// clusters touching a blocking-vertex cell (8-neighborhood) are discarded.
inline FrontierExtraction extract_frontiers_detailed(const OccupancyGrid& grid, int min_size,
                                                     const std::vector<GridCell>& blocking_cells) {
    std::set<GridCell> blockers(blocking_cells.begin(), blocking_cells.end());
    std::set<GridCell> seen;
    FrontierExtraction out;
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            const GridCell seed{x, y};
            if (seen.count(seed) || !is_frontier_cell(grid, seed)) continue;
            std::vector<GridCell> cluster{seed};
            seen.insert(seed);
            for (size_t head = 0; head < cluster.size(); ++head) {
                for (const GridCell& d : kEightNeighbors) {
                    const GridCell n = cluster[head] + d;
                    if (!grid.in_bounds(n) || seen.count(n) || !is_frontier_cell(grid, n)) continue;
                    seen.insert(n);
                    cluster.push_back(n);
                }
            }
            std::sort(cluster.begin(), cluster.end(),
                      [](const GridCell& a, const GridCell& b) {
                          return a.y != b.y ? a.y < b.y : a.x < b.x;
                      });
            Frontier f;
            f.cells = std::move(cluster);
            f.size = static_cast<int>(f.cells.size());
            f.goal = f.cells[f.size / 2];
            bool near_blocker = false;
            for (const GridCell& c : f.cells) {
                for (const GridCell& d : kEightNeighbors) {
                    if (blockers.count(c + d)) near_blocker = true;
                }
            }
            if (near_blocker) {
                f.kind = FrontierKind::BlockingVertexAdjacent;
                out.discarded_blocking.push_back(std::move(f));
            } else if (f.size < min_size) {
                out.discarded_small.push_back(std::move(f));
            } else {
                out.kept.push_back(std::move(f));
            }
        }
    }
    return out;
}

inline std::vector<Frontier> extract_frontiers(const OccupancyGrid& grid, int min_size,
                                               const std::vector<GridCell>& blocking_cells = {}) {
    return extract_frontiers_detailed(grid, min_size, blocking_cells).kept;
}

// --- grid blocking vertices ---------------------------------------------------

struct GridBlockingVertex {
    GridCell cell;            // the occupied corner cell
    GridCell unknown_dir;     // unit step toward the unknown wall continuation
    GridCell extension_dir;   // unit step along the extension, into free space
};

/// An occupied cell is a blocking vertex when its four neighbors are exactly
/// one occupied cell, one unknown cell, one frontier cell, and one free
/// non-frontier cell (any orientation). The extension leaves the corner
/// opposite the unknown wall continuation.
inline std::vector<GridBlockingVertex> detect_grid_blocking_vertices(const OccupancyGrid& grid) {
    std::vector<GridBlockingVertex> out;
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            const GridCell c{x, y};
            if (!grid.is_occupied(c)) continue;
            int occupied = 0, unknown = 0, frontier = 0, plain_free = 0;
            GridCell unknown_at{};
            bool in_bounds_ok = true;
            for (const GridCell& d : kFourNeighbors) {
                const GridCell n = c + d;
                if (!grid.in_bounds(n)) {
                    in_bounds_ok = false;
                    break;
                }
                switch (grid.classify(n)) {
                    case CellClass::Occupied: ++occupied; break;
                    case CellClass::Unknown:
                        ++unknown;
                        unknown_at = d;
                        break;
                    case CellClass::Free:
                        if (is_frontier_cell(grid, n)) {
                            ++frontier;
                        } else {
                            ++plain_free;
                        }
                        break;
                }
            }
            if (!in_bounds_ok) continue;
            if (occupied == 1 && unknown == 1 && frontier == 1 && plain_free == 1) {
                out.push_back(GridBlockingVertex{c, unknown_at,
                                                 GridCell{-unknown_at.x, -unknown_at.y}});
            }
        }
    }
    return out;
}

// --- goal synthesis -------------------------------------------------------------

struct GridGoal {
    GridCell cell;
    NodeKind kind = NodeKind::FrontierGoal;
};

struct GoalSynthesisParams {
    int goal_offset = 2;         // cells along the extension
    int min_frontier_size = 3;   // cells
};

/// Reachable cells from `from` through free space (4-connected).
inline std::set<GridCell> reachable_free_cells(const OccupancyGrid& grid, const GridCell& from) {
    std::set<GridCell> seen;
    if (!grid.is_free(from)) return seen;
    std::vector<GridCell> queue{from};
    seen.insert(from);
    for (size_t head = 0; head < queue.size(); ++head) {
        for (const GridCell& d : kFourNeighbors) {
            const GridCell n = queue[head] + d;
            if (!grid.is_free(n) || seen.count(n)) continue;
            seen.insert(n);
            queue.push_back(n);
        }
    }
    return seen;
}

/// Clockwise order around the pose, starting from north; ties by distance
/// then cell identity.
inline bool clockwise_goal_less(const GridCell& pose, const GridCell& a, const GridCell& b) {
    const int ax = a.x - pose.x, ay = a.y - pose.y;
    const int bx = b.x - pose.x, by = b.y - pose.y;
    auto octant = [](int dx, int dy) {
        if (dx == 0 && dy > 0) return 0;
        if (dx > 0 && dy > 0) return 1;
        if (dx > 0 && dy == 0) return 2;
        if (dx > 0 && dy < 0) return 3;
        if (dx == 0 && dy < 0) return 4;
        if (dx < 0 && dy < 0) return 5;
        if (dx < 0 && dy == 0) return 6;
        return 7;
    };
    const int oa = octant(ax, ay), ob = octant(bx, by);
    if (oa != ob) return oa < ob;
    const long cross = static_cast<long>(ax) * by - static_cast<long>(ay) * bx;
    if (cross != 0) return cross < 0;  // clockwise
    const long da = static_cast<long>(ax) * ax + static_cast<long>(ay) * ay;
    const long db = static_cast<long>(bx) * bx + static_cast<long>(by) * by;
    if (da != db) return da < db;
    return a < b;
}

/// Blocking-vertex goals (offset along the extension into known free space)
/// plus surviving sensing-range frontier goals, deduplicated, reachable from
/// the pose, clockwise-sorted.
inline std::vector<GridGoal> synthesize_goals(const OccupancyGrid& grid, const GridCell& pose,
                                              const GoalSynthesisParams& params) {
    std::vector<GridBlockingVertex> bvs = detect_grid_blocking_vertices(grid);
    std::vector<GridCell> bv_cells;
    bv_cells.reserve(bvs.size());
    for (const auto& bv : bvs) bv_cells.push_back(bv.cell);

    std::vector<GridGoal> goals;
    std::set<GridCell> used;
    for (const auto& bv : bvs) {
        GridCell goal{};
        bool ok = false;
        for (int k = 1; k <= params.goal_offset; ++k) {
            const GridCell c{bv.cell.x + k * bv.extension_dir.x,
                             bv.cell.y + k * bv.extension_dir.y};
            if (!grid.is_free(c)) break;
            goal = c;
            ok = true;
        }
        if (ok && !used.count(goal) && goal != pose) {
            used.insert(goal);
            goals.push_back(GridGoal{goal, NodeKind::ExtensionGoal});
        }
    }
    for (const Frontier& f : extract_frontiers(grid, params.min_frontier_size, bv_cells)) {
        if (!used.count(f.goal) && f.goal != pose) {
            used.insert(f.goal);
            goals.push_back(GridGoal{f.goal, NodeKind::FrontierGoal});
        }
    }

    const std::set<GridCell> reach = reachable_free_cells(grid, pose);
    std::vector<GridGoal> kept;
    for (const auto& g : goals) {
        if (reach.count(g.cell)) kept.push_back(g);
    }
    std::sort(kept.begin(), kept.end(), [&](const GridGoal& a, const GridGoal& b) {
        return clockwise_goal_less(pose, a.cell, b.cell);
    });
    return kept;
}

// --- PGM / CSV I/O ----------------------------------------------------------------

/// Writes a (P2 ASCII or P5 binary) PGM; row 0 of the file is the top of the
/// map (highest y).
inline void write_pgm(std::ostream& os, int width, int height,
                      const std::vector<std::uint8_t>& values, bool binary,
                      const std::string& comment = "") {
    os << (binary ? "P5" : "P2") << "\n";
    if (!comment.empty()) os << "# " << comment << "\n";
    os << width << " " << height << "\n255\n";
    for (int y = height - 1; y >= 0; --y) {
        for (int x = 0; x < width; ++x) {
            const std::uint8_t v = values[static_cast<size_t>(y) * width + x];
            if (binary) {
                os.put(static_cast<char>(v));
            } else {
                os << static_cast<int>(v) << (x + 1 == width ? "" : " ");
            }
        }
        if (!binary) os << "\n";
    }
}

struct PgmImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> values;  // y-up
};

inline PgmImage read_pgm(std::istream& is) {
    auto next_token = [&is]() {
        std::string tok;
        for (;;) {
            int ch = is.get();
            if (ch == EOF) throw std::runtime_error("truncated PGM");
            if (ch == '#') {
                std::string line;
                std::getline(is, line);
                continue;
            }
            if (std::isspace(ch)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(ch));
        }
    };
    const std::string magic = next_token();
    if (magic != "P2" && magic != "P5") throw std::runtime_error("not a PGM file");
    PgmImage img;
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255) {
        throw std::runtime_error("unsupported PGM header");
    }
    img.values.assign(static_cast<size_t>(img.width) * img.height, 0);
    if (magic == "P5") {
        for (int y = img.height - 1; y >= 0; --y) {
            for (int x = 0; x < img.width; ++x) {
                int ch = is.get();
                if (ch == EOF) throw std::runtime_error("truncated PGM data");
                img.values[static_cast<size_t>(y) * img.width + x] = static_cast<std::uint8_t>(ch);
            }
        }
    } else {
        for (int y = img.height - 1; y >= 0; --y) {
            for (int x = 0; x < img.width; ++x) {
                img.values[static_cast<size_t>(y) * img.width + x] =
                    static_cast<std::uint8_t>(std::stoi(next_token()));
            }
        }
    }
    return img;
}

/// Truth maps use 0 = occupied, 255 = free.
inline TruthGrid truth_from_pgm(std::istream& is, const Rat& resolution) {
    PgmImage img = read_pgm(is);
    TruthGrid g;
    g.width = img.width;
    g.height = img.height;
    g.resolution = resolution;
    g.occupied.assign(img.values.size(), 0);
    for (size_t i = 0; i < img.values.size(); ++i) g.occupied[i] = img.values[i] < 128 ? 1 : 0;
    return g;
}

inline void truth_to_pgm(std::ostream& os, const TruthGrid& g, bool binary = false,
                         const std::string& comment = "") {
    std::vector<std::uint8_t> values(g.occupied.size());
    for (size_t i = 0; i < g.occupied.size(); ++i) values[i] = g.occupied[i] ? 0 : 255;
    write_pgm(os, g.width, g.height, values, binary, comment);
}

/// Belief snapshots: 0 = occupied, 255 = free, 128 = unknown.
inline void belief_to_pgm(std::ostream& os, const OccupancyGrid& grid, bool binary = false,
                          const std::string& comment = "") {
    std::vector<std::uint8_t> values(static_cast<size_t>(grid.width()) * grid.height());
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            const GridCell c{x, y};
            std::uint8_t v = 128;
            if (grid.classify(c) == CellClass::Free) v = 255;
            if (grid.classify(c) == CellClass::Occupied) v = 0;
            values[static_cast<size_t>(y) * grid.width() + x] = v;
        }
    }
    write_pgm(os, grid.width(), grid.height(), values, binary, comment);
}

/// Occupancy probabilities as CSV, one row per y (top row first).
inline void belief_to_csv(std::ostream& os, const OccupancyGrid& grid,
                          const std::string& comment = "") {
    if (!comment.empty()) os << "# " << comment << "\n";
    for (int y = grid.height() - 1; y >= 0; --y) {
        for (int x = 0; x < grid.width(); ++x) {
            os << grid.prob(GridCell{x, y}) << (x + 1 == grid.width() ? "" : ",");
        }
        os << "\n";
    }
}

}  // namespace polyex
