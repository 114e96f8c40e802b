#pragma once

// Information-driven detours: a submodular surrogate of mutual information
// over the occupancy grid (per-beam entropy sum attenuated by the chance of
// reaching each cell, aggregated per cell by the best view), a corridor
// graph imposed on the shortest path, and budgeted orienteering by recursive
// greedy with an optional strictly-forward restriction.

#include "polyex/occupancy.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace polyex {

/// Deterministic BFS shortest path through believed-free cells.
inline std::optional<std::vector<GridCell>> grid_bfs_path(const OccupancyGrid& grid,
                                                          const GridCell& a, const GridCell& b) {
    if (!grid.is_free(a) || !grid.is_free(b)) return std::nullopt;
    if (a == b) return std::vector<GridCell>{a};
    const int w = grid.width(), h = grid.height();
    std::vector<int> parent(static_cast<size_t>(w) * h, -2);
    auto idx = [w](const GridCell& c) { return static_cast<size_t>(c.y) * w + c.x; };
    std::vector<GridCell> queue{a};
    parent[idx(a)] = -1;
    for (size_t head = 0; head < queue.size(); ++head) {
        const GridCell cur = queue[head];
        if (cur == b) break;
        for (const GridCell& d : kFourNeighbors) {
            const GridCell n = cur + d;
            if (!grid.is_free(n) || parent[idx(n)] != -2) continue;
            parent[idx(n)] = static_cast<int>(idx(cur));
            queue.push_back(n);
        }
    }
    if (parent[idx(b)] == -2) return std::nullopt;
    std::vector<GridCell> rev{b};
    for (int cur = parent[idx(b)]; cur >= 0; cur = parent[cur]) {
        rev.push_back(GridCell{cur % w, cur / w});
    }
    return std::vector<GridCell>(rev.rbegin(), rev.rend());
}

// --- reward model -------------------------------------------------------------

/// Surrogate mutual information. One pose's view weight for a cell is the
/// cell's binary entropy attenuated by the probability that the beam reaches
/// it: H(c_i) * prod_{j<i} (1 - p(c_j)). A set of poses scores each cell once
/// with the best weight over all poses and beams, which makes the reward
/// monotone and submodular.
class RewardModel {
  public:
    RewardModel(const OccupancyGrid& grid, const SensorSpec& sensor,
                double angular_res_override_deg = 0.0)
        : grid_(&grid), sensor_(sensor) {
        if (angular_res_override_deg > 0.0) sensor_.angular_res_deg = angular_res_override_deg;
        sensor_.validate();
    }

    using Weights = std::map<int, double>;  // cell index -> weight

    const Weights& pose_weights(const GridCell& pose) const {
        auto it = cache_.find(pose);
        if (it != cache_.end()) return it->second;
        Weights w;
        const double res = to_double(grid_->resolution());
        const int n = sensor_.beam_count();
        for (int i = 0; i < n; ++i) {
            const double angle_deg = -sensor_.fov_deg / 2.0 + i * sensor_.angular_res_deg;
            const double angle_rad = angle_deg * M_PI / 180.0;
            double reach = 1.0;
            for (const auto& rc : detail::traverse_ray(pose, angle_rad, sensor_.max_range, res,
                                                       grid_->width(), grid_->height())) {
                const double p = grid_->prob(rc.cell);
                const double gain = binary_entropy(p) * reach;
                if (gain > 0.0) {
                    const int key = rc.cell.y * grid_->width() + rc.cell.x;
                    auto [wit, inserted] = w.try_emplace(key, gain);
                    if (!inserted && gain > wit->second) wit->second = gain;
                }
                reach *= (1.0 - p);
                if (reach < 1e-12) break;
            }
        }
        return cache_.emplace(pose, std::move(w)).first->second;
    }

    /// Joint reward of a pose set.
    double set_reward(const std::vector<GridCell>& poses) const {
        Condition cond;
        double total = 0.0;
        for (const GridCell& pose : poses) total += absorb(cond, pose);
        return total;
    }

    /// Best-so-far weights of an already visited pose set.
    struct Condition {
        std::map<int, double> best;
    };

    /// Adds a pose to the condition; returns its marginal gain.
    double absorb(Condition& cond, const GridCell& pose) const {
        double gain = 0.0;
        for (const auto& [cell, w] : pose_weights(pose)) {
            auto [it, inserted] = cond.best.try_emplace(cell, w);
            if (inserted) {
                gain += w;
            } else if (w > it->second) {
                gain += w - it->second;
                it->second = w;
            }
        }
        return gain;
    }

    /// Marginal gain of a pose sequence given a condition (not modified).
    double marginal(const std::vector<GridCell>& poses, const Condition& cond) const {
        Condition tmp = cond;
        double gain = 0.0;
        for (const GridCell& pose : poses) gain += absorb(tmp, pose);
        return gain;
    }

    const SensorSpec& sensor() const { return sensor_; }

  private:
    const OccupancyGrid* grid_;
    SensorSpec sensor_;
    mutable std::map<GridCell, Weights> cache_;
};

/// Surrogate mutual information of a pose set under the given sensor.
inline double pose_mutual_information(const OccupancyGrid& grid,
                                      const std::vector<GridCell>& poses,
                                      const SensorSpec& sensor) {
    for (const GridCell& pose : poses) {
        if (!grid.is_free(pose)) throw std::invalid_argument("pose not in known free space");
    }
    return RewardModel(grid, sensor).set_reward(poses);
}

// --- corridor graph -------------------------------------------------------------

struct CorridorVertex {
    int id = 0;
    GridCell cell;
    int axis = 0;  // column index along the shortest path
};

struct CorridorGraph {
    std::vector<CorridorVertex> vertices;
    std::vector<std::vector<std::pair<int, int>>> adj;  // (vertex, length in cells)
    int s = -1, t = -1;

    // All-pairs shortest distances over the graph and a successor matrix for
    // path reconstruction (filled by finalize()).
    std::vector<std::vector<int>> dist;
    std::vector<std::vector<int>> next;
    std::map<std::pair<int, int>, std::vector<GridCell>> edge_cells;

    static constexpr int kInf = std::numeric_limits<int>::max() / 4;

    int vertex_at(const GridCell& c) const {
        for (const auto& v : vertices) {
            if (v.cell == c) return v.id;
        }
        return -1;
    }

    void add_edge(int u, int v, int len, std::vector<GridCell> cells) {
        adj[u].push_back({v, len});
        adj[v].push_back({u, len});
        edge_cells[{u, v}] = cells;
        std::reverse(cells.begin(), cells.end());
        edge_cells[{v, u}] = std::move(cells);
    }

    void finalize() {
        const int n = static_cast<int>(vertices.size());
        dist.assign(n, std::vector<int>(n, kInf));
        next.assign(n, std::vector<int>(n, -1));
        for (int i = 0; i < n; ++i) {
            dist[i][i] = 0;
            next[i][i] = i;
        }
        for (int u = 0; u < n; ++u) {
            for (const auto& [v, len] : adj[u]) {
                if (len < dist[u][v]) {
                    dist[u][v] = len;
                    next[u][v] = v;
                }
            }
        }
        for (int k = 0; k < n; ++k) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (dist[i][k] == kInf || dist[k][j] == kInf) continue;
                    const int nd = dist[i][k] + dist[k][j];
                    if (nd < dist[i][j]) {
                        dist[i][j] = nd;
                        next[i][j] = next[i][k];
                    }
                }
            }
        }
    }

    std::vector<int> shortest_vertex_path(int u, int v) const {
        std::vector<int> out{u};
        while (u != v) {
            u = next[u][v];
            if (u < 0) throw std::logic_error("corridor graph disconnected");
            out.push_back(u);
        }
        return out;
    }
};

/// Builds the orienteering input graph: waypoints every `spacing` cells along
/// the shortest path in known free space, flanked by up to `width` rows on
/// each side at the same pitch, connected 8-adjacently in lattice space.
/// Edge lengths are grid geodesic distances; flanking points that fall into
/// non-free space are omitted.
inline CorridorGraph build_corridor_graph(const OccupancyGrid& grid, const GridCell& s,
                                          const GridCell& t, int spacing, int width) {
    if (spacing < 1) throw std::invalid_argument("spacing must be >= 1");
    auto path = grid_bfs_path(grid, s, t);
    if (!path) throw std::invalid_argument("corridor endpoints are disconnected");
    const auto& cells = *path;
    const int L = static_cast<int>(cells.size()) - 1;

    std::vector<int> columns;
    for (int i = 0; i < L; i += spacing) columns.push_back(i);
    columns.push_back(L);

    CorridorGraph g;
    std::map<std::pair<int, int>, int> lattice;  // (column index, row) -> vertex id
    for (size_t ci = 0; ci < columns.size(); ++ci) {
        const int i = columns[ci];
        const GridCell base = cells[i];
        const GridCell before = cells[std::max(0, i - 1)];
        const GridCell after = cells[std::min(L, i + 1)];
        const int dx = after.x - before.x, dy = after.y - before.y;
        const GridCell perp = std::abs(dx) >= std::abs(dy) ? GridCell{0, 1} : GridCell{1, 0};
        for (int row = -width; row <= width; ++row) {
            const GridCell c{base.x + perp.x * row * spacing, base.y + perp.y * row * spacing};
            if (!grid.is_free(c)) continue;
            if (g.vertex_at(c) >= 0) continue;  // lattice points may coincide
            const int id = static_cast<int>(g.vertices.size());
            g.vertices.push_back(CorridorVertex{id, c, static_cast<int>(ci)});
            lattice[{static_cast<int>(ci), row}] = id;
        }
    }
    g.adj.assign(g.vertices.size(), {});
    g.s = g.vertex_at(cells[0]);
    g.t = g.vertex_at(cells[L]);
    if (g.s < 0 || g.t < 0) throw std::logic_error("corridor endpoints missing");

    for (const auto& [key, u] : lattice) {
        const auto [ci, row] = key;
        for (int dci = 0; dci <= 1; ++dci) {
            for (int drow = -1; drow <= 1; ++drow) {
                if (dci == 0 && drow <= 0) continue;  // undirected: visit each pair once
                auto it = lattice.find({ci + dci, row + drow});
                if (it == lattice.end()) continue;
                const int v = it->second;
                auto seg = grid_bfs_path(grid, g.vertices[u].cell, g.vertices[v].cell);
                if (!seg) continue;
                g.add_edge(u, v, static_cast<int>(seg->size()) - 1, *seg);
            }
        }
    }
    g.finalize();
    if (g.dist[g.s][g.t] >= CorridorGraph::kInf) throw std::logic_error("corridor graph split");
    return g;
}

// --- recursive greedy -------------------------------------------------------------

struct BudgetedPath {
    std::vector<int> vertices;  // s..t in the corridor graph
    int cost = 0;               // cells
    double reward = 0.0;        // bits
};

struct PlannerTrace {
    struct Level {
        int depth = 0;
        long candidates = 0;
        double best_reward = 0.0;
    };
    std::vector<Level> levels;  // indexed by recursion depth
    long total_candidates = 0;

    void to_csv(std::ostream& os, const std::string& comment = "") const {
        if (!comment.empty()) os << "# " << comment << "\n";
        os << "depth,candidates,best_reward\n";
        for (const auto& l : levels) {
            os << l.depth << "," << l.candidates << "," << l.best_reward << "\n";
        }
    }
};

class InfeasibleBudget : public std::runtime_error {
  public:
    explicit InfeasibleBudget(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

struct RgContext {
    const CorridorGraph* g = nullptr;
    const RewardModel* rm = nullptr;
    bool forward_only = false;
    PlannerTrace* trace = nullptr;

    void count(int depth) {
        if (!trace) return;
        if (static_cast<int>(trace->levels.size()) <= depth) {
            trace->levels.resize(depth + 1);
            for (int d = 0; d <= depth; ++d) trace->levels[d].depth = d;
        }
        ++trace->levels[depth].candidates;
        ++trace->total_candidates;
    }
};

inline std::vector<GridCell> vertex_cells(const CorridorGraph& g, const std::vector<int>& vs) {
    std::vector<GridCell> out;
    out.reserve(vs.size());
    for (int v : vs) out.push_back(g.vertices[v].cell);
    return out;
}

inline BudgetedPath rg_recurse(RgContext& ctx, int s, int t, int budget,
                               const RewardModel::Condition& cond, int depth) {
    const CorridorGraph& g = *ctx.g;
    if (g.dist[s][t] > budget) throw InfeasibleBudget("budget below the shortest path");

    BudgetedPath best;
    best.vertices = g.shortest_vertex_path(s, t);
    best.cost = g.dist[s][t];
    best.reward = ctx.rm->marginal(vertex_cells(g, best.vertices), cond);
    if (depth == 0) return best;

    int best_v = -1, best_b1 = -1;
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
        if (ctx.forward_only) {
            const int lo = std::min(g.vertices[s].axis, g.vertices[t].axis);
            const int hi = std::max(g.vertices[s].axis, g.vertices[t].axis);
            if (g.vertices[v].axis < lo || g.vertices[v].axis > hi) continue;
        }
        const int lo = g.dist[s][v];
        const int hi = budget - g.dist[v][t];
        for (int b1 = lo; b1 <= hi; ++b1) {
            ctx.count(depth);
            BudgetedPath p1 = rg_recurse(ctx, s, v, b1, cond, depth - 1);
            RewardModel::Condition cond2 = cond;
            for (const GridCell& c : vertex_cells(g, p1.vertices)) ctx.rm->absorb(cond2, c);
            BudgetedPath p2 = rg_recurse(ctx, v, t, budget - b1, cond2, depth - 1);
            const double reward = p1.reward + p2.reward;
            const int cost = p1.cost + p2.cost;
            const bool better =
                reward > best.reward ||
                (reward == best.reward && (best_v < 0 ? false : (v < best_v || (v == best_v && b1 < best_b1))));
            if (better) {
                best.vertices = p1.vertices;
                best.vertices.insert(best.vertices.end(), p2.vertices.begin() + 1,
                                     p2.vertices.end());
                best.cost = cost;
                best.reward = reward;
                best_v = v;
                best_b1 = b1;
            }
        }
    }
    if (ctx.trace && static_cast<int>(ctx.trace->levels.size()) > depth) {
        ctx.trace->levels[depth].best_reward =
            std::max(ctx.trace->levels[depth].best_reward, best.reward);
    }
    return best;
}

}  // namespace detail

/// Quasi-polynomial recursive greedy for submodular orienteering: enumerate
/// the middle vertex and the budget split, recurse on both halves with the
/// second half conditioned on the first. Budget and costs are in cells.
inline BudgetedPath recursive_greedy(const CorridorGraph& g, const RewardModel& rm, int s, int t,
                                     int budget, const std::vector<GridCell>& visited, int depth,
                                     PlannerTrace* trace = nullptr) {
    detail::RgContext ctx{&g, &rm, false, trace};
    RewardModel::Condition cond;
    for (const GridCell& c : visited) rm.absorb(cond, c);
    return detail::rg_recurse(ctx, s, t, budget, cond, depth);
}

/// Forward-only variant: middle vertices are restricted to path-axis columns
/// between the endpoints, so the path never doubles back toward the start.
/// Faster, but the approximation guarantee no longer applies.
inline BudgetedPath forward_only_recursive_greedy(const CorridorGraph& g, const RewardModel& rm,
                                                  int s, int t, int budget,
                                                  const std::vector<GridCell>& visited, int depth,
                                                  PlannerTrace* trace = nullptr) {
    detail::RgContext ctx{&g, &rm, true, trace};
    RewardModel::Condition cond;
    for (const GridCell& c : visited) rm.absorb(cond, c);
    return detail::rg_recurse(ctx, s, t, budget, cond, depth);
}

// --- informative goto -------------------------------------------------------------

struct CorridorParams {
    int spacing = 2;
    int width = 2;
    int depth = 0;                       // 0: ceil(log2(shortest-path hops))
    double reward_angular_res_deg = 0;   // 0: sensor resolution
};

struct InformativePath {
    std::vector<GridCell> cells;  // full cell path, consecutive cells 4-adjacent
    int cost = 0;                 // cells
    double reward = 0.0;
    BudgetedPath graph_path;
};

/// Budgeted informative path from s to t: corridor graph over the shortest
/// path, budget alpha times the shortest distance, forward-only recursive
/// greedy. The returned cost never exceeds alpha * dist(s, t).
inline InformativePath informative_goto(const OccupancyGrid& grid, const SensorSpec& sensor,
                                        const GridCell& s, const GridCell& t, const Rat& alpha,
                                        const CorridorParams& params = {},
                                        PlannerTrace* trace = nullptr) {
    if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
    auto direct = grid_bfs_path(grid, s, t);
    if (!direct) throw std::invalid_argument("endpoints disconnected in known free space");
    const int d = static_cast<int>(direct->size()) - 1;
    InformativePath out;
    if (d == 0) {
        out.cells = {s};
        return out;
    }

    const Rat budget_rat = alpha * d;
    const BigInt bnum = boost::multiprecision::numerator(budget_rat);
    const BigInt bden = boost::multiprecision::denominator(budget_rat);
    const int budget = static_cast<int>((bnum / bden).template convert_to<long>());

    CorridorGraph g = build_corridor_graph(grid, s, t, params.spacing, params.width);
    RewardModel rm(grid, sensor, params.reward_angular_res_deg);

    int depth = params.depth;
    if (depth <= 0) {
        const int hops = static_cast<int>(g.shortest_vertex_path(g.s, g.t).size()) - 1;
        depth = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(2, hops)))));
    }
    BudgetedPath bp = forward_only_recursive_greedy(g, rm, g.s, g.t, budget, {}, depth, trace);

    out.graph_path = bp;
    out.reward = bp.reward;
    out.cells = {s};
    for (size_t i = 0; i + 1 < bp.vertices.size(); ++i) {
        // Recursive-greedy paths walk graph edges, each of which carries its
        // grid cell expansion.
        const auto& seg = g.edge_cells.at({bp.vertices[i], bp.vertices[i + 1]});
        out.cells.insert(out.cells.end(), seg.begin() + 1, seg.end());
    }
    out.cost = static_cast<int>(out.cells.size()) - 1;
    if (out.cost > budget) throw std::logic_error("informative path exceeded its budget");
    return out;
}

}  // namespace polyex
