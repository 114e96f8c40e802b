#pragma once

// Brute-force ground truth for the planning side: exhaustive budgeted-walk
// enumeration on small corridor graphs, and exact mutual information on
// regions small enough to enumerate every occupancy outcome.

#include "polyex/infogain.hpp"

#include <map>
#include <vector>

namespace polyex::oracle {

/// Exact optimum of the budgeted orienteering problem by enumerating walks
/// from s to t with cost <= budget; each vertex may be visited at most
/// `max_visits` times. Reward is evaluated on the visited vertex set.
inline BudgetedPath brute_force_orienteering(const CorridorGraph& g, const RewardModel& rm, int s,
                                             int t, int budget, int max_visits = 2) {
    const int n = static_cast<int>(g.vertices.size());
    if (n > 12) throw std::invalid_argument("graph above oracle size limit");
    if (g.dist[s][t] > budget) throw InfeasibleBudget("budget below the shortest path");

    BudgetedPath best;
    bool have_best = false;
    std::vector<int> visits(n, 0);
    std::vector<int> walk{s};
    visits[s] = 1;

    std::function<void(int, int)> dfs = [&](int u, int cost) {
        if (u == t) {
            std::vector<GridCell> cells;
            for (int v = 0; v < n; ++v) {
                if (visits[v] > 0) cells.push_back(g.vertices[v].cell);
            }
            const double reward = rm.set_reward(cells);
            const bool better = !have_best || reward > best.reward ||
                                (reward == best.reward &&
                                 (cost < best.cost ||
                                  (cost == best.cost && walk < best.vertices)));
            if (better) {
                best.vertices = walk;
                best.cost = cost;
                best.reward = reward;
                have_best = true;
            }
        }
        for (const auto& [v, len] : g.adj[u]) {
            if (visits[v] >= max_visits) continue;
            const int nc = cost + len;
            if (nc + g.dist[v][t] > budget) continue;
            ++visits[v];
            walk.push_back(v);
            dfs(v, nc);
            walk.pop_back();
            --visits[v];
        }
    };
    dfs(s, 0);
    if (!have_best) throw std::logic_error("no feasible walk found");
    return best;
}

/// Exact mutual information between the map and the measurements taken from
/// `poses`, in bits. Cells with occupancy probability strictly between 0 and
/// 1 form the uncertain region (at most `max_cells`); each outcome of that
/// region is enumerated and the deterministic beam signature scored, so
/// I(M;Z) = H(Z).
inline double exact_mi_small(const OccupancyGrid& grid, const std::vector<GridCell>& poses,
                             const SensorSpec& sensor, int max_cells = 12) {
    std::vector<GridCell> uncertain;
    std::vector<double> prob;
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            const GridCell c{x, y};
            const double p = grid.prob(c);
            if (p > 0.0 && p < 1.0) {
                uncertain.push_back(c);
                prob.push_back(p);
            }
        }
    }
    const int k = static_cast<int>(uncertain.size());
    if (k > max_cells) throw std::invalid_argument("uncertain region above oracle size limit");

    auto cell_rank = [&](const GridCell& c) -> int {
        for (int i = 0; i < k; ++i) {
            if (uncertain[i] == c) return i;
        }
        return -1;
    };

    const double res = to_double(grid.resolution());
    const int beams = sensor.beam_count();
    std::map<std::vector<int>, double> signature_prob;
    for (long mask = 0; mask < (1L << k); ++mask) {
        double p_outcome = 1.0;
        for (int i = 0; i < k; ++i) {
            p_outcome *= (mask & (1L << i)) ? prob[i] : (1.0 - prob[i]);
        }
        if (p_outcome == 0.0) continue;
        auto occupied = [&](const GridCell& c) {
            const double p = grid.prob(c);
            if (p >= 1.0) return true;
            if (p <= 0.0) return false;
            return (mask & (1L << cell_rank(c))) != 0;
        };
        std::vector<int> signature;
        signature.reserve(static_cast<size_t>(poses.size()) * beams);
        for (const GridCell& pose : poses) {
            for (int b = 0; b < beams; ++b) {
                const double angle_deg = -sensor.fov_deg / 2.0 + b * sensor.angular_res_deg;
                const double angle_rad = angle_deg * M_PI / 180.0;
                int first_hit = -1;
                for (const auto& rc : detail::traverse_ray(pose, angle_rad, sensor.max_range, res,
                                                           grid.width(), grid.height())) {
                    if (occupied(rc.cell)) {
                        first_hit = rc.cell.y * grid.width() + rc.cell.x;
                        break;
                    }
                }
                signature.push_back(first_hit);
            }
        }
        signature_prob[signature] += p_outcome;
    }

    double bits = 0.0;
    for (const auto& [sig, q] : signature_prob) {
        if (q > 0.0) bits -= q * std::log2(q);
    }
    return bits;
}

}  // namespace polyex::oracle
