#pragma once

// Brute-force ground truth for the geometric side: dense-sample visibility
// by exact segment containment, a lattice BFS geodesic check, and an
// exhaustive bracket for the optimal offline exploration makespan based on
// the critical-extension characterization (every covering tour must touch
// every critical extension; tours touching all of them are searched over
// sampled crossing points).

#include "polyex/geodesic.hpp"
#include "polyex/geometry.hpp"

#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace polyex::oracle {

/// Exact test that the closed segment [a,b] stays inside the closure of P.
/// Boundary grazing counts as inside.
inline bool segment_inside(const OrthoPolygon& P, const Point& a, const Point& b) {
    if (a == b) return P.contains(a);
    const Vec d = b - a;
    std::vector<Rat> ts{Rat(0), Rat(1)};
    auto add = [&](const Rat& t) {
        if (t >= 0 && t <= 1) ts.push_back(t);
    };
    for (int i = 0; i < P.size(); ++i) {
        const Segment e = P.edge(i);
        if (segment_is_vertical(e)) {
            auto [lo, hi] = std::minmax(e.a.y, e.b.y);
            if (d.x == 0) {
                if (a.x != e.a.x) continue;
                if (d.y == 0) continue;
                add((lo - a.y) / d.y);
                add((hi - a.y) / d.y);
            } else {
                const Rat t = (e.a.x - a.x) / d.x;
                if (t < 0 || t > 1) continue;
                const Rat y = a.y + t * d.y;
                if (lo <= y && y <= hi) add(t);
            }
        } else {
            auto [lo, hi] = std::minmax(e.a.x, e.b.x);
            if (d.y == 0) {
                if (a.y != e.a.y) continue;
                if (d.x == 0) continue;
                add((lo - a.x) / d.x);
                add((hi - a.x) / d.x);
            } else {
                const Rat t = (e.a.y - a.y) / d.y;
                if (t < 0 || t > 1) continue;
                const Rat x = a.x + t * d.x;
                if (lo <= x && x <= hi) add(t);
            }
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        const Rat tm = (ts[i] + ts[i + 1]) / 2;
        const Point mid{a.x + tm * d.x, a.y + tm * d.y};
        if (!P.contains(mid)) return false;
    }
    return true;
}

inline Rat shortest_edge_length(const OrthoPolygon& P) {
    Rat best = l1_dist(P.edge(0).a, P.edge(0).b);
    for (int i = 1; i < P.size(); ++i) {
        best = std::min(best, l1_dist(P.edge(i).a, P.edge(i).b));
    }
    return best;
}

struct SampledVisibility {
    std::vector<Point> points;   // all sample points inside the polygon
    std::vector<bool> visible;   // per sample
    std::size_t visible_count = 0;
};

/// Dense-grid visibility sampling with exact segment-containment tests.
inline SampledVisibility sampled_visibility(const OrthoPolygon& P, const Point& x, const Rat& pitch) {
    if (pitch <= 0) throw std::invalid_argument("pitch must be positive");
    Rat minx = P.vertex(0).x, maxx = minx, miny = P.vertex(0).y, maxy = miny;
    for (const Point& v : P.vertices()) {
        minx = std::min(minx, v.x);
        maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    SampledVisibility out;
    for (Rat sy = miny; sy <= maxy; sy += pitch) {
        for (Rat sx = minx; sx <= maxx; sx += pitch) {
            const Point p{sx, sy};
            if (!P.contains(p)) continue;
            out.points.push_back(p);
            const bool vis = segment_inside(P, x, p);
            out.visible.push_back(vis);
            if (vis) ++out.visible_count;
        }
    }
    return out;
}

/// BFS geodesic on a lattice of pitch `res`; when `res` divides every
/// relevant coordinate the optimum rectilinear path lies on the lattice and
/// the result is exact.
inline std::optional<Rat> lattice_bfs_geodesic(const OrthoPolygon& P, const Point& a, const Point& b,
                                               const Rat& res) {
    Rat minx = P.vertex(0).x, maxx = minx, miny = P.vertex(0).y, maxy = miny;
    for (const Point& v : P.vertices()) {
        minx = std::min(minx, v.x);
        maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    const auto nx = static_cast<std::int64_t>(to_double((maxx - minx) / res)) + 1;
    const auto ny = static_cast<std::int64_t>(to_double((maxy - miny) / res)) + 1;
    auto coord = [&](std::int64_t i, std::int64_t j) {
        return Point{minx + res * Rat(i), miny + res * Rat(j)};
    };
    auto index_of = [&](const Point& p) -> std::int64_t {
        const Rat ix = (p.x - minx) / res, iy = (p.y - miny) / res;
        if (boost::multiprecision::denominator(ix) != 1 || boost::multiprecision::denominator(iy) != 1) {
            return -1;
        }
        const auto i = ix.template convert_to<std::int64_t>();
        const auto j = iy.template convert_to<std::int64_t>();
        if (i < 0 || i >= nx || j < 0 || j >= ny) return -1;
        return i * ny + j;
    };

    std::vector<std::int8_t> inside(nx * ny, -1);
    auto in = [&](std::int64_t i, std::int64_t j) {
        const auto id = i * ny + j;
        if (inside[id] < 0) inside[id] = P.contains(coord(i, j)) ? 1 : 0;
        return inside[id] == 1;
    };

    const std::int64_t sa = index_of(a), sb = index_of(b);
    if (sa < 0 || sb < 0) return std::nullopt;

    std::vector<std::int32_t> dist(nx * ny, -1);
    std::vector<std::int64_t> queue;
    queue.push_back(sa);
    dist[sa] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        const std::int64_t cur = queue[head];
        if (cur == sb) break;
        const std::int64_t ci = cur / ny, cj = cur % ny;
        const std::array<std::pair<std::int64_t, std::int64_t>, 4> steps{
            {{ci + 1, cj}, {ci - 1, cj}, {ci, cj + 1}, {ci, cj - 1}}};
        for (const auto& [i, j] : steps) {
            if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
            const std::int64_t id = i * ny + j;
            if (dist[id] >= 0 || !in(i, j)) continue;
            if (!P.contains_axis_segment(coord(ci, cj), coord(i, j))) continue;
            dist[id] = dist[cur] + 1;
            queue.push_back(id);
        }
    }
    if (dist[sb] < 0) return std::nullopt;
    return Rat(dist[sb]) * res;
}

// --- offline optimum bracket ----------------------------------------------

struct OptBracket {
    Rat lower = 0;   // relaxed tour bound: exact segment-to-segment geodesics
    Rat upper = 0;   // best concrete tour through sampled crossing points
    std::string notes;
};

/// Exhaustive bracket of the optimal offline exploration makespan: tours are
/// anchored at the start, must touch every critical extension, and robots
/// (p <= 2) partition the extensions. `k` crossing samples per extension.
inline OptBracket optimal_exploration_cost(const OrthoPolygon& P, const Point& start, int p, int k) {
    if (p < 1 || p > 2) throw std::invalid_argument("oracle handles p in {1,2}");
    if (k < 2) throw std::invalid_argument("need k >= 2 crossing samples");
    if (!P.contains(start)) throw std::invalid_argument("start outside polygon");

    const std::vector<BlockingVertex> crit = critical_extensions(P, start);
    const int m = static_cast<int>(crit.size());
    if (m == 0) return OptBracket{0, 0, "kernel start: nothing to cross"};
    if (m > 8) throw std::invalid_argument("instance above oracle size limit");

    std::vector<std::vector<Point>> samples(m);
    std::vector<Point> terminals{start};
    for (int i = 0; i < m; ++i) {
        const Point& a = crit[i].extension.a;
        const Point& b = crit[i].extension.b;
        for (int j = 0; j < k; ++j) {
            const Rat t = Rat(j) / (k - 1);
            const Point s{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
            samples[i].push_back(s);
            terminals.push_back(s);
        }
    }

    GeodesicSolver solver(P, terminals);

    // Point-to-point distances between all samples and the start.
    const int start_node = solver.node_of(start);
    std::vector<std::vector<int>> sample_node(m, std::vector<int>(k));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < k; ++j) sample_node[i][j] = solver.node_of(samples[i][j]);
    }
    std::vector<std::vector<std::int64_t>> dist_from_start(1);
    {
        std::vector<int> parent;
        solver.distances({start_node}, dist_from_start[0], parent);
    }
    std::vector<std::vector<std::vector<std::int64_t>>> dist_from_sample(m);
    for (int i = 0; i < m; ++i) {
        dist_from_sample[i].resize(k);
        for (int j = 0; j < k; ++j) {
            std::vector<int> parent;
            solver.distances({sample_node[i][j]}, dist_from_sample[i][j], parent);
        }
    }

    // Segment-level (exact) minima for the lower bound.
    std::vector<std::vector<int>> seg_nodes(m);
    std::vector<std::vector<std::int64_t>> dist_from_segment(m);
    for (int i = 0; i < m; ++i) {
        seg_nodes[i] = solver.nodes_on_segment(Segment{crit[i].extension.a, crit[i].extension.b});
        std::vector<int> parent;
        solver.distances(seg_nodes[i], dist_from_segment[i], parent);
    }
    auto seg_min_to_segment = [&](int i, int j) {
        std::int64_t best = GeodesicSolver::kUnreachable;
        for (int node : seg_nodes[j]) best = std::min(best, dist_from_segment[i][node]);
        return best;
    };
    auto seg_min_to_start = [&](int i) { return dist_from_segment[i][start_node]; };

    std::vector<std::vector<std::int64_t>> segd(m, std::vector<std::int64_t>(m));
    std::vector<std::int64_t> segs(m);
    for (int i = 0; i < m; ++i) {
        segs[i] = seg_min_to_start(i);
        for (int j = 0; j < m; ++j) segd[i][j] = seg_min_to_segment(i, j);
    }

    // Best tour cost for one robot over a fixed group of extensions.
    auto tour_lower = [&](const std::vector<int>& group) -> std::int64_t {
        if (group.empty()) return 0;
        std::vector<int> perm = group;
        std::sort(perm.begin(), perm.end());
        std::int64_t best = GeodesicSolver::kUnreachable;
        do {
            std::int64_t c = segs[perm.front()];
            for (size_t i = 0; i + 1 < perm.size(); ++i) c += segd[perm[i]][perm[i + 1]];
            c += segs[perm.back()];
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    };
    auto tour_upper = [&](const std::vector<int>& group) -> std::int64_t {
        if (group.empty()) return 0;
        std::vector<int> perm = group;
        std::sort(perm.begin(), perm.end());
        std::int64_t best = GeodesicSolver::kUnreachable;
        do {
            // DP over the sampled crossing points along the permutation.
            std::vector<std::int64_t> cur(k);
            for (int j = 0; j < k; ++j) {
                cur[j] = dist_from_start[0][sample_node[perm[0]][j]];
            }
            for (size_t i = 1; i < perm.size(); ++i) {
                std::vector<std::int64_t> nxt(k, GeodesicSolver::kUnreachable);
                for (int j = 0; j < k; ++j) {
                    for (int j2 = 0; j2 < k; ++j2) {
                        const std::int64_t c =
                            cur[j2] + dist_from_sample[perm[i - 1]][j2][sample_node[perm[i]][j]];
                        nxt[j] = std::min(nxt[j], c);
                    }
                }
                cur = std::move(nxt);
            }
            std::int64_t tail = GeodesicSolver::kUnreachable;
            for (int j = 0; j < k; ++j) {
                tail = std::min(tail, cur[j] + dist_from_sample[perm.back()][j][start_node]);
            }
            best = std::min(best, tail);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    };

    std::int64_t lower = GeodesicSolver::kUnreachable;
    std::int64_t upper = GeodesicSolver::kUnreachable;
    if (p == 1) {
        std::vector<int> all(m);
        std::iota(all.begin(), all.end(), 0);
        lower = tour_lower(all);
        upper = tour_upper(all);
    } else {
        for (int mask = 0; mask < (1 << m); ++mask) {
            if (mask != 0 && !(mask & 1)) continue;  // unordered split: pin extension 0
            std::vector<int> g1, g2;
            for (int i = 0; i < m; ++i) {
                if (mask & (1 << i)) {
                    g1.push_back(i);
                } else {
                    g2.push_back(i);
                }
            }
            lower = std::min(lower, std::max(tour_lower(g1), tour_lower(g2)));
            upper = std::min(upper, std::max(tour_upper(g1), tour_upper(g2)));
        }
    }

    OptBracket out;
    out.lower = solver.unscale(lower);
    out.upper = solver.unscale(upper);
    out.notes = std::to_string(m) + " critical extensions, k=" + std::to_string(k);
    if (out.lower > out.upper) throw std::logic_error("oracle bracket inverted");
    return out;
}

}  // namespace polyex::oracle
