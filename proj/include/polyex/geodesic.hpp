#pragma once

// Shortest rectilinear (L1) paths inside an axis-aligned polygon. Paths are
// restricted to the grid induced by the polygon vertices plus the query
// points, which contains an optimal rectilinear path. Coordinates are scaled
// to a common denominator so Dijkstra runs on 64-bit integers.

#include "polyex/geometry.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <vector>

namespace polyex {

struct GeoPath {
    std::vector<Point> waypoints;  // endpoints included, collinear runs merged
    Rat length = 0;
};

class GeodesicSolver {
  public:
    GeodesicSolver(const OrthoPolygon& P, const std::vector<Point>& terminals) : P_(&P) {
        std::vector<Rat> xs, ys;
        for (const Point& v : P.vertices()) {
            xs.push_back(v.x);
            ys.push_back(v.y);
        }
        for (const Point& t : terminals) {
            xs.push_back(t.x);
            ys.push_back(t.y);
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        xs_ = std::move(xs);
        ys_ = std::move(ys);

        // Common denominator for exact integer arithmetic.
        BigInt den = 1;
        auto fold = [&](const Rat& r) {
            const BigInt d = boost::multiprecision::denominator(r);
            den = boost::multiprecision::lcm(den, d);
        };
        for (const Rat& x : xs_) fold(x);
        for (const Rat& y : ys_) fold(y);
        den_ = den;

        sx_.reserve(xs_.size());
        for (const Rat& x : xs_) sx_.push_back(scale(x));
        sy_.reserve(ys_.size());
        for (const Rat& y : ys_) sy_.push_back(scale(y));

        const int nx = static_cast<int>(xs_.size());
        const int ny = static_cast<int>(ys_.size());
        node_id_.assign(nx * ny, -1);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const Point p{xs_[i], ys_[j]};
                if (P.contains(p)) {
                    node_id_[i * ny + j] = static_cast<int>(nodes_.size());
                    nodes_.push_back({i, j});
                }
            }
        }
        adj_.assign(nodes_.size(), {});
        for (size_t id = 0; id < nodes_.size(); ++id) {
            const auto [i, j] = nodes_[id];
            const Point p{xs_[i], ys_[j]};
            if (i + 1 < nx) {
                const int other = node_id_[(i + 1) * ny + j];
                if (other >= 0 && P.contains_axis_segment(p, Point{xs_[i + 1], ys_[j]})) {
                    const std::int64_t w = sx_[i + 1] - sx_[i];
                    adj_[id].push_back({other, w});
                    adj_[other].push_back({static_cast<int>(id), w});
                }
            }
            if (j + 1 < ny) {
                const int other = node_id_[i * ny + (j + 1)];
                if (other >= 0 && P.contains_axis_segment(p, Point{xs_[i], ys_[j + 1]})) {
                    const std::int64_t w = sy_[j + 1] - sy_[j];
                    adj_[id].push_back({other, w});
                    adj_[other].push_back({static_cast<int>(id), w});
                }
            }
        }
    }

    int node_count() const { return static_cast<int>(nodes_.size()); }

    int node_of(const Point& p) const {
        const int i = index_of(xs_, p.x);
        const int j = index_of(ys_, p.y);
        if (i < 0 || j < 0) return -1;
        return node_id_[i * static_cast<int>(ys_.size()) + j];
    }

    Point point_of(int node) const {
        const auto [i, j] = nodes_[node];
        return Point{xs_[i], ys_[j]};
    }

    /// Nodes lying on an axis-aligned segment (candidate geodesic anchors).
    std::vector<int> nodes_on_segment(const Segment& s) const {
        std::vector<int> out;
        for (size_t id = 0; id < nodes_.size(); ++id) {
            if (point_on_axis_segment(point_of(static_cast<int>(id)), s)) {
                out.push_back(static_cast<int>(id));
            }
        }
        return out;
    }

    static constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max();

    /// Multi-source Dijkstra; returns scaled distances and a deterministic
    /// parent tree for path reconstruction.
    void distances(const std::vector<int>& sources, std::vector<std::int64_t>& dist,
                   std::vector<int>& parent) const {
        dist.assign(nodes_.size(), kUnreachable);
        parent.assign(nodes_.size(), -1);
        using Item = std::pair<std::int64_t, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        for (int s : sources) {
            if (dist[s] > 0) {
                dist[s] = 0;
                pq.push({0, s});
            }
        }
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d != dist[u]) continue;
            for (const auto& [v, w] : adj_[u]) {
                const std::int64_t nd = d + w;
                if (nd < dist[v] || (nd == dist[v] && parent[v] > u)) {
                    const bool push = nd < dist[v];
                    dist[v] = nd;
                    parent[v] = u;
                    if (push) pq.push({nd, v});
                }
            }
        }
    }

    Rat unscale(std::int64_t d) const { return Rat(BigInt(d), den_); }

    GeoPath path_between(const Point& a, const Point& b) const {
        const int sa = node_of(a), sb = node_of(b);
        if (sa < 0 || sb < 0) throw std::invalid_argument("geodesic endpoint outside polygon");
        std::vector<std::int64_t> dist;
        std::vector<int> parent;
        distances({sa}, dist, parent);
        if (dist[sb] == kUnreachable) throw std::logic_error("polygon interior is disconnected");
        GeoPath out;
        out.length = unscale(dist[sb]);
        std::vector<Point> rev;
        for (int cur = sb; cur != -1; cur = parent[cur]) rev.push_back(point_of(cur));
        out.waypoints.assign(rev.rbegin(), rev.rend());
        // Merge collinear runs.
        std::vector<Point> simple;
        for (const Point& p : out.waypoints) {
            if (simple.size() >= 2) {
                const Point& q = simple[simple.size() - 1];
                const Point& r = simple[simple.size() - 2];
                if ((r.x == q.x && q.x == p.x) || (r.y == q.y && q.y == p.y)) {
                    simple.back() = p;
                    continue;
                }
            }
            simple.push_back(p);
        }
        out.waypoints = std::move(simple);
        return out;
    }

  private:
    std::int64_t scale(const Rat& r) const {
        const BigInt v = boost::multiprecision::numerator(r) *
                         (den_ / boost::multiprecision::denominator(r));
        if (v > std::numeric_limits<std::int64_t>::max() / 4 ||
            v < std::numeric_limits<std::int64_t>::min() / 4) {
            throw std::overflow_error("scaled coordinate too large");
        }
        return v.template convert_to<std::int64_t>();
    }

    static int index_of(const std::vector<Rat>& sorted, const Rat& v) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        if (it == sorted.end() || *it != v) return -1;
        return static_cast<int>(it - sorted.begin());
    }

    const OrthoPolygon* P_;
    std::vector<Rat> xs_, ys_;
    std::vector<std::int64_t> sx_, sy_;
    BigInt den_ = 1;
    std::vector<std::pair<int, int>> nodes_;
    std::vector<int> node_id_;
    std::vector<std::vector<std::pair<int, std::int64_t>>> adj_;
};

/// Shortest axis-aligned path in P between two points of its closure.
inline GeoPath rectilinear_goto(const OrthoPolygon& P, const Point& a, const Point& b) {
    if (!P.contains(a) || !P.contains(b)) {
        throw std::invalid_argument("rectilinear_goto endpoint outside polygon");
    }
    if (a == b) return GeoPath{{a}, Rat(0)};
    GeodesicSolver solver(P, {a, b});
    return solver.path_between(a, b);
}

}  // namespace polyex
