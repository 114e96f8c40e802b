#pragma once

// Exact geometric kernel for axis-aligned simple polygons: validation,
// visibility, blocking vertices and their extensions, polygon splits,
// domination, and boundary bookkeeping. All predicates use rational
// arithmetic; doubles appear only when exporting for rendering.

#include "polyex/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polyex {

struct Point {
    Rat x, y;

    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Point& o) const { return !(*this == o); }
    bool operator<(const Point& o) const {
        if (x != o.x) return x < o.x;
        return y < o.y;
    }
};

struct Vec {
    Rat x, y;
};

inline Vec operator-(const Point& a, const Point& b) { return Vec{a.x - b.x, a.y - b.y}; }
inline Vec operator+(const Vec& a, const Vec& b) { return Vec{a.x + b.x, a.y + b.y}; }
inline Point operator+(const Point& p, const Vec& v) { return Point{p.x + v.x, p.y + v.y}; }

inline Rat cross(const Vec& a, const Vec& b) { return a.x * b.y - a.y * b.x; }
inline Rat dot(const Vec& a, const Vec& b) { return a.x * b.x + a.y * b.y; }
inline Rat l1_norm(const Vec& v) { return rat_abs(v.x) + rat_abs(v.y); }
inline Rat sq_norm(const Vec& v) { return v.x * v.x + v.y * v.y; }
inline Rat l1_dist(const Point& a, const Point& b) { return l1_norm(a - b); }

struct Segment {
    Point a, b;
};

inline bool segment_is_horizontal(const Segment& s) { return s.a.y == s.b.y; }
inline bool segment_is_vertical(const Segment& s) { return s.a.x == s.b.x; }

inline bool point_on_axis_segment(const Point& p, const Segment& s) {
    if (segment_is_horizontal(s)) {
        if (p.y != s.a.y) return false;
        auto [lo, hi] = std::minmax(s.a.x, s.b.x);
        return lo <= p.x && p.x <= hi;
    }
    if (p.x != s.a.x) return false;
    auto [lo, hi] = std::minmax(s.a.y, s.b.y);
    return lo <= p.y && p.y <= hi;
}

/// Closed intersection test for two axis-aligned segments.
inline bool axis_segments_intersect(const Segment& s, const Segment& t) {
    auto overlap1d = [](Rat a0, Rat a1, Rat b0, Rat b1) {
        if (a0 > a1) std::swap(a0, a1);
        if (b0 > b1) std::swap(b0, b1);
        return std::max(a0, b0) <= std::min(a1, b1);
    };
    const bool sh = segment_is_horizontal(s), th = segment_is_horizontal(t);
    if (sh && th) {
        return s.a.y == t.a.y && overlap1d(s.a.x, s.b.x, t.a.x, t.b.x);
    }
    if (!sh && !th) {
        return s.a.x == t.a.x && overlap1d(s.a.y, s.b.y, t.a.y, t.b.y);
    }
    const Segment& h = sh ? s : t;
    const Segment& v = sh ? t : s;
    auto [hx0, hx1] = std::minmax(h.a.x, h.b.x);
    auto [vy0, vy1] = std::minmax(v.a.y, v.b.y);
    return hx0 <= v.a.x && v.a.x <= hx1 && vy0 <= h.a.y && h.a.y <= vy1;
}

// --- exact angular order ------------------------------------------------

/// Octant index of a nonzero direction, counterclockwise from east.
inline int direction_octant(const Vec& d) {
    const int sx = rat_sign(d.x), sy = rat_sign(d.y);
    if (sx > 0 && sy == 0) return 0;
    if (sx > 0 && sy > 0) return 1;
    if (sx == 0 && sy > 0) return 2;
    if (sx < 0 && sy > 0) return 3;
    if (sx < 0 && sy == 0) return 4;
    if (sx < 0 && sy < 0) return 5;
    if (sx == 0 && sy < 0) return 6;
    if (sx > 0 && sy < 0) return 7;
    throw std::invalid_argument("zero direction");
}

inline bool angle_less(const Vec& a, const Vec& b) {
    const int qa = direction_octant(a), qb = direction_octant(b);
    if (qa != qb) return qa < qb;
    return cross(a, b) > 0;
}

inline bool same_direction(const Vec& a, const Vec& b) {
    return cross(a, b) == 0 && rat_sign(a.x) == rat_sign(b.x) && rat_sign(a.y) == rat_sign(b.y);
}

// --- polygon -------------------------------------------------------------

class PolygonError : public std::runtime_error {
  public:
    explicit PolygonError(const std::string& what) : std::runtime_error(what) {}
};

/// Axis-aligned simple polygon, counterclockwise, no holes. Construction
/// goes through validate_polygon which also builds a slab decomposition
/// into disjoint rectangles used by the containment queries.
class OrthoPolygon {
  public:
    struct Rect {
        Rat x0, x1, y0, y1;
    };

    const std::vector<Point>& vertices() const { return v_; }
    int size() const { return static_cast<int>(v_.size()); }
    const Point& vertex(int i) const { return v_[mod(i)]; }
    Segment edge(int i) const { return Segment{v_[mod(i)], v_[mod(i + 1)]}; }
    const std::vector<Rect>& rects() const { return rects_; }
    Rat area() const { return area_; }
    Rat perimeter() const { return perimeter_; }

    bool is_reflex(int i) const {
        const Vec in = vertex(i) - vertex(i - 1);
        const Vec out = vertex(i + 1) - vertex(i);
        return cross(in, out) < 0;
    }

    /// Closure membership.
    bool contains(const Point& p) const {
        for (const Rect& r : rects_) {
            if (r.x0 <= p.x && p.x <= r.x1 && r.y0 <= p.y && p.y <= r.y1) return true;
        }
        return false;
    }

    bool on_boundary(const Point& p) const {
        for (int i = 0; i < size(); ++i) {
            if (point_on_axis_segment(p, edge(i))) return true;
        }
        return false;
    }

    bool interior_contains(const Point& p) const { return contains(p) && !on_boundary(p); }

    /// Whether an axis-aligned segment lies entirely in the closure.
    bool contains_axis_segment(const Point& a, const Point& b) const {
        if (a == b) return contains(a);
        const bool horiz = a.y == b.y;
        if (!horiz && a.x != b.x) throw std::invalid_argument("segment not axis-aligned");
        // Collect the [lo,hi] pieces covered by rectangles, then check that
        // their union covers the whole span.
        Rat lo = horiz ? std::min(a.x, b.x) : std::min(a.y, b.y);
        Rat hi = horiz ? std::max(a.x, b.x) : std::max(a.y, b.y);
        std::vector<std::pair<Rat, Rat>> spans;
        for (const Rect& r : rects_) {
            if (horiz) {
                if (r.y0 <= a.y && a.y <= r.y1) {
                    Rat s = std::max(lo, r.x0), e = std::min(hi, r.x1);
                    if (s <= e) spans.emplace_back(s, e);
                }
            } else {
                if (r.x0 <= a.x && a.x <= r.x1) {
                    Rat s = std::max(lo, r.y0), e = std::min(hi, r.y1);
                    if (s <= e) spans.emplace_back(s, e);
                }
            }
        }
        std::sort(spans.begin(), spans.end());
        Rat covered = lo;
        for (auto& [s, e] : spans) {
            if (s > covered) return false;
            covered = std::max(covered, e);
            if (covered >= hi) return true;
        }
        return covered >= hi;
    }

    /// Counterclockwise arclength from vertex 0 to a boundary point.
    Rat boundary_arclength(const Point& p) const {
        Rat acc = 0;
        for (int i = 0; i < size(); ++i) {
            Segment e = edge(i);
            if (point_on_axis_segment(p, e)) {
                return acc + l1_dist(e.a, p);
            }
            acc += l1_dist(e.a, e.b);
        }
        throw std::invalid_argument("point not on boundary");
    }

    /// Nearest boundary point (Euclidean); ties resolved by edge order.
    Point boundary_projection(const Point& p) const {
        std::optional<Rat> best;
        Point best_pt = v_[0];
        for (int i = 0; i < size(); ++i) {
            Segment e = edge(i);
            Point q;
            if (segment_is_horizontal(e)) {
                auto [lo, hi] = std::minmax(e.a.x, e.b.x);
                q = Point{std::clamp(p.x, lo, hi), e.a.y};
            } else {
                auto [lo, hi] = std::minmax(e.a.y, e.b.y);
                q = Point{e.a.x, std::clamp(p.y, lo, hi)};
            }
            Rat d = sq_norm(p - q);
            if (!best || d < *best) {
                best = d;
                best_pt = q;
            }
        }
        return best_pt;
    }

    static OrthoPolygon from_validated(std::vector<Point> v);

  private:
    int mod(int i) const {
        const int n = size();
        return ((i % n) + n) % n;
    }

    std::vector<Point> v_;
    std::vector<Rect> rects_;
    Rat area_ = 0;
    Rat perimeter_ = 0;
};

/// Validates and normalizes a vertex list: removes redundant collinear
/// vertices, reverses clockwise input, rejects slanted edges and
/// self-intersections.
inline OrthoPolygon validate_polygon(std::vector<Point> pts) {
    if (pts.size() < 4) throw PolygonError("polygon needs at least 4 vertices");

    // Drop exact duplicates of the predecessor (wrapping).
    {
        std::vector<Point> out;
        for (const Point& p : pts) {
            if (out.empty() || !(out.back() == p)) out.push_back(p);
        }
        while (out.size() > 1 && out.front() == out.back()) out.pop_back();
        pts = std::move(out);
    }
    if (pts.size() < 4) throw PolygonError("degenerate polygon");

    for (size_t i = 0; i < pts.size(); ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % pts.size()];
        if (a.x != b.x && a.y != b.y) throw PolygonError("non-axis-aligned edge");
    }

    // Remove collinear midpoints (same direction in and out).
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<Point> out;
        const size_t n = pts.size();
        for (size_t i = 0; i < n; ++i) {
            const Point& prev = pts[(i + n - 1) % n];
            const Point& cur = pts[i];
            const Point& next = pts[(i + 1) % n];
            const Vec din = cur - prev, dout = next - cur;
            if (cross(din, dout) == 0 && dot(din, dout) > 0) {
                changed = true;
                continue;
            }
            out.push_back(cur);
        }
        pts = std::move(out);
        if (pts.size() < 4) throw PolygonError("degenerate polygon");
    }

    const size_t n = pts.size();
    if (n % 2 != 0) throw PolygonError("orthogonal polygon must have an even vertex count");

    for (size_t i = 0; i < n; ++i) {
        const Vec d1 = pts[(i + 1) % n] - pts[i];
        const Vec d2 = pts[(i + 2) % n] - pts[(i + 1) % n];
        const bool h1 = d1.y == 0, h2 = d2.y == 0;
        if (h1 == h2) throw PolygonError("consecutive parallel edges (backtracking boundary)");
    }

    // Simplicity: non-adjacent edges must not touch at all.
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            Segment si{pts[i], pts[(i + 1) % n]};
            Segment sj{pts[j], pts[(j + 1) % n]};
            if (axis_segments_intersect(si, sj)) throw PolygonError("self-intersecting boundary");
        }
    }

    Rat twice_area = 0;
    for (size_t i = 0; i < n; ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % n];
        twice_area += a.x * b.y - b.x * a.y;
    }
    if (twice_area == 0) throw PolygonError("zero-area polygon");
    if (twice_area < 0) std::reverse(pts.begin(), pts.end());

    return OrthoPolygon::from_validated(std::move(pts));
}

inline OrthoPolygon OrthoPolygon::from_validated(std::vector<Point> v) {
    OrthoPolygon p;
    p.v_ = std::move(v);
    const int n = p.size();

    for (int i = 0; i < n; ++i) {
        const Point& a = p.v_[i];
        const Point& b = p.v_[(i + 1) % n];
        p.area_ += (a.x * b.y - b.x * a.y);
        p.perimeter_ += l1_dist(a, b);
    }
    p.area_ /= 2;

    // Vertical slab decomposition: per slab, the interior y-intervals come
    // from the horizontal edges spanning the slab midline.
    std::vector<Rat> xs;
    for (const Point& q : p.v_) xs.push_back(q.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (size_t s = 0; s + 1 < xs.size(); ++s) {
        const Rat x0 = xs[s], x1 = xs[s + 1];
        const Rat midx = (x0 + x1) / 2;
        std::vector<Rat> ys;
        for (int i = 0; i < n; ++i) {
            Segment e = p.edge(i);
            if (!segment_is_horizontal(e)) continue;
            auto [lo, hi] = std::minmax(e.a.x, e.b.x);
            if (lo < midx && midx < hi) ys.push_back(e.a.y);
        }
        std::sort(ys.begin(), ys.end());
        for (size_t k = 0; k + 1 < ys.size(); k += 2) {
            p.rects_.push_back(Rect{x0, x1, ys[k], ys[k + 1]});
        }
    }
    return p;
}

/// Loads "x y" rational pairs, one per line; '#' starts a comment.
inline OrthoPolygon load_polygon(std::istream& in) {
    std::vector<Point> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string sx, sy;
        if (!(ls >> sx)) continue;
        if (!(ls >> sy)) throw PolygonError("line " + std::to_string(lineno) + ": expected two coordinates");
        std::string extra;
        if (ls >> extra) throw PolygonError("line " + std::to_string(lineno) + ": trailing tokens");
        try {
            pts.push_back(Point{parse_rational(sx), parse_rational(sy)});
        } catch (const std::invalid_argument& e) {
            throw PolygonError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return validate_polygon(std::move(pts));
}

inline OrthoPolygon load_polygon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PolygonError("cannot open polygon file: " + path);
    return load_polygon(in);
}

// --- visibility ----------------------------------------------------------

/// Star-shaped region visible from a viewpoint. Boundary pieces alternate
/// between parts of the polygon boundary and interior chords (windows).
class VisibilityPolygon {
  public:
    struct Piece {
        Point a, b;    // counterclockwise along the boundary of the region
        int edge;      // source polygon edge
    };
    struct Window {
        Point near, far;  // both on the same ray from the viewpoint
        int piece_before;  // index into pieces(), region edge runs pieces[i].b -> pieces[i+1].a
    };

    const Point& viewpoint() const { return x_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::vector<Window>& windows() const { return windows_; }

    /// Region vertices in counterclockwise order with window tags for the
    /// edge leaving each vertex. When the viewpoint sits on the boundary the
    /// region closes through the viewpoint itself.
    std::vector<std::pair<Point, bool>> region() const {
        std::vector<std::pair<Point, bool>> out;
        const size_t m = pieces_.size();
        for (size_t i = 0; i < m; ++i) {
            const Piece& p = pieces_[i];
            if (out.empty() || !(out.back().first == p.a)) out.emplace_back(p.a, false);
            if (!(p.a == p.b)) out.emplace_back(p.b, false);
            const Piece& q = pieces_[(i + 1) % m];
            if (!(p.b == q.a)) {
                out.back().second = true;  // window edge to next piece
                if (!same_direction(p.b - x_, q.a - x_) && !(q.a == x_) && !(p.b == x_)) {
                    out.emplace_back(x_, true);  // boundary viewpoint: close via x
                }
            }
        }
        if (out.size() > 1 && out.front().first == out.back().first) {
            bool w = out.back().second;
            out.pop_back();
            if (w && !out.empty()) out.back().second = out.back().second || w;
        }
        return out;
    }

    /// Exact membership: locates the angular wedge of the query direction
    /// and compares against the visible piece there.
    bool contains(const Point& p) const {
        if (p == x_) return true;
        const Vec d = p - x_;
        const size_t k = dirs_.size();
        // Binary search for the wedge [dirs[i], dirs[i+1]) containing d.
        size_t lo = 0, hi = k;  // invariant: dirs[lo] <= d < dirs[hi] in cyclic order from dirs[0]
        if (!angle_less(dirs_[0], d) && !same_direction(dirs_[0], d)) {
            // d is cyclically before dirs[0]: it lies in the last wedge.
            lo = k - 1;
        } else {
            while (lo + 1 < hi) {
                size_t mid = (lo + hi) / 2;
                if (mid == k || angle_less(d, dirs_[mid])) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        if (same_direction(dirs_[lo], d)) return on_ray_visible(lo, p);
        return in_wedge_visible(lo, p);
    }

  private:
    friend VisibilityPolygon visibility_polygon(const OrthoPolygon& P, const Point& x);

    bool on_ray_visible(size_t ray, const Point& p) const {
        const Rat d2 = sq_norm(p - x_);
        return ray_reach_.at(ray) >= d2;
    }

    bool in_wedge_visible(size_t wedge, const Point& p) const {
        const auto& seg = wedge_segment_[wedge];
        if (!seg) return false;
        // Visible iff p is on the viewpoint side of the supporting line.
        const Segment& s = *seg;
        if (segment_is_vertical(s)) {
            const int side_x = rat_sign(s.a.x - x_.x);
            const int side_p = rat_sign(s.a.x - p.x);
            return side_p == side_x || side_p == 0;
        }
        const int side_x = rat_sign(s.a.y - x_.y);
        const int side_p = rat_sign(s.a.y - p.y);
        return side_p == side_x || side_p == 0;
    }

    Point x_;
    std::vector<Piece> pieces_;
    std::vector<Window> windows_;
    // Wedge lookup table: sorted critical directions; per-wedge visible
    // segment (empty when the viewpoint is on the boundary looking out);
    // per-ray visible reach as squared distance.
    std::vector<Vec> dirs_;
    std::vector<std::optional<Segment>> wedge_segment_;
    std::vector<Rat> ray_reach_;
};

/// Exact visibility region of x in P via an angular sweep over the
/// critical directions (all vertex directions plus the four axes).
inline VisibilityPolygon visibility_polygon(const OrthoPolygon& P, const Point& x) {
    if (!P.contains(x)) throw std::invalid_argument("viewpoint outside polygon");

    VisibilityPolygon vp;
    vp.x_ = x;

    std::vector<Vec> dirs;
    auto canon = [](Vec d) {
        const Rat m = std::max(rat_abs(d.x), rat_abs(d.y));
        return Vec{d.x / m, d.y / m};
    };
    for (const Point& v : P.vertices()) {
        if (v == x) continue;
        dirs.push_back(canon(v - x));
    }
    dirs.push_back(Vec{1, 0});
    dirs.push_back(Vec{0, 1});
    dirs.push_back(Vec{-1, 0});
    dirs.push_back(Vec{0, -1});
    std::sort(dirs.begin(), dirs.end(), [](const Vec& a, const Vec& b) { return angle_less(a, b); });
    dirs.erase(std::unique(dirs.begin(), dirs.end(),
                           [](const Vec& a, const Vec& b) { return same_direction(a, b); }),
               dirs.end());

    const size_t k = dirs.size();
    struct WedgePiece {
        bool empty = true;
        Point a, b;
        int edge = -1;
    };
    std::vector<WedgePiece> wp(k);

    const int n = P.size();
    for (size_t w = 0; w < k; ++w) {
        const Vec d1 = dirs[w];
        const Vec d2 = dirs[(w + 1) % k];
        const Vec m = d1 + d2;  // strictly interior to the wedge, never axis-parallel

        // First boundary hit along the mid ray.
        std::optional<Rat> tmin;
        int hit_edge = -1;
        for (int i = 0; i < n; ++i) {
            Segment e = P.edge(i);
            Rat t, coord;
            if (segment_is_vertical(e)) {
                t = (e.a.x - x.x) / m.x;
                if (t <= 0) continue;
                coord = x.y + t * m.y;
                auto [lo, hi] = std::minmax(e.a.y, e.b.y);
                if (!(lo < coord && coord < hi)) continue;
            } else {
                t = (e.a.y - x.y) / m.y;
                if (t <= 0) continue;
                coord = x.x + t * m.x;
                auto [lo, hi] = std::minmax(e.a.x, e.b.x);
                if (!(lo < coord && coord < hi)) continue;
            }
            if (!tmin || t < *tmin) {
                tmin = t;
                hit_edge = i;
            }
        }
        if (!tmin) continue;  // viewpoint on the boundary, wedge looks outside

        const Point hit{x.x + *tmin * m.x, x.y + *tmin * m.y};
        const Point mid{(x.x + hit.x) / 2, (x.y + hit.y) / 2};
        if (!P.contains(mid)) continue;  // wedge exits the polygon first

        // Clip the hit edge to the closed cone [d1, d2].
        Segment e = P.edge(hit_edge);
        const Vec dir = e.b - e.a;
        // Constraints on s in [0,1]: cross(d1, e(s)-x) >= 0 and cross(e(s)-x, d2) >= 0.
        Rat s_lo = 0, s_hi = 1;
        auto apply = [&](const Rat& c0, const Rat& c1) {
            // constraint c0 + s*(c1-c0) >= 0 over s in [s_lo, s_hi]
            const Rat slope = c1 - c0;
            if (slope == 0) {
                if (c0 < 0) s_lo = 1, s_hi = 0;
                return;
            }
            const Rat root = -c0 / slope;
            if (slope > 0) {
                s_lo = std::max(s_lo, root);
            } else {
                s_hi = std::min(s_hi, root);
            }
        };
        {
            const Vec ra = e.a - x, rb = e.b - x;
            apply(cross(d1, ra), cross(d1, rb));
            apply(cross(ra, d2), cross(rb, d2));
        }
        if (s_lo > s_hi) continue;  // numerically impossible; defensive
        auto at = [&](const Rat& s) {
            return Point{e.a.x + s * dir.x, e.a.y + s * dir.y};
        };
        Point A = at(s_lo), B = at(s_hi);
        // Counterclockwise order within the cone (cone angle <= 90 degrees,
        // so the plain cross product decides; global octant order would break
        // on the wedge that wraps past the sweep origin).
        if (!(A == B) && cross(A - x, B - x) < 0) std::swap(A, B);
        wp[w] = WedgePiece{false, A, B, hit_edge};
    }

    // Assemble pieces and windows in sweep order.
    std::vector<int> order;
    for (size_t w = 0; w < k; ++w) {
        if (!wp[w].empty) order.push_back(static_cast<int>(w));
    }
    if (order.empty()) throw std::logic_error("visibility sweep produced no pieces");

    for (size_t i = 0; i < order.size(); ++i) {
        const WedgePiece& p = wp[order[i]];
        vp.pieces_.push_back(VisibilityPolygon::Piece{p.a, p.b, p.edge});
    }
    for (size_t i = 0; i < vp.pieces_.size(); ++i) {
        const auto& cur = vp.pieces_[i];
        const auto& nxt = vp.pieces_[(i + 1) % vp.pieces_.size()];
        if (cur.b == nxt.a) continue;
        // A real window lies along one ray from the viewpoint. A gap whose
        // endpoints are not collinear with x means the region closes through
        // a boundary viewpoint; no spur exists there.
        if (cur.b == x || nxt.a == x) continue;
        if (!same_direction(cur.b - x, nxt.a - x)) continue;
        VisibilityPolygon::Window win;
        win.piece_before = static_cast<int>(i);
        if (sq_norm(cur.b - x) <= sq_norm(nxt.a - x)) {
            win.near = cur.b;
            win.far = nxt.a;
        } else {
            win.near = nxt.a;
            win.far = cur.b;
        }
        vp.windows_.push_back(win);
    }

    // Wedge lookup table for contains().
    vp.dirs_ = dirs;
    vp.wedge_segment_.assign(k, std::nullopt);
    vp.ray_reach_.assign(k, Rat(0));
    for (size_t w = 0; w < k; ++w) {
        if (!wp[w].empty) vp.wedge_segment_[w] = Segment{wp[w].a, wp[w].b};
    }
    for (size_t r = 0; r < k; ++r) {
        // Reach along critical ray r: endpoints of the adjacent wedge pieces
        // that lie on this ray.
        Rat reach = 0;
        const size_t prev = (r + k - 1) % k;
        if (!wp[prev].empty && same_direction(wp[prev].b - x, dirs[r])) {
            reach = std::max(reach, sq_norm(wp[prev].b - x));
        }
        if (!wp[r].empty && same_direction(wp[r].a - x, dirs[r])) {
            reach = std::max(reach, sq_norm(wp[r].a - x));
        }
        vp.ray_reach_[r] = reach;
    }
    return vp;
}

// --- blocking vertices ---------------------------------------------------

struct BlockingVertex {
    Point b;                 // the reflex vertex
    int vertex_index = -1;
    Segment visible_side;    // incident side partly visible from the viewpoint
    int visible_edge = -1;
    Segment hidden_side;     // incident side hidden behind b
    int hidden_edge = -1;
    Segment extension;       // from b, perpendicular to the visible side, to the boundary
    Point extension_goal;    // perpendicular foot of the viewpoint, clamped to the extension
    bool goal_clamped = false;

    bool operator==(const BlockingVertex& o) const {
        return b == o.b && hidden_edge == o.hidden_edge;
    }
};

/// First boundary point hit by the ray from `from` in direction `d`
/// (excluding the start point itself).
inline Point ray_to_boundary(const OrthoPolygon& P, const Point& from, const Vec& d) {
    std::optional<Rat> tmin;
    const int n = P.size();
    const bool horiz = d.y == 0;
    for (int i = 0; i < n; ++i) {
        Segment e = P.edge(i);
        if (horiz) {
            if (segment_is_vertical(e)) {
                const Rat t = (e.a.x - from.x) / d.x;
                if (t <= 0) continue;
                auto [lo, hi] = std::minmax(e.a.y, e.b.y);
                if (lo <= from.y && from.y <= hi) {
                    if (!tmin || t < *tmin) tmin = t;
                }
            } else if (e.a.y == from.y) {
                for (const Point& q : {e.a, e.b}) {
                    const Rat t = (q.x - from.x) / d.x;
                    if (t > 0 && (!tmin || t < *tmin)) tmin = t;
                }
            }
        } else {
            if (segment_is_horizontal(e)) {
                const Rat t = (e.a.y - from.y) / d.y;
                if (t <= 0) continue;
                auto [lo, hi] = std::minmax(e.a.x, e.b.x);
                if (lo <= from.x && from.x <= hi) {
                    if (!tmin || t < *tmin) tmin = t;
                }
            } else if (e.a.x == from.x) {
                for (const Point& q : {e.a, e.b}) {
                    const Rat t = (q.y - from.y) / d.y;
                    if (t > 0 && (!tmin || t < *tmin)) tmin = t;
                }
            }
        }
    }
    if (!tmin) throw std::logic_error("ray escaped the polygon");
    return Point{from.x + *tmin * d.x, from.y + *tmin * d.y};
}

/// All blocking vertices of P with respect to x, each with its extension
/// and extension goal. Order follows the visibility sweep.
inline std::vector<BlockingVertex> blocking_vertices(const OrthoPolygon& P, const Point& x) {
    const VisibilityPolygon vp = visibility_polygon(P, x);
    const int n = P.size();

    auto vertex_index_of = [&](const Point& p) -> int {
        for (int i = 0; i < n; ++i) {
            if (P.vertex(i) == p) return i;
        }
        return -1;
    };

    std::vector<BlockingVertex> out;
    const auto& pieces = vp.pieces();
    for (const auto& win : vp.windows()) {
        const int vi = vertex_index_of(win.near);
        if (vi < 0 || !P.is_reflex(vi)) continue;

        // The boundary piece adjacent to the window at the near end tells us
        // the visible incident side.
        const auto& before = pieces[win.piece_before];
        const auto& after = pieces[(win.piece_before + 1) % pieces.size()];
        int visible_edge = -1;
        if (before.b == win.near && !(before.a == before.b)) {
            visible_edge = before.edge;
        } else if (after.a == win.near && !(after.a == after.b)) {
            visible_edge = after.edge;
        }
        const int e_in = (vi + n - 1) % n;   // edge ending at vertex vi
        const int e_out = vi;                // edge starting at vertex vi
        if (visible_edge != e_in && visible_edge != e_out) continue;  // pinhole grazing: skip
        const int hidden_edge = visible_edge == e_in ? e_out : e_in;

        BlockingVertex bv;
        bv.b = win.near;
        bv.vertex_index = vi;
        bv.visible_edge = visible_edge;
        bv.visible_side = P.edge(visible_edge);
        bv.hidden_edge = hidden_edge;
        bv.hidden_side = P.edge(hidden_edge);

        // The extension prolongs the hidden side beyond b into the interior.
        const Point a = hidden_edge == e_in ? P.vertex(vi - 1) : P.vertex(vi + 1);
        Vec d = bv.b - a;
        if (d.x == 0 && d.y == 0) throw std::logic_error("degenerate hidden side");
        d = Vec{Rat(rat_sign(d.x)), Rat(rat_sign(d.y))};
        const Point end = ray_to_boundary(P, bv.b, d);
        if (end == bv.b) throw PolygonError("degenerate extension at blocking vertex");
        bv.extension = Segment{bv.b, end};

        // Extension goal: perpendicular foot of x on the extension segment,
        // clamped to the nearest endpoint when the foot misses it.
        if (segment_is_horizontal(bv.extension)) {
            auto [lo, hi] = std::minmax(bv.extension.a.x, bv.extension.b.x);
            if (x.x < lo || x.x > hi) {
                bv.goal_clamped = true;
                bv.extension_goal = Point{x.x < lo ? lo : hi, bv.extension.a.y};
            } else {
                bv.extension_goal = Point{x.x, bv.extension.a.y};
            }
        } else {
            auto [lo, hi] = std::minmax(bv.extension.a.y, bv.extension.b.y);
            if (x.y < lo || x.y > hi) {
                bv.goal_clamped = true;
                bv.extension_goal = Point{bv.extension.a.x, x.y < lo ? lo : hi};
            } else {
                bv.extension_goal = Point{bv.extension.a.x, x.y};
            }
        }

        bool dup = false;
        for (const auto& prev : out) {
            if (prev == bv) dup = true;
        }
        if (!dup) out.push_back(std::move(bv));
    }
    return out;
}

// --- polygon split, domination, critical extensions ----------------------

struct SubPolygonSplit {
    OrthoPolygon home;     // contains the viewpoint
    OrthoPolygon foreign;  // contains the hidden side
};

/// Splits P along the extension of a blocking vertex. The foreign part is
/// the side whose boundary carries the hidden side.
inline SubPolygonSplit foreign_polygon(const OrthoPolygon& P, const BlockingVertex& bv,
                                       const Point& x) {
    const Point& from = bv.extension.a;  // == bv.b
    const Point& to = bv.extension.b;
    if (from == to) throw PolygonError("degenerate (zero-length) extension");

    const int n = P.size();
    // Walk the boundary counterclockwise from `to` to `from`, then close with
    // the chord; the complementary walk gives the other part.
    auto locate = [&](const Point& p) -> int {
        for (int i = 0; i < n; ++i) {
            if (point_on_axis_segment(p, P.edge(i))) return i;
        }
        throw std::logic_error("split point not on boundary");
    };

    auto walk = [&](const Point& start, const Point& stop) {
        std::vector<Point> loop;
        loop.push_back(start);
        int e = locate(start);
        // If start sits at the far endpoint of edge e, advance.
        for (int guard = 0; guard <= 2 * n; ++guard) {
            const Point tail = P.vertex(e + 1);
            if (point_on_axis_segment(stop, Segment{loop.back(), tail}) && !(stop == tail)) {
                loop.push_back(stop);
                return loop;
            }
            if (stop == tail) {
                loop.push_back(stop);
                return loop;
            }
            loop.push_back(tail);
            e = (e + 1) % n;
        }
        throw std::logic_error("boundary walk failed to close");
    };

    // locate() may return the edge *ending* at `to`; normalize by checking
    // both directions of the walk for containing the hidden side.
    std::vector<Point> loop1 = walk(to, from);    // to -> ccw -> from, chord from->to implicit
    std::vector<Point> loop2 = walk(from, to);    // complementary part

    OrthoPolygon p1 = validate_polygon(loop1);
    OrthoPolygon p2 = validate_polygon(loop2);

    const Point hidden_mid{(bv.hidden_side.a.x + bv.hidden_side.b.x) / 2,
                           (bv.hidden_side.a.y + bv.hidden_side.b.y) / 2};
    const bool one_is_foreign = p1.on_boundary(hidden_mid) && !point_on_axis_segment(hidden_mid, bv.extension);

    SubPolygonSplit split;
    if (one_is_foreign) {
        split.foreign = std::move(p1);
        split.home = std::move(p2);
    } else {
        split.foreign = std::move(p2);
        split.home = std::move(p1);
    }
    if (!split.home.contains(x)) {
        // The viewpoint must sit in the home part (it may lie on the chord).
        if (!split.foreign.contains(x)) throw std::logic_error("viewpoint lost in split");
    }
    return split;
}

/// Exact area of overlap between two rectangle decompositions.
inline Rat overlap_area(const OrthoPolygon& A, const OrthoPolygon& B) {
    Rat acc = 0;
    for (const auto& ra : A.rects()) {
        for (const auto& rb : B.rects()) {
            const Rat x0 = std::max(ra.x0, rb.x0), x1 = std::min(ra.x1, rb.x1);
            const Rat y0 = std::max(ra.y0, rb.y0), y1 = std::min(ra.y1, rb.y1);
            if (x0 < x1 && y0 < y1) acc += (x1 - x0) * (y1 - y0);
        }
    }
    return acc;
}

inline bool region_subset(const OrthoPolygon& inner, const OrthoPolygon& outer) {
    return overlap_area(inner, outer) == inner.area();
}

inline bool regions_overlap(const OrthoPolygon& a, const OrthoPolygon& b) {
    return overlap_area(a, b) > 0;
}

/// True iff the foreign polygon of `b` is contained in the foreign polygon
/// of `a` (then `b` is dominated by `a`). Reflexive.
inline bool dominates(const OrthoPolygon& P, const BlockingVertex& a, const BlockingVertex& b,
                      const Point& x) {
    const OrthoPolygon fa = foreign_polygon(P, a, x).foreign;
    const OrthoPolygon fb = foreign_polygon(P, b, x).foreign;
    return region_subset(fb, fa);
}

/// Clockwise boundary-order key of a blocking vertex: position of the
/// hidden side's midpoint when traversing the boundary clockwise from the
/// viewpoint's boundary projection.
inline Rat clockwise_order_key(const OrthoPolygon& P, const Point& origin_projection,
                               const BlockingVertex& bv) {
    const Point mid{(bv.hidden_side.a.x + bv.hidden_side.b.x) / 2,
                    (bv.hidden_side.a.y + bv.hidden_side.b.y) / 2};
    const Rat o = P.boundary_arclength(origin_projection);
    const Rat m = P.boundary_arclength(mid);
    // The boundary is stored counterclockwise; clockwise arclength from the
    // origin decreases along the stored order.
    Rat d = o - m;
    const Rat perim = P.perimeter();
    while (d < 0) d += perim;
    while (d >= perim) d -= perim;
    return d;
}

inline void sort_clockwise(const OrthoPolygon& P, const Point& x, std::vector<BlockingVertex>& bvs) {
    const Point origin = P.boundary_projection(x);
    std::stable_sort(bvs.begin(), bvs.end(), [&](const BlockingVertex& a, const BlockingVertex& b) {
        const Rat ka = clockwise_order_key(P, origin, a);
        const Rat kb = clockwise_order_key(P, origin, b);
        if (ka != kb) return ka < kb;
        if (a.b != b.b) return a.b < b.b;
        return a.hidden_edge < b.hidden_edge;
    });
}

/// Non-dominated blocking vertices in clockwise order of their hidden sides.
/// Groups with identical foreign polygons keep only the clockwise-first one.
inline std::vector<BlockingVertex> critical_extensions(const OrthoPolygon& P, const Point& x) {
    std::vector<BlockingVertex> bvs = blocking_vertices(P, x);
    sort_clockwise(P, x, bvs);

    std::vector<OrthoPolygon> fps;
    fps.reserve(bvs.size());
    for (const auto& bv : bvs) fps.push_back(foreign_polygon(P, bv, x).foreign);

    std::vector<BlockingVertex> out;
    for (size_t i = 0; i < bvs.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < bvs.size() && !dominated; ++j) {
            if (i == j) continue;
            if (!region_subset(fps[i], fps[j])) continue;
            if (fps[i].area() < fps[j].area()) {
                dominated = true;
            } else if (j < i) {
                dominated = true;  // equal foreign polygons: keep the clockwise-first
            }
        }
        if (!dominated) out.push_back(bvs[i]);
    }
    return out;
}

}  // namespace polyex
