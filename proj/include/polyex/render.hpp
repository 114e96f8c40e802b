#pragma once

// Deterministic SVG rendering of worlds, trees, extensions, frontiers, and
// trajectories. Output is plain text keyed only off the inputs.

#include "polyex/occupancy.hpp"
#include "polyex/world_geometric.hpp"
#include "polyex/world_grid.hpp"

#include <iomanip>
#include <sstream>
#include <string>

namespace polyex {

struct RenderSpec {
    bool polygon = true;
    bool grid = true;
    bool tree = true;
    bool trajectories = true;
    bool frontiers = false;
    bool extensions = true;
    double scale = 40.0;

    bool any() const { return polygon || grid || tree || trajectories || frontiers || extensions; }
};

namespace detail {

class SvgCanvas {
  public:
    SvgCanvas(double min_x, double min_y, double max_x, double max_y, double scale)
        : min_x_(min_x), min_y_(min_y), scale_(scale),
          width_((max_x - min_x) * scale), height_((max_y - min_y) * scale) {
        body_ << std::setprecision(8);
    }

    // y is flipped so larger world y draws upward.
    double sx(double x) const { return (x - min_x_) * scale_; }
    double sy(double y) const { return height_ - (y - min_y_) * scale_; }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width) {
        body_ << "<line x1=\"" << sx(x1) << "\" y1=\"" << sy(y1) << "\" x2=\"" << sx(x2)
              << "\" y2=\"" << sy(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width
              << "\"/>\n";
    }
    void circle(double x, double y, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"" << r << "\" fill=\""
              << fill << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ << "<rect x=\"" << sx(x) << "\" y=\"" << sy(y + h) << "\" width=\"" << w * scale_
              << "\" height=\"" << h * scale_ << "\" fill=\"" << fill << "\"/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width) {
        if (pts.size() < 2) return;
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
              << "\" points=\"";
        for (const auto& [x, y] : pts) body_ << sx(x) << "," << sy(y) << " ";
        body_ << "\"/>\n";
    }

    std::string finish(const std::string& comment) const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        if (!comment.empty()) out << "<!-- " << comment << " -->\n";
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"#f8f8f8\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

  private:
    double min_x_, min_y_, scale_, width_, height_;
    std::ostringstream body_;
};

inline const char* robot_color(size_t r) {
    static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#17becf", "#e377c2", "#8c564b"};
    return colors[r % 8];
}

}  // namespace detail

/// Geometric run overview: polygon outline, extensions sensed from the root,
/// goal tree, per-robot trajectories.
inline std::string render_geometric_svg(const OrthoPolygon& P, const GeometricResult& res,
                                        const RenderSpec& spec, const std::string& comment = "") {
    Rat minx = P.vertex(0).x, maxx = minx, miny = P.vertex(0).y, maxy = miny;
    for (const Point& v : P.vertices()) {
        minx = std::min(minx, v.x);
        maxx = std::max(maxx, v.x);
        miny = std::min(miny, v.y);
        maxy = std::max(maxy, v.y);
    }
    detail::SvgCanvas canvas(to_double(minx) - 0.5, to_double(miny) - 0.5, to_double(maxx) + 0.5,
                             to_double(maxy) + 0.5, spec.scale);

    if (spec.polygon) {
        for (int i = 0; i < P.size(); ++i) {
            const Segment e = P.edge(i);
            canvas.line(to_double(e.a.x), to_double(e.a.y), to_double(e.b.x), to_double(e.b.y),
                        "#222222", 2.0);
        }
    }
    if (spec.extensions && !res.nodes.empty()) {
        for (const auto& bv : blocking_vertices(P, res.nodes[0].pos)) {
            canvas.line(to_double(bv.extension.a.x), to_double(bv.extension.a.y),
                        to_double(bv.extension.b.x), to_double(bv.extension.b.y), "#bbaa00", 1.0);
        }
    }
    if (spec.trajectories) {
        for (size_t r = 0; r < res.trajectories.size(); ++r) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& [t, p] : res.trajectories[r]) {
                pts.push_back(GeometricWorld::to_xy(p));
            }
            canvas.polyline(pts, detail::robot_color(r), 1.2);
        }
    }
    if (spec.tree) {
        for (const auto& n : res.nodes) {
            if (n.parent >= 0) {
                const auto [px, py] = GeometricWorld::to_xy(res.nodes[n.parent].pos);
                const auto [cx, cy] = GeometricWorld::to_xy(n.pos);
                canvas.line(px, py, cx, cy, "#888888", 0.8);
            }
        }
        for (const auto& n : res.nodes) {
            const auto [x, y] = GeometricWorld::to_xy(n.pos);
            canvas.circle(x, y, n.kind == NodeKind::Root ? 5.0 : 3.5,
                          n.kind == NodeKind::Root ? "#000000" : "#cc3333");
        }
    }
    return canvas.finish(comment);
}

/// Grid run overview: belief cells, frontiers, goal tree, trajectories.
inline std::string render_grid_svg(const GridWorld& world, const GridResult& res,
                                   const RenderSpec& spec, const std::string& comment = "") {
    const OccupancyGrid& belief = world.belief();
    detail::SvgCanvas canvas(0, 0, belief.width(), belief.height(),
                             std::max(2.0, spec.scale / 4.0));
    if (spec.grid) {
        for (int y = 0; y < belief.height(); ++y) {
            for (int x = 0; x < belief.width(); ++x) {
                const CellClass c = belief.classify({x, y});
                const char* fill = c == CellClass::Free
                                       ? "#ffffff"
                                       : (c == CellClass::Occupied ? "#222222" : "#aaaaaa");
                canvas.rect(x, y, 1.0, 1.0, fill);
            }
        }
    }
    if (spec.frontiers) {
        for (const auto& f : extract_frontiers(belief, 1)) {
            for (const GridCell& c : f.cells) canvas.rect(c.x, c.y, 1.0, 1.0, "#66bbff");
        }
    }
    if (spec.trajectories) {
        for (size_t r = 0; r < res.trajectories.size(); ++r) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& [t, c] : res.trajectories[r]) pts.push_back(GridWorld::to_xy(c));
            canvas.polyline(pts, detail::robot_color(r), 1.0);
        }
    }
    if (spec.tree) {
        for (const auto& n : res.nodes) {
            if (n.parent >= 0) {
                const auto [px, py] = GridWorld::to_xy(res.nodes[n.parent].pos);
                const auto [cx, cy] = GridWorld::to_xy(n.pos);
                canvas.line(px, py, cx, cy, "#888888", 0.6);
            }
        }
        for (const auto& n : res.nodes) {
            const auto [x, y] = GridWorld::to_xy(n.pos);
            canvas.circle(x, y, n.kind == NodeKind::Root ? 3.0 : 2.0,
                          n.kind == NodeKind::Root ? "#000000" : "#cc3333");
        }
    }
    return canvas.finish(comment);
}

}  // namespace polyex
