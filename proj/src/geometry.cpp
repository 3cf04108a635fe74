#include "pwlstl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwlstl {

namespace {

double dot(const std::vector<double>& a, const Point& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * p[i];
    return s;
}

}  // namespace

PwlTrajectory::PwlTrajectory(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
    if (waypoints_.size() < 2) throw GeometryError("trajectory needs at least two waypoints");
    const std::size_t d = waypoints_.front().p.size();
    if (d == 0) throw GeometryError("waypoints need at least one coordinate");
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
        if (waypoints_[i].p.size() != d) throw GeometryError("inconsistent waypoint dimensions");
        if (waypoints_[i].t < 0.0) throw GeometryError("timestamps must be nonnegative");
        if (i > 0 && waypoints_[i].t < waypoints_[i - 1].t)
            throw GeometryError("timestamps must be nondecreasing");
    }
}

Point PwlTrajectory::eval_at(double t) const {
    if (t < start_time() || t > end_time())
        throw OutOfHorizon("time " + std::to_string(t) + " outside trajectory span");
    for (int i = 0; i < num_segments(); ++i) {
        const Waypoint& a = waypoint(i);
        const Waypoint& b = waypoint(i + 1);
        if (t > b.t) continue;
        if (b.t == a.t) return a.p;
        double alpha = (t - a.t) / (b.t - a.t);
        Point out(a.p.size());
        for (std::size_t d = 0; d < out.size(); ++d)
            out[d] = a.p[d] + alpha * (b.p[d] - a.p[d]);
        return out;
    }
    return waypoints_.back().p;
}

ConvexRegion ConvexRegion::from_halfspaces(std::string name, std::vector<std::vector<double>> a,
                                           std::vector<double> h) {
    if (name.empty()) throw GeometryError("region name must be nonempty");
    if (a.size() != h.size() || a.empty()) throw GeometryError("A and h sizes must match");
    const std::size_t d = a.front().size();
    ConvexRegion region;
    region.name_ = std::move(name);
    region.row_norms_.reserve(a.size());
    for (const auto& row : a) {
        if (row.size() != d) throw GeometryError("inconsistent half-space dimensions");
        double norm = 0.0;
        for (double v : row) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw DegenerateRegion("half-space row must be nonzero");
        region.row_norms_.push_back(norm);
    }
    region.a_ = std::move(a);
    region.h_ = std::move(h);
    return region;
}

double ConvexRegion::inside_margin(int j, const Point& p) const {
    const std::size_t row = static_cast<std::size_t>(j);
    return (h_[row] - dot(a_[row], p)) / row_norms_[row];
}

double ConvexRegion::outside_margin(int j, const Point& p) const {
    return -inside_margin(j, p);
}

bool ConvexRegion::contains(const Point& p, double margin) const {
    for (int j = 0; j < num_edges(); ++j)
        if (inside_margin(j, p) < margin) return false;
    return true;
}

std::vector<Point> ConvexRegion::vertices() const {
    if (dim() != 2) throw GeometryError("vertex reconstruction is 2-d only");
    // Pairwise edge intersections filtered by feasibility; fine for the small
    // row counts mission polygons have.
    std::vector<Point> pts;
    const double tol = 1e-9;
    for (int i = 0; i < num_edges(); ++i) {
        for (int j = i + 1; j < num_edges(); ++j) {
            double a1 = a_[i][0], b1 = a_[i][1], c1 = h_[i];
            double a2 = a_[j][0], b2 = a_[j][1], c2 = h_[j];
            double det = a1 * b2 - a2 * b1;
            if (std::abs(det) < 1e-12) continue;
            Point p{(c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det};
            if (contains(p, -tol)) pts.push_back(p);
        }
    }
    if (pts.size() < 3) throw DegenerateRegion("region has no 2-d interior");
    Point centroid{0.0, 0.0};
    for (const auto& p : pts) {
        centroid[0] += p[0];
        centroid[1] += p[1];
    }
    centroid[0] /= static_cast<double>(pts.size());
    centroid[1] /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const Point& p, const Point& q) {
        return std::atan2(p[1] - centroid[1], p[0] - centroid[0]) <
               std::atan2(q[1] - centroid[1], q[0] - centroid[0]);
    });
    // Drop duplicates from vertices where more than two edges meet.
    std::vector<Point> out;
    for (const auto& p : pts) {
        if (!out.empty() && std::abs(out.back()[0] - p[0]) < 1e-7 &&
            std::abs(out.back()[1] - p[1]) < 1e-7)
            continue;
        out.push_back(p);
    }
    if (out.size() >= 2 && std::abs(out.front()[0] - out.back()[0]) < 1e-7 &&
        std::abs(out.front()[1] - out.back()[1]) < 1e-7)
        out.pop_back();
    return out;
}

ConvexRegion region_from_vertices(std::string name, const std::vector<Point>& vertices) {
    for (const auto& v : vertices)
        if (v.size() != 2) throw GeometryError("vertex regions are 2-d only");
    if (vertices.size() < 3) throw DegenerateRegion("need at least three vertices");

    // Monotone-chain convex hull, counterclockwise.
    std::vector<Point> pts = vertices;
    std::sort(pts.begin(), pts.end(), [](const Point& p, const Point& q) {
        return p[0] < q[0] || (p[0] == q[0] && p[1] < q[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Point> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }
    const std::size_t lower_size = hull.size() + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (hull.size() >= lower_size && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();
    if (hull.size() < 3) throw DegenerateRegion("vertices are collinear");

    double area2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& p = hull[i];
        const Point& q = hull[(i + 1) % hull.size()];
        area2 += p[0] * q[1] - q[0] * p[1];
    }
    if (std::abs(area2) < 1e-12) throw DegenerateRegion("hull has zero area");

    // CCW hull: interior lies left of each directed edge, the outward normal
    // is the edge direction rotated clockwise.
    std::vector<std::vector<double>> a;
    std::vector<double> h;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& p = hull[i];
        const Point& q = hull[(i + 1) % hull.size()];
        double ex = q[0] - p[0];
        double ey = q[1] - p[1];
        std::vector<double> normal{ey, -ex};
        a.push_back(normal);
        h.push_back(normal[0] * p[0] + normal[1] * p[1]);
    }
    return ConvexRegion::from_halfspaces(std::move(name), std::move(a), std::move(h));
}

bool segment_inside(const ConvexRegion& region, const Waypoint& a, const Waypoint& b, double eps) {
    for (int j = 0; j < region.num_edges(); ++j) {
        if (region.inside_margin(j, a.p) < eps) return false;
        if (region.inside_margin(j, b.p) < eps) return false;
    }
    return true;
}

bool segment_outside(const ConvexRegion& region, const Waypoint& a, const Waypoint& b, double eps) {
    for (int j = 0; j < region.num_edges(); ++j) {
        if (region.outside_margin(j, a.p) >= eps && region.outside_margin(j, b.p) >= eps)
            return true;
    }
    return false;
}

SegmentLabel segment_label(const ConvexRegion& region, const Waypoint& a, const Waypoint& b,
                           double eps) {
    if (segment_inside(region, a, b, eps)) return SegmentLabel::Inside;
    if (segment_outside(region, a, b, eps)) return SegmentLabel::Outside;
    return SegmentLabel::Neither;
}

void Workspace::validate() const {
    if (lower.size() != upper.size() || lower.empty())
        throw GeometryError("workspace bounds must have matching nonzero dimension");
    for (std::size_t d = 0; d < lower.size(); ++d)
        if (!(lower[d] < upper[d])) throw GeometryError("workspace lower must be below upper");
    if (!(horizon > 0.0)) throw GeometryError("workspace horizon must be positive");
    if (epsilon < 0.0) throw GeometryError("workspace epsilon must be nonnegative");
}

double Workspace::diagonal() const {
    double s = 0.0;
    for (std::size_t d = 0; d < lower.size(); ++d) {
        double e = upper[d] - lower[d];
        s += e * e;
    }
    return std::sqrt(s);
}

}  // namespace pwlstl
