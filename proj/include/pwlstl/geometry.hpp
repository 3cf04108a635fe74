#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pwlstl {

using Point = std::vector<double>;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfHorizon : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class DegenerateRegion : public GeometryError {
public:
    using GeometryError::GeometryError;
};

struct Waypoint {
    double t = 0.0;
    Point p;
};

// Ordered timestamped waypoints; K waypoints form K-1 segments, segment i
// being the pair (waypoint i, waypoint i+1). Zero-duration segments are
// legal.
class PwlTrajectory {
public:
    explicit PwlTrajectory(std::vector<Waypoint> waypoints);

    int num_waypoints() const { return static_cast<int>(waypoints_.size()); }
    int num_segments() const { return num_waypoints() - 1; }
    int dim() const { return static_cast<int>(waypoints_.front().p.size()); }
    const std::vector<Waypoint>& waypoints() const { return waypoints_; }
    const Waypoint& waypoint(int i) const { return waypoints_[static_cast<std::size_t>(i)]; }

    double start_time() const { return waypoints_.front().t; }
    double end_time() const { return waypoints_.back().t; }

    // Linear interpolation within the containing segment; the waypoint value
    // at shared timestamps, the segment's start value on zero duration.
    Point eval_at(double t) const;

private:
    std::vector<Waypoint> waypoints_;
};

// Named convex polytope {p : A p <= h}. Rows are stored unnormalized; signed
// distances divide by the row norm at evaluation.
class ConvexRegion {
public:
    static ConvexRegion from_halfspaces(std::string name, std::vector<std::vector<double>> a,
                                        std::vector<double> h);

    const std::string& name() const { return name_; }
    int num_edges() const { return static_cast<int>(h_.size()); }
    int dim() const { return static_cast<int>(a_.front().size()); }
    const std::vector<std::vector<double>>& a() const { return a_; }
    const std::vector<double>& h() const { return h_; }
    double row_norm(int j) const { return row_norms_[static_cast<std::size_t>(j)]; }

    // (h_j - A_j p) / |A_j|: distance inward from edge j, positive inside.
    double inside_margin(int j, const Point& p) const;
    // (A_j p - h_j) / |A_j|: distance outward from edge j.
    double outside_margin(int j, const Point& p) const;

    bool contains(const Point& p, double margin = 0.0) const;

    // Polygon vertices in counterclockwise order (d = 2 only).
    std::vector<Point> vertices() const;

private:
    ConvexRegion() = default;

    std::string name_;
    std::vector<std::vector<double>> a_;
    std::vector<double> h_;
    std::vector<double> row_norms_;
};

// Counterclockwise convex hull of the input points, as half-spaces.
ConvexRegion region_from_vertices(std::string name, const std::vector<Point>& vertices);

enum class SegmentLabel { Inside, Outside, Neither };

// Both endpoints at least eps inside every edge; by convexity the whole
// segment then lies in the eps-shrunk region.
bool segment_inside(const ConvexRegion& region, const Waypoint& a, const Waypoint& b, double eps);

// Some single edge separates both endpoints by at least eps. Sufficient and
// conservative: a segment passing around a corner may avoid the region yet
// fail every single-edge test.
bool segment_outside(const ConvexRegion& region, const Waypoint& a, const Waypoint& b, double eps);

SegmentLabel segment_label(const ConvexRegion& region, const Waypoint& a, const Waypoint& b,
                           double eps);

struct Workspace {
    Point lower;
    Point upper;
    double horizon = 0.0;  // makespan: the last waypoint is pinned to it
    double epsilon = 0.1;  // spatial margin for region membership

    void validate() const;
    double diagonal() const;
};

}  // namespace pwlstl
