#include "pwlstl/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace pwlstl {

namespace {

constexpr double kCanvas = 640.0;
constexpr double kPad = 40.0;

struct Mapper {
    double x0, y0, sx, sy;

    double x(double wx) const { return kPad + (wx - x0) * sx; }
    // SVG y grows downward.
    double y(double wy) const { return kCanvas - kPad - (wy - y0) * sy; }
};

std::string num(double v) {
    // Two decimals keep the file stable across platforms.
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string ramp_color(double t) {
    // Blue #1565c0 to orange #ef6c00.
    auto mix = [&](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", mix(0x15, 0xef), mix(0x65, 0x6c),
                  mix(0xc0, 0x00));
    return buf;
}

// Reach / avoid / both / unused role per region, from how the formula's
// literals use it.
std::map<std::string, int> region_roles(const Formula& f) {
    std::map<std::string, int> roles;  // bit 1 = reach, bit 2 = avoid
    std::vector<const Formula*> stack{&f};
    while (!stack.empty()) {
        const Formula* node = stack.back();
        stack.pop_back();
        if (node->kind() == FormulaKind::Atom) roles[node->region()] |= 1;
        if (node->kind() == FormulaKind::NegAtom) roles[node->region()] |= 2;
        for (const auto& c : node->children()) stack.push_back(c.get());
    }
    return roles;
}

}  // namespace

std::string render_svg(const Mission& mission, const PwlTrajectory& traj) {
    const Workspace& ws = mission.workspace;
    Mapper map{ws.lower[0], ws.lower[1],
               (kCanvas - 2 * kPad) / (ws.upper[0] - ws.lower[0]),
               (kCanvas - 2 * kPad) / (ws.upper[1] - ws.lower[1])};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kCanvas) + "\" height=\"" +
           num(kCanvas) + "\" viewBox=\"0 0 " + num(kCanvas) + " " + num(kCanvas) + "\">\n";
    svg += "<rect x=\"" + num(kPad) + "\" y=\"" + num(kPad) + "\" width=\"" +
           num(kCanvas - 2 * kPad) + "\" height=\"" + num(kCanvas - 2 * kPad) +
           "\" fill=\"#fafafa\" stroke=\"#9e9e9e\"/>\n";

    auto roles = region_roles(*mission.formula);
    for (const auto& [name, region] : mission.regions) {
        int role = roles.count(name) ? roles[name] : 0;
        std::string fill = role == 1 ? "#2e7d32" : role == 2 ? "#c62828"
                                                 : role == 3 ? "#ef6c00"
                                                             : "#9e9e9e";
        std::string points;
        std::vector<Point> verts;
        try {
            verts = region.vertices();
        } catch (const GeometryError&) {
            continue;  // unbounded or non-planar declarations are skipped
        }
        double cx = 0.0, cy = 0.0;
        for (const auto& v : verts) {
            if (!points.empty()) points += " ";
            points += num(map.x(v[0])) + "," + num(map.y(v[1]));
            cx += map.x(v[0]);
            cy += map.y(v[1]);
        }
        cx /= static_cast<double>(verts.size());
        cy /= static_cast<double>(verts.size());
        svg += "<polygon points=\"" + points + "\" fill=\"" + fill +
               "\" fill-opacity=\"0.35\" stroke=\"" + fill + "\"/>\n";
        svg += "<text x=\"" + num(cx) + "\" y=\"" + num(cy) +
               "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#424242\">" + name +
               "</text>\n";
    }

    bool clamped = false;
    auto clamp_x = [&](double v) {
        double c = std::clamp(v, ws.lower[0], ws.upper[0]);
        clamped = clamped || c != v;
        return c;
    };
    auto clamp_y = [&](double v) {
        double c = std::clamp(v, ws.lower[1], ws.upper[1]);
        clamped = clamped || c != v;
        return c;
    };

    std::string path;
    for (int i = 0; i < traj.num_waypoints(); ++i) {
        const Waypoint& w = traj.waypoint(i);
        if (!path.empty()) path += " ";
        path += num(map.x(clamp_x(w.p[0]))) + "," + num(map.y(clamp_y(w.p[1])));
    }
    svg += "<polyline points=\"" + path +
           "\" fill=\"none\" stroke=\"#1565c0\" stroke-width=\"2\"/>\n";

    const double t0 = traj.start_time();
    const double span = std::max(1e-9, traj.end_time() - t0);
    for (int i = 0; i < traj.num_waypoints(); ++i) {
        const Waypoint& w = traj.waypoint(i);
        double px = map.x(clamp_x(w.p[0]));
        double py = map.y(clamp_y(w.p[1]));
        svg += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"4\" fill=\"" +
               ramp_color((w.t - t0) / span) + "\" stroke=\"#263238\"/>\n";
        svg += "<text x=\"" + num(px + 6) + "\" y=\"" + num(py - 6) +
               "\" font-size=\"11\" fill=\"#263238\">t=" + format_number(w.t) + "</text>\n";
    }
    if (clamped) svg += "<!-- some waypoints were outside the workspace and were clamped -->\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace pwlstl
