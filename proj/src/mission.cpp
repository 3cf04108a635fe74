#include "pwlstl/mission.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pwlstl {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissionError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Point point_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() < 1) throw MissionError(std::string(what) + " must be an array");
    Point p;
    for (const auto& v : j) {
        if (!v.is_number()) throw MissionError(std::string(what) + " must hold numbers");
        p.push_back(v.get<double>());
    }
    return p;
}

ConvexRegion region_from(const json& j) {
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
        throw MissionError("region needs a string name");
    std::string name = j["name"].get<std::string>();
    if (j.contains("vertices")) {
        std::vector<Point> vertices;
        for (const auto& v : j["vertices"]) vertices.push_back(point_from(v, "vertex"));
        return region_from_vertices(name, vertices);
    }
    if (j.contains("halfspaces")) {
        const auto& hs = j["halfspaces"];
        if (!hs.contains("A") || !hs.contains("h"))
            throw MissionError("halfspaces need A and h");
        std::vector<std::vector<double>> a;
        for (const auto& row : hs["A"]) a.push_back(point_from(row, "A row"));
        std::vector<double> h;
        for (const auto& v : hs["h"]) h.push_back(v.get<double>());
        return ConvexRegion::from_halfspaces(name, std::move(a), std::move(h));
    }
    throw MissionError("region '" + name + "' needs vertices or halfspaces");
}

}  // namespace

SynthesisProblem Mission::to_problem() const {
    SynthesisProblem prob;
    prob.formula = formula;
    prob.regions = regions;
    prob.num_waypoints = num_waypoints;
    prob.workspace = workspace;
    prob.v_bound = v_bound;
    prob.theta_star = theta_star;
    prob.lambda = lambda;
    prob.objective = objective;
    prob.start = start;
    prob.goal = goal;
    prob.side = side;
    prob.eps_t = eps_t;
    return prob;
}

Mission parse_mission(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw MissionError(std::string("mission JSON: ") + e.what());
    }
    if (!j.is_object()) throw MissionError("mission must be a JSON object");
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
        throw MissionError("mission schema must be 1");

    Mission mission;
    try {
        mission.name = j.value("name", std::string("mission"));
        if (!j.contains("workspace")) throw MissionError("missing workspace");
        mission.workspace.lower = point_from(j["workspace"]["lower"], "workspace.lower");
        mission.workspace.upper = point_from(j["workspace"]["upper"], "workspace.upper");
        if (!j.contains("horizon") || !j["horizon"].is_number())
            throw MissionError("missing numeric horizon");
        mission.workspace.horizon = j["horizon"].get<double>();
        mission.workspace.epsilon = j.value("epsilon", 0.1);
        mission.eps_t = j.value("eps_t", 1e-3);

        if (!j.contains("regions") || !j["regions"].is_array())
            throw MissionError("missing regions array");
        for (const auto& r : j["regions"]) {
            ConvexRegion region = region_from(r);
            std::string name = region.name();
            if (!mission.regions.emplace(name, std::move(region)).second)
                throw MissionError("duplicate region '" + name + "'");
        }

        if (!j.contains("formula") || !j["formula"].is_string())
            throw MissionError("missing formula string");
        mission.formula_text = j["formula"].get<std::string>();
        FormulaPtr parsed;
        try {
            parsed = parse_formula(mission.formula_text);
        } catch (const ParseError& e) {
            throw MissionError(std::string("formula: ") + e.what());
        }
        mission.workspace.validate();
        mission.formula = resolve_horizon(parsed, mission.workspace.horizon);
        for (const auto& name : region_names(*mission.formula))
            if (!mission.regions.count(name))
                throw MissionError("formula atom '" + name + "' has no region");

        mission.num_waypoints = j.value("K", 2);
        mission.v_bound = j.value("v_b", 1.0);
        mission.theta_star = j.value("theta_star", 0.1);
        mission.lambda = j.value("lambda", 1.0);
        if (j.contains("start")) mission.start = point_from(j["start"], "start");
        if (j.contains("goal")) mission.goal = point_from(j["goal"], "goal");

        std::string objective = j.value("objective", std::string("l1_path"));
        if (objective == "l1_path")
            mission.objective = ObjectiveKind::PathLengthL1;
        else if (objective == "none")
            mission.objective = ObjectiveKind::MakespanOnly;
        else
            throw MissionError("objective must be 'l1_path' or 'none'");

        std::string side = j.value("side", std::string("right"));
        if (side == "right")
            mission.side = Side::Right;
        else if (side == "left")
            mission.side = Side::Left;
        else
            throw MissionError("side must be 'right' or 'left'");
    } catch (const json::exception& e) {
        throw MissionError(std::string("mission JSON: ") + e.what());
    } catch (const GeometryError& e) {
        throw MissionError(std::string("mission geometry: ") + e.what());
    }
    return mission;
}

Mission load_mission(const std::string& path) { return parse_mission(read_file(path)); }

PwlTrajectory parse_trajectory(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw MissionError(std::string("trajectory JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("waypoints") || !j["waypoints"].is_array())
        throw MissionError("trajectory needs a waypoints array");
    std::vector<Waypoint> wps;
    try {
        for (const auto& w : j["waypoints"]) {
            Waypoint wp;
            wp.t = w.at("t").get<double>();
            wp.p = point_from(w.at("p"), "waypoint p");
            wps.push_back(std::move(wp));
        }
        return PwlTrajectory(std::move(wps));
    } catch (const json::exception& e) {
        throw MissionError(std::string("trajectory JSON: ") + e.what());
    } catch (const GeometryError& e) {
        throw MissionError(std::string("trajectory: ") + e.what());
    }
}

PwlTrajectory load_trajectory(const std::string& path) {
    return parse_trajectory(read_file(path));
}

std::string trajectory_json(const PwlTrajectory& traj) {
    std::string out = "{\n  \"waypoints\": [\n";
    for (int i = 0; i < traj.num_waypoints(); ++i) {
        const Waypoint& w = traj.waypoint(i);
        out += "    {\"t\": " + format_number(w.t) + ", \"p\": [";
        for (std::size_t d = 0; d < w.p.size(); ++d) {
            if (d > 0) out += ", ";
            out += format_number(w.p[d]);
        }
        out += "]}";
        out += i + 1 < traj.num_waypoints() ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

namespace {

json robustness_json(const Robustness& value) {
    if (value.is_pos_infinity()) return "+inf";
    if (value.is_neg_infinity()) return "-inf";
    return value.seconds();
}

}  // namespace

std::string monitor_report_json(const Mission& mission, const PwlTrajectory& traj, bool full) {
    FormulaIndex index(mission.formula);
    const double eps = mission.workspace.epsilon;
    auto sat = eval_qualitative(index, traj, mission.regions, eps);
    auto right = eval_time_robustness(index, traj, mission.regions, eps, Side::Right);
    auto left = eval_time_robustness(index, traj, mission.regions, eps, Side::Left);

    json nodes = json::array();
    for (int id = 0; id < index.size(); ++id) {
        json node;
        node["formula"] = format_formula(index.node(id));
        node["sat"] = sat.at(id, 0);
        node["theta_right"] = robustness_json(right.at(id, 0));
        node["theta_left"] = robustness_json(left.at(id, 0));
        if (full) {
            json per_segment = json::array();
            for (int i = 0; i < sat.num_segments(); ++i) {
                json cell;
                cell["sat"] = sat.at(id, i);
                cell["theta_right"] = robustness_json(right.at(id, i));
                cell["theta_left"] = robustness_json(left.at(id, i));
                per_segment.push_back(cell);
            }
            node["segments"] = per_segment;
        }
        nodes.push_back(node);
    }

    json report;
    report["mission"] = mission.name;
    report["formula"] = format_formula(*mission.formula);
    report["satisfied"] = sat.at(0, 0);
    report["theta_right"] = robustness_json(right.at(0, 0));
    report["theta_left"] = robustness_json(left.at(0, 0));
    report["nodes"] = nodes;
    return report.dump(2) + "\n";
}

bool monitor_verdict(const Mission& mission, const PwlTrajectory& traj) {
    FormulaIndex index(mission.formula);
    auto sat = eval_qualitative(index, traj, mission.regions, mission.workspace.epsilon);
    return sat.at(0, 0);
}

}  // namespace pwlstl
