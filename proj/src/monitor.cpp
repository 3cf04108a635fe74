#include "pwlstl/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace pwlstl {

Micros micros_from_seconds(double seconds) {
    return static_cast<Micros>(std::llround(seconds * 1e6));
}

double seconds_from_micros(Micros micros) { return static_cast<double>(micros) * 1e-6; }

double Robustness::seconds() const {
    switch (kind_) {
        case Kind::NegInfinity:
            return -std::numeric_limits<double>::infinity();
        case Kind::PosInfinity:
            return std::numeric_limits<double>::infinity();
        case Kind::Finite:
            return seconds_from_micros(value_);
    }
    return 0.0;
}

bool Robustness::operator<(const Robustness& o) const {
    if (kind_ == o.kind_) return kind_ == Kind::Finite && value_ < o.value_;
    if (kind_ == Kind::NegInfinity) return true;
    if (o.kind_ == Kind::PosInfinity) return true;
    return false;
}

std::string Robustness::str() const {
    switch (kind_) {
        case Kind::NegInfinity:
            return "-inf";
        case Kind::PosInfinity:
            return "+inf";
        case Kind::Finite:
            return format_number(seconds());
    }
    return {};
}

namespace {

// Timestamps and windows on the exact grid, shared by both evaluators.
struct ExactTimes {
    std::vector<Micros> t;  // waypoint timestamps
    int segments = 0;

    explicit ExactTimes(const PwlTrajectory& traj) {
        t.reserve(traj.waypoints().size());
        for (const auto& w : traj.waypoints()) t.push_back(micros_from_seconds(w.t));
        segments = traj.num_segments();
    }

    Micros delta(int i) const { return t[static_cast<std::size_t>(i) + 1] - t[static_cast<std::size_t>(i)]; }
};

bool overlaps(Micros s1, Micros e1, Micros s2, Micros e2) { return s1 <= e2 && s2 <= e1; }

struct WindowBounds {
    Micros a = 0;
    Micros b = 0;
};

WindowBounds exact_window(const Formula& node) {
    if (node.interval().full_horizon)
        throw MonitorError("formula window must be resolved against the horizon first");
    return {micros_from_seconds(node.interval().a), micros_from_seconds(node.interval().b)};
}

const ConvexRegion& lookup_region(const RegionMap& regions, const std::string& name) {
    auto it = regions.find(name);
    if (it == regions.end()) throw UnboundAtom("atom '" + name + "' is not bound to a region");
    return it->second;
}

// Per-segment atom truth for one literal node.
std::vector<char> literal_row(const Formula& node, const PwlTrajectory& traj,
                              const RegionMap& regions, double eps) {
    const ConvexRegion& region = lookup_region(regions, node.region());
    std::vector<char> row(static_cast<std::size_t>(traj.num_segments()));
    for (int i = 0; i < traj.num_segments(); ++i) {
        const Waypoint& a = traj.waypoint(i);
        const Waypoint& b = traj.waypoint(i + 1);
        bool value = node.kind() == FormulaKind::Atom ? segment_inside(region, a, b, eps)
                                                      : segment_outside(region, a, b, eps);
        row[static_cast<std::size_t>(i)] = value ? 1 : 0;
    }
    return row;
}

}  // namespace

SatMatrix eval_qualitative(const FormulaIndex& index, const PwlTrajectory& traj,
                           const RegionMap& regions, double eps) {
    const ExactTimes times(traj);
    const int S = times.segments;
    SatMatrix sat(index.size(), S);

    // Nodes are preorder, so children always carry larger ids: fill backward.
    for (int id = index.size() - 1; id >= 0; --id) {
        const Formula& node = index.node(id);
        const auto& kids = index.child_ids(id);
        switch (node.kind()) {
            case FormulaKind::Atom:
            case FormulaKind::NegAtom: {
                auto row = literal_row(node, traj, regions, eps);
                for (int i = 0; i < S; ++i) sat.set(id, i, row[static_cast<std::size_t>(i)] != 0);
                break;
            }
            case FormulaKind::And:
            case FormulaKind::Or: {
                const bool conj = node.kind() == FormulaKind::And;
                for (int i = 0; i < S; ++i) {
                    bool value = conj;
                    for (int kid : kids)
                        value = conj ? (value && sat.at(kid, i)) : (value || sat.at(kid, i));
                    sat.set(id, i, value);
                }
                break;
            }
            case FormulaKind::Always: {
                const WindowBounds w = exact_window(node);
                for (int i = 0; i < S; ++i) {
                    bool value = true;
                    for (int j = 0; j < S; ++j) {
                        if (overlaps(times.t[j], times.t[j + 1], times.t[i] + w.a,
                                     times.t[i + 1] + w.b) &&
                            !sat.at(kids[0], j)) {
                            value = false;
                            break;
                        }
                    }
                    sat.set(id, i, value);
                }
                break;
            }
            case FormulaKind::Eventually: {
                const WindowBounds w = exact_window(node);
                for (int i = 0; i < S; ++i) {
                    bool value = false;
                    if (times.delta(i) <= w.b - w.a) {
                        for (int j = 0; j < S; ++j) {
                            if (overlaps(times.t[j], times.t[j + 1], times.t[i + 1] + w.a,
                                         times.t[i] + w.b) &&
                                sat.at(kids[0], j)) {
                                value = true;
                                break;
                            }
                        }
                    }
                    sat.set(id, i, value);
                }
                break;
            }
            case FormulaKind::Until: {
                const WindowBounds w = exact_window(node);
                for (int i = 0; i < S; ++i) {
                    bool value = false;
                    if (times.delta(i) <= w.b - w.a) {
                        for (int j = 0; j < S && !value; ++j) {
                            if (!overlaps(times.t[j], times.t[j + 1], times.t[i + 1] + w.a,
                                          times.t[i] + w.b))
                                continue;
                            if (!sat.at(kids[1], j)) continue;
                            bool prefix = true;
                            for (int l = 0; l <= j; ++l) {
                                if (overlaps(times.t[l], times.t[l + 1], times.t[i],
                                             times.t[i + 1] + w.b) &&
                                    !sat.at(kids[0], l)) {
                                    prefix = false;
                                    break;
                                }
                            }
                            value = prefix;
                        }
                    }
                    sat.set(id, i, value);
                }
                break;
            }
        }
    }
    return sat;
}

RobustnessMatrix eval_time_robustness(const FormulaIndex& index, const PwlTrajectory& traj,
                                      const RegionMap& regions, double eps, Side side) {
    const ExactTimes times(traj);
    const int S = times.segments;
    RobustnessMatrix theta(index.size(), S);

    for (int id = index.size() - 1; id >= 0; --id) {
        const Formula& node = index.node(id);
        const auto& kids = index.child_ids(id);
        switch (node.kind()) {
            case FormulaKind::Atom:
            case FormulaKind::NegAtom: {
                auto row = literal_row(node, traj, regions, eps);
                if (side == Side::Right) {
                    // Suffix aggregation: the run sum extends while the next
                    // segment shares the truth value.
                    std::vector<Micros> run(static_cast<std::size_t>(S), 0);
                    for (int i = S - 2; i >= 0; --i) {
                        if (row[static_cast<std::size_t>(i + 1)] == row[static_cast<std::size_t>(i)])
                            run[static_cast<std::size_t>(i)] =
                                run[static_cast<std::size_t>(i + 1)] + times.delta(i + 1);
                    }
                    for (int i = 0; i < S; ++i) {
                        Micros sum = run[static_cast<std::size_t>(i)];
                        theta.set(id, i,
                                  Robustness::finite(row[static_cast<std::size_t>(i)] ? sum : -sum));
                    }
                } else {
                    std::vector<Micros> run(static_cast<std::size_t>(S), 0);
                    for (int i = 1; i < S; ++i) {
                        if (row[static_cast<std::size_t>(i - 1)] == row[static_cast<std::size_t>(i)])
                            run[static_cast<std::size_t>(i)] =
                                run[static_cast<std::size_t>(i - 1)] + times.delta(i - 1);
                    }
                    for (int i = 0; i < S; ++i) {
                        Micros sum = run[static_cast<std::size_t>(i)];
                        theta.set(id, i,
                                  Robustness::finite(row[static_cast<std::size_t>(i)] ? sum : -sum));
                    }
                }
                break;
            }
            case FormulaKind::And:
            case FormulaKind::Or: {
                const bool is_min = node.kind() == FormulaKind::And;
                for (int i = 0; i < S; ++i) {
                    Robustness acc = theta.at(kids[0], i);
                    for (std::size_t k = 1; k < kids.size(); ++k) {
                        const Robustness& v = theta.at(kids[k], i);
                        acc = is_min ? min(acc, v) : max(acc, v);
                    }
                    theta.set(id, i, acc);
                }
                break;
            }
            case FormulaKind::Always: {
                const WindowBounds w = exact_window(node);
                for (int i = 0; i < S; ++i) {
                    Robustness acc = Robustness::pos_infinity();
                    for (int j = 0; j < S; ++j) {
                        if (overlaps(times.t[j], times.t[j + 1], times.t[i] + w.a,
                                     times.t[i + 1] + w.b))
                            acc = min(acc, theta.at(kids[0], j));
                    }
                    theta.set(id, i, acc);
                }
                break;
            }
            case FormulaKind::Eventually: {
                const WindowBounds w = exact_window(node);
                for (int i = 0; i < S; ++i) {
                    if (times.delta(i) > w.b - w.a) {
                        theta.set(id, i, Robustness::neg_infinity());
                        continue;
                    }
                    Robustness acc = Robustness::neg_infinity();
                    for (int j = 0; j < S; ++j) {
                        if (overlaps(times.t[j], times.t[j + 1], times.t[i + 1] + w.a,
                                     times.t[i] + w.b))
                            acc = max(acc, theta.at(kids[0], j));
                    }
                    theta.set(id, i, acc);
                }
                break;
            }
            case FormulaKind::Until: {
                const WindowBounds w = exact_window(node);
                for (int i = 0; i < S; ++i) {
                    if (times.delta(i) > w.b - w.a) {
                        theta.set(id, i, Robustness::neg_infinity());
                        continue;
                    }
                    Robustness acc = Robustness::neg_infinity();
                    for (int j = 0; j < S; ++j) {
                        if (!overlaps(times.t[j], times.t[j + 1], times.t[i + 1] + w.a,
                                      times.t[i] + w.b))
                            continue;
                        Robustness candidate = theta.at(kids[1], j);
                        for (int l = 0; l <= j; ++l) {
                            if (overlaps(times.t[l], times.t[l + 1], times.t[i],
                                         times.t[i + 1] + w.b))
                                candidate = min(candidate, theta.at(kids[0], l));
                        }
                        acc = max(acc, candidate);
                    }
                    theta.set(id, i, acc);
                }
                break;
            }
        }
    }
    return theta;
}

bool side_condition_violated(const FormulaIndex& index, int node, const PwlTrajectory& traj,
                             int segment) {
    const Formula& f = index.node(node);
    if (f.kind() != FormulaKind::Eventually && f.kind() != FormulaKind::Until) return false;
    const ExactTimes times(traj);
    const WindowBounds w = exact_window(f);
    return times.delta(segment) > w.b - w.a;
}

SoundnessReport check_soundness(const FormulaIndex& index, const PwlTrajectory& traj,
                                const RegionMap& regions, double eps) {
    const SatMatrix sat = eval_qualitative(index, traj, regions, eps);
    SoundnessReport report;
    for (Side side : {Side::Right, Side::Left}) {
        const RobustnessMatrix theta = eval_time_robustness(index, traj, regions, eps, side);
        for (int id = 0; id < index.size(); ++id) {
            for (int i = 0; i < sat.num_segments(); ++i) {
                const Robustness& v = theta.at(id, i);
                const bool s = sat.at(id, i);
                bool bad = false;
                if (v.is_finite()) {
                    if (v.micros() > 0 && !s) bad = true;
                    if (v.micros() < 0 && s) bad = true;
                } else if (v.is_pos_infinity()) {
                    // Vacuous Always window: must agree with the vacuous
                    // conjunction of the qualitative side.
                    if (!s) bad = true;
                } else if (!side_condition_violated(index, id, traj, i)) {
                    if (s) bad = true;
                }
                if (bad) {
                    report.consistent = false;
                    report.witnesses.push_back({id, i, side, v, s});
                    if (report.witnesses.size() >= 8) return report;
                }
            }
        }
    }
    return report;
}

}  // namespace pwlstl
