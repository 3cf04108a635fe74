#include "pwlstl/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace pwlstl {

void SynthesisProblem::validate() const {
    if (!formula) throw EncoderError("missing formula");
    if (has_unresolved_horizon(*formula))
        throw EncoderError("formula windows must be resolved against the horizon");
    workspace.validate();
    if (num_waypoints < 2) throw EncoderError("need at least two waypoints");
    if (!(v_bound > 0.0)) throw EncoderError("velocity bound must be positive");
    if (!(theta_star > 0.0)) throw EncoderError("theta_star must be positive");
    if (!(lambda > 0.0)) throw EncoderError("lambda must be positive");
    if (!(m_eps > 0.0) || eps_t < 0.0) throw EncoderError("bad m_eps/eps_t");
    for (const auto& name : region_names(*formula))
        if (!regions.count(name)) throw EncoderError("atom '" + name + "' has no region");
    for (const auto& [name, region] : regions)
        if (region.dim() != static_cast<int>(workspace.lower.size()))
            throw EncoderError("region '" + name + "' dimension mismatch");
    if (start && static_cast<int>(start->size()) != static_cast<int>(workspace.lower.size()))
        throw EncoderError("start dimension mismatch");
    if (goal && static_cast<int>(goal->size()) != static_cast<int>(workspace.lower.size()))
        throw EncoderError("goal dimension mismatch");
    if (start && goal) {
        double dist = 0.0;
        for (std::size_t d = 0; d < start->size(); ++d)
            dist = std::max(dist, std::abs((*goal)[d] - (*start)[d]));
        if (dist > v_bound * workspace.horizon + 1e-9)
            throw InfeasibleEndpoints("goal unreachable from start within the horizon");
    }
}

double SynthesisProblem::big_m() const {
    double window_max = 0.0;
    std::vector<const Formula*> stack{formula.get()};
    while (!stack.empty()) {
        const Formula* f = stack.back();
        stack.pop_back();
        if (f->is_temporal()) window_max = std::max(window_max, f->interval().b);
        for (const auto& c : f->children()) stack.push_back(c.get());
    }
    return 2.0 * std::max({workspace.diagonal(), workspace.horizon, window_max}) + 1.0;
}

namespace {

// Per-segment demand for a node's robustness values.
using Demand = std::vector<char>;

Demand all_of(int segments) { return Demand(static_cast<std::size_t>(segments), 1); }

Demand only_first(int segments) {
    Demand d(static_cast<std::size_t>(segments), 0);
    d[0] = 1;
    return d;
}

class Encoder {
public:
    Encoder(const SynthesisProblem& prob, const EncoderOptions& opts)
        : prob_(prob),
          opts_(opts),
          index_(prob.formula),
          model_(prob.big_m(), prob.m_eps, prob.eps_t),
          segments_(prob.num_waypoints - 1),
          dim_(static_cast<int>(prob.workspace.lower.size())) {}

    double theta_hi() const { return prob_.workspace.horizon; }
    double theta_lo() const { return -prob_.workspace.horizon - 2.0; }
    double theta_slack() const { return theta_hi() - theta_lo(); }

    std::pair<MilpModel, EncodingArtifacts> run() {
        encode_trajectory_vars();
        encode_dynamics();

        Demand root = only_first(segments_);
        if (opts_.force_full_expansion)
            for (std::size_t i = 1; i < root.size(); ++i) root[i] = 2;
        auto root_theta = encode_theta(0, root);
        artifacts_.root_theta = root_theta[0].id;
        if (opts_.qualitative) {
            auto root_sat = encode_sat(0, root);
            artifacts_.root_sat = root_sat[0].id;
        }
        encode_objective(root_theta[0]);

        artifacts_.reduced_path = !any_full_temporal_;
        artifacts_.num_binary = model_.num_binary();
        artifacts_.num_continuous = model_.num_continuous();
        artifacts_.num_constraints = model_.num_constraints();
        return {std::move(model_), std::move(artifacts_)};
    }

private:
    // --- trajectory variables and dynamics ---------------------------------

    void encode_trajectory_vars() {
        const double horizon = prob_.workspace.horizon;
        for (int i = 0; i < prob_.num_waypoints; ++i) {
            VarRef t = model_.add_continuous("t" + std::to_string(i), 0.0, horizon);
            time_.push_back(t);
            artifacts_.time_vars.push_back(t.id);
            for (int d = 0; d < dim_; ++d) {
                VarRef p = model_.add_continuous(
                    "p" + std::to_string(i) + "_" + std::to_string(d),
                    prob_.workspace.lower[static_cast<std::size_t>(d)],
                    prob_.workspace.upper[static_cast<std::size_t>(d)]);
                pos_.push_back(p);
                artifacts_.position_vars.push_back(p.id);
            }
        }
    }

    VarRef pos(int waypoint, int axis) const {
        return pos_[static_cast<std::size_t>(waypoint) * static_cast<std::size_t>(dim_) +
                    static_cast<std::size_t>(axis)];
    }

    LinExpr delta_t(int segment) const {
        LinExpr e(time_[static_cast<std::size_t>(segment) + 1]);
        e.add(time_[static_cast<std::size_t>(segment)], -1.0);
        return e;
    }

    void encode_dynamics() {
        model_.fix(time_[0], 0.0, "dyn_t_start");
        model_.fix(time_.back(), prob_.workspace.horizon, "dyn_t_end");
        for (int i = 0; i + 1 < prob_.num_waypoints; ++i) {
            model_.add_constraint(delta_t(i), Sense::Ge, 0.0, "dyn_t_order");
            for (int d = 0; d < dim_; ++d) {
                LinExpr diff(pos(i + 1, d));
                diff.add(pos(i, d), -1.0);
                LinExpr upper = diff;
                upper -= delta_t(i) * prob_.v_bound;
                model_.add_constraint(std::move(upper), Sense::Le, 0.0, "dyn_velocity");
                LinExpr lower = diff;
                lower += delta_t(i) * prob_.v_bound;
                model_.add_constraint(std::move(lower), Sense::Ge, 0.0, "dyn_velocity");
            }
        }
        if (prob_.start)
            for (int d = 0; d < dim_; ++d)
                model_.fix(pos(0, d), (*prob_.start)[static_cast<std::size_t>(d)], "dyn_start");
        if (prob_.goal)
            for (int d = 0; d < dim_; ++d)
                model_.fix(pos(prob_.num_waypoints - 1, d),
                           (*prob_.goal)[static_cast<std::size_t>(d)], "dyn_goal");
    }

    // --- region membership labels -------------------------------------------

    // Indicator that waypoint w clears edge j of the region by eps, on the
    // inside (polarity true) or outside face.
    VarRef edge_predicate(const std::string& region_name, int w, int j, bool inside) {
        auto key = std::make_tuple(region_name, w, j, inside);
        auto it = edge_preds_.find(key);
        if (it != edge_preds_.end()) return it->second;
        const ConvexRegion& region = prob_.regions.at(region_name);
        const double norm = region.row_norm(j);
        LinExpr mu;
        for (int d = 0; d < dim_; ++d)
            mu.add(pos(w, d), (inside ? -1.0 : 1.0) *
                                  region.a()[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] /
                                  norm);
        mu.add_constant((inside ? 1.0 : -1.0) * region.h()[static_cast<std::size_t>(j)] / norm -
                        prob_.workspace.epsilon);
        VarRef b = model_.enc_linear_predicate(
            mu, std::string(inside ? "edge_in" : "edge_out") + "[" + region_name + ",w" +
                    std::to_string(w) + ",e" + std::to_string(j) + "]");
        edge_preds_.emplace(key, b);
        return b;
    }

    // z_i for "segment i entirely inside": both endpoints clear every edge.
    VarRef label_inside(const std::string& region_name, int segment) {
        auto key = std::make_pair(region_name, segment);
        auto it = labels_in_.find(key);
        if (it != labels_in_.end()) return it->second;
        const ConvexRegion& region = prob_.regions.at(region_name);
        std::vector<VarRef> parts;
        for (int j = 0; j < region.num_edges(); ++j) {
            parts.push_back(edge_predicate(region_name, segment, j, true));
            parts.push_back(edge_predicate(region_name, segment + 1, j, true));
        }
        VarRef z = model_.enc_and(parts, "label_in[" + region_name + ",s" +
                                              std::to_string(segment) + "]");
        labels_in_.emplace(key, z);
        artifacts_.label_vars[region_name].push_back(z.id);
        return z;
    }

    // z_i for "segment i entirely outside": one common edge separates both
    // endpoints.
    VarRef label_outside(const std::string& region_name, int segment) {
        auto key = std::make_pair(region_name, segment);
        auto it = labels_out_.find(key);
        if (it != labels_out_.end()) return it->second;
        const ConvexRegion& region = prob_.regions.at(region_name);
        std::vector<VarRef> witnesses;
        for (int j = 0; j < region.num_edges(); ++j) {
            std::vector<VarRef> pair{edge_predicate(region_name, segment, j, false),
                                     edge_predicate(region_name, segment + 1, j, false)};
            witnesses.push_back(model_.enc_and(pair, "label_out_edge[" + region_name + ",s" +
                                                           std::to_string(segment) + ",e" +
                                                           std::to_string(j) + "]"));
        }
        VarRef z = model_.enc_or(witnesses, "label_out[" + region_name + ",s" +
                                                std::to_string(segment) + "]");
        labels_out_.emplace(key, z);
        artifacts_.label_vars[region_name + "!"].push_back(z.id);
        return z;
    }

    VarRef literal_label(const Formula& node, int segment) {
        return node.kind() == FormulaKind::Atom ? label_inside(node.region(), segment)
                                                : label_outside(node.region(), segment);
    }

    VarRef label_complement(VarRef z) {
        auto it = complements_.find(z.id);
        if (it != complements_.end()) return it->second;
        VarRef nz = model_.complement(z, "label");
        complements_.emplace(z.id, nz);
        return nz;
    }

    // --- counting chain for atom robustness ----------------------------------

    // Time-aggregating recursion: the satisfied-run variable accumulates the
    // durations of same-valued neighbors, the violated-run variable their
    // negation; the atom's robustness reads the neighbor's aggregate.
    std::vector<VarRef> atom_theta_chain(const Formula& node) {
        auto key = std::make_tuple(node.region(), node.kind() == FormulaKind::Atom, prob_.side);
        auto it = atom_chains_.find(key);
        if (it != atom_chains_.end()) return it->second;
        const std::string who =
            (node.kind() == FormulaKind::Atom ? "" : "not_") + node.region();

        const double horizon = prob_.workspace.horizon;
        const bool right = prob_.side == Side::Right;
        std::vector<VarRef> run_sat(static_cast<std::size_t>(segments_) + 1);
        std::vector<VarRef> run_viol(static_cast<std::size_t>(segments_) + 1);
        // Boundary aggregate next to the trajectory end carrying zero.
        const int boundary = right ? segments_ : 0;
        run_sat[static_cast<std::size_t>(boundary)] =
            model_.add_continuous("agg_sat[" + who + ",end]", 0.0, 0.0);
        run_viol[static_cast<std::size_t>(boundary)] =
            model_.add_continuous("agg_viol[" + who + ",end]", 0.0, 0.0);
        artifacts_.aggregator_vars.push_back(run_sat[static_cast<std::size_t>(boundary)].id);
        artifacts_.aggregator_vars.push_back(run_viol[static_cast<std::size_t>(boundary)].id);

        std::vector<VarRef> theta(static_cast<std::size_t>(segments_));
        // Right robustness walks segments back to front; left walks forward.
        for (int step = 0; step < segments_; ++step) {
            const int i = right ? segments_ - 1 - step : step;
            const std::size_t slot = static_cast<std::size_t>(i + (right ? 0 : 1));
            const std::size_t neighbor = static_cast<std::size_t>(i + (right ? 1 : 0));
            VarRef z = literal_label(node, i);
            VarRef nz = label_complement(z);

            LinExpr sat_src(run_sat[neighbor]);
            sat_src += delta_t(i);
            VarRef next_sat = model_.enc_product(
                sat_src, z, "agg_sat[" + who + ",s" + std::to_string(i) + "]");
            model_.tighten_bounds(next_sat, 0.0, horizon);
            run_sat[slot] = next_sat;

            LinExpr viol_src(run_viol[neighbor]);
            viol_src -= delta_t(i);
            VarRef next_viol = model_.enc_product(
                viol_src, nz, "agg_viol[" + who + ",s" + std::to_string(i) + "]");
            model_.tighten_bounds(next_viol, -horizon, 0.0);
            run_viol[slot] = next_viol;

            VarRef part_sat = model_.enc_product(
                LinExpr(run_sat[neighbor]), z,
                "atom_theta_sat[" + who + ",s" + std::to_string(i) + "]");
            model_.tighten_bounds(part_sat, 0.0, horizon);
            VarRef part_viol = model_.enc_product(
                LinExpr(run_viol[neighbor]), nz,
                "atom_theta_viol[" + who + ",s" + std::to_string(i) + "]");
            model_.tighten_bounds(part_viol, -horizon, 0.0);
            VarRef th = model_.add_continuous("atom_theta[" + who + ",s" + std::to_string(i) + "]",
                                              -horizon, horizon);
            LinExpr sum(th);
            sum.add(part_sat, -1.0);
            sum.add(part_viol, -1.0);
            model_.add_constraint(std::move(sum), Sense::Eq, 0.0,
                                  "atom_theta[" + who + ",s" + std::to_string(i) + "]");
            if (prob_.side == Side::Right) {
                // The run sums durations after t_{i+1}.
                LinExpr cap(th);
                cap.add(time_[static_cast<std::size_t>(i) + 1], 1.0);
                model_.add_constraint(std::move(cap), Sense::Le, horizon, "theta_cap");
            } else {
                // The run sums durations before t_i.
                LinExpr cap(th);
                cap.add(time_[static_cast<std::size_t>(i)], -1.0);
                model_.add_constraint(std::move(cap), Sense::Le, 0.0, "theta_cap");
            }
            theta[static_cast<std::size_t>(i)] = th;
            artifacts_.aggregator_vars.push_back(next_sat.id);
            artifacts_.aggregator_vars.push_back(next_viol.id);
            artifacts_.theta_vars.push_back(th.id);
        }
        atom_chains_.emplace(key, theta);
        return theta;
    }

    // --- window-overlap indicators -------------------------------------------

    VarRef window_side_condition(int node, int i) {
        auto key = std::make_pair(node, i);
        auto it = side_conds_.find(key);
        if (it != side_conds_.end()) return it->second;
        const Interval& w = index_.node(node).interval();
        // Indicator for delta_t(i) <= b - a, the nonempty-window condition.
        LinExpr mu(delta_t(i) * -1.0);
        mu.add_constant(w.b - w.a);
        VarRef b = model_.enc_linear_predicate(
            mu, "window_width[n" + std::to_string(node) + ",i" + std::to_string(i) + "]");
        side_conds_.emplace(key, b);
        artifacts_.window_vars.push_back(b.id);
        return b;
    }

    // Indicator that [t_j, t_{j+1}] overlaps the node's window at segment i
    // by at least eps_t. `forward` windows start at t_{i+1}+a and end at
    // t_i+b (Eventually/Until); the Always window runs t_i+a .. t_{i+1}+b.
    VarRef window_overlap(int node, int i, int j, bool forward, bool with_side) {
        auto key = std::make_tuple(node, i, j, forward);
        auto it = overlaps_.find(key);
        if (it != overlaps_.end()) return it->second;
        const Interval& w = index_.node(node).interval();
        const double eps_t = model_.eps_t();

        const int start_wp = forward ? i + 1 : i;
        const int end_wp = forward ? i : i + 1;

        // window_end - t_j >= eps_t
        LinExpr end_gap(time_[static_cast<std::size_t>(end_wp)]);
        end_gap.add(time_[static_cast<std::size_t>(j)], -1.0);
        end_gap.add_constant(w.b - eps_t);
        VarRef b1 = model_.enc_linear_predicate(
            end_gap, "window_end[n" + std::to_string(node) + ",i" + std::to_string(i) + ",j" +
                         std::to_string(j) + "]");
        // t_{j+1} - window_start >= eps_t
        LinExpr start_gap(time_[static_cast<std::size_t>(j) + 1]);
        start_gap.add(time_[static_cast<std::size_t>(start_wp)], -1.0);
        start_gap.add_constant(-w.a - eps_t);
        VarRef b2 = model_.enc_linear_predicate(
            start_gap, "window_start[n" + std::to_string(node) + ",i" + std::to_string(i) + ",j" +
                           std::to_string(j) + "]");

        std::vector<VarRef> parts{b1, b2};
        if (with_side) parts.push_back(window_side_condition(node, i));
        VarRef b = model_.enc_and(parts, "window_overlap[n" + std::to_string(node) + ",i" +
                                             std::to_string(i) + ",j" + std::to_string(j) + "]");
        overlaps_.emplace(key, b);
        artifacts_.window_vars.push_back(b.id);
        return b;
    }

    // Overlap of [t_l, t_{l+1}] with the until hold-window [t_i, t_{i+1}+b].
    VarRef hold_overlap(int node, int i, int l) {
        auto key = std::make_tuple(node, i, l, false);
        auto it = hold_overlaps_.find(key);
        if (it != hold_overlaps_.end()) return it->second;
        const Interval& w = index_.node(node).interval();
        const double eps_t = model_.eps_t();
        LinExpr end_gap(time_[static_cast<std::size_t>(i) + 1]);
        end_gap.add(time_[static_cast<std::size_t>(l)], -1.0);
        end_gap.add_constant(w.b - eps_t);
        VarRef b1 = model_.enc_linear_predicate(
            end_gap, "hold_end[n" + std::to_string(node) + ",i" + std::to_string(i) + ",l" +
                         std::to_string(l) + "]");
        LinExpr start_gap(time_[static_cast<std::size_t>(l) + 1]);
        start_gap.add(time_[static_cast<std::size_t>(i)], -1.0);
        start_gap.add_constant(-eps_t);
        VarRef b2 = model_.enc_linear_predicate(
            start_gap, "hold_start[n" + std::to_string(node) + ",i" + std::to_string(i) + ",l" +
                           std::to_string(l) + "]");
        std::vector<VarRef> parts{b1, b2};
        VarRef b = model_.enc_and(parts, "hold_overlap[n" + std::to_string(node) + ",i" +
                                             std::to_string(i) + ",l" + std::to_string(l) + "]");
        hold_overlaps_.emplace(key, b);
        artifacts_.window_vars.push_back(b.id);
        return b;
    }

    // Right-side robustness evaluated at segment i cannot exceed the time
    // left after t_i; gives the relaxation a horizon-scale ceiling.
    void cap_theta(VarRef theta, int i) {
        if (prob_.side != Side::Right) return;
        LinExpr cap(theta);
        cap.add(time_[static_cast<std::size_t>(i)], 1.0);
        model_.add_constraint(std::move(cap), Sense::Le, prob_.workspace.horizon, "theta_cap");
    }

    // Supremum of `values[j]` over candidates with overlap indicator on:
    // theta >= v_j - (1-gate_j)M, theta <= v_j + (1-s_j)M, s_j <= gate_j.
    // When no candidate's gate is on the supremum is empty; a defined bit
    // then parks theta at -M, the stand-in for -infinity, instead of making
    // the whole model infeasible under a disjunction that never reads it.
    VarRef selected_sup(const std::vector<VarRef>& values, const std::vector<VarRef>& gates,
                        const std::string& tag, bool required) {
        // Deactivated rows need slack covering the robustness range,
        // sentinel included.
        const double slack = theta_slack();
        VarRef theta = model_.add_continuous(tag, theta_lo(), theta_hi());
        LinExpr selector_sum;
        for (std::size_t j = 0; j < values.size(); ++j) {
            LinExpr lower(theta);
            lower.add(values[j], -1.0);
            lower.add(gates[j], -slack);
            model_.add_constraint(std::move(lower), Sense::Ge, -slack, tag + "_lb");
            if (!required) continue;
            VarRef s = model_.add_binary(tag + "_sel");
            artifacts_.selector_vars.push_back(s.id);
            LinExpr upper(theta);
            upper.add(values[j], -1.0);
            upper.add(s, slack);
            model_.add_constraint(std::move(upper), Sense::Le, slack, tag + "_ub");
            LinExpr dominated(s);
            dominated.add(gates[j], -1.0);
            model_.add_constraint(std::move(dominated), Sense::Le, 0.0, tag + "_dom");
            selector_sum.add(s, 1.0);
        }
        if (required) {
            VarRef defined = model_.enc_or(gates, tag + "_def");
            LinExpr pick = selector_sum;
            pick.add(defined, -1.0);
            model_.add_constraint(std::move(pick), Sense::Eq, 0.0, tag + "_pick");
            // With no defined candidate the supremum is empty: pin theta to
            // the bottom of the robustness range.
            LinExpr sentinel(theta);
            sentinel.add(defined, -theta_slack());
            model_.add_constraint(std::move(sentinel), Sense::Le, theta_lo(), tag + "_empty");
        }
        return theta;
    }

    // Infimum over gated candidates, the Always variant.
    VarRef selected_inf(const std::vector<VarRef>& values, const std::vector<VarRef>& gates,
                        const std::string& tag, bool required) {
        const double slack = theta_slack();
        VarRef theta = model_.add_continuous(tag, theta_lo(), theta_hi());
        LinExpr selector_sum;
        for (std::size_t j = 0; j < values.size(); ++j) {
            LinExpr upper(theta);
            upper.add(values[j], -1.0);
            upper.add(gates[j], slack);
            model_.add_constraint(std::move(upper), Sense::Le, slack, tag + "_ub");
            if (!required) continue;
            VarRef s = model_.add_binary(tag + "_sel");
            artifacts_.selector_vars.push_back(s.id);
            LinExpr lower(theta);
            lower.add(values[j], -1.0);
            lower.add(s, -slack);
            model_.add_constraint(std::move(lower), Sense::Ge, -slack, tag + "_lb");
            LinExpr dominated(s);
            dominated.add(gates[j], -1.0);
            model_.add_constraint(std::move(dominated), Sense::Le, 0.0, tag + "_dom");
            selector_sum.add(s, 1.0);
        }
        if (required)
            model_.add_constraint(std::move(selector_sum), Sense::Eq, 1.0, tag + "_pick");
        return theta;
    }

    // --- robustness encoding ---------------------------------------------------

    std::map<int, VarRef> encode_theta(int node, const Demand& demand) {
        const Formula& f = index_.node(node);
        const auto& kids = index_.child_ids(node);
        std::map<int, VarRef> out;
        switch (f.kind()) {
            case FormulaKind::Atom:
            case FormulaKind::NegAtom: {
                auto chain = atom_theta_chain(f);
                for (int i = 0; i < segments_; ++i)
                    if (demand[static_cast<std::size_t>(i)])
                        out[i] = chain[static_cast<std::size_t>(i)];
                return out;
            }
            case FormulaKind::And:
            case FormulaKind::Or: {
                std::vector<std::map<int, VarRef>> children;
                for (int kid : kids) children.push_back(encode_theta(kid, demand));
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    std::vector<VarRef> parts;
                    for (auto& c : children) parts.push_back(c.at(i));
                    const std::string tag = std::string(f.kind() == FormulaKind::And
                                                            ? "logic_and"
                                                            : "logic_or") +
                                            "[n" + std::to_string(node) + ",i" +
                                            std::to_string(i) + "]";
                    VarRef th = f.kind() == FormulaKind::And ? model_.enc_min(parts, tag)
                                                             : model_.enc_max(parts, tag);
                    cap_theta(th, i);
                    out[i] = th;
                    artifacts_.theta_vars.push_back(th.id);
                }
                return out;
            }
            case FormulaKind::Always: {
                note_temporal_demand(demand);
                auto child = encode_theta(kids[0], mark_full(demand));
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    std::vector<VarRef> values, gates;
                    for (int j = 0; j < segments_; ++j) {
                        values.push_back(child.at(j));
                        gates.push_back(window_overlap(node, i, j, false, false));
                    }
                    VarRef th = selected_inf(values, gates,
                                             "always[n" + std::to_string(node) + ",i" +
                                                 std::to_string(i) + "]",
                                             demand[static_cast<std::size_t>(i)] == 1);
                    cap_theta(th, i);
                    out[i] = th;
                    artifacts_.theta_vars.push_back(th.id);
                }
                return out;
            }
            case FormulaKind::Eventually: {
                note_temporal_demand(demand);
                auto child = encode_theta(kids[0], mark_full(demand));
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    std::vector<VarRef> values, gates;
                    for (int j = 0; j < segments_; ++j) {
                        values.push_back(child.at(j));
                        gates.push_back(window_overlap(node, i, j, true, true));
                    }
                    VarRef th = selected_sup(values, gates,
                                             "eventually[n" + std::to_string(node) + ",i" +
                                                 std::to_string(i) + "]",
                                             demand[static_cast<std::size_t>(i)] == 1);
                    cap_theta(th, i);
                    out[i] = th;
                    artifacts_.theta_vars.push_back(th.id);
                }
                return out;
            }
            case FormulaKind::Until: {
                note_temporal_demand(demand);
                auto lhs = encode_theta(kids[0], mark_full(demand));
                auto rhs = encode_theta(kids[1], mark_full(demand));
                const double big_m = model_.big_m();
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    const bool exact = demand[static_cast<std::size_t>(i)] == 1;
                    std::vector<VarRef> values, gates;
                    for (int j = 0; j < segments_; ++j) {
                        // v_j = min(theta2_j, inf over held prefix of theta1),
                        // one-sided when the segment's value is never read.
                        VarRef v = model_.add_continuous(
                            "until_cand[n" + std::to_string(node) + ",i" + std::to_string(i) +
                                ",j" + std::to_string(j) + "]",
                            theta_lo(), theta_hi());
                        LinExpr sum_sel;
                        // rhs term: always eligible.
                        LinExpr ub(v);
                        ub.add(rhs.at(j), -1.0);
                        model_.add_constraint(std::move(ub), Sense::Le, 0.0, "until_rhs_ub");
                        VarRef pick_rhs;
                        if (exact) {
                            pick_rhs = model_.add_binary("until_pick");
                            artifacts_.selector_vars.push_back(pick_rhs.id);
                            LinExpr lb(v);
                            lb.add(rhs.at(j), -1.0);
                            lb.add(pick_rhs, -theta_slack());
                            model_.add_constraint(std::move(lb), Sense::Ge, -theta_slack(),
                                                  "until_rhs_lb");
                            sum_sel.add(pick_rhs, 1.0);
                        }
                        for (int l = 0; l <= j; ++l) {
                            VarRef held = hold_overlap(node, i, l);
                            // v <= theta1_l + (1 - held) * slack
                            LinExpr gated_ub(v);
                            gated_ub.add(lhs.at(l), -1.0);
                            gated_ub.add(held, theta_slack());
                            model_.add_constraint(std::move(gated_ub), Sense::Le, theta_slack(),
                                                  "until_lhs_ub");
                            if (!exact) continue;
                            VarRef pick = model_.add_binary("until_pick");
                            artifacts_.selector_vars.push_back(pick.id);
                            LinExpr gated_lb(v);
                            gated_lb.add(lhs.at(l), -1.0);
                            gated_lb.add(pick, -theta_slack());
                            model_.add_constraint(std::move(gated_lb), Sense::Ge, -theta_slack(),
                                                  "until_lhs_lb");
                            LinExpr dom(pick);
                            dom.add(held, -1.0);
                            model_.add_constraint(std::move(dom), Sense::Le, 0.0, "until_lhs_dom");
                            sum_sel.add(pick, 1.0);
                        }
                        if (exact)
                            model_.add_constraint(std::move(sum_sel), Sense::Eq, 1.0,
                                                  "until_cand_pick");
                        values.push_back(v);
                        gates.push_back(window_overlap(node, i, j, true, true));
                    }
                    VarRef th = selected_sup(values, gates,
                                             "until[n" + std::to_string(node) + ",i" +
                                                 std::to_string(i) + "]",
                                             demand[static_cast<std::size_t>(i)] == 1);
                    cap_theta(th, i);
                    out[i] = th;
                    artifacts_.theta_vars.push_back(th.id);
                }
                return out;
            }
        }
        throw std::logic_error("unreachable");
    }

    // --- qualitative encoding ----------------------------------------------------

    std::map<int, VarRef> encode_sat(int node, const Demand& demand) {
        const Formula& f = index_.node(node);
        const auto& kids = index_.child_ids(node);
        std::map<int, VarRef> out;
        switch (f.kind()) {
            case FormulaKind::Atom:
            case FormulaKind::NegAtom: {
                for (int i = 0; i < segments_; ++i)
                    if (demand[static_cast<std::size_t>(i)]) out[i] = literal_label(f, i);
                return out;
            }
            case FormulaKind::And:
            case FormulaKind::Or: {
                std::vector<std::map<int, VarRef>> children;
                for (int kid : kids) children.push_back(encode_sat(kid, demand));
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    std::vector<VarRef> parts;
                    for (auto& c : children) parts.push_back(c.at(i));
                    out[i] = f.kind() == FormulaKind::And ? model_.enc_and(parts, "sat_and")
                                                          : model_.enc_or(parts, "sat_or");
                }
                return out;
            }
            case FormulaKind::Always: {
                auto child = encode_sat(kids[0], mark_full(demand));
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    std::vector<VarRef> implications;
                    for (int j = 0; j < segments_; ++j) {
                        VarRef inter = window_overlap(node, i, j, false, false);
                        std::vector<VarRef> either{model_.complement(inter, "sat_always"),
                                                   child.at(j)};
                        implications.push_back(model_.enc_or(either, "sat_always_impl"));
                    }
                    out[i] = model_.enc_and(implications, "sat_always");
                }
                return out;
            }
            case FormulaKind::Eventually: {
                auto child = encode_sat(kids[0], mark_full(demand));
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    std::vector<VarRef> hits;
                    for (int j = 0; j < segments_; ++j) {
                        std::vector<VarRef> both{window_overlap(node, i, j, true, true),
                                                 child.at(j)};
                        hits.push_back(model_.enc_and(both, "sat_eventually_hit"));
                    }
                    out[i] = model_.enc_or(hits, "sat_eventually");
                }
                return out;
            }
            case FormulaKind::Until: {
                auto lhs = encode_sat(kids[0], mark_full(demand));
                auto rhs = encode_sat(kids[1], mark_full(demand));
                for (int i = 0; i < segments_; ++i) {
                    if (!demand[static_cast<std::size_t>(i)]) continue;
                    std::vector<VarRef> hits;
                    for (int j = 0; j < segments_; ++j) {
                        std::vector<VarRef> parts{window_overlap(node, i, j, true, true),
                                                  rhs.at(j)};
                        for (int l = 0; l <= j; ++l) {
                            VarRef held = hold_overlap(node, i, l);
                            std::vector<VarRef> either{model_.complement(held, "sat_until"),
                                                       lhs.at(l)};
                            parts.push_back(model_.enc_or(either, "sat_until_impl"));
                        }
                        hits.push_back(model_.enc_and(parts, "sat_until_hit"));
                    }
                    out[i] = model_.enc_or(hits, "sat_until");
                }
                return out;
            }
        }
        throw std::logic_error("unreachable");
    }

    Demand mark_full(const Demand&) { return all_of(segments_); }

    // A temporal operator expanded beyond segment 0 leaves the reduced path.
    void note_temporal_demand(const Demand& demand) {
        int count = 0;
        for (char c : demand) count += c != 0;
        if (count > 1) any_full_temporal_ = true;
    }

    // --- objective -------------------------------------------------------------

    void encode_objective(VarRef root_theta) {
        LinExpr objective(root_theta, prob_.lambda);
        if (prob_.objective == ObjectiveKind::PathLengthL1) {
            for (int i = 0; i + 1 < prob_.num_waypoints; ++i) {
                for (int d = 0; d < dim_; ++d) {
                    const double extent = prob_.workspace.upper[static_cast<std::size_t>(d)] -
                                          prob_.workspace.lower[static_cast<std::size_t>(d)];
                    VarRef u = model_.add_continuous("len", 0.0, extent);
                    LinExpr diff(pos(i + 1, d));
                    diff.add(pos(i, d), -1.0);
                    LinExpr above(u);
                    above -= diff;
                    model_.add_constraint(std::move(above), Sense::Ge, 0.0, "objective_l1");
                    LinExpr below(u);
                    below += diff;
                    model_.add_constraint(std::move(below), Sense::Ge, 0.0, "objective_l1");
                    objective.add(u, -1.0);
                }
            }
        }
        if (opts_.threshold) {
            LinExpr floor(root_theta);
            model_.add_constraint(std::move(floor), Sense::Ge, prob_.theta_star,
                                  "theta_threshold");
        }
        model_.set_objective(std::move(objective));
    }

    const SynthesisProblem& prob_;
    const EncoderOptions& opts_;
    FormulaIndex index_;
    MilpModel model_;
    EncodingArtifacts artifacts_;
    int segments_;
    int dim_;
    bool any_full_temporal_ = false;

    std::vector<VarRef> time_;
    std::vector<VarRef> pos_;
    std::map<std::tuple<std::string, int, int, bool>, VarRef> edge_preds_;
    std::map<std::pair<std::string, int>, VarRef> labels_in_;
    std::map<std::pair<std::string, int>, VarRef> labels_out_;
    std::map<int, VarRef> complements_;
    std::map<std::tuple<std::string, bool, Side>, std::vector<VarRef>> atom_chains_;
    std::map<std::pair<int, int>, VarRef> side_conds_;
    std::map<std::tuple<int, int, int, bool>, VarRef> overlaps_;
    std::map<std::tuple<int, int, int, bool>, VarRef> hold_overlaps_;
};

}  // namespace

std::pair<MilpModel, EncodingArtifacts> encode_mission(const SynthesisProblem& prob,
                                                       const EncoderOptions& opts) {
    prob.validate();
    Encoder encoder(prob, opts);
    return encoder.run();
}

PwlTrajectory extract_trajectory(const SynthesisProblem& prob, const EncodingArtifacts& artifacts,
                                 const std::vector<double>& values) {
    const int dim = static_cast<int>(prob.workspace.lower.size());
    std::vector<Waypoint> wps;
    for (int i = 0; i < prob.num_waypoints; ++i) {
        Waypoint w;
        w.t = values[static_cast<std::size_t>(artifacts.time_vars[static_cast<std::size_t>(i)])];
        for (int d = 0; d < dim; ++d)
            w.p.push_back(values[static_cast<std::size_t>(
                artifacts.position_vars[static_cast<std::size_t>(i * dim + d)])]);
        wps.push_back(std::move(w));
    }
    // The solver can leave microscopic ordering noise on coincident
    // timestamps; snap it out before constructing.
    for (std::size_t i = 1; i < wps.size(); ++i)
        if (wps[i].t < wps[i - 1].t && wps[i].t > wps[i - 1].t - 1e-7) wps[i].t = wps[i - 1].t;
    return PwlTrajectory(std::move(wps));
}

}  // namespace pwlstl
