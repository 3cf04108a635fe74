#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pwlstl {

// Time window attached to a temporal operator. A window written without
// bounds in the surface syntax stands for the whole mission horizon and is
// resolved against the horizon when the mission is loaded.
struct Interval {
    double a = 0.0;
    double b = 0.0;
    bool full_horizon = false;

    static Interval horizon() { return Interval{0.0, 0.0, true}; }
    static Interval bounds(double a, double b);
};

enum class FormulaKind {
    Atom,
    NegAtom,
    And,
    Or,
    Always,
    Eventually,
    Until,
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula tree in negation normal form: negation occurs only on
// atoms, And/Or are n-ary and flattened, temporal operators carry a window.
class Formula {
public:
    FormulaKind kind() const { return kind_; }
    const std::string& region() const { return region_; }
    const Interval& interval() const { return interval_; }
    const std::vector<FormulaPtr>& children() const { return children_; }

    bool is_literal() const {
        return kind_ == FormulaKind::Atom || kind_ == FormulaKind::NegAtom;
    }
    bool is_temporal() const {
        return kind_ == FormulaKind::Always || kind_ == FormulaKind::Eventually ||
               kind_ == FormulaKind::Until;
    }

    static FormulaPtr atom(std::string region);
    static FormulaPtr neg_atom(std::string region);
    static FormulaPtr conj(std::vector<FormulaPtr> children);
    static FormulaPtr disj(std::vector<FormulaPtr> children);
    static FormulaPtr always(Interval window, FormulaPtr child);
    static FormulaPtr eventually(Interval window, FormulaPtr child);
    static FormulaPtr until(Interval window, FormulaPtr lhs, FormulaPtr rhs);

private:
    Formula(FormulaKind kind, std::string region, Interval interval,
            std::vector<FormulaPtr> children)
        : kind_(kind),
          region_(std::move(region)),
          interval_(interval),
          children_(std::move(children)) {}

    FormulaKind kind_ = FormulaKind::Atom;
    std::string region_;
    Interval interval_;
    std::vector<FormulaPtr> children_;
};

bool structurally_equal(const Formula& a, const Formula& b);

// Node census used to pick the encoding path and to report model complexity.
struct FormulaStats {
    int num_temporal_ops = 0;
    int num_atoms = 0;
    int max_nesting = 0;  // deepest chain of nested temporal operators
    bool single_temporal_op = false;
};

FormulaStats analyze(const Formula& f);

// Sorted, de-duplicated region names referenced by the formula's atoms.
std::vector<std::string> region_names(const Formula& f);

// Replaces every full-horizon window with [0, T].
FormulaPtr resolve_horizon(const FormulaPtr& f, double horizon);

bool has_unresolved_horizon(const Formula& f);

enum class ParseErrorKind {
    Syntax,
    NnfViolation,
    NegativeInterval,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t position, const std::string& message)
        : std::runtime_error(message), kind_(kind), position_(position) {}

    ParseErrorKind kind() const { return kind_; }
    std::size_t position() const { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

// Surface syntax, with `U` binding tighter than `&` and `&` tighter than `|`:
//
//   formula  := or
//   or       := and { "|" and }
//   and      := until { "&" until }
//   until    := unary [ "U" interval? until ]
//   unary    := "!" unary | ("G"|"F") interval? unary | "(" formula ")" | ident
//   interval := "[" number "," number "]"
//
// G, F and U are reserved; identifiers are [A-Za-z_][A-Za-z0-9_]*. A missing
// interval means the whole mission horizon. `!` is only legal on an atom.
FormulaPtr parse_formula(std::string_view text);

std::string format_formula(const Formula& f);

// Stable preorder enumeration of the subformula nodes of one tree; the ids
// index the monitor's per-node matrices.
class FormulaIndex {
public:
    explicit FormulaIndex(FormulaPtr root);

    int size() const { return static_cast<int>(nodes_.size()); }
    const Formula& node(int id) const { return *nodes_[static_cast<std::size_t>(id)]; }
    int id_of(const Formula& node) const;
    const FormulaPtr& root() const { return root_; }
    // Ids of a node's children, parallel to node.children().
    const std::vector<int>& child_ids(int id) const {
        return child_ids_[static_cast<std::size_t>(id)];
    }

private:
    FormulaPtr root_;
    std::vector<const Formula*> nodes_;
    std::vector<std::vector<int>> child_ids_;
};

// Canonical shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace pwlstl
