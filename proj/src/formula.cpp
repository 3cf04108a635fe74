#include "pwlstl/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <unordered_map>

namespace pwlstl {

Interval Interval::bounds(double a, double b) {
    Interval ivl;
    ivl.a = a;
    ivl.b = b;
    ivl.full_horizon = false;
    return ivl;
}

namespace {

void require_region(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("region name must be nonempty");
}

void require_interval(const Interval& ivl) {
    if (ivl.full_horizon) return;
    if (ivl.a < 0.0 || ivl.b < ivl.a)
        throw std::invalid_argument("interval must satisfy 0 <= a <= b");
}

std::vector<FormulaPtr> flatten(FormulaKind kind, std::vector<FormulaPtr> children) {
    std::vector<FormulaPtr> flat;
    flat.reserve(children.size());
    for (auto& c : children) {
        if (!c) throw std::invalid_argument("null formula child");
        if (c->kind() == kind) {
            for (const auto& gc : c->children()) flat.push_back(gc);
        } else {
            flat.push_back(std::move(c));
        }
    }
    if (flat.size() < 2) throw std::invalid_argument("And/Or needs at least two children");
    return flat;
}

}  // namespace

FormulaPtr Formula::atom(std::string region) {
    require_region(region);
    return FormulaPtr(new Formula(FormulaKind::Atom, std::move(region), Interval{}, {}));
}

FormulaPtr Formula::neg_atom(std::string region) {
    require_region(region);
    return FormulaPtr(new Formula(FormulaKind::NegAtom, std::move(region), Interval{}, {}));
}

FormulaPtr Formula::conj(std::vector<FormulaPtr> children) {
    return FormulaPtr(new Formula(FormulaKind::And, {}, Interval{},
                                  flatten(FormulaKind::And, std::move(children))));
}

FormulaPtr Formula::disj(std::vector<FormulaPtr> children) {
    return FormulaPtr(new Formula(FormulaKind::Or, {}, Interval{},
                                  flatten(FormulaKind::Or, std::move(children))));
}

FormulaPtr Formula::always(Interval window, FormulaPtr child) {
    require_interval(window);
    if (!child) throw std::invalid_argument("null formula child");
    return FormulaPtr(new Formula(FormulaKind::Always, {}, window, {std::move(child)}));
}

FormulaPtr Formula::eventually(Interval window, FormulaPtr child) {
    require_interval(window);
    if (!child) throw std::invalid_argument("null formula child");
    return FormulaPtr(new Formula(FormulaKind::Eventually, {}, window, {std::move(child)}));
}

FormulaPtr Formula::until(Interval window, FormulaPtr lhs, FormulaPtr rhs) {
    require_interval(window);
    if (!lhs || !rhs) throw std::invalid_argument("null formula child");
    return FormulaPtr(new Formula(FormulaKind::Until, {}, window, {std::move(lhs), std::move(rhs)}));
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.kind() != b.kind()) return false;
    if (a.region() != b.region()) return false;
    if (a.is_temporal()) {
        const Interval& ia = a.interval();
        const Interval& ib = b.interval();
        if (ia.full_horizon != ib.full_horizon) return false;
        if (!ia.full_horizon && (ia.a != ib.a || ia.b != ib.b)) return false;
    }
    if (a.children().size() != b.children().size()) return false;
    for (std::size_t i = 0; i < a.children().size(); ++i)
        if (!structurally_equal(*a.children()[i], *b.children()[i])) return false;
    return true;
}

namespace {

int temporal_count(const Formula& f) {
    int n = f.is_temporal() ? 1 : 0;
    for (const auto& c : f.children()) n += temporal_count(*c);
    return n;
}

int atom_count(const Formula& f) {
    if (f.is_literal()) return 1;
    int n = 0;
    for (const auto& c : f.children()) n += atom_count(*c);
    return n;
}

int nesting_depth(const Formula& f) {
    int child_max = 0;
    for (const auto& c : f.children()) child_max = std::max(child_max, nesting_depth(*c));
    return child_max + (f.is_temporal() ? 1 : 0);
}

bool is_flat_temporal(const Formula& f) {
    if (!f.is_temporal()) return false;
    for (const auto& c : f.children())
        if (!c->is_literal()) return false;
    return true;
}

}  // namespace

FormulaStats analyze(const Formula& f) {
    FormulaStats stats;
    stats.num_temporal_ops = temporal_count(f);
    stats.num_atoms = atom_count(f);
    stats.max_nesting = nesting_depth(f);

    // The reduced model path applies when every temporal operator sits
    // directly on atoms at the top level (possibly under one And/Or), so no
    // operator's robustness is demanded at more than the first segment.
    if (is_flat_temporal(f)) {
        stats.single_temporal_op = true;
    } else if (f.kind() == FormulaKind::And || f.kind() == FormulaKind::Or) {
        bool ok = stats.num_temporal_ops >= 1;
        for (const auto& c : f.children()) {
            if (c->is_literal()) continue;
            if (!is_flat_temporal(*c)) {
                ok = false;
                break;
            }
        }
        stats.single_temporal_op = ok;
    } else {
        stats.single_temporal_op = false;
    }
    return stats;
}

std::vector<std::string> region_names(const Formula& f) {
    std::set<std::string> names;
    std::vector<const Formula*> stack{&f};
    while (!stack.empty()) {
        const Formula* node = stack.back();
        stack.pop_back();
        if (node->is_literal()) names.insert(node->region());
        for (const auto& c : node->children()) stack.push_back(c.get());
    }
    return {names.begin(), names.end()};
}

FormulaPtr resolve_horizon(const FormulaPtr& f, double horizon) {
    if (horizon <= 0.0) throw std::invalid_argument("horizon must be positive");
    switch (f->kind()) {
        case FormulaKind::Atom:
        case FormulaKind::NegAtom:
            return f;
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<FormulaPtr> children;
            children.reserve(f->children().size());
            for (const auto& c : f->children()) children.push_back(resolve_horizon(c, horizon));
            return f->kind() == FormulaKind::And ? Formula::conj(std::move(children))
                                                 : Formula::disj(std::move(children));
        }
        case FormulaKind::Always:
        case FormulaKind::Eventually: {
            Interval ivl = f->interval().full_horizon ? Interval::bounds(0.0, horizon)
                                                      : f->interval();
            auto child = resolve_horizon(f->children()[0], horizon);
            return f->kind() == FormulaKind::Always ? Formula::always(ivl, std::move(child))
                                                    : Formula::eventually(ivl, std::move(child));
        }
        case FormulaKind::Until: {
            Interval ivl = f->interval().full_horizon ? Interval::bounds(0.0, horizon)
                                                      : f->interval();
            return Formula::until(ivl, resolve_horizon(f->children()[0], horizon),
                                  resolve_horizon(f->children()[1], horizon));
        }
    }
    throw std::logic_error("unreachable formula kind");
}

bool has_unresolved_horizon(const Formula& f) {
    if (f.is_temporal() && f.interval().full_horizon) return true;
    for (const auto& c : f.children())
        if (has_unresolved_horizon(*c)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    FormulaPtr parse() {
        FormulaPtr f = parse_or();
        skip_ws();
        if (pos_ != text_.size()) fail_syntax("end of input");
        return f;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail_syntax(const std::string& expected) {
        throw ParseError(ParseErrorKind::Syntax, pos_,
                         "syntax error at position " + std::to_string(pos_) + ": expected " +
                             expected);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    // Returns the identifier starting at the cursor without consuming it.
    std::string peek_ident() {
        skip_ws();
        if (pos_ >= text_.size() || !ident_start(text_[pos_])) return {};
        std::size_t end = pos_;
        while (end < text_.size() && ident_char(text_[end])) ++end;
        return std::string(text_.substr(pos_, end - pos_));
    }

    std::string take_ident() {
        std::string id = peek_ident();
        if (id.empty()) fail_syntax("identifier");
        pos_ += id.size();
        return id;
    }

    double parse_number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == 'e' ||
                text_[pos_] == 'E')) {
            ++pos_;
        }
        if (pos_ == start) fail_syntax("number");
        std::string token(text_.substr(start, pos_ - start));
        char* end = nullptr;
        double value = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) {
            pos_ = start;
            fail_syntax("number");
        }
        return value;
    }

    Interval parse_interval_or_horizon() {
        skip_ws();
        if (peek() != '[') return Interval::horizon();
        std::size_t at = pos_;
        eat('[');
        double a = parse_number();
        if (!eat(',')) fail_syntax("','");
        double b = parse_number();
        if (!eat(']')) fail_syntax("']'");
        if (a < 0.0 || b < a)
            throw ParseError(ParseErrorKind::NegativeInterval, at,
                             "interval at position " + std::to_string(at) +
                                 " must satisfy 0 <= a <= b");
        return Interval::bounds(a, b);
    }

    FormulaPtr parse_or() {
        std::vector<FormulaPtr> parts{parse_and()};
        while (eat('|')) parts.push_back(parse_and());
        if (parts.size() == 1) return parts[0];
        return Formula::disj(std::move(parts));
    }

    FormulaPtr parse_and() {
        std::vector<FormulaPtr> parts{parse_until()};
        while (eat('&')) parts.push_back(parse_until());
        if (parts.size() == 1) return parts[0];
        return Formula::conj(std::move(parts));
    }

    FormulaPtr parse_until() {
        FormulaPtr lhs = parse_unary();
        if (peek_ident() == "U") {
            pos_ += 1;
            Interval ivl = parse_interval_or_horizon();
            FormulaPtr rhs = parse_until();
            return Formula::until(ivl, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    FormulaPtr parse_unary() {
        skip_ws();
        std::size_t at = pos_;
        if (eat('!')) {
            FormulaPtr operand = parse_unary();
            if (operand->kind() != FormulaKind::Atom)
                throw ParseError(ParseErrorKind::NnfViolation, at,
                                 "negation at position " + std::to_string(at) +
                                     " must apply directly to an atom");
            return Formula::neg_atom(operand->region());
        }
        if (eat('(')) {
            FormulaPtr inner = parse_or();
            if (!eat(')')) fail_syntax("')'");
            return inner;
        }
        std::string id = peek_ident();
        if (id.empty()) fail_syntax("formula");
        if (id == "G" || id == "F") {
            pos_ += id.size();
            Interval ivl = parse_interval_or_horizon();
            FormulaPtr child = parse_unary();
            return id == "G" ? Formula::always(ivl, std::move(child))
                             : Formula::eventually(ivl, std::move(child));
        }
        if (id == "U") fail_syntax("formula (U is reserved)");
        pos_ += id.size();
        return Formula::atom(id);
    }
};

}  // namespace

FormulaPtr parse_formula(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Formatter
// ---------------------------------------------------------------------------

std::string format_number(double value) {
    if (value == static_cast<double>(static_cast<long long>(value)) &&
        std::abs(value) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(value));
        return buf;
    }
    for (int precision = 1; precision <= 17; ++precision) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) return buf;
    }
    return "0";
}

namespace {

std::string format_interval(const Interval& ivl) {
    if (ivl.full_horizon) return {};
    return "[" + format_number(ivl.a) + "," + format_number(ivl.b) + "]";
}

std::string format_node(const Formula& f, bool as_operand);

std::string format_operand(const Formula& f) {
    if (f.kind() == FormulaKind::Atom) return f.region();
    return "(" + format_node(f, false) + ")";
}

std::string format_node(const Formula& f, bool as_operand) {
    if (as_operand) return format_operand(f);
    switch (f.kind()) {
        case FormulaKind::Atom:
            return f.region();
        case FormulaKind::NegAtom:
            return "!" + f.region();
        case FormulaKind::And:
        case FormulaKind::Or: {
            const char* sep = f.kind() == FormulaKind::And ? " & " : " | ";
            std::string out;
            for (std::size_t i = 0; i < f.children().size(); ++i) {
                if (i > 0) out += sep;
                out += format_operand(*f.children()[i]);
            }
            return out;
        }
        case FormulaKind::Always:
            return "G" + format_interval(f.interval()) + " " + format_operand(*f.children()[0]);
        case FormulaKind::Eventually:
            return "F" + format_interval(f.interval()) + " " + format_operand(*f.children()[0]);
        case FormulaKind::Until:
            return format_operand(*f.children()[0]) + " U" + format_interval(f.interval()) + " " +
                   format_operand(*f.children()[1]);
    }
    throw std::logic_error("unreachable formula kind");
}

}  // namespace

std::string format_formula(const Formula& f) { return format_node(f, false); }

FormulaIndex::FormulaIndex(FormulaPtr root) : root_(std::move(root)) {
    std::vector<const Formula*> stack{root_.get()};
    // Preorder ids assigned iteratively; children resolved in a second pass.
    std::vector<const Formula*> order;
    while (!stack.empty()) {
        const Formula* node = stack.back();
        stack.pop_back();
        order.push_back(node);
        for (auto it = node->children().rbegin(); it != node->children().rend(); ++it)
            stack.push_back(it->get());
    }
    nodes_ = order;
    std::unordered_map<const Formula*, int> ids;
    ids.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) ids[nodes_[i]] = static_cast<int>(i);
    child_ids_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (const auto& c : nodes_[i]->children()) child_ids_[i].push_back(ids.at(c.get()));
    }
}

int FormulaIndex::id_of(const Formula& node) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i] == &node) return static_cast<int>(i);
    throw std::invalid_argument("node is not part of this formula");
}

}  // namespace pwlstl
