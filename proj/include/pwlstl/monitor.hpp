#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pwlstl/formula.hpp"
#include "pwlstl/geometry.hpp"

namespace pwlstl {

// The monitor does all time arithmetic on an exact integer microsecond grid
// so that the strict sign tests of the soundness checker cannot be perturbed
// by rounding.
using Micros = std::int64_t;

Micros micros_from_seconds(double seconds);
double seconds_from_micros(Micros micros);

// Extended-real robustness in microseconds. Finite values are signed sums of
// segment durations; +infinity arises only from an infimum over an empty
// index set, -infinity from an empty supremum or a violated side condition.
class Robustness {
public:
    enum class Kind { NegInfinity, Finite, PosInfinity };

    static Robustness neg_infinity() { return Robustness(Kind::NegInfinity, 0); }
    static Robustness pos_infinity() { return Robustness(Kind::PosInfinity, 0); }
    static Robustness finite(Micros value) { return Robustness(Kind::Finite, value); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_pos_infinity() const { return kind_ == Kind::PosInfinity; }
    bool is_neg_infinity() const { return kind_ == Kind::NegInfinity; }

    Micros micros() const { return value_; }
    double seconds() const;

    bool operator==(const Robustness& o) const { return kind_ == o.kind_ && value_ == o.value_; }
    bool operator!=(const Robustness& o) const { return !(*this == o); }
    bool operator<(const Robustness& o) const;

    friend Robustness min(const Robustness& a, const Robustness& b) { return a < b ? a : b; }
    friend Robustness max(const Robustness& a, const Robustness& b) { return a < b ? b : a; }

    std::string str() const;

private:
    Robustness(Kind kind, Micros value) : kind_(kind), value_(value) {}

    Kind kind_;
    Micros value_;
};

enum class Side { Right, Left };

class MonitorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnboundAtom : public MonitorError {
public:
    using MonitorError::MonitorError;
};

using RegionMap = std::map<std::string, ConvexRegion>;

// Qualitative verdicts, one row per subformula node (FormulaIndex order),
// one column per segment.
class SatMatrix {
public:
    SatMatrix(int nodes, int segments)
        : segments_(segments),
          values_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(segments)) {}

    bool at(int node, int segment) const {
        return values_[static_cast<std::size_t>(node) * segments_ +
                       static_cast<std::size_t>(segment)] != 0;
    }
    void set(int node, int segment, bool value) {
        values_[static_cast<std::size_t>(node) * segments_ + static_cast<std::size_t>(segment)] =
            value ? 1 : 0;
    }
    int num_segments() const { return static_cast<int>(segments_); }
    int num_nodes() const { return static_cast<int>(values_.size() / segments_); }

private:
    std::size_t segments_;
    std::vector<char> values_;
};

class RobustnessMatrix {
public:
    RobustnessMatrix(int nodes, int segments)
        : segments_(segments),
          values_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(segments),
                  Robustness::finite(0)) {}

    const Robustness& at(int node, int segment) const {
        return values_[static_cast<std::size_t>(node) * segments_ +
                       static_cast<std::size_t>(segment)];
    }
    void set(int node, int segment, Robustness value) {
        values_[static_cast<std::size_t>(node) * segments_ + static_cast<std::size_t>(segment)] =
            value;
    }
    int num_segments() const { return static_cast<int>(segments_); }
    int num_nodes() const { return static_cast<int>(values_.size() / segments_); }

private:
    std::size_t segments_;
    std::vector<Robustness> values_;
};

SatMatrix eval_qualitative(const FormulaIndex& index, const PwlTrajectory& traj,
                           const RegionMap& regions, double eps);

RobustnessMatrix eval_time_robustness(const FormulaIndex& index, const PwlTrajectory& traj,
                                      const RegionMap& regions, double eps, Side side);

// True when the segment's duration exceeds the node's window width, the case
// the evaluator reports as a -infinity sentinel for Eventually/Until.
bool side_condition_violated(const FormulaIndex& index, int node, const PwlTrajectory& traj,
                             int segment);

struct SoundnessWitness {
    int node = 0;
    int segment = 0;
    Side side = Side::Right;
    Robustness theta = Robustness::finite(0);
    bool sat = false;
};

struct SoundnessReport {
    bool consistent = true;
    std::vector<SoundnessWitness> witnesses;
};

// Checks theta > 0 => sat and theta < 0 => !sat for every node, segment and
// side. Zero is inconclusive; -infinity from a violated side condition is
// exempt; +infinity (empty Always window) must coincide with vacuous truth.
SoundnessReport check_soundness(const FormulaIndex& index, const PwlTrajectory& traj,
                                const RegionMap& regions, double eps);

}  // namespace pwlstl
