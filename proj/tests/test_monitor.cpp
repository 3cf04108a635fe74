#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pwlstl/monitor.hpp"
#include "support/naive_oracle.hpp"
#include "support/random_instances.hpp"

using namespace pwlstl;
using pwlstl::testing::InstanceOptions;
using pwlstl::testing::Rng;

namespace {

RegionMap square_region(double lo, double hi) {
    RegionMap map;
    map.emplace("R", region_from_vertices("R", {{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}}));
    return map;
}

// Trajectory whose three segments are labeled [Inside, Inside, Neither] for
// the square [0,4]^2 at eps 0.1, with timestamps 0,2,5,6.
PwlTrajectory in_in_neither() {
    return PwlTrajectory({{0.0, {1, 1}}, {2.0, {2, 1}}, {5.0, {2, 2}}, {6.0, {10, 2}}});
}

PwlTrajectory all_outside() {
    return PwlTrajectory({{0.0, {10, 1}}, {2.0, {11, 1}}, {5.0, {12, 1}}, {6.0, {12, 2}}});
}

}  // namespace

TEST_CASE("robustness ordering and sentinels") {
    auto ninf = Robustness::neg_infinity();
    auto pinf = Robustness::pos_infinity();
    auto zero = Robustness::finite(0);
    CHECK(ninf < zero);
    CHECK(zero < pinf);
    CHECK(ninf < pinf);
    CHECK(min(pinf, zero) == zero);
    CHECK(max(ninf, zero) == zero);
    CHECK(Robustness::finite(3) == Robustness::finite(3));
    CHECK(ninf.str() == "-inf");
    CHECK(pinf.str() == "+inf");
}

TEST_CASE("atom robustness on a single segment is zero") {
    auto regions = square_region(0, 4);
    PwlTrajectory traj({{0.0, {1, 1}}, {2.0, {2, 2}}});
    FormulaIndex index(Formula::atom("R"));
    auto theta = eval_time_robustness(index, traj, regions, 0.1, Side::Right);
    CHECK(theta.at(0, 0) == Robustness::finite(0));
    auto left = eval_time_robustness(index, traj, regions, 0.1, Side::Left);
    CHECK(left.at(0, 0) == Robustness::finite(0));
}

TEST_CASE("atom run aggregation, right and left") {
    auto regions = square_region(0, 4);
    auto traj = in_in_neither();
    FormulaIndex index(Formula::atom("R"));

    auto sat = eval_qualitative(index, traj, regions, 0.1);
    CHECK(sat.at(0, 0));
    CHECK(sat.at(0, 1));
    CHECK_FALSE(sat.at(0, 2));

    auto right = eval_time_robustness(index, traj, regions, 0.1, Side::Right);
    CHECK(right.at(0, 0) == Robustness::finite(micros_from_seconds(3.0)));
    CHECK(right.at(0, 1) == Robustness::finite(0));

    auto left = eval_time_robustness(index, traj, regions, 0.1, Side::Left);
    CHECK(left.at(0, 1) == Robustness::finite(micros_from_seconds(2.0)));
}

TEST_CASE("violating run aggregates negatively") {
    auto regions = square_region(0, 4);
    auto traj = all_outside();
    FormulaIndex index(Formula::atom("R"));
    auto right = eval_time_robustness(index, traj, regions, 0.1, Side::Right);
    CHECK(right.at(0, 0) == Robustness::finite(micros_from_seconds(-4.0)));
}

TEST_CASE("eventually side condition yields the -inf sentinel") {
    auto regions = square_region(0, 4);
    PwlTrajectory traj({{0.0, {1, 1}}, {12.0, {2, 2}}});
    FormulaIndex index(Formula::eventually(Interval::bounds(0, 10), Formula::atom("R")));
    auto theta = eval_time_robustness(index, traj, regions, 0.1, Side::Right);
    CHECK(theta.at(0, 0).is_neg_infinity());
    CHECK(side_condition_violated(index, 0, traj, 0));

    auto sat = eval_qualitative(index, traj, regions, 0.1);
    CHECK_FALSE(sat.at(0, 0));
}

TEST_CASE("always window pulls in every intersecting segment") {
    // Segments labeled [Inside, Inside, Neither] at timestamps [0,2,4,10]:
    // the window [0, 2+5] reaches segment 2, so z_0 is false.
    auto regions = square_region(0, 4);
    PwlTrajectory traj({{0.0, {1, 1}}, {2.0, {2, 1}}, {4.0, {2, 2}}, {10.0, {10, 2}}});
    FormulaIndex index(Formula::always(Interval::bounds(0, 5), Formula::atom("R")));
    auto sat = eval_qualitative(index, traj, regions, 0.1);
    CHECK_FALSE(sat.at(0, 0));
}

TEST_CASE("atom fully inside satisfies qualitatively") {
    auto regions = square_region(0, 4);
    PwlTrajectory traj({{0.0, {1, 1}}, {2.0, {2, 2}}});
    FormulaIndex index(Formula::atom("R"));
    auto sat = eval_qualitative(index, traj, regions, 0.1);
    CHECK(sat.at(0, 0));
}

TEST_CASE("unbound atom raises") {
    RegionMap regions;
    PwlTrajectory traj({{0.0, {1, 1}}, {2.0, {2, 2}}});
    FormulaIndex index(Formula::atom("R"));
    CHECK_THROWS_AS(eval_qualitative(index, traj, regions, 0.1), UnboundAtom);
    CHECK_THROWS_AS(eval_time_robustness(index, traj, regions, 0.1, Side::Right), UnboundAtom);
}

TEST_CASE("whole-suffix aggregation on an all-inside trajectory") {
    auto regions = square_region(0, 20);
    std::vector<Waypoint> wps;
    std::vector<double> times{0, 1, 2.5, 4, 7, 9};
    for (double t : times) wps.push_back({t, {5, 5}});
    PwlTrajectory traj(wps);
    FormulaIndex index(Formula::atom("R"));
    auto theta = eval_time_robustness(index, traj, regions, 0.1, Side::Right);
    for (int i = 0; i < traj.num_segments(); ++i) {
        Micros expect = micros_from_seconds(times.back()) - micros_from_seconds(times[i + 1]);
        CHECK(theta.at(0, i) == Robustness::finite(expect));
    }
}

TEST_CASE("appending an inside segment never decreases suffix robustness") {
    auto regions = square_region(0, 20);
    std::vector<Waypoint> wps{{0, {5, 5}}, {1, {6, 5}}, {3, {6, 6}}, {4, {5, 6}}};
    PwlTrajectory shorter(wps);
    wps.push_back({6, {5, 5}});
    PwlTrajectory longer(wps);
    FormulaIndex index(Formula::atom("R"));
    auto a = eval_time_robustness(index, shorter, regions, 0.1, Side::Right);
    auto b = eval_time_robustness(index, longer, regions, 0.1, Side::Right);
    for (int i = 0; i < shorter.num_segments(); ++i) {
        CHECK_FALSE(b.at(0, i) < a.at(0, i));
    }
}

TEST_CASE("conjunction and disjunction are exactly min and max") {
    Rng rng(4242);
    InstanceOptions opt;
    opt.max_depth = 2;
    for (int trial = 0; trial < 200; ++trial) {
        auto regions = pwlstl::testing::random_regions(rng, opt);
        auto traj = pwlstl::testing::random_trajectory(rng, opt);
        auto f1 = pwlstl::testing::random_formula(rng, opt);
        auto f2 = pwlstl::testing::random_formula(rng, opt);
        // The factories flatten nested And/Or, so fold over however many
        // children the root ends up with.
        auto both = Formula::conj({f1, f2});
        auto either = Formula::disj({f1, f2});
        FormulaIndex ic(both);
        FormulaIndex id(either);
        for (Side side : {Side::Right, Side::Left}) {
            auto tc = eval_time_robustness(ic, traj, regions, 0.1, side);
            auto td = eval_time_robustness(id, traj, regions, 0.1, side);
            for (int i = 0; i < traj.num_segments(); ++i) {
                Robustness lo = tc.at(ic.child_ids(0)[0], i);
                for (int kid : ic.child_ids(0)) lo = min(lo, tc.at(kid, i));
                CHECK(tc.at(0, i) == lo);
                Robustness hi = td.at(id.child_ids(0)[0], i);
                for (int kid : id.child_ids(0)) hi = max(hi, td.at(kid, i));
                CHECK(td.at(0, i) == hi);
            }
        }
    }
}

TEST_CASE("optimized evaluator equals the naive oracle bit for bit") {
    Rng rng(20240812);
    InstanceOptions opt;
    opt.max_waypoints = 12;
    int done = 0;
    while (done < 1000) {
        auto regions = pwlstl::testing::random_regions(rng, opt);
        auto traj = pwlstl::testing::random_trajectory(rng, opt);
        auto f = pwlstl::testing::random_formula(rng, opt);
        FormulaIndex index(f);
        for (Side side : {Side::Right, Side::Left}) {
            auto fast = eval_time_robustness(index, traj, regions, 0.1, side);
            auto slow = pwlstl::testing::naive_oracle(index, traj, regions, 0.1, side);
            for (int id = 0; id < index.size(); ++id)
                for (int i = 0; i < traj.num_segments(); ++i)
                    REQUIRE(fast.at(id, i) == slow.at(id, i));
        }
        ++done;
    }
}

TEST_CASE("soundness holds on hand-built cases") {
    auto regions = square_region(0, 4);
    auto traj = in_in_neither();
    FormulaIndex index(Formula::atom("R"));
    auto report = check_soundness(index, traj, regions, 0.1);
    CHECK(report.consistent);

    // theta_+ = 3 at segment 0 and the qualitative verdict agree.
    auto theta = eval_time_robustness(index, traj, regions, 0.1, Side::Right);
    auto sat = eval_qualitative(index, traj, regions, 0.1);
    CHECK(theta.at(0, 0) == Robustness::finite(micros_from_seconds(3.0)));
    CHECK(sat.at(0, 0));
}

TEST_CASE("soundness fuzz across random instances") {
    Rng rng(777);
    InstanceOptions opt;
    for (int trial = 0; trial < 1500; ++trial) {
        auto regions = pwlstl::testing::random_regions(rng, opt);
        auto traj = pwlstl::testing::random_trajectory(rng, opt);
        auto f = pwlstl::testing::random_formula(rng, opt);
        FormulaIndex index(f);
        auto report = check_soundness(index, traj, regions, 0.1);
        if (!report.consistent) {
            CAPTURE(format_formula(*f));
            CAPTURE(report.witnesses.front().node);
            CAPTURE(report.witnesses.front().segment);
        }
        REQUIRE(report.consistent);
    }
}
