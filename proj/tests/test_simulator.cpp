#include "hibarrier/simulator.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace hibarrier;
using hibarrier::testing::fixture;
using hibarrier::testing::model_of;
using hibarrier::testing::v2;

namespace {

SelectionPolicy const_policy() { return {}; }

SelectionPolicy random_policy(std::uint64_t seed) {
    SelectionPolicy p;
    p.flow = ParameterRule::random();
    p.jump = ParameterRule::random();
    p.overlap = {OverlapRule::Kind::Bernoulli, 0.5};
    p.seed = seed;
    return p;
}

// Sample of the arc nearest to time t within interval j.
std::pair<double, Vec> nearest_sample(const HybridArc& arc, int j, double t) {
    const auto& iv = arc.intervals.at(static_cast<std::size_t>(j));
    std::size_t best = 0;
    for (std::size_t k = 1; k < iv.t.size(); ++k) {
        if (std::abs(iv.t[k] - t) < std::abs(iv.t[best] - t)) best = k;
    }
    return {iv.t[best], iv.x[best]};
}

std::string csv(const HybridArc& arc, const BarrierCandidate& b) {
    std::ostringstream os;
    write_arc_csv(os, arc, b);
    return os.str();
}

double decay_error(double h) {
    const auto m = model_of(R"({"dim": 1, "C": {"all": []}, "D": {"any": []}, "F": ["-x1"], "G": ["x1"],
                               "barrier": ["x1 - 2"], "box": {"lo": [-2], "hi": [2]}})");
    const auto arc = solve(m.system, Vec{{1.0}}, const_policy(), Horizon{1.0, 0, h});
    return std::abs(arc.final_state()[0] - std::exp(-arc.final_time()));
}

}  // namespace

TEST(Solve, ThermostatClosedFormFirstInterval) {
    const auto m = fixture("thermostat");
    const auto arc = solve(m.system, v2(0, 1.4), const_policy(), Horizon{1.0, 5, 1e-3});
    EXPECT_EQ(arc.jumps(), 0);
    EXPECT_EQ(arc.cause, TerminationCause::HorizonReached);
    const auto [t, x] = nearest_sample(arc, 0, 1.0);
    EXPECT_NEAR(t, 1.0, 1e-12);
    EXPECT_NEAR(x[1], 1.4 * std::exp(-t), 1e-6);
}

TEST(Solve, ThermostatSwitchesAtThresholds) {
    const auto m = fixture("thermostat");
    const double t1 = std::log(2.0);
    const double t2 = std::log(6.0);
    const auto arc = solve(m.system, v2(0, 1.0), const_policy(), Horizon{t2 + 0.2, 2, 1e-3});
    ASSERT_EQ(arc.jumps(), 2);
    EXPECT_NEAR(arc.intervals[0].t.back(), t1, 1e-8);
    EXPECT_TRUE(arc.intervals[1].x.front().isApprox(v2(1, 0.5), 1e-8));
    EXPECT_NEAR(arc.intervals[1].t.back(), t2, 1e-8);
    const auto [t, x] = nearest_sample(arc, 1, 1.5);
    EXPECT_NEAR(x[1], 2.0 - 1.5 * std::exp(-(t - t1)), 1e-6);
    EXPECT_TRUE(arc.final_state().isApprox(v2(0, 1.5 * std::exp(-(arc.final_time() - t2))), 1e-6));
}

TEST(Solve, BouncingBallFirstBounce) {
    const auto m = fixture("bouncing-ball");
    const auto arc = solve(m.system, v2(0, 1), const_policy(), Horizon{2.5, 1, 1e-3});
    ASSERT_EQ(arc.jumps(), 1);
    EXPECT_NEAR(arc.intervals[0].t.back(), 2.0, 1e-8);
    EXPECT_LT((arc.intervals[1].x.front() - v2(0, 0.5)).norm(), 1e-8);
    for (const auto& iv : arc.intervals) {
        for (const auto& x : iv.x) EXPECT_LE(m.barrier.scalarized(x), 1e-9);
    }
}

TEST(Solve, ExpilluFollowsTheBranchAboveTheAxis) {
    const auto m = fixture("expillu");
    // From (0, a): x2 = (sqrt(a) + t/2)^2.
    const auto arc = solve(m.system, v2(0, 1e-4), const_policy(), Horizon{1.0, 0, 1e-3});
    EXPECT_NEAR(arc.final_state()[1], std::pow(0.01 + 0.5, 2), 1e-6);
    // The axis is a solution too, and the one the integrator takes from the origin.
    const auto axis = solve(m.system, v2(0, 0), const_policy(), Horizon{1.0, 0, 1e-3});
    EXPECT_TRUE(axis.final_state().isApprox(v2(1, 0), 1e-12));
}

TEST(Solve, EquilibriumIsConstant) {
    const auto m = model_of(R"({"dim": 2, "C": {"all": []}, "D": {"any": []}, "F": ["0", "0"], "G": ["x1", "x2"],
                               "barrier": ["x1"], "box": {"lo": [-1, -1], "hi": [1, 1]}})");
    const auto arc = solve(m.system, v2(0.3, -0.2), const_policy(), Horizon{1.0, 0, 1e-2});
    EXPECT_EQ(arc.cause, TerminationCause::HorizonReached);
    for (const auto& x : arc.intervals[0].x) EXPECT_EQ(x, v2(0.3, -0.2));
}

TEST(Solve, StartOutsideIsRejected) {
    const auto m = fixture("thermostat");
    EXPECT_THROW((void)solve(m.system, v2(0.5, 1.0), const_policy(), Horizon{}), PreconditionError);
}

TEST(Solve, SolutionDiesWhenFlowPointsOut) {
    const auto m = model_of(R"({"dim": 2, "C": "x1", "D": {"any": []}, "F": ["1", "0"], "G": ["x1", "x2"],
                               "barrier": ["x1"], "box": {"lo": [-1, -1], "hi": [1, 1]}})");
    const auto arc = solve(m.system, v2(0, 0), const_policy(), Horizon{1.0, 0, 1e-2});
    EXPECT_EQ(arc.cause, TerminationCause::SolutionDies);
    EXPECT_TRUE(arc.dies_sampled);
    // Only the membership slack is travelled.
    EXPECT_LT(arc.final_time(), 1e-8);
}

TEST(Solve, ZenoGuard) {
    const auto m = model_of(R"({"dim": 1, "C": {"any": []}, "D": {"all": []}, "F": ["0"], "G": ["x1"],
                               "barrier": ["x1"], "box": {"lo": [-1], "hi": [1]}})");
    Horizon hz{1.0, 1000, 1e-2};
    hz.zeno_jumps = 50;
    const auto arc = solve(m.system, Vec{{0.0}}, const_policy(), hz);
    EXPECT_TRUE(arc.zeno);
    EXPECT_EQ(arc.cause, TerminationCause::HorizonReached);
    EXPECT_EQ(arc.jumps(), 50);
}

TEST(Solve, ExpcountFixedStopsAtTheCorner) {
    const auto m = fixture("expcount-fixed");
    const auto k = build_k_complex(m.system, m.barrier);
    const auto arc = solve(m.system, v2(-0.2, 0), const_policy(), Horizon{1.0, 0, 1e-3});
    EXPECT_EQ(arc.cause, TerminationCause::SolutionDies);
    // x1^2 ≤ member_tol on the parabola branch.
    EXPECT_LT(arc.final_state().norm(), 1e-4);
    EXPECT_EQ(scenario_classify(arc, k).kind, Scenario::Kind::StaysInK);
}

TEST(Solve, ArcCsvLayout) {
    const auto m = fixture("bouncing-ball");
    const auto arc = solve(m.system, v2(0, 1), const_policy(), Horizon{2.5, 1, 0.5});
    const std::string text = csv(arc, m.barrier);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,j,x1,x2,B1,flag");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    ASSERT_GE(rows.size(), 3u);
    EXPECT_EQ(rows.front().substr(0, 4), "0,0,");
    EXPECT_NE(rows.front().find(",init"), std::string::npos);
    int jumps = 0;
    for (const auto& r : rows) jumps += r.ends_with(",jump");
    EXPECT_EQ(jumps, 1);
}

TEST(SimulatorProperty, IntegratorIsFourthOrder) {
    const double e1 = decay_error(1e-2);
    const double e2 = decay_error(5e-3);
    const double e3 = decay_error(2.5e-3);
    EXPECT_GE(e1 / e2, 8.0);
    EXPECT_LE(e1 / e2, 32.0);
    EXPECT_GE(e2 / e3, 8.0);
    EXPECT_LE(e2 / e3, 32.0);
}

TEST(SimulatorProperty, BouncingBallEnergyIsConserved) {
    const auto m = fixture("bouncing-ball");
    const auto arc = solve(m.system, v2(0.3, 0.4), random_policy(3), Horizon{4.0, 4, 1e-4});
    for (const auto& iv : arc.intervals) {
        if (iv.degenerate()) continue;
        const auto energy = [](const Vec& x) { return 2 * x[0] + x[1] * x[1]; };
        const double e0 = energy(iv.x.front());
        const double span = iv.t.back() - iv.t.front();
        for (const auto& x : iv.x) EXPECT_NEAR(energy(x), e0, 1e-8 * std::max(span, 1.0));
    }
}

TEST(SimulatorProperty, CatalogArcsAreSolutions) {
    for (const auto& id : catalog::ids()) {
        const auto m = fixture(id);
        const auto k = build_k_complex(m.system, m.barrier);
        const auto starts = sample(k.K, m.box, 6, 11).points;
        for (std::size_t i = 0; i < starts.size(); ++i) {
            Horizon hz{2.0, 5, 1e-2};
            const auto arc = solve(m.system, starts[i], random_policy(i), hz);
            const auto v = validate_arc(arc, m.system);
            EXPECT_TRUE(v.empty()) << id << " from " << starts[i].transpose() << ": " << to_string(v.front().kind) << " "
                                   << v.front().detail;
            for (std::size_t j = 1; j < arc.intervals.size(); ++j) {
                EXPECT_NE(m.system.D.classify(arc.intervals[j - 1].x.back(), hz.member_tol), Membership::Outside) << id;
            }
        }
    }
}

TEST(SimulatorProperty, ArcCsvIsReproducible) {
    const auto m = fixture("exp1");
    const auto a = solve(m.system, v2(0.2, -0.5), random_policy(42), Horizon{3.0, 5, 1e-2});
    const auto b = solve(m.system, v2(0.2, -0.5), random_policy(42), Horizon{3.0, 5, 1e-2});
    EXPECT_EQ(csv(a, m.barrier), csv(b, m.barrier));
}

TEST(SimulatorProperty, FalsifierIgnoresWorkerCount) {
    for (const char* id : {"expillu", "exp1"}) {
        const auto m = fixture(id);
        const auto k = build_k_complex(m.system, m.barrier);
        FalsifyBudget budget;
        budget.starts = 20;
        budget.horizon = Horizon{1.0, 3, 1e-2};
        budget.box = m.box;
        budget.seed = 9;
        budget.workers = 1;
        const auto one = falsify_invariance(m.system, k, budget);
        budget.workers = 8;
        const auto eight = falsify_invariance(m.system, k, budget);
        ASSERT_EQ(one.found(), eight.found()) << id;
        EXPECT_EQ(one.stats.runs, eight.stats.runs);
        EXPECT_EQ(one.stats.horizon_reached, eight.stats.horizon_reached);
        if (one.found()) {
            EXPECT_EQ(one.counterexample->start_index, eight.counterexample->start_index);
            EXPECT_EQ(one.counterexample->policy, eight.counterexample->policy);
            EXPECT_EQ(csv(one.counterexample->arc, m.barrier), csv(eight.counterexample->arc, m.barrier));
        }
    }
}

TEST(Falsify, ThermostatFindsNothing) {
    const auto m = fixture("thermostat");
    const auto k = build_k_complex(m.system, m.barrier);
    FalsifyBudget budget;
    budget.starts = 100;
    budget.box = m.box;
    const auto r = falsify_invariance(m.system, k, budget);
    EXPECT_FALSE(r.found());
    EXPECT_EQ(r.stats.starts, 100);
}

TEST(Falsify, ExpilluEscapesByFlow) {
    const auto m = fixture("expillu");
    const auto k = build_k_complex(m.system, m.barrier);
    FalsifyBudget budget;
    budget.horizon = Horizon{1.0, 0, 1e-3};
    budget.box = m.box;
    const auto r = falsify_invariance(m.system, k, budget);
    ASSERT_TRUE(r.found());
    EXPECT_EQ(r.counterexample->exit.kind, Scenario::Kind::LeavesByFlow);
    EXPECT_GT(r.counterexample->barrier_at_exit[0], 0.0);
}

TEST(Probe, BouncingBallLingersFromTheTop) {
    const auto m = fixture("bouncing-ball");
    const auto k = build_k_complex(m.system, m.barrier);
    const auto run = probe_from(m.system, k, v2(0, 1), const_policy(), Horizon{0.5, 2, 1e-2}, ProbeOptions{}, 1e-3);
    EXPECT_FALSE(run.entered);
    EXPECT_FALSE(run.left_k);
}

TEST(Probe, InteriorStartIsRejected) {
    const auto m = fixture("bouncing-ball");
    const auto k = build_k_complex(m.system, m.barrier);
    EXPECT_THROW((void)probe_from(m.system, k, v2(0.1, 0), const_policy(), Horizon{0.5, 2, 1e-2}, ProbeOptions{}, 1e-3),
                 PreconditionError);
}

TEST(Probe, ExprjEntersImmediately) {
    const auto m = fixture("exprj");
    const auto k = build_k_complex(m.system, m.barrier);
    FalsifyBudget budget;
    budget.starts = 50;
    budget.horizon = Horizon{0.5, 2, 1e-2};
    budget.box = m.box;
    const auto r = probe_contractivity(m.system, k, budget, ProbeOptions{});
    EXPECT_EQ(r.kind, ProbeResult::Kind::ImmediateEntry);
    EXPECT_EQ(r.starts, 50);
}
