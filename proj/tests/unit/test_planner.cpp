#include <gtest/gtest.h>

#include <cmath>

#include "edcuav/error.hpp"
#include "edcuav/planner.hpp"
#include "fixtures.hpp"

namespace edc::planner {
namespace {

using testing::make_scenario;

PlanRequest request_for(const Scenario& sc, SeparationMode mode) {
    PlanRequest r;
    r.scenario = sc;
    r.mode = mode;
    return r;
}

double min_center_distance_slack(const SwarmPlan& plan, const Scenario& sc) {
    double slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sc.num_uavs(); ++k) {
        for (int l = k + 1; l < sc.num_uavs(); ++l) {
            const double reach = sc.uavs[k].gps_error_radius + sc.uavs[l].gps_error_radius;
            for (std::size_t t = 0; t < plan.trajectories[k].positions.size(); ++t) {
                slack = std::min(slack, distance(plan.trajectories[k].positions[t], plan.trajectories[l].positions[t]) - reach);
            }
        }
    }
    return slack;
}

TEST(StraightLineReference, EqualSubdivision) {
    const auto sc = make_scenario({{{0, 0}, {100, 0}}}, 10, 100.0);
    const auto plan = straight_line_reference(sc);
    ASSERT_EQ(plan.trajectories.size(), 1u);
    for (int t = 0; t <= 10; ++t) {
        EXPECT_NEAR(plan.trajectories[0].positions[t].x, 10.0 * t, 1e-12);
        EXPECT_EQ(plan.trajectories[0].positions[t].y, 0.0);
    }
    EXPECT_NEAR(extra_distance(plan.trajectories[0], sc.uavs[0]), 0.0, 1e-9);
}

TEST(StraightLineReference, HoveringUav) {
    const auto sc = make_scenario({{{20, 20}, {20, 20}}}, 4, 100.0);
    const auto plan = straight_line_reference(sc);
    for (const auto& p : plan.trajectories[0].positions) EXPECT_EQ(p, (Vec2{20, 20}));
    for (const auto& v : plan.trajectories[0].velocities) EXPECT_EQ(v, (Vec2{0, 0}));
}

TEST(BuildModel, VariableAndRowCounts) {
    const auto sc = make_scenario({{{0, 0}, {20, 0}}, {{0, 20}, {20, 20}}}, 3, 100.0);
    const auto ref = straight_line_reference(sc);

    const auto literal = build_model(request_for(sc, SeparationMode::Literal), nullptr);
    EXPECT_EQ(literal.layout.num_variables(), 30);
    EXPECT_EQ(literal.problem.num_variables(), 30);

    const auto signed_l1 = build_model(request_for(sc, SeparationMode::SignedL1), &ref);
    EXPECT_EQ(signed_l1.layout.num_variables(), 24);
    EXPECT_EQ(signed_l1.separation_rows, 3);
}

TEST(BuildModel, LayoutIsBijective) {
    const VariableLayout L(3, 4, true);
    std::vector<int> seen(static_cast<std::size_t>(L.num_variables()), 0);
    for (int k = 0; k < 3; ++k)
        for (int s = 1; s <= 4; ++s)
            for (int idx : {L.x(k, s), L.y(k, s), L.vx(k, s), L.vy(k, s)}) ++seen.at(static_cast<std::size_t>(idx));
    for (int p = 0; p < L.num_pairs(); ++p)
        for (int s = 1; s <= 4; ++s)
            for (int idx : {L.aux_x(p, s), L.aux_y(p, s)}) ++seen.at(static_cast<std::size_t>(idx));
    for (int c : seen) EXPECT_EQ(c, 1);
    EXPECT_EQ(L.pair_index(0, 2), L.pair_index(2, 0));
}

TEST(BuildModel, ReferenceErrors) {
    const auto sc = testing::head_on_pair();
    try {
        build_model(request_for(sc, SeparationMode::SignedL1), nullptr);
        FAIL() << "expected MissingReference";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingReference);
    }
    // The straight-line reference of a head-on pair coincides at slot 10.
    const auto ref = straight_line_reference(sc);
    ScpSettings no_rule;
    no_rule.degenerate_direction_rule = false;
    try {
        build_model(request_for(sc, SeparationMode::Scp), &ref, no_rule);
        FAIL() << "expected DegenerateReferencePair";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateReferencePair);
    }
    EXPECT_NO_THROW(build_model(request_for(sc, SeparationMode::Scp), &ref));
}

TEST(Plan, SingleUavIsStraightLineInEveryMode) {
    const auto sc = make_scenario({{{0, 0}, {30, 40}, 5.0, 20.0}}, 5, 100.0);
    for (auto mode : {SeparationMode::Literal, SeparationMode::SignedL1, SeparationMode::Scp}) {
        const auto plan = planner::plan(request_for(sc, mode));
        const auto& traj = plan.trajectories[0];
        for (int t = 0; t <= 5; ++t) {
            EXPECT_NEAR(traj.positions[t].x, 6.0 * t, 1e-6) << to_string(mode);
            EXPECT_NEAR(traj.positions[t].y, 8.0 * t, 1e-6) << to_string(mode);
        }
        for (const auto& v : traj.velocities) EXPECT_NEAR(v.norm(), 10.0, 1e-6);
        EXPECT_NEAR(extra_distance(traj, sc.uavs[0]), 0.0, 1e-6);
    }
}

TEST(Plan, HeadOnPairSignedL1IsVerified) {
    const auto sc = testing::head_on_pair();
    const auto plan = planner::plan(request_for(sc, SeparationMode::SignedL1));
    const auto report = verify_plan(plan, sc, kVerifyEps);
    EXPECT_TRUE(report.ok());
    EXPECT_GE(min_center_distance_slack(plan, sc), 1e-3 - 1e-6);
    for (std::size_t i = 0; i < sc.uavs.size(); ++i) {
        EXPECT_GT(extra_distance(plan.trajectories[i], sc.uavs[i]), 0.0);
    }
}

TEST(Plan, HeadOnPairScpIsVerified) {
    const auto sc = testing::head_on_pair();
    const auto plan = planner::plan(request_for(sc, SeparationMode::Scp));
    EXPECT_TRUE(verify_plan(plan, sc, kVerifyEps).ok());
    EXPECT_GE(plan.solver_stats.outer_iterations, 1);
}

TEST(Plan, OverlappingGoalsAreInfeasible) {
    const auto sc = make_scenario({{{0, 0}, {50, 50}}, {{100, 0}, {55, 50}}}, 20, 100.0);
    try {
        planner::plan(request_for(sc, SeparationMode::SignedL1));
        FAIL() << "expected ScenarioInfeasible";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScenarioInfeasible);
    }
}

Scenario random_scenario(std::uint64_t seed, int k) {
    Rng rng(seed);
    std::uniform_real_distribution<double> c(0.0, 200.0);
    Scenario sc;
    sc.area_width = sc.area_height = 200.0;
    sc.num_slots = 20;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        sc.uavs.clear();
        for (int i = 0; i < k; ++i) sc.uavs.push_back(UavSpec{i, {c(rng), c(rng)}, {c(rng), c(rng)}, 5.0, 15.0, 1.0, 1.0});
        if (sc.violations().empty()) return sc;
    }
    throw std::runtime_error("could not draw a valid scenario");
}

TEST(Plan, SignedL1PlansSatisfyEuclideanSeparation) {
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto sc = random_scenario(seed, 4);
        SwarmPlan plan;
        try {
            plan = planner::plan(request_for(sc, SeparationMode::SignedL1));
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ScenarioInfeasible);
            continue;
        }
        ++solved;
        for (int k = 0; k < 4; ++k) {
            for (int l = k + 1; l < 4; ++l) {
                for (std::size_t t = 1; t < plan.trajectories[k].positions.size(); ++t) {
                    const Vec2 d = plan.trajectories[k].positions[t] - plan.trajectories[l].positions[t];
                    const double l1 = std::abs(d.x) + std::abs(d.y);
                    EXPECT_GE(d.norm(), l1 / std::sqrt(2.0) - 1e-9);
                    EXPECT_GE(l1 / std::sqrt(2.0), 10.0 + 1e-3 - 1e-5);
                }
            }
        }
        EXPECT_TRUE(verify_plan(plan, sc, kVerifyEps).ok());
    }
    EXPECT_GT(solved, 6);
}

TEST(Plan, ScpPlansAreVerified) {
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
        const auto sc = random_scenario(seed, 4);
        const auto plan = planner::plan(request_for(sc, SeparationMode::Scp));
        const auto report = verify_plan(plan, sc, kVerifyEps);
        EXPECT_TRUE(report.ok()) << "seed " << seed << " slack " << report.min_separation_slack;
    }
}

TEST(Plan, ObjectiveMatchesSolverObjective) {
    for (auto mode : {SeparationMode::SignedL1, SeparationMode::Scp}) {
        const auto plan = planner::plan(request_for(testing::head_on_pair(), mode));
        EXPECT_NEAR(plan.objective_value, squared_path_objective(plan), 1e-12 * plan.objective_value);
        EXPECT_NEAR(plan.solver_stats.solver_objective, plan.objective_value, 1e-6 * plan.objective_value);
    }
}

TEST(Plan, PermutingUavsPermutesThePlan) {
    const auto sc = random_scenario(3, 4);
    const std::vector<int> perm{2, 0, 3, 1};
    Scenario permuted = sc;
    for (int i = 0; i < 4; ++i) {
        permuted.uavs[i] = sc.uavs[perm[i]];
        permuted.uavs[i].id = i;
    }
    for (auto mode : {SeparationMode::SignedL1, SeparationMode::Scp}) {
        const auto a = planner::plan(request_for(sc, mode));
        const auto b = planner::plan(request_for(permuted, mode));
        for (int i = 0; i < 4; ++i) {
            const auto& pa = a.trajectories[perm[i]].positions;
            const auto& pb = b.trajectories[i].positions;
            for (std::size_t t = 0; t < pa.size(); ++t) EXPECT_LE(distance(pa[t], pb[t]), 1e-4) << to_string(mode);
        }
    }
}

TEST(Plan, ScalingScalesObjectiveQuadratically) {
    const auto sc = testing::head_on_pair();
    const double c = 3.0;
    Scenario scaled = sc;
    scaled.area_width *= c;
    scaled.area_height *= c;
    for (auto& u : scaled.uavs) {
        u.start = u.start * c;
        u.goal = u.goal * c;
        u.gps_error_radius *= c;
        u.v_max *= c;
    }
    auto base_req = request_for(sc, SeparationMode::SignedL1);
    auto scaled_req = request_for(scaled, SeparationMode::SignedL1);
    scaled_req.safety_margin = base_req.safety_margin * c;
    const auto a = planner::plan(base_req);
    const auto b = planner::plan(scaled_req);
    EXPECT_NEAR(b.objective_value, c * c * a.objective_value, 1e-5 * b.objective_value);
    for (int k = 0; k < 2; ++k) {
        for (std::size_t t = 0; t < a.trajectories[k].positions.size(); ++t) {
            EXPECT_LE(distance(a.trajectories[k].positions[t] * c, b.trajectories[k].positions[t]), 1e-3);
        }
    }
}

TEST(Plan, RecedingWindowCoveringTheRestIsTheFullPlan) {
    const auto sc = testing::head_on_pair();
    auto full = request_for(sc, SeparationMode::SignedL1);
    auto receding = full;
    receding.horizon = Horizon::receding(sc.num_slots);
    const auto a = planner::plan(full);
    const auto b = planner::plan(receding);
    for (int k = 0; k < 2; ++k) {
        for (std::size_t t = 0; t < a.trajectories[k].positions.size(); ++t) {
            EXPECT_LE(distance(a.trajectories[k].positions[t], b.trajectories[k].positions[t]), 1e-9);
        }
    }
}

TEST(Plan, RecedingWindowEndsOnStraightWaypoint) {
    const auto sc = make_scenario({{{0, 0}, {100, 0}}}, 20, 100.0);
    auto req = request_for(sc, SeparationMode::SignedL1);
    req.horizon = Horizon::receding(5);
    const auto plan = planner::plan(req);
    ASSERT_EQ(plan.num_steps(), 5);
    EXPECT_NEAR(plan.trajectories[0].positions.back().x, 25.0, 1e-6);
}

TEST(VerifyPlan, Examples) {
    const auto single = make_scenario({{{0, 0}, {100, 0}}}, 20, 100.0);
    auto plan = straight_line_reference(single);
    EXPECT_TRUE(verify_plan(plan, single, kVerifyEps).ok());

    plan.trajectories[0].positions[7].y += 2 * kVerifyEps;
    const auto perturbed = verify_plan(plan, single, kVerifyEps);
    EXPECT_FALSE(perturbed.kinematics_ok);

    const auto crossing = testing::crossing_pair();
    const auto report = verify_plan(straight_line_reference(crossing), crossing, kVerifyEps);
    EXPECT_FALSE(report.separation_ok);
    EXPECT_TRUE(report.endpoints_ok);

    auto short_plan = straight_line_reference(single);
    short_plan.trajectories[0].positions.pop_back();
    short_plan.trajectories[0].velocities.pop_back();
    try {
        verify_plan(short_plan, single, kVerifyEps);
        FAIL() << "expected DimensionMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(LiteralProbe, AdmitsOverlappingAndSeparatedConfigurations) {
    const std::vector<double> radii{5.0, 5.0};
    EXPECT_TRUE(literal_feasibility_probe(std::vector<Vec2>{{0, 0}, {1, 0}}, radii));
    EXPECT_TRUE(literal_feasibility_probe(std::vector<Vec2>{{0, 0}, {100, 0}}, radii));

    // The explicit assignment X^ = Y^ = -(r_k + r_l)^2 satisfies every row.
    const double d = 10.0;
    const double aux = -d * d;
    const double dx = 1.0, dy = 0.0;
    EXPECT_LE(aux, dx);
    EXPECT_LE(aux, -dx);
    EXPECT_LE(aux, dy);
    EXPECT_LE(aux, -dy);
    EXPECT_LE(aux + aux, -d * d);
    EXPECT_LE(aux, -1.0);
}

TEST(LiteralProbe, NeverExcludesAnyConfiguration) {
    Rng rng(99);
    std::uniform_real_distribution<double> c(0.0, 50.0);
    std::uniform_real_distribution<double> r(0.5, 10.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<Vec2> pos;
        std::vector<double> radii;
        for (int k = 0; k < 4; ++k) {
            pos.push_back({c(rng), c(rng)});
            radii.push_back(r(rng));
        }
        EXPECT_TRUE(literal_feasibility_probe(pos, radii));
    }
}

TEST(Plan, LiteralModeCanLeaveDiscsOverlapping) {
    const auto sc = testing::head_on_pair();
    const auto plan = planner::plan(request_for(sc, SeparationMode::Literal));
    const auto report = verify_plan(plan, sc, 1e-3);
    EXPECT_FALSE(report.separation_ok);
    EXPECT_TRUE(report.endpoints_ok);
}

}  // namespace
}  // namespace edc::planner
