#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "edcuav/error.hpp"
#include "edcuav/geometry.hpp"
#include "edcuav/scenario.hpp"
#include "fixtures.hpp"

namespace edc {
namespace {

using std::numbers::pi;

TEST(DiscOverlap, StrictCenterDistanceCriterion) {
    EXPECT_TRUE(disc_overlap({{0, 0}, 5}, {{9, 0}, 5}));
    EXPECT_FALSE(disc_overlap({{0, 0}, 5}, {{10.5, 0}, 5}));
    // Distance exactly 10: tangency is not an overlap.
    EXPECT_FALSE(disc_overlap({{0, 0}, 5}, {{6, 8}, 5}));
}

TEST(DiscOverlap, SymmetricTranslationAndScaleInvariant) {
    Rng rng(11);
    std::uniform_real_distribution<double> coord(-50.0, 50.0);
    std::uniform_real_distribution<double> radius(0.0, 20.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int i = 0; i < 2000; ++i) {
        const SafetyDisc a{{coord(rng), coord(rng)}, radius(rng)};
        const SafetyDisc b{{coord(rng), coord(rng)}, radius(rng)};
        const bool ab = disc_overlap(a, b);
        EXPECT_EQ(ab, disc_overlap(b, a));
        // Power-of-two shifts and scales are exact in floating point.
        const Vec2 shift{std::ldexp(1.0, 3), -std::ldexp(1.0, 5)};
        EXPECT_EQ(ab, disc_overlap({a.center + shift, a.radius}, {b.center + shift, b.radius}));
        const double c = std::ldexp(1.0, static_cast<int>(scale(rng)) - 3);
        EXPECT_EQ(ab, disc_overlap({a.center * c, a.radius * c}, {b.center * c, b.radius * c}));
    }
}

TEST(HeadingAngle, QuadrantAwareWithZeroConvention) {
    EXPECT_DOUBLE_EQ(heading_angle({1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(heading_angle({0, 2}), pi / 2);
    EXPECT_DOUBLE_EQ(heading_angle({-1, 0}), pi);
    EXPECT_DOUBLE_EQ(heading_angle({0, 0}), 0.0);
    EXPECT_GT(heading_angle({-1, -0.0}), 0.0);  // range is (-pi, pi]
}

TEST(BearingToGoal, QuadrantAwareAndRejectsCoincidentPoints) {
    EXPECT_DOUBLE_EQ(bearing_to_goal({0, 0}, {1, 1}), pi / 4);
    EXPECT_DOUBLE_EQ(bearing_to_goal({0, 0}, {-1, 0}), pi);
    try {
        bearing_to_goal({2, 3}, {2, 3});
        FAIL() << "expected CoincidentPoints";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CoincidentPoints);
    }
}

TEST(RecoverPolar, MagnitudeAngleAndConsistency) {
    const auto p = recover_polar({3, 4});
    EXPECT_DOUBLE_EQ(p.speed, 5.0);
    EXPECT_NEAR(p.angle, 0.927295218, 1e-9);
    EXPECT_NEAR(3.0 / std::cos(p.angle), 5.0, 1e-12);
    const auto z = recover_polar({0, 0});
    EXPECT_EQ(z.speed, 0.0);
    EXPECT_EQ(z.angle, 0.0);
}

TEST(RecoverPolar, RoundTripReconstructsVector) {
    Rng rng(3);
    std::uniform_real_distribution<double> c(-100.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 v{c(rng), c(rng)};
        const auto p = recover_polar(v);
        const Vec2 back{p.speed * std::cos(p.angle), p.speed * std::sin(p.angle)};
        EXPECT_LE(distance(back, v), 1e-12 * std::max(1.0, v.norm()));
    }
}

TEST(AngularDistance, WrapsIntoZeroToPi) {
    EXPECT_NEAR(angular_distance(0.1, 2 * pi - 0.1), 0.2, 1e-12);
    EXPECT_NEAR(angular_distance(-pi / 2, pi / 2), pi, 1e-12);
    EXPECT_NEAR(angular_distance(1.0, 1.0), 0.0, 1e-15);
}

TEST(SampleTruePosition, ZeroRadiusIsExact) {
    Rng rng(1);
    EXPECT_EQ(sample_true_position({3, -2}, 0.0, rng), (Vec2{3, -2}));
}

TEST(SampleTruePosition, StaysInDiscForEverySeed) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        for (int i = 0; i < 200; ++i) {
            EXPECT_LE(distance(sample_true_position({10, 20}, 5.0, rng), {10, 20}), 5.0);
        }
    }
}

TEST(SampleTruePosition, UniformDiscMoments) {
    // Uniform disc: mean at the centre, E|d|^2 = r^2 / 2.
    Rng rng(2024);
    const Vec2 c{7, -4};
    Vec2 sum;
    double sq = 0.0;
    constexpr int kSamples = 100000;
    for (int i = 0; i < kSamples; ++i) {
        const Vec2 d = sample_true_position(c, 5.0, rng) - c;
        sum += d;
        sq += d.squared_norm();
    }
    EXPECT_LT((sum / kSamples).norm(), 0.1);
    EXPECT_NEAR(sq / kSamples, 12.5, 0.02 * 12.5);
}

TEST(TravelledDistance, SumsSegments) {
    EXPECT_DOUBLE_EQ(traveled_distance(trajectory_from_positions(0, {{0, 0}, {3, 4}}, 1.0)), 5.0);
    EXPECT_DOUBLE_EQ(traveled_distance(trajectory_from_positions(0, {{0, 0}, {1, 0}, {1, 1}}, 1.0)), 2.0);
}

TEST(TravelledDistance, MatchesIndependentResummation) {
    Rng rng(5);
    std::uniform_real_distribution<double> c(0.0, 100.0);
    std::vector<Vec2> pts;
    for (int i = 0; i <= 10; ++i) pts.push_back({c(rng), c(rng)});
    double expected = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        expected += std::sqrt(std::pow(pts[i].x - pts[i - 1].x, 2) + std::pow(pts[i].y - pts[i - 1].y, 2));
    }
    EXPECT_NEAR(traveled_distance(trajectory_from_positions(0, pts, 1.0)), expected, 1e-9);
}

TEST(ExtraDistance, StraightDetourAndMismatch) {
    UavSpec spec{0, {0, 0}, {1, 1}, 1.0, 2.0, 0.0, 1.0};
    EXPECT_NEAR(extra_distance(trajectory_from_positions(0, {{0, 0}, {1, 1}}, 1.0), spec), 0.0, 1e-15);
    EXPECT_NEAR(extra_distance(trajectory_from_positions(0, {{0, 0}, {1, 0}, {1, 1}}, 1.0), spec), 2.0 - std::sqrt(2.0),
                1e-12);
    try {
        extra_distance(trajectory_from_positions(0, {{0, 0}, {1, 0}}, 1.0), spec);
        FAIL() << "expected EndpointMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EndpointMismatch);
    }
}

TEST(ExtraDistance, NonNegativeForMatchingEndpoints) {
    Rng rng(8);
    std::uniform_real_distribution<double> c(0.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        UavSpec spec{0, {c(rng), c(rng)}, {c(rng), c(rng)}, 1.0, 50.0, 0.0, 1.0};
        std::vector<Vec2> pts{spec.start};
        for (int i = 0; i < 5; ++i) pts.push_back({c(rng), c(rng)});
        pts.push_back(spec.goal);
        EXPECT_GE(extra_distance(trajectory_from_positions(0, pts, 1.0), spec), -kVerifyEps);
    }
}

TEST(Trajectory, KinematicallyConsistent) {
    Rng rng(4);
    std::uniform_real_distribution<double> c(-100.0, 100.0);
    std::vector<Vec2> pts;
    for (int i = 0; i <= 12; ++i) pts.push_back({c(rng), c(rng)});
    const double dt = 0.7;
    const Trajectory t = trajectory_from_positions(0, pts, dt);
    ASSERT_EQ(t.velocities.size(), pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2 rebuilt = t.positions[i - 1] + t.velocities[i - 1] * dt;
        EXPECT_LE(distance(rebuilt, t.positions[i]), 1e-9 * std::max(1.0, t.positions[i].norm()));
    }
}

TEST(DeviationObjective, StraightPerpendicularAndOracle) {
    const Vec2 goal{10, 0};
    EXPECT_NEAR(deviation_objective(trajectory_from_positions(0, {{0, 0}, {5, 0}, {10, 0}}, 1.0), goal), 0.0, 1e-15);
    EXPECT_NEAR(deviation_objective(trajectory_from_positions(0, {{0, 0}, {0, 3}}, 1.0), goal), pi / 2, 1e-12);

    Rng rng(12);
    std::uniform_real_distribution<double> c(0.0, 50.0);
    std::vector<Vec2> pts;
    for (int i = 0; i <= 5; ++i) pts.push_back({c(rng), c(rng)});
    const Vec2 far_goal{80, 80};
    const Trajectory t = trajectory_from_positions(0, pts, 1.0);
    double expected = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double heading = std::atan2(pts[i].y - pts[i - 1].y, pts[i].x - pts[i - 1].x);
        const double bearing = std::atan2(far_goal.y - pts[i - 1].y, far_goal.x - pts[i - 1].x);
        double d = std::fmod(std::abs(heading - bearing), 2 * pi);
        expected += d > pi ? 2 * pi - d : d;
    }
    EXPECT_NEAR(deviation_objective(t, far_goal), expected, 1e-12);
}

TEST(Scenario, ValidationLevels) {
    auto sc = testing::head_on_pair();
    EXPECT_TRUE(sc.violations().empty());
    EXPECT_NO_THROW(sc.validate());

    auto close_goals = testing::make_scenario({{{0, 0}, {50, 50}}, {{100, 0}, {55, 50}}}, 20, 100.0);
    try {
        close_goals.validate();
        FAIL() << "expected ScenarioInfeasible";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScenarioInfeasible);
    }
    EXPECT_NO_THROW(close_goals.validate(SeparationCheck::Relaxed));

    auto unreachable = testing::make_scenario({{{0, 0}, {100, 0}, 5.0, 1.0}}, 20, 100.0);
    EXPECT_THROW(unreachable.validate(), Error);

    auto outside = testing::make_scenario({{{0, 0}, {150, 0}}}, 20, 100.0);
    try {
        outside.validate(SeparationCheck::Relaxed);
        FAIL() << "expected InvalidInput";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    }
}

}  // namespace
}  // namespace edc
