#include "edcuav/geometry.hpp"

#include <numbers>

#include "edcuav/error.hpp"

namespace edc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::EndpointMismatch: return "EndpointMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MissingReference: return "MissingReference";
        case ErrorCode::DegenerateReferencePair: return "DegenerateReferencePair";
        case ErrorCode::ScenarioInfeasible: return "ScenarioInfeasible";
        case ErrorCode::SolverFailure: return "SolverFailure";
        case ErrorCode::EmptySwarm: return "EmptySwarm";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::GenerationExhausted: return "GenerationExhausted";
        case ErrorCode::MismatchedLog: return "MismatchedLog";
    }
    return "Unknown";
}

bool disc_overlap(const SafetyDisc& a, const SafetyDisc& b) {
    // Compare squared quantities so that exact tangency (e.g. 6-8-10) is not
    // lost to a rounded square root.
    const double reach = a.radius + b.radius;
    return (a.center - b.center).squared_norm() < reach * reach;
}

double heading_angle(const Vec2& v) {
    if (v.x == 0.0 && v.y == 0.0) return 0.0;
    const double angle = std::atan2(v.y, v.x);
    // atan2 yields -pi for (negative, -0.0); fold onto the closed upper end.
    return angle == -std::numbers::pi ? std::numbers::pi : angle;
}

double bearing_to_goal(const Vec2& pos, const Vec2& goal) {
    if (pos == goal) {
        throw Error(ErrorCode::CoincidentPoints, "bearing undefined: position equals goal");
    }
    return heading_angle(goal - pos);
}

PolarVelocity recover_polar(const Vec2& v) {
    return PolarVelocity{v.norm(), heading_angle(v)};
}

double angular_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    if (d > std::numbers::pi) d = 2.0 * std::numbers::pi - d;
    return d;
}

Vec2 sample_true_position(const Vec2& reported, double radius, Rng& rng) {
    if (radius <= 0.0) return reported;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Radial CDF of the uniform disc is (rho / radius)^2.
    const double rho = radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    return reported + Vec2{rho * std::cos(phi), rho * std::sin(phi)};
}

}  // namespace edc
