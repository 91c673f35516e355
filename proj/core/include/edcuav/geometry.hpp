#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace edc {

using Rng = std::mt19937_64;

/// Planar vector in meters (positions) or meters/second (velocities).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return Vec2{a.x / s, a.y / s}; }
    friend constexpr Vec2 operator-(const Vec2& a) { return Vec2{-a.x, -a.y}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Error disc of a GPS reading: the UAV is somewhere inside.
struct SafetyDisc {
    Vec2 center;
    double radius = 0.0;
};

/// Strict overlap: discs that are exactly tangent do not overlap.
bool disc_overlap(const SafetyDisc& a, const SafetyDisc& b);

/// Angle of v against the x-axis in (-pi, pi]; 0 for the zero vector.
double heading_angle(const Vec2& v);

/// Angle of the vector pointing from pos to goal. Throws CoincidentPoints when pos == goal.
double bearing_to_goal(const Vec2& pos, const Vec2& goal);

struct PolarVelocity {
    double speed = 0.0;
    double angle = 0.0;
};

PolarVelocity recover_polar(const Vec2& v);

/// Minimal absolute angular distance between two angles, in [0, pi].
double angular_distance(double a, double b);

/// Uniform draw from the closed disc of the given radius around reported.
Vec2 sample_true_position(const Vec2& reported, double radius, Rng& rng);

}  // namespace edc
