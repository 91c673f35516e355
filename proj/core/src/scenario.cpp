#include "edcuav/scenario.hpp"

#include <cmath>
#include <sstream>

#include "edcuav/error.hpp"

namespace edc {
namespace {

bool inside_area(const Vec2& p, double width, double height) {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
}

template <typename... Args>
std::string concat(const Args&... args) {
    std::ostringstream out;
    (out << ... << args);
    return out.str();
}

std::vector<std::string> malformed_fields(const Scenario& s) {
    std::vector<std::string> out;
    if (!(std::isfinite(s.area_width) && s.area_width > 0.0) ||
        !(std::isfinite(s.area_height) && s.area_height > 0.0)) {
        out.push_back("area dimensions must be positive and finite");
    }
    if (!(std::isfinite(s.dt) && s.dt > 0.0)) out.push_back("dt must be positive");
    if (s.num_slots < 1) out.push_back("num_slots must be >= 1");
    if (s.uavs.empty()) out.push_back("swarm must contain at least one UAV");
    for (std::size_t i = 0; i < s.uavs.size(); ++i) {
        const UavSpec& u = s.uavs[i];
        if (u.id != static_cast<int>(i)) out.push_back(concat("uav ", i, ": id must equal its index"));
        if (!u.start.is_finite() || !u.goal.is_finite()) {
            out.push_back(concat("uav ", i, ": non-finite coordinates"));
        } else {
            if (!inside_area(u.start, s.area_width, s.area_height)) out.push_back(concat("uav ", i, ": start outside area"));
            if (!inside_area(u.goal, s.area_width, s.area_height)) out.push_back(concat("uav ", i, ": goal outside area"));
        }
        if (!(std::isfinite(u.gps_error_radius) && u.gps_error_radius > 0.0)) out.push_back(concat("uav ", i, ": gps_error_radius must be > 0"));
        if (!(std::isfinite(u.v_max) && u.v_max > 0.0)) out.push_back(concat("uav ", i, ": v_max must be > 0"));
        if (!(std::isfinite(u.energy) && u.energy >= 0.0)) out.push_back(concat("uav ", i, ": energy must be >= 0"));
        if (!(std::isfinite(u.compute_capacity) && u.compute_capacity > 0.0)) out.push_back(concat("uav ", i, ": compute_capacity must be > 0"));
    }
    return out;
}

std::vector<std::string> feasibility_violations(const Scenario& s) {
    std::vector<std::string> out;
    const double horizon = s.dt * s.num_slots;
    for (std::size_t k = 0; k < s.uavs.size(); ++k) {
        const UavSpec& a = s.uavs[k];
        if (distance(a.goal, a.start) > a.v_max * horizon) {
            out.push_back(concat("uav ", k, ": goal unreachable within mission time"));
        }
        for (std::size_t l = k + 1; l < s.uavs.size(); ++l) {
            const UavSpec& b = s.uavs[l];
            const double safety = a.gps_error_radius + b.gps_error_radius;
            if (!(distance(a.start, b.start) > safety)) out.push_back(concat("uavs ", k, ",", l, ": start discs overlap"));
            if (!(distance(a.goal, b.goal) > safety)) out.push_back(concat("uavs ", k, ",", l, ": goal discs overlap"));
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += "; ";
        out += item;
    }
    return out;
}

}  // namespace

std::vector<std::string> Scenario::violations(SeparationCheck check) const {
    auto out = malformed_fields(*this);
    if (out.empty() && check == SeparationCheck::Required) out = feasibility_violations(*this);
    return out;
}

void Scenario::validate(SeparationCheck check) const {
    if (auto bad = malformed_fields(*this); !bad.empty()) {
        throw Error(ErrorCode::InvalidInput, join(bad));
    }
    if (check == SeparationCheck::Required) {
        if (auto bad = feasibility_violations(*this); !bad.empty()) {
            throw Error(ErrorCode::ScenarioInfeasible, join(bad));
        }
    }
}

Trajectory trajectory_from_positions(int uav_id, std::vector<Vec2> positions, double dt) {
    Trajectory traj;
    traj.uav_id = uav_id;
    traj.velocities.reserve(positions.empty() ? 0 : positions.size() - 1);
    for (std::size_t t = 1; t < positions.size(); ++t) {
        traj.velocities.push_back((positions[t] - positions[t - 1]) / dt);
    }
    traj.positions = std::move(positions);
    return traj;
}

double squared_path_objective(const SwarmPlan& plan) {
    double total = 0.0;
    for (const auto& traj : plan.trajectories) {
        for (std::size_t t = 1; t < traj.positions.size(); ++t) {
            total += (traj.positions[t] - traj.positions[t - 1]).squared_norm();
        }
    }
    return total;
}

double traveled_distance(const Trajectory& traj) {
    double total = 0.0;
    for (std::size_t t = 1; t < traj.positions.size(); ++t) {
        total += distance(traj.positions[t], traj.positions[t - 1]);
    }
    return total;
}

double extra_distance(const Trajectory& traj, const UavSpec& spec, double eps) {
    if (traj.positions.empty() || distance(traj.positions.front(), spec.start) > eps ||
        distance(traj.positions.back(), spec.goal) > eps) {
        throw Error(ErrorCode::EndpointMismatch,
                    concat("trajectory of uav ", spec.id, " does not connect its start and goal"));
    }
    return traveled_distance(traj) - distance(spec.goal, spec.start);
}

double deviation_objective(const Trajectory& traj, const Vec2& goal) {
    double total = 0.0;
    for (std::size_t t = 0; t < traj.velocities.size(); ++t) {
        const Vec2& v = traj.velocities[t];
        if (v.x == 0.0 && v.y == 0.0) continue;
        total += angular_distance(heading_angle(v), bearing_to_goal(traj.positions[t], goal));
    }
    return total;
}

}  // namespace edc
