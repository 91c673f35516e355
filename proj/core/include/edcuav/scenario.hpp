#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edcuav/geometry.hpp"

namespace edc {

struct UavSpec {
    int id = 0;
    Vec2 start;
    Vec2 goal;
    double gps_error_radius = 1.0;  // meters, > 0
    double v_max = 1.0;             // meters/second, > 0
    double energy = 0.0;            // joules, >= 0
    double compute_capacity = 1.0;  // operations/second, > 0

    friend bool operator==(const UavSpec&, const UavSpec&) = default;
};

// Which scenario invariants to enforce. Planning needs the full set; the
// no-avoidance baseline only needs a well-formed area and swarm.
enum class SeparationCheck { Required, Relaxed };

struct Scenario {
    double area_width = 0.0;
    double area_height = 0.0;
    double dt = 1.0;
    int num_slots = 1;
    std::vector<UavSpec> uavs;
    std::uint64_t seed = 0;

    int num_uavs() const { return static_cast<int>(uavs.size()); }

    /// Human-readable list of violated invariants; empty when valid.
    std::vector<std::string> violations(SeparationCheck check = SeparationCheck::Required) const;

    /// Throws InvalidInput for malformed fields, ScenarioInfeasible for
    /// separation/reachability violations.
    void validate(SeparationCheck check = SeparationCheck::Required) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// positions.size() == velocities.size() + 1; velocities[t - 1] carries the UAV
/// from positions[t - 1] to positions[t].
struct Trajectory {
    int uav_id = 0;
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;

    int num_steps() const { return static_cast<int>(velocities.size()); }
};

struct SolverStats {
    long iterations = 0;
    int qp_solves = 0;
    int outer_iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double solver_objective = 0.0;  // solver objective plus the dropped constant
    double wall_time_s = 0.0;
};

struct SwarmPlan {
    int first_slot = 0;  // absolute slot index of positions[0]
    double dt = 1.0;
    std::vector<Trajectory> trajectories;
    double objective_value = 0.0;  // sum of squared per-slot displacements
    SolverStats solver_stats;

    int num_steps() const { return trajectories.empty() ? 0 : trajectories.front().num_steps(); }
};

/// Builds a trajectory from positions; velocities are finite differences.
Trajectory trajectory_from_positions(int uav_id, std::vector<Vec2> positions, double dt);

/// Sum over slots of squared displacement, for every trajectory.
double squared_path_objective(const SwarmPlan& plan);

double traveled_distance(const Trajectory& traj);

/// Default endpoint tolerance for extra_distance.
inline constexpr double kVerifyEps = 1e-4;

/// Path length minus the start-goal chord. Throws EndpointMismatch when the
/// trajectory does not start at spec.start and end at spec.goal within eps.
double extra_distance(const Trajectory& traj, const UavSpec& spec, double eps = kVerifyEps);

/// Diagnostic: total angular deviation of the heading from the goal bearing.
double deviation_objective(const Trajectory& traj, const Vec2& goal);

}  // namespace edc
