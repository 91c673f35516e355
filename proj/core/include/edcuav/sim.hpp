#pragma once

#include <optional>
#include <span>
#include <vector>

#include "edcuav/error.hpp"
#include "edcuav/planner.hpp"
#include "edcuav/scenario.hpp"

namespace edc::sim {

/// Cluster-head election rule.
enum class ChStrategy { MaxEnergy, MinResponseTime };

const char* to_string(ChStrategy strategy);

struct UavState {
    Vec2 reported_pos;  // GPS reading, the frame the cluster head plans in
    Vec2 true_pos;      // somewhere in the error disc around the reading
    Vec2 velocity;      // commanded velocity that produced reported_pos
    int slot = 0;
};

struct OverlapEvent {
    int slot = 0;
    int first = 0;  // first < second
    int second = 0;

    friend bool operator==(const OverlapEvent&, const OverlapEvent&) = default;
};

struct MissionLog {
    double dt = 1.0;
    std::vector<double> radii;                // per UAV, copied from the scenario
    std::vector<std::vector<UavState>> slots;  // slots[t][k], t = 0..last logged slot
    std::vector<double> planning_time_s;       // per planning step, t = 0..F-1
    std::vector<OverlapEvent> overlaps;
    int cluster_head = 0;
    bool completed = false;
    std::optional<ErrorCode> failure;

    int logged_slots() const { return static_cast<int>(slots.size()); }
};

struct MissionConfig {
    planner::Horizon horizon = planner::Horizon::full();
    planner::ScpSettings scp;
    qp::Settings solver;
    double safety_margin = 1e-3;
    double goal_tolerance = 0.5;  // meters
};

/// Highest energy (MaxEnergy) or highest compute capacity (MinResponseTime);
/// ties go to the lowest id. Throws EmptySwarm.
int elect_cluster_head(std::span<const UavSpec> uavs, ChStrategy strategy);

/// Time-slotted mission: at every slot before the last, the cluster head
/// replans from the current GPS readings and commands the next positions.
/// Throws ScenarioInfeasible when the scenario fails its invariants; later
/// planner failures end the log early with completed = false.
MissionLog run_mission(const Scenario& scenario, planner::SeparationMode mode, ChStrategy strategy, Rng& rng,
                       const MissionConfig& config = {});

/// Every UAV flies its straight line at constant speed; no planning.
MissionLog run_baseline(const Scenario& scenario, Rng& rng);

/// Overlapping reported discs at one slot, as (slot, pair) events.
std::vector<OverlapEvent> overlaps_at(int slot, std::span<const UavState> states, std::span<const double> radii);

struct OverlapCount {
    long pair_slot_events = 0;
    long distinct_pairs = 0;

    friend bool operator==(const OverlapCount&, const OverlapCount&) = default;
};

/// Recounts overlaps from the logged reported positions.
OverlapCount count_overlap_events(const MissionLog& log);

/// Reported positions and commanded velocities of the log, as a plan.
SwarmPlan executed_plan(const MissionLog& log);

}  // namespace edc::sim
