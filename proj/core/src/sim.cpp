#include "edcuav/sim.hpp"

#include <chrono>
#include <set>
#include <utility>

namespace edc::sim {
namespace {

std::vector<double> radii_of(const Scenario& scenario) {
    std::vector<double> radii;
    for (const auto& u : scenario.uavs) radii.push_back(u.gps_error_radius);
    return radii;
}

std::vector<UavState> initial_states(const Scenario& scenario, Rng& rng) {
    std::vector<UavState> states;
    for (const auto& u : scenario.uavs) {
        states.push_back(UavState{u.start, sample_true_position(u.start, u.gps_error_radius, rng), Vec2{}, 0});
    }
    return states;
}

void record_slot(MissionLog& log, std::vector<UavState> states, int slot) {
    auto events = overlaps_at(slot, states, log.radii);
    log.overlaps.insert(log.overlaps.end(), events.begin(), events.end());
    log.slots.push_back(std::move(states));
}

bool at_goals(const MissionLog& log, const Scenario& scenario, double tolerance) {
    if (log.logged_slots() != scenario.num_slots + 1) return false;
    const auto& last = log.slots.back();
    for (std::size_t k = 0; k < last.size(); ++k) {
        if (distance(last[k].reported_pos, scenario.uavs[k].goal) > tolerance) return false;
    }
    return true;
}

}  // namespace

const char* to_string(ChStrategy strategy) {
    switch (strategy) {
        case ChStrategy::MaxEnergy: return "max-energy";
        case ChStrategy::MinResponseTime: return "min-response";
    }
    return "unknown";
}

int elect_cluster_head(std::span<const UavSpec> uavs, ChStrategy strategy) {
    if (uavs.empty()) throw Error(ErrorCode::EmptySwarm, "cannot elect a cluster head in an empty swarm");
    auto score = [strategy](const UavSpec& u) {
        return strategy == ChStrategy::MaxEnergy ? u.energy : u.compute_capacity;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < uavs.size(); ++i) {
        const double s = score(uavs[i]);
        const double b = score(uavs[best]);
        if (s > b || (s == b && uavs[i].id < uavs[best].id)) best = i;
    }
    return uavs[best].id;
}

std::vector<OverlapEvent> overlaps_at(int slot, std::span<const UavState> states, std::span<const double> radii) {
    std::vector<OverlapEvent> events;
    for (std::size_t k = 0; k < states.size(); ++k) {
        for (std::size_t l = k + 1; l < states.size(); ++l) {
            if (disc_overlap(SafetyDisc{states[k].reported_pos, radii[k]}, SafetyDisc{states[l].reported_pos, radii[l]})) {
                events.push_back(OverlapEvent{slot, static_cast<int>(k), static_cast<int>(l)});
            }
        }
    }
    return events;
}

MissionLog run_mission(const Scenario& scenario, planner::SeparationMode mode, ChStrategy strategy, Rng& rng,
                       const MissionConfig& config) {
    scenario.validate(SeparationCheck::Required);

    MissionLog log;
    log.dt = scenario.dt;
    log.radii = radii_of(scenario);
    log.cluster_head = elect_cluster_head(scenario.uavs, strategy);
    record_slot(log, initial_states(scenario, rng), 0);

    const int K = scenario.num_uavs();
    std::optional<SwarmPlan> previous;
    for (int t = 0; t < scenario.num_slots; ++t) {
        const auto& current = log.slots.back();

        planner::PlanRequest request;
        request.scenario = scenario;
        request.mode = mode;
        request.horizon = config.horizon;
        request.start_slot = t;
        request.safety_margin = config.safety_margin;
        for (const auto& s : current) request.current_positions.push_back(s.reported_pos);
        // The remainder of the last plan is reused as the reference when it
        // still covers the new window.
        if (previous && previous->first_slot + previous->num_steps() >=
                            (config.horizon.kind == planner::Horizon::Kind::Full
                                 ? scenario.num_slots
                                 : std::min(scenario.num_slots, t + config.horizon.window))) {
            request.reference = std::move(previous);
        }
        previous.reset();

        const auto t0 = std::chrono::steady_clock::now();
        SwarmPlan next;
        try {
            next = planner::plan(request, config.scp, config.solver);
        } catch (const Error& e) {
            log.planning_time_s.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            log.failure = e.code();
            log.completed = false;
            return log;
        }
        log.planning_time_s.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

        std::vector<UavState> states;
        states.reserve(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            const auto& traj = next.trajectories[static_cast<std::size_t>(k)];
            const Vec2 commanded = traj.positions[1];
            const Vec2 velocity = (commanded - current[static_cast<std::size_t>(k)].reported_pos) / scenario.dt;
            const Vec2 reported = current[static_cast<std::size_t>(k)].reported_pos + velocity * scenario.dt;
            states.push_back(UavState{reported, sample_true_position(reported, log.radii[static_cast<std::size_t>(k)], rng),
                                      velocity, t + 1});
        }
        record_slot(log, std::move(states), t + 1);
        previous = std::move(next);
    }
    log.completed = at_goals(log, scenario, config.goal_tolerance);
    return log;
}

MissionLog run_baseline(const Scenario& scenario, Rng& rng) {
    scenario.validate(SeparationCheck::Relaxed);

    MissionLog log;
    log.dt = scenario.dt;
    log.radii = radii_of(scenario);
    log.cluster_head = elect_cluster_head(scenario.uavs, ChStrategy::MaxEnergy);
    record_slot(log, initial_states(scenario, rng), 0);

    const SwarmPlan straight = planner::straight_line_reference(scenario);
    for (int t = 1; t <= scenario.num_slots; ++t) {
        std::vector<UavState> states;
        for (int k = 0; k < scenario.num_uavs(); ++k) {
            const auto& traj = straight.trajectories[static_cast<std::size_t>(k)];
            const Vec2 reported = traj.positions[static_cast<std::size_t>(t)];
            states.push_back(UavState{reported, sample_true_position(reported, log.radii[static_cast<std::size_t>(k)], rng),
                                      traj.velocities[static_cast<std::size_t>(t - 1)], t});
        }
        log.planning_time_s.push_back(0.0);
        record_slot(log, std::move(states), t);
    }
    log.completed = true;
    return log;
}

OverlapCount count_overlap_events(const MissionLog& log) {
    OverlapCount count;
    std::set<std::pair<int, int>> pairs;
    for (int t = 0; t < log.logged_slots(); ++t) {
        for (const auto& e : overlaps_at(t, log.slots[static_cast<std::size_t>(t)], log.radii)) {
            ++count.pair_slot_events;
            pairs.emplace(e.first, e.second);
        }
    }
    count.distinct_pairs = static_cast<long>(pairs.size());
    return count;
}

SwarmPlan executed_plan(const MissionLog& log) {
    SwarmPlan plan;
    plan.dt = log.dt;
    const std::size_t K = log.radii.size();
    for (std::size_t k = 0; k < K; ++k) {
        Trajectory traj;
        traj.uav_id = static_cast<int>(k);
        for (std::size_t t = 0; t < log.slots.size(); ++t) {
            traj.positions.push_back(log.slots[t][k].reported_pos);
            if (t > 0) traj.velocities.push_back(log.slots[t][k].velocity);
        }
        plan.trajectories.push_back(std::move(traj));
    }
    plan.objective_value = squared_path_objective(plan);
    return plan;
}

}  // namespace edc::sim
