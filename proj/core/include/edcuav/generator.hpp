#pragma once

#include <cstdint>

#include "edcuav/scenario.hpp"

namespace edc::io {

/// Random scenario recipe. Start and goal points follow a normal
/// distribution centred on a square area of the given surface, truncated to
/// the area.
struct GenSpec {
    int num_uavs = 10;
    double area_surface = 10000.0;  // m^2, side = sqrt(surface)
    double gps_error = 5.0;         // meters, shared by all UAVs
    double v_max = 30.0;
    double dt = 1.0;
    int num_slots = 20;
    std::uint64_t seed = 0;

    double sigma_fraction = 0.25;  // sigma = side * sigma_fraction
    bool endpoint_separation = true;
    // Start-goal distance must not exceed this fraction of v_max * F * dt,
    // leaving the planner room for detours.
    double reach_fraction = 0.9;
    int max_rejections = 10000;

    double energy_min = 100.0;
    double energy_max = 1000.0;
    double compute_min = 1e8;
    double compute_max = 1e9;
};

/// Deterministic for a fixed spec. Throws InvalidInput for a bad spec and
/// GenerationExhausted once max_rejections draws have been rejected.
Scenario generate_scenario(const GenSpec& spec);

}  // namespace edc::io
