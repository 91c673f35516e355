#pragma once

#include <initializer_list>

#include "edcuav/scenario.hpp"

namespace edc::testing {

struct UavSketch {
    Vec2 start;
    Vec2 goal;
    double radius = 5.0;
    double v_max = 10.0;
    double energy = 100.0;
    double compute = 1e9;
};

inline Scenario make_scenario(std::initializer_list<UavSketch> uavs, int num_slots = 20, double area = 200.0,
                              double dt = 1.0) {
    Scenario sc;
    sc.area_width = area;
    sc.area_height = area;
    sc.dt = dt;
    sc.num_slots = num_slots;
    int id = 0;
    for (const auto& u : uavs) {
        sc.uavs.push_back(UavSpec{id++, u.start, u.goal, u.radius, u.v_max, u.energy, u.compute});
    }
    return sc;
}

/// A (0,0) -> (100,0) and B (100,0) -> (0,0), r = 5, F = 20, v_max = 10.
inline Scenario head_on_pair() {
    return make_scenario({{{0, 0}, {100, 0}}, {{100, 0}, {0, 0}}}, 20, 100.0);
}

/// Two straight lines crossing at (50,50) at the middle slot.
inline Scenario crossing_pair() {
    return make_scenario({{{0, 0}, {100, 100}, 5.0, 20.0}, {{100, 0}, {0, 100}, 5.0, 20.0}}, 10, 100.0);
}

}  // namespace edc::testing
