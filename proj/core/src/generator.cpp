#include "edcuav/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "edcuav/error.hpp"

namespace edc::io {
namespace {

class EndpointSampler {
public:
    EndpointSampler(double side, double sigma, Rng& rng) : side_(side), normal_(side / 2.0, sigma), rng_(rng) {}

    Vec2 draw() { return Vec2{coordinate(), coordinate()}; }

private:
    double coordinate() {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const double v = normal_(rng_);
            if (v >= 0.0 && v <= side_) return v;
        }
        return std::clamp(normal_(rng_), 0.0, side_);
    }

    double side_;
    std::normal_distribution<double> normal_;
    Rng& rng_;
};

}  // namespace

Scenario generate_scenario(const GenSpec& spec) {
    if (spec.num_uavs < 1 || !(spec.area_surface > 0.0) || !(spec.gps_error > 0.0) || !(spec.v_max > 0.0) ||
        !(spec.dt > 0.0) || spec.num_slots < 1 || !(spec.sigma_fraction > 0.0) || !(spec.reach_fraction > 0.0) ||
        spec.max_rejections < 0) {
        throw Error(ErrorCode::InvalidInput, "generation spec fields must be positive");
    }

    const double side = std::sqrt(spec.area_surface);
    const double reach = 2.0 * spec.gps_error;
    const double max_leg = spec.reach_fraction * spec.v_max * spec.num_slots * spec.dt;

    Rng rng(spec.seed);
    EndpointSampler sampler(side, side * spec.sigma_fraction, rng);
    std::uniform_real_distribution<double> energy(spec.energy_min, spec.energy_max);
    std::uniform_real_distribution<double> compute(spec.compute_min, spec.compute_max);

    Scenario sc;
    sc.area_width = side;
    sc.area_height = side;
    sc.dt = spec.dt;
    sc.num_slots = spec.num_slots;
    sc.seed = spec.seed;

    // Whole-candidate rejection: any conflict discards the full set of
    // endpoints, so the rejection count measures how over-packed the spec is.
    std::vector<Vec2> starts(static_cast<std::size_t>(spec.num_uavs));
    std::vector<Vec2> goals(static_cast<std::size_t>(spec.num_uavs));
    auto draw_candidate = [&] {
        for (int k = 0; k < spec.num_uavs; ++k) {
            const auto i = static_cast<std::size_t>(k);
            starts[i] = sampler.draw();
            goals[i] = sampler.draw();
        }
    };
    auto acceptable = [&] {
        for (std::size_t i = 0; i < starts.size(); ++i) {
            if (distance(goals[i], starts[i]) > max_leg) return false;
            if (!spec.endpoint_separation) continue;
            for (std::size_t j = 0; j < i; ++j) {
                if (!(distance(starts[i], starts[j]) > reach) || !(distance(goals[i], goals[j]) > reach)) return false;
            }
        }
        return true;
    };
    int rejections = 0;
    for (draw_candidate(); !acceptable(); draw_candidate()) {
        if (++rejections >= spec.max_rejections) {
            throw Error(ErrorCode::GenerationExhausted, "too many rejected endpoint sets; area too dense for the swarm");
        }
    }

    for (int k = 0; k < spec.num_uavs; ++k) {
        UavSpec u;
        u.id = k;
        u.start = starts[static_cast<std::size_t>(k)];
        u.goal = goals[static_cast<std::size_t>(k)];
        u.gps_error_radius = spec.gps_error;
        u.v_max = spec.v_max;
        u.energy = energy(rng);
        u.compute_capacity = compute(rng);
        sc.uavs.push_back(u);
    }
    return sc;
}

}  // namespace edc::io
