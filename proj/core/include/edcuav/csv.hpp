#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edcuav/scenario.hpp"

namespace edc::io {

/// Rounds to the 6-decimal grid used by every CSV column.
double quantize(double value);

/// One trajectory sample: run_id, uav_id, slot, x, y, vx, vy. At slot 0 the
/// velocity columns are zero.
struct TrajectoryRow {
    std::string run_id;
    int uav_id = 0;
    int slot = 0;
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;

    friend bool operator==(const TrajectoryRow&, const TrajectoryRow&) = default;
};

/// Rows for every UAV and slot of a plan, values already quantized.
std::vector<TrajectoryRow> trajectory_rows(std::string_view run_id, const SwarmPlan& plan);

std::string write_trajectory_csv(std::span<const TrajectoryRow> rows);
std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text);

/// Per-run metrics row. Aggregate rows use run_id "mean"; their completed
/// column counts the completed runs at that value.
struct MetricsRow {
    std::string run_id;
    std::string swept_param;
    double value = 0.0;
    double pair_slot_collisions = 0.0;
    double distinct_pair_collisions = 0.0;
    double mean_extra_distance = 0.0;
    double total_planning_time_s = 0.0;
    int completed = 0;

    bool is_aggregate() const { return run_id == kAggregateRunId; }
    static constexpr std::string_view kAggregateRunId = "mean";

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// Copy with every numeric column on the 6-decimal grid.
MetricsRow quantized(MetricsRow row);

std::string write_metrics_csv(std::span<const MetricsRow> rows);
std::vector<MetricsRow> parse_metrics_csv(std::string_view text);

/// Same CSV with the wall-time column blanked, for reproducibility checks.
std::string strip_wall_time(std::string_view metrics_csv);

}  // namespace edc::io
