#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edcuav/csv.hpp"
#include "edcuav/error.hpp"
#include "edcuav/generator.hpp"
#include "edcuav/planner.hpp"
#include "edcuav/scenario.hpp"
#include "edcuav/sim.hpp"

namespace edc::metrics {

struct RunMetrics {
    long pair_slot_collisions = 0;
    long distinct_pair_collisions = 0;
    double mean_extra_distance = 0.0;   // meters, over UAVs
    double total_extra_distance = 0.0;  // meters
    double total_planning_time_s = 0.0;
    bool completed = false;
};

/// Collision counts, extra distance and planning time of one mission.
/// Extra distances are only measured on completed logs (zero otherwise).
/// Throws MismatchedLog when the log does not belong to the scenario.
RunMetrics measure(const sim::MissionLog& log, const Scenario& scenario);

enum class SweepParam { NumUavs, AreaSurface, GpsError };

/// CLI spelling: "uavs", "area", "gps-error".
const char* to_string(SweepParam param);
std::optional<SweepParam> parse_sweep_param(std::string_view text);

struct FixedParams {
    int num_uavs = 50;
    double area_surface = 10000.0;
    double gps_error = 5.0;
    double dt = 1.0;
    int num_slots = 20;
    double v_max = 30.0;
};

struct SweepSpec {
    SweepParam param = SweepParam::NumUavs;
    std::vector<double> values;
    FixedParams fixed;
    int runs_per_point = 30;
    std::optional<planner::SeparationMode> mode;  // empty: straight-line baseline
    std::uint64_t base_seed = 0;
    bool endpoint_separation = true;
    double sigma_fraction = 0.25;
    sim::ChStrategy strategy = sim::ChStrategy::MaxEnergy;
    sim::MissionConfig mission;
    int threads = 0;  // 0: EDCUAV_THREADS, else hardware concurrency

    /// Throws InvalidInput unless values are non-empty, finite and strictly
    /// increasing and runs_per_point >= 1.
    void validate() const;
};

/// Scenario generation recipe for one sweep run.
io::GenSpec run_gen_spec(const SweepSpec& spec, int value_index, int run_index);

/// Seed of a run, mixed from (base_seed, value index, run index).
std::uint64_t run_seed(std::uint64_t base_seed, int value_index, int run_index);

struct RunRecord {
    int value_index = 0;
    int run_index = 0;
    double value = 0.0;
    RunMetrics metrics;
    std::optional<ErrorCode> failure;  // generation or planning error
};

/// Generates and executes one run. Never throws for per-run failures; they
/// are recorded in the returned record.
RunRecord execute_run(const SweepSpec& spec, int value_index, int run_index);

struct FieldSummary {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for fewer than two runs
};

struct PointSummary {
    double value = 0.0;
    int completed_runs = 0;
    int incomplete_runs = 0;
    FieldSummary pair_slot_collisions;
    FieldSummary distinct_pair_collisions;
    FieldSummary mean_extra_distance;
    FieldSummary total_extra_distance;
    FieldSummary total_planning_time_s;
};

struct SweepResult {
    SweepParam param = SweepParam::NumUavs;
    std::vector<RunRecord> runs;  // sorted by (value index, run index)
    std::vector<PointSummary> points;
    int incomplete_runs = 0;
};

/// Per-value statistics over the completed runs. The input order does not
/// matter; records are grouped by value index.
std::vector<PointSummary> aggregate(std::span<const RunRecord> runs, std::span<const double> values);

/// Runs every (value, run) pair, possibly concurrently, then aggregates.
SweepResult sweep(const SweepSpec& spec);

/// Thread count for sweeps: EDCUAV_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
int default_sweep_threads();

/// Raw rows in (value, run) order followed by one aggregate row per value.
std::vector<io::MetricsRow> metrics_rows(const SweepResult& result);

/// Groups parsed metrics rows back into per-value summaries, recomputing the
/// statistics from the raw (non-aggregate) rows.
struct SeriesPoint {
    double value = 0.0;
    int completed_runs = 0;
    FieldSummary pair_slot_collisions;
    FieldSummary distinct_pair_collisions;
    FieldSummary mean_extra_distance;
    FieldSummary total_planning_time_s;
};
std::vector<SeriesPoint> summarize_rows(std::span<const io::MetricsRow> rows);

enum class TrendModel { Linear, Quadratic };

struct TrendFit {
    std::vector<double> coefficients;  // leading (highest degree) first
    double r_squared = 0.0;
};

/// Least-squares polynomial fit. R^2 = 1 - SS_res / SS_tot, defined as 1 when
/// SS_tot is zero. Throws InsufficientPoints for fewer than 3 (Linear) or
/// 4 (Quadratic) points and DimensionMismatch for unequal lengths.
TrendFit fit_trend(std::span<const double> xs, std::span<const double> ys, TrendModel model);

}  // namespace edc::metrics
