#include "edcuav/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

#include "edcuav/generator.hpp"

namespace edc::metrics {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

FieldSummary summarize(const std::vector<double>& xs) {
    FieldSummary s;
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

// Completed missions end inside the goal tolerance of the simulator.
double goal_tolerance() { return std::max(kVerifyEps, sim::MissionConfig{}.goal_tolerance); }

void check_log(const sim::MissionLog& log, const Scenario& scenario) {
    const std::size_t k = scenario.uavs.size();
    if (log.radii.size() != k || log.slots.empty() || log.logged_slots() > scenario.num_slots + 1) {
        throw Error(ErrorCode::MismatchedLog, "mission log shape does not match the scenario");
    }
    for (const auto& states : log.slots) {
        if (states.size() != k) throw Error(ErrorCode::MismatchedLog, "mission log slot has the wrong UAV count");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (log.radii[i] != scenario.uavs[i].gps_error_radius ||
            distance(log.slots.front()[i].reported_pos, scenario.uavs[i].start) > kVerifyEps) {
            throw Error(ErrorCode::MismatchedLog, "mission log does not start from the scenario");
        }
        if (log.completed && distance(log.slots.back()[i].reported_pos, scenario.uavs[i].goal) > goal_tolerance()) {
            throw Error(ErrorCode::MismatchedLog, "completed mission log does not end at the scenario goals");
        }
    }
}

}  // namespace

RunMetrics measure(const sim::MissionLog& log, const Scenario& scenario) {
    check_log(log, scenario);
    RunMetrics m;
    const auto counts = sim::count_overlap_events(log);
    m.pair_slot_collisions = counts.pair_slot_events;
    m.distinct_pair_collisions = counts.distinct_pairs;
    for (double t : log.planning_time_s) m.total_planning_time_s += t;
    m.completed = log.completed;
    if (log.completed) {
        const double tolerance = goal_tolerance();
        const SwarmPlan executed = sim::executed_plan(log);
        for (std::size_t i = 0; i < scenario.uavs.size(); ++i) {
            m.total_extra_distance += extra_distance(executed.trajectories[i], scenario.uavs[i], tolerance);
        }
        m.mean_extra_distance = m.total_extra_distance / static_cast<double>(scenario.uavs.size());
    }
    return m;
}

const char* to_string(SweepParam param) {
    switch (param) {
        case SweepParam::NumUavs: return "uavs";
        case SweepParam::AreaSurface: return "area";
        case SweepParam::GpsError: return "gps-error";
    }
    return "?";
}

std::optional<SweepParam> parse_sweep_param(std::string_view text) {
    for (auto p : {SweepParam::NumUavs, SweepParam::AreaSurface, SweepParam::GpsError}) {
        if (text == to_string(p)) return p;
    }
    return std::nullopt;
}

void SweepSpec::validate() const {
    if (values.empty()) throw Error(ErrorCode::InvalidInput, "sweep needs at least one value");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || !(values[i] > 0.0)) {
            throw Error(ErrorCode::InvalidInput, "sweep values must be positive and finite");
        }
        if (i > 0 && !(values[i] > values[i - 1])) {
            throw Error(ErrorCode::InvalidInput, "sweep values must be strictly increasing");
        }
        if (param == SweepParam::NumUavs && values[i] != std::floor(values[i])) {
            throw Error(ErrorCode::InvalidInput, "UAV counts must be integers");
        }
    }
    if (runs_per_point < 1) throw Error(ErrorCode::InvalidInput, "runs per point must be at least 1");
}

std::uint64_t run_seed(std::uint64_t base_seed, int value_index, int run_index) {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(value_index));
    return splitmix64(h ^ static_cast<std::uint64_t>(run_index));
}

io::GenSpec run_gen_spec(const SweepSpec& spec, int value_index, int run_index) {
    io::GenSpec g;
    g.num_uavs = spec.fixed.num_uavs;
    g.area_surface = spec.fixed.area_surface;
    g.gps_error = spec.fixed.gps_error;
    g.v_max = spec.fixed.v_max;
    g.dt = spec.fixed.dt;
    g.num_slots = spec.fixed.num_slots;
    g.sigma_fraction = spec.sigma_fraction;
    g.endpoint_separation = spec.endpoint_separation;
    g.seed = run_seed(spec.base_seed, value_index, run_index);

    const double value = spec.values.at(static_cast<std::size_t>(value_index));
    switch (spec.param) {
        case SweepParam::NumUavs: g.num_uavs = static_cast<int>(value); break;
        case SweepParam::AreaSurface: g.area_surface = value; break;
        case SweepParam::GpsError: g.gps_error = value; break;
    }
    return g;
}

RunRecord execute_run(const SweepSpec& spec, int value_index, int run_index) {
    RunRecord rec;
    rec.value_index = value_index;
    rec.run_index = run_index;
    rec.value = spec.values.at(static_cast<std::size_t>(value_index));
    try {
        const io::GenSpec gen = run_gen_spec(spec, value_index, run_index);
        const Scenario scenario = io::generate_scenario(gen);
        Rng rng(splitmix64(gen.seed ^ 0x5eedULL));
        const sim::MissionLog log = spec.mode ? sim::run_mission(scenario, *spec.mode, spec.strategy, rng, spec.mission)
                                              : sim::run_baseline(scenario, rng);
        rec.metrics = measure(log, scenario);
        if (log.failure) rec.failure = log.failure;
    } catch (const Error& e) {
        rec.failure = e.code();
        rec.metrics = RunMetrics{};
    }
    return rec;
}

std::vector<PointSummary> aggregate(std::span<const RunRecord> runs, std::span<const double> values) {
    std::vector<const RunRecord*> sorted;
    for (const auto& r : runs) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
        return std::tie(a->value_index, a->run_index) < std::tie(b->value_index, b->run_index);
    });

    std::vector<PointSummary> points(values.size());
    for (std::size_t v = 0; v < values.size(); ++v) {
        std::vector<double> ps, dp, me, te, pt;
        PointSummary& point = points[v];
        point.value = values[v];
        for (const RunRecord* r : sorted) {
            if (r->value_index != static_cast<int>(v)) continue;
            if (!r->metrics.completed || r->failure) {
                ++point.incomplete_runs;
                continue;
            }
            ++point.completed_runs;
            ps.push_back(static_cast<double>(r->metrics.pair_slot_collisions));
            dp.push_back(static_cast<double>(r->metrics.distinct_pair_collisions));
            me.push_back(r->metrics.mean_extra_distance);
            te.push_back(r->metrics.total_extra_distance);
            pt.push_back(r->metrics.total_planning_time_s);
        }
        point.pair_slot_collisions = summarize(ps);
        point.distinct_pair_collisions = summarize(dp);
        point.mean_extra_distance = summarize(me);
        point.total_extra_distance = summarize(te);
        point.total_planning_time_s = summarize(pt);
    }
    return points;
}

int default_sweep_threads() {
    if (const char* env = std::getenv("EDCUAV_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    const int num_values = static_cast<int>(spec.values.size());
    const int total = num_values * spec.runs_per_point;

    SweepResult result;
    result.param = spec.param;
    result.runs.resize(static_cast<std::size_t>(total));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int job = next++; job < total; job = next++) {
            result.runs[static_cast<std::size_t>(job)] =
                execute_run(spec, job / spec.runs_per_point, job % spec.runs_per_point);
        }
    };
    const int threads = std::clamp(spec.threads > 0 ? spec.threads : default_sweep_threads(), 1, std::max(1, total));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    for (const auto& r : result.runs) {
        if (!r.metrics.completed || r.failure) ++result.incomplete_runs;
    }
    result.points = aggregate(result.runs, spec.values);
    return result;
}

std::vector<io::MetricsRow> metrics_rows(const SweepResult& result) {
    std::vector<io::MetricsRow> rows;
    const std::string param = to_string(result.param);
    for (const auto& r : result.runs) {
        io::MetricsRow row;
        row.run_id = std::to_string(r.value_index) + "-" + std::to_string(r.run_index);
        row.swept_param = param;
        row.value = r.value;
        row.pair_slot_collisions = static_cast<double>(r.metrics.pair_slot_collisions);
        row.distinct_pair_collisions = static_cast<double>(r.metrics.distinct_pair_collisions);
        row.mean_extra_distance = r.metrics.mean_extra_distance;
        row.total_planning_time_s = r.metrics.total_planning_time_s;
        row.completed = r.metrics.completed && !r.failure ? 1 : 0;
        rows.push_back(io::quantized(row));
    }
    // Aggregates come from the quantized raw rows, so a reader of the CSV
    // reproduces them exactly.
    for (const auto& p : summarize_rows(rows)) {
        io::MetricsRow row;
        row.run_id = std::string(io::MetricsRow::kAggregateRunId);
        row.swept_param = param;
        row.value = p.value;
        row.pair_slot_collisions = p.pair_slot_collisions.mean;
        row.distinct_pair_collisions = p.distinct_pair_collisions.mean;
        row.mean_extra_distance = p.mean_extra_distance.mean;
        row.total_planning_time_s = p.total_planning_time_s.mean;
        row.completed = p.completed_runs;
        rows.push_back(io::quantized(row));
    }
    return rows;
}

std::vector<SeriesPoint> summarize_rows(std::span<const io::MetricsRow> rows) {
    struct Columns {
        int completed = 0;
        std::vector<double> ps, dp, me, pt;
    };
    std::map<double, Columns> by_value;
    for (const auto& r : rows) {
        if (r.is_aggregate()) continue;
        Columns& c = by_value[r.value];
        if (!r.completed) continue;
        ++c.completed;
        c.ps.push_back(r.pair_slot_collisions);
        c.dp.push_back(r.distinct_pair_collisions);
        c.me.push_back(r.mean_extra_distance);
        c.pt.push_back(r.total_planning_time_s);
    }
    std::vector<SeriesPoint> out;
    for (const auto& [value, c] : by_value) {
        out.push_back(SeriesPoint{value, c.completed, summarize(c.ps), summarize(c.dp), summarize(c.me), summarize(c.pt)});
    }
    return out;
}

TrendFit fit_trend(std::span<const double> xs, std::span<const double> ys, TrendModel model) {
    if (xs.size() != ys.size()) throw Error(ErrorCode::DimensionMismatch, "xs and ys differ in length");
    const int degree = model == TrendModel::Linear ? 1 : 2;
    const std::size_t need = model == TrendModel::Linear ? 3 : 4;
    if (xs.size() < need) throw Error(ErrorCode::InsufficientPoints, "too few points for the trend model");

    // Fit in a centred, scaled variable t = (x - c) / s for conditioning,
    // then expand back to powers of x.
    const auto n = static_cast<Eigen::Index>(xs.size());
    double c = 0.0;
    for (double x : xs) c += x;
    c /= static_cast<double>(n);
    double s = 0.0;
    for (double x : xs) s = std::max(s, std::abs(x - c));
    if (s == 0.0) s = 1.0;

    Eigen::MatrixXd V(n, degree + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = (xs[static_cast<std::size_t>(i)] - c) / s;
        double p = 1.0;
        for (int d = 0; d <= degree; ++d, p *= t) V(i, d) = p;
        y(i) = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd b = V.colPivHouseholderQr().solve(y);  // b(d) multiplies t^d

    const Eigen::VectorXd residual = y - V * b;
    const double ss_res = residual.squaredNorm();
    const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();

    TrendFit fit;
    fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;

    // Sum_d b_d ((x - c)/s)^d, expanded with the binomial theorem.
    std::vector<double> ascending(static_cast<std::size_t>(degree + 1), 0.0);
    for (int d = 0; d <= degree; ++d) {
        const double scale = b(d) / std::pow(s, d);
        double binom = 1.0;
        for (int j = 0; j <= d; ++j) {
            // term: binom(d, j) x^j (-c)^(d-j)
            ascending[static_cast<std::size_t>(j)] += scale * binom * std::pow(-c, d - j);
            binom = binom * (d - j) / (j + 1);
        }
    }
    fit.coefficients.assign(ascending.rbegin(), ascending.rend());
    return fit;
}

}  // namespace edc::metrics
