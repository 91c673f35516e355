// edcuav: scenario generation, planning, simulation and parameter sweeps for
// clustered UAV swarms.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "edcuav/chart.hpp"
#include "edcuav/csv.hpp"
#include "edcuav/generator.hpp"
#include "edcuav/metrics.hpp"
#include "edcuav/planner.hpp"
#include "edcuav/scenario_io.hpp"
#include "edcuav/sim.hpp"

namespace {

using namespace edc;

enum ExitCode : int {
    kOk = 0,
    kMalformed = 1,
    kInfeasible = 2,
    kGenerationExhausted = 3,
    kSolverFailure = 4,
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ScenarioInfeasible: return kInfeasible;
        case ErrorCode::GenerationExhausted: return kGenerationExhausted;
        case ErrorCode::SolverFailure: return kSolverFailure;
        default: return kMalformed;
    }
}

// --mode values. "baseline" is only meaningful for simulate and sweep.
std::optional<planner::SeparationMode> parse_mode(const std::string& text) {
    for (auto m : {planner::SeparationMode::Literal, planner::SeparationMode::SignedL1,
                   planner::SeparationMode::Scp}) {
        if (text == planner::to_string(m)) return m;
    }
    return std::nullopt;
}

planner::Horizon parse_horizon(const std::string& text) {
    if (text == "full") return planner::Horizon::full();
    constexpr std::string_view prefix = "receding:";
    if (text.rfind(prefix, 0) == 0) {
        try {
            std::size_t used = 0;
            const std::string digits = text.substr(prefix.size());
            const int window = std::stoi(digits, &used);
            if (used == digits.size() && window >= 1) return planner::Horizon::receding(window);
        } catch (const std::exception&) {
        }
    }
    throw Error(ErrorCode::InvalidInput, "horizon must be 'full' or 'receding:H' with H >= 1");
}

sim::ChStrategy parse_strategy(const std::string& text) {
    for (auto s : {sim::ChStrategy::MaxEnergy, sim::ChStrategy::MinResponseTime}) {
        if (text == sim::to_string(s)) return s;
    }
    throw Error(ErrorCode::InvalidInput, "strategy must be max-energy or min-response");
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidInput, "bad sweep value '" + item + "'");
        }
    }
    return out;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        io::write_file_atomic(path, content);
    }
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    io::GenSpec spec;
    bool no_endpoint_separation = false;
    std::string output;
};

void add_gen_flags(CLI::App& app, io::GenSpec& spec, bool& no_sep) {
    app.add_option("--uavs", spec.num_uavs, "Number of UAVs")->capture_default_str();
    app.add_option("--area", spec.area_surface, "Area surface in m^2 (square)")->capture_default_str();
    app.add_option("--gps-error", spec.gps_error, "GPS error radius in m")->capture_default_str();
    app.add_option("--v-max", spec.v_max, "Maximum speed in m/s")->capture_default_str();
    app.add_option("--dt", spec.dt, "Slot length in s")->capture_default_str();
    app.add_option("--slots", spec.num_slots, "Number of time slots F")->capture_default_str();
    app.add_option("--sigma-fraction", spec.sigma_fraction, "Endpoint sigma as a fraction of the side")
        ->capture_default_str();
    app.add_flag("--no-endpoint-separation", no_sep, "Allow overlapping start or goal discs");
}

int run_gen(const GenArgs& args) {
    io::GenSpec spec = args.spec;
    spec.endpoint_separation = !args.no_endpoint_separation;
    const Scenario sc = io::generate_scenario(spec);
    emit(args.output, io::scenario_to_json(sc));
    return kOk;
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
    std::string scenario;
    std::string mode = "signed-l1";
    std::string horizon = "full";
    std::string output;
    double eps = kVerifyEps;
    long max_iter = qp::Settings{}.max_iter;
};

SwarmPlan full_plan(const Scenario& sc, planner::SeparationMode mode, const planner::Horizon& horizon,
                    const qp::Settings& solver) {
    if (horizon.kind == planner::Horizon::Kind::Full) {
        planner::PlanRequest req;
        req.scenario = sc;
        req.mode = mode;
        return planner::plan(req, {}, solver);
    }
    // Receding horizon: replan every slot and keep the first step.
    Rng rng(sc.seed);
    sim::MissionConfig config;
    config.horizon = horizon;
    config.solver = solver;
    const sim::MissionLog log = sim::run_mission(sc, mode, sim::ChStrategy::MaxEnergy, rng, config);
    if (log.failure) throw Error(*log.failure, "replanning failed before the final slot");
    return sim::executed_plan(log);
}

int run_plan(const PlanArgs& args) {
    const auto mode = parse_mode(args.mode);
    if (!mode) throw Error(ErrorCode::InvalidInput, "mode must be literal, signed-l1 or scp");
    const planner::Horizon horizon = parse_horizon(args.horizon);
    const Scenario sc = io::read_scenario_file(args.scenario);

    qp::Settings solver;
    solver.max_iter = args.max_iter;
    const SwarmPlan plan = full_plan(sc, *mode, horizon, solver);
    emit(args.output, io::write_trajectory_csv(io::trajectory_rows("plan", plan)));

    const auto report = planner::verify_plan(plan, sc, args.eps);
    const bool literal = *mode == planner::SeparationMode::Literal;
    std::cerr << "objective " << plan.objective_value << "\n"
              << "separation " << (report.separation_ok ? "ok" : "VIOLATED") << " (min slack "
              << report.min_separation_slack << " m)" << (literal ? " [not enforced by literal mode]" : "") << "\n"
              << "endpoints " << (report.endpoints_ok ? "ok" : "VIOLATED") << " (max error "
              << report.max_endpoint_error << " m)\n"
              << "speed " << (report.velocity_ok ? "ok" : "VIOLATED") << " (max excess " << report.max_speed_excess
              << " m/s)\n"
              << "kinematics " << (report.kinematics_ok ? "ok" : "VIOLATED") << " (max error "
              << report.max_kinematic_error << " m)\n";
    const bool passed = report.endpoints_ok && report.velocity_ok && report.kinematics_ok &&
                        (literal || report.separation_ok);
    return passed ? kOk : kSolverFailure;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scenario;
    std::string mode = "signed-l1";
    std::string horizon = "full";
    std::string strategy = "max-energy";
    std::uint64_t seed = 0;
    std::string output;
    std::string metrics_output;
    long max_iter = qp::Settings{}.max_iter;
};

int run_simulate(const SimulateArgs& args) {
    // Baseline flights need no separated endpoints.
    const Scenario sc = io::read_scenario_file(
        args.scenario, args.mode == "baseline" ? SeparationCheck::Relaxed : SeparationCheck::Required);
    const sim::ChStrategy strategy = parse_strategy(args.strategy);
    Rng rng(args.seed);
    sim::MissionLog log;
    if (args.mode == "baseline") {
        log = sim::run_baseline(sc, rng);
    } else {
        const auto mode = parse_mode(args.mode);
        if (!mode) throw Error(ErrorCode::InvalidInput, "mode must be baseline, literal, signed-l1 or scp");
        sim::MissionConfig config;
        config.horizon = parse_horizon(args.horizon);
        config.solver.max_iter = args.max_iter;
        log = sim::run_mission(sc, *mode, strategy, rng, config);
    }

    emit(args.output, io::write_trajectory_csv(io::trajectory_rows("sim", sim::executed_plan(log))));

    const metrics::RunMetrics m = metrics::measure(log, sc);
    io::MetricsRow row;
    row.run_id = "sim";
    row.swept_param = "none";
    row.pair_slot_collisions = static_cast<double>(m.pair_slot_collisions);
    row.distinct_pair_collisions = static_cast<double>(m.distinct_pair_collisions);
    row.mean_extra_distance = m.mean_extra_distance;
    row.total_planning_time_s = m.total_planning_time_s;
    row.completed = m.completed ? 1 : 0;
    const io::MetricsRow rows[] = {io::quantized(row)};
    const std::string metrics_csv = io::write_metrics_csv(rows);
    if (args.metrics_output.empty()) {
        std::cerr << metrics_csv;
    } else {
        io::write_file_atomic(args.metrics_output, metrics_csv);
    }
    std::cerr << "cluster head " << log.cluster_head << ", " << (m.completed ? "completed" : "incomplete") << "\n";

    if (log.failure) return exit_code_for(*log.failure);
    return m.completed ? kOk : kSolverFailure;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string param;
    std::string values;
    int runs = 30;
    std::string mode = "baseline";
    metrics::FixedParams fixed;
    std::uint64_t seed = 0;
    bool no_endpoint_separation = false;
    double sigma_fraction = 0.25;
    int threads = 0;
    std::string output;
    std::string chart;
};

std::string axis_label(metrics::SweepParam p) {
    switch (p) {
        case metrics::SweepParam::NumUavs: return "number of UAVs";
        case metrics::SweepParam::AreaSurface: return "area surface (m^2)";
        case metrics::SweepParam::GpsError: return "GPS error (m)";
    }
    return "";
}

io::LineChart collision_chart(const std::vector<metrics::SeriesPoint>& series, const std::string& x_label) {
    io::LineChart chart{"Collisions (pair-slot events)", x_label, "mean collisions", {}};
    for (const auto& p : series) chart.points.push_back({p.value, p.pair_slot_collisions.mean, p.pair_slot_collisions.stddev});
    return chart;
}

int run_sweep(const SweepArgs& args) {
    metrics::SweepSpec spec;
    const auto param = metrics::parse_sweep_param(args.param);
    if (!param) throw Error(ErrorCode::InvalidInput, "param must be uavs, area or gps-error");
    spec.param = *param;
    spec.values = parse_values(args.values);
    spec.runs_per_point = args.runs;
    spec.fixed = args.fixed;
    spec.base_seed = args.seed;
    spec.endpoint_separation = !args.no_endpoint_separation;
    spec.sigma_fraction = args.sigma_fraction;
    spec.threads = args.threads;
    if (args.mode != "baseline") {
        spec.mode = parse_mode(args.mode);
        if (!spec.mode) throw Error(ErrorCode::InvalidInput, "mode must be baseline, literal, signed-l1 or scp");
    }

    const metrics::SweepResult result = metrics::sweep(spec);
    const auto rows = metrics::metrics_rows(result);
    emit(args.output, io::write_metrics_csv(rows));
    if (!args.chart.empty()) {
        io::write_file_atomic(args.chart, io::render_svg(collision_chart(metrics::summarize_rows(rows),
                                                                         axis_label(spec.param))));
    }
    std::cerr << result.runs.size() << " runs, " << result.incomplete_runs << " incomplete\n";
    return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string input;
    std::string out_dir = ".";
};

void print_fit(const char* name, const std::vector<double>& xs, const std::vector<double>& ys) {
    std::cout << name << ":";
    for (auto model : {metrics::TrendModel::Linear, metrics::TrendModel::Quadratic}) {
        const char* label = model == metrics::TrendModel::Linear ? "linear" : "quadratic";
        try {
            const auto fit = metrics::fit_trend(xs, ys, model);
            std::cout << " " << label << " R2=" << fit.r_squared << " coeffs=[";
            for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
                std::cout << (i ? ", " : "") << fit.coefficients[i];
            }
            std::cout << "]";
        } catch (const Error&) {
            std::cout << " " << label << " n/a (too few points)";
        }
    }
    std::cout << "\n";
}

int run_report(const ReportArgs& args) {
    const auto rows = io::parse_metrics_csv(io::read_file(args.input));
    if (rows.empty()) throw Error(ErrorCode::MalformedInput, "metrics CSV has no rows");
    const std::string param = rows.front().swept_param;
    const auto series = metrics::summarize_rows(rows);

    std::vector<double> xs, collisions, distinct, extra, time;
    std::cout << "value,completed,pair_slot_mean,pair_slot_sd,distinct_mean,distinct_sd,extra_mean,extra_sd,time_mean,time_sd\n";
    for (const auto& p : series) {
        xs.push_back(p.value);
        collisions.push_back(p.pair_slot_collisions.mean);
        distinct.push_back(p.distinct_pair_collisions.mean);
        extra.push_back(p.mean_extra_distance.mean);
        time.push_back(p.total_planning_time_s.mean);
        std::cout << p.value << ',' << p.completed_runs << ',' << p.pair_slot_collisions.mean << ','
                  << p.pair_slot_collisions.stddev << ',' << p.distinct_pair_collisions.mean << ','
                  << p.distinct_pair_collisions.stddev << ',' << p.mean_extra_distance.mean << ','
                  << p.mean_extra_distance.stddev << ',' << p.total_planning_time_s.mean << ','
                  << p.total_planning_time_s.stddev << '\n';
    }
    print_fit("pair_slot_collisions", xs, collisions);
    print_fit("distinct_pair_collisions", xs, distinct);
    print_fit("mean_extra_distance", xs, extra);
    print_fit("total_planning_time_s", xs, time);

    const auto sweep_param = metrics::parse_sweep_param(param);
    const std::string x_label = sweep_param ? axis_label(*sweep_param) : param;
    struct Series {
        const char* file;
        const char* title;
        metrics::FieldSummary metrics::SeriesPoint::*field;
    };
    const Series charts[] = {
        {"collisions.svg", "Collisions (pair-slot events)", &metrics::SeriesPoint::pair_slot_collisions},
        {"distinct_collisions.svg", "Collisions (distinct pairs)", &metrics::SeriesPoint::distinct_pair_collisions},
        {"extra_distance.svg", "Mean extra distance (m)", &metrics::SeriesPoint::mean_extra_distance},
        {"planning_time.svg", "Planning time (s)", &metrics::SeriesPoint::total_planning_time_s},
    };
    std::filesystem::create_directories(args.out_dir);
    for (const auto& c : charts) {
        io::LineChart chart{c.title, x_label, c.title, {}};
        for (const auto& p : series) chart.points.push_back({p.value, (p.*c.field).mean, (p.*c.field).stddev});
        io::write_file_atomic(std::filesystem::path(args.out_dir) / c.file, io::render_svg(chart));
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trajectory planning and collision metrics for clustered UAV swarms"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random scenario file");
    add_gen_flags(*gen_cmd, gen.spec, gen.no_endpoint_separation);
    gen_cmd->add_option("--seed", gen.spec.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("-o,--output", gen.output, "Scenario file (stdout when omitted)");

    PlanArgs plan;
    auto* plan_cmd = app.add_subcommand("plan", "Plan collision-free trajectories for a scenario");
    plan_cmd->add_option("scenario", plan.scenario, "Scenario file")->required();
    plan_cmd->add_option("--mode", plan.mode, "literal | signed-l1 | scp")->capture_default_str();
    plan_cmd->add_option("--horizon", plan.horizon, "full | receding:H")->capture_default_str();
    plan_cmd->add_option("--eps", plan.eps, "Verification tolerance in m")->capture_default_str();
    plan_cmd->add_option("--max-iter", plan.max_iter, "Solver iteration cap")->check(CLI::PositiveNumber)
        ->capture_default_str();
    plan_cmd->add_option("-o,--output", plan.output, "Plan CSV (stdout when omitted)");

    SimulateArgs simulate;
    auto* sim_cmd = app.add_subcommand("simulate", "Fly a time-slotted mission and measure it");
    sim_cmd->add_option("scenario", simulate.scenario, "Scenario file")->required();
    sim_cmd->add_option("--mode", simulate.mode, "baseline | literal | signed-l1 | scp")->capture_default_str();
    sim_cmd->add_option("--horizon", simulate.horizon, "full | receding:H")->capture_default_str();
    sim_cmd->add_option("--strategy", simulate.strategy, "max-energy | min-response")->capture_default_str();
    sim_cmd->add_option("--seed", simulate.seed, "Seed for GPS noise")->capture_default_str();
    sim_cmd->add_option("--max-iter", simulate.max_iter, "Solver iteration cap")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim_cmd->add_option("-o,--output", simulate.output, "Mission log CSV (stdout when omitted)");
    sim_cmd->add_option("--metrics", simulate.metrics_output, "Metrics CSV (stderr when omitted)");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep with repeated random scenarios");
    sweep_cmd->add_option("--param", sweep.param, "uavs | area | gps-error")->required();
    sweep_cmd->add_option("--values", sweep.values, "Comma-separated increasing values")->required();
    sweep_cmd->add_option("--runs", sweep.runs, "Runs per value")->capture_default_str();
    sweep_cmd->add_option("--mode", sweep.mode, "baseline | literal | signed-l1 | scp")->capture_default_str();
    sweep_cmd->add_option("--uavs", sweep.fixed.num_uavs, "Fixed number of UAVs")->capture_default_str();
    sweep_cmd->add_option("--area", sweep.fixed.area_surface, "Fixed area surface in m^2")->capture_default_str();
    sweep_cmd->add_option("--gps-error", sweep.fixed.gps_error, "Fixed GPS error in m")->capture_default_str();
    sweep_cmd->add_option("--v-max", sweep.fixed.v_max, "Maximum speed in m/s")->capture_default_str();
    sweep_cmd->add_option("--dt", sweep.fixed.dt, "Slot length in s")->capture_default_str();
    sweep_cmd->add_option("--slots", sweep.fixed.num_slots, "Number of time slots F")->capture_default_str();
    sweep_cmd->add_option("--sigma-fraction", sweep.sigma_fraction, "Endpoint sigma as a fraction of the side")
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sweep.seed, "Base seed")->capture_default_str();
    sweep_cmd->add_flag("--no-endpoint-separation", sweep.no_endpoint_separation,
                        "Allow overlapping start or goal discs");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0: EDCUAV_THREADS or all cores)")
        ->capture_default_str();
    sweep_cmd->add_option("-o,--output", sweep.output, "Metrics CSV (stdout when omitted)");
    sweep_cmd->add_option("--chart", sweep.chart, "Optional SVG chart of mean collisions");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Summarize a sweep CSV with charts and trend fits");
    report_cmd->add_option("input", report.input, "Metrics CSV")->required();
    report_cmd->add_option("--out-dir", report.out_dir, "Directory for SVG charts")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kMalformed;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (plan_cmd->parsed()) return run_plan(plan);
        if (sim_cmd->parsed()) return run_simulate(simulate);
        if (sweep_cmd->parsed()) return run_sweep(sweep);
        if (report_cmd->parsed()) return run_report(report);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMalformed;
    }
    return kMalformed;
}
