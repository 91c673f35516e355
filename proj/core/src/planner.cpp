#include "edcuav/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "edcuav/error.hpp"

namespace edc::planner {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Triplet = Eigen::Triplet<double, int>;

struct RowBuilder {
    std::vector<Triplet> entries;
    std::vector<double> lower;
    std::vector<double> upper;

    int add(std::initializer_list<std::pair<int, double>> coeffs, double lo, double hi) {
        const int row = static_cast<int>(lower.size());
        for (const auto& [col, value] : coeffs) {
            if (value != 0.0) entries.emplace_back(row, col, value);
        }
        lower.push_back(lo);
        upper.push_back(hi);
        return row;
    }
};

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Signs (s_x, s_y) for the signed-L1 separation row of one pair and slot.
// A zero component falls back to pair-level geometry that flips with the
// pair order: the perpendicular of the relative motion, then the relative
// motion itself.
Vec2 l1_signs(const Vec2& displacement, const Vec2& relative_motion, double tol) {
    const Vec2 perpendicular{-relative_motion.y, relative_motion.x};
    auto pick = [tol](double d, double w, double m) {
        if (std::abs(d) > tol) return sign_of(d);
        if (std::abs(w) > tol) return sign_of(w);
        if (std::abs(m) > tol) return sign_of(m);
        return 1.0;
    };
    return Vec2{pick(displacement.x, perpendicular.x, relative_motion.x),
                pick(displacement.y, perpendicular.y, relative_motion.y)};
}

struct Window {
    int first_slot = 0;
    int last_slot = 0;
    std::vector<Vec2> initial;
    std::vector<Vec2> terminal;

    int steps() const { return last_slot - first_slot; }
};

Window resolve_window(const PlanRequest& request) {
    const Scenario& sc = request.scenario;
    const int K = sc.num_uavs();
    const int F = sc.num_slots;
    if (request.start_slot < 0 || request.start_slot >= F) {
        throw Error(ErrorCode::InvalidInput, "start_slot must lie in [0, num_slots)");
    }
    Window w;
    w.first_slot = request.start_slot;
    if (request.current_positions.empty()) {
        for (const auto& u : sc.uavs) w.initial.push_back(u.start);
    } else {
        if (static_cast<int>(request.current_positions.size()) != K) {
            throw Error(ErrorCode::DimensionMismatch, "current_positions must hold one position per UAV");
        }
        w.initial = request.current_positions;
    }
    if (request.horizon.kind == Horizon::Kind::Receding) {
        if (request.horizon.window < 1) throw Error(ErrorCode::InvalidInput, "receding window must be >= 1");
        w.last_slot = std::min(F, request.start_slot + request.horizon.window);
    } else {
        w.last_slot = F;
    }
    const double fraction = static_cast<double>(w.steps()) / static_cast<double>(F - request.start_slot);
    for (int k = 0; k < K; ++k) {
        const Vec2& goal = sc.uavs[static_cast<std::size_t>(k)].goal;
        w.terminal.push_back(w.last_slot == F ? goal : w.initial[static_cast<std::size_t>(k)] + (goal - w.initial[static_cast<std::size_t>(k)]) * fraction);
    }
    return w;
}

const Vec2& reference_position(const SwarmPlan& ref, int k, int slot) {
    return ref.trajectories[static_cast<std::size_t>(k)].positions[static_cast<std::size_t>(slot - ref.first_slot)];
}

void check_reference_covers(const SwarmPlan& ref, int num_uavs, const Window& w) {
    if (static_cast<int>(ref.trajectories.size()) != num_uavs) {
        throw Error(ErrorCode::DimensionMismatch, "reference plan has the wrong number of trajectories");
    }
    for (const auto& traj : ref.trajectories) {
        const int last = ref.first_slot + static_cast<int>(traj.positions.size()) - 1;
        if (ref.first_slot > w.first_slot || last < w.last_slot) {
            throw Error(ErrorCode::DimensionMismatch, "reference plan does not cover the solve window");
        }
    }
}

double coordinate_scale(const Scenario& sc) { return std::max({1.0, sc.area_width, sc.area_height}); }

SwarmPlan extract_plan(const Model& model, const qp::Solution& sol, double dt) {
    SwarmPlan out;
    out.first_slot = model.first_slot;
    out.dt = dt;
    const VariableLayout& L = model.layout;
    for (int k = 0; k < L.num_uavs(); ++k) {
        std::vector<Vec2> positions;
        positions.reserve(static_cast<std::size_t>(L.steps() + 1));
        positions.push_back(model.initial_positions[static_cast<std::size_t>(k)]);
        for (int step = 1; step <= L.steps(); ++step) {
            positions.push_back(Vec2{sol.x[L.x(k, step)], sol.x[L.y(k, step)]});
        }
        out.trajectories.push_back(trajectory_from_positions(k, std::move(positions), dt));
    }
    out.objective_value = squared_path_objective(out);
    return out;
}

double window_separation_slack(const SwarmPlan& plan, const Scenario& sc) {
    double slack = kInf;
    const int K = static_cast<int>(plan.trajectories.size());
    for (int k = 0; k < K; ++k) {
        for (int l = k + 1; l < K; ++l) {
            const double reach = sc.uavs[static_cast<std::size_t>(k)].gps_error_radius + sc.uavs[static_cast<std::size_t>(l)].gps_error_radius;
            const auto& pk = plan.trajectories[static_cast<std::size_t>(k)].positions;
            const auto& pl = plan.trajectories[static_cast<std::size_t>(l)].positions;
            for (std::size_t t = 1; t < pk.size(); ++t) slack = std::min(slack, distance(pk[t], pl[t]) - reach);
        }
    }
    return slack;
}

double max_position_change(const SwarmPlan& a, const SwarmPlan& b) {
    double change = 0.0;
    for (std::size_t k = 0; k < a.trajectories.size(); ++k) {
        const auto& pa = a.trajectories[k].positions;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const int slot = a.first_slot + static_cast<int>(i);
            change = std::max(change, distance(pa[i], reference_position(b, static_cast<int>(k), slot)));
        }
    }
    return change;
}

qp::Solution solve_checked(const Model& model, const qp::Settings& settings, const std::optional<qp::WarmStart>& warm) {
    qp::Solution sol = qp::solve(model.problem, settings, warm);
    if (sol.status == qp::Status::PrimalInfeasible) {
        throw Error(ErrorCode::ScenarioInfeasible, "separation model is infeasible");
    }
    if (sol.status != qp::Status::Solved) {
        throw Error(ErrorCode::SolverFailure, "QP solver stopped without converging");
    }
    return sol;
}

void accumulate(SolverStats& stats, const qp::Solution& sol, double constant) {
    stats.iterations += sol.iterations;
    stats.qp_solves += 1;
    stats.primal_residual = sol.primal_residual;
    stats.dual_residual = sol.dual_residual;
    stats.solver_objective = sol.objective + constant;
}

}  // namespace

const char* to_string(SeparationMode mode) {
    switch (mode) {
        case SeparationMode::Literal: return "literal";
        case SeparationMode::SignedL1: return "signed-l1";
        case SeparationMode::Scp: return "scp";
    }
    return "unknown";
}

VariableLayout::VariableLayout(int num_uavs, int steps, bool auxiliaries)
    : num_uavs_(num_uavs), steps_(steps), auxiliaries_(auxiliaries) {}

int VariableLayout::num_variables() const {
    return 4 * num_uavs_ * steps_ + (auxiliaries_ ? 2 * num_pairs() * steps_ : 0);
}

int VariableLayout::pair_index(int k, int l) const {
    const int a = std::min(k, l);
    const int b = std::max(k, l);
    // Pairs (0,1),(0,2),...,(0,K-1),(1,2),...
    return a * num_uavs_ - a * (a + 1) / 2 + (b - a - 1);
}

SwarmPlan straight_line_reference(const Scenario& scenario) {
    std::vector<Vec2> starts;
    for (const auto& u : scenario.uavs) starts.push_back(u.start);
    return straight_line_reference(scenario, 0, starts);
}

SwarmPlan straight_line_reference(const Scenario& scenario, int start_slot, std::span<const Vec2> positions) {
    if (static_cast<int>(positions.size()) != scenario.num_uavs()) {
        throw Error(ErrorCode::DimensionMismatch, "one position per UAV is required");
    }
    const int steps = scenario.num_slots - start_slot;
    if (steps < 1) throw Error(ErrorCode::InvalidInput, "start_slot must precede the final slot");
    SwarmPlan plan;
    plan.first_slot = start_slot;
    plan.dt = scenario.dt;
    for (int k = 0; k < scenario.num_uavs(); ++k) {
        const Vec2 from = positions[static_cast<std::size_t>(k)];
        const Vec2 to = scenario.uavs[static_cast<std::size_t>(k)].goal;
        std::vector<Vec2> pts;
        pts.reserve(static_cast<std::size_t>(steps + 1));
        for (int i = 0; i < steps; ++i) pts.push_back(from + (to - from) * (static_cast<double>(i) / steps));
        pts.push_back(to);
        plan.trajectories.push_back(trajectory_from_positions(k, std::move(pts), scenario.dt));
    }
    plan.objective_value = squared_path_objective(plan);
    return plan;
}

Model build_model(const PlanRequest& request, const SwarmPlan* reference, const ScpSettings& scp) {
    const Scenario& sc = request.scenario;
    const int K = sc.num_uavs();
    const double dt = sc.dt;
    const Window w = resolve_window(request);
    const int W = w.steps();
    const bool literal = request.mode == SeparationMode::Literal;

    if (!literal && reference == nullptr) {
        throw Error(ErrorCode::MissingReference, "signed-l1 and scp encodings need a reference plan");
    }
    if (reference != nullptr && !literal) check_reference_covers(*reference, K, w);
    if (request.speed_polygon_sides < 3) throw Error(ErrorCode::InvalidInput, "speed polygon needs >= 3 sides");

    Model model{qp::Problem{}, VariableLayout(K, W, literal), 0.0, w.first_slot, w.last_slot, w.initial, 0, 0};
    const VariableLayout& L = model.layout;
    const int n = L.num_variables();

    // Objective: sum over steps of |p(t) - p(t-1)|^2 as 1/2 x'Px + q'x + const.
    std::vector<Triplet> p_entries;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < K; ++k) {
        const Vec2& p0 = w.initial[static_cast<std::size_t>(k)];
        for (int axis = 0; axis < 2; ++axis) {
            auto idx = [&](int step) { return axis == 0 ? L.x(k, step) : L.y(k, step); };
            const double origin = axis == 0 ? p0.x : p0.y;
            p_entries.emplace_back(idx(1), idx(1), 2.0);
            q[idx(1)] -= 2.0 * origin;
            model.objective_constant += origin * origin;
            for (int step = 2; step <= W; ++step) {
                p_entries.emplace_back(idx(step), idx(step), 2.0);
                p_entries.emplace_back(idx(step - 1), idx(step - 1), 2.0);
                p_entries.emplace_back(idx(step), idx(step - 1), -2.0);
                p_entries.emplace_back(idx(step - 1), idx(step), -2.0);
            }
        }
    }
    model.problem.P.resize(n, n);
    model.problem.P.setFromTriplets(p_entries.begin(), p_entries.end());
    model.problem.q = std::move(q);

    RowBuilder rows;

    // Kinematics: p(t) = p(t-1) + v(t) dt, with p(0) fixed to the window start.
    for (int k = 0; k < K; ++k) {
        const Vec2& p0 = w.initial[static_cast<std::size_t>(k)];
        for (int step = 1; step <= W; ++step) {
            if (step == 1) {
                rows.add({{L.x(k, 1), 1.0}, {L.vx(k, 1), -dt}}, p0.x, p0.x);
                rows.add({{L.y(k, 1), 1.0}, {L.vy(k, 1), -dt}}, p0.y, p0.y);
            } else {
                rows.add({{L.x(k, step), 1.0}, {L.x(k, step - 1), -1.0}, {L.vx(k, step), -dt}}, 0.0, 0.0);
                rows.add({{L.y(k, step), 1.0}, {L.y(k, step - 1), -1.0}, {L.vy(k, step), -dt}}, 0.0, 0.0);
            }
        }
    }

    // Terminal position (goal, or waypoint when the window ends early).
    for (int k = 0; k < K; ++k) {
        const Vec2& target = w.terminal[static_cast<std::size_t>(k)];
        rows.add({{L.x(k, W), 1.0}}, target.x, target.x);
        rows.add({{L.y(k, W), 1.0}}, target.y, target.y);
    }

    // Speed cap: regular polygon inscribed in the disc |v| <= v_max.
    const int sides = request.speed_polygon_sides;
    const double apothem_ratio = std::cos(std::numbers::pi / sides);
    for (int k = 0; k < K; ++k) {
        const double bound = sc.uavs[static_cast<std::size_t>(k)].v_max * apothem_ratio;
        for (int step = 1; step <= W; ++step) {
            for (int j = 0; j < sides; ++j) {
                const double theta = 2.0 * std::numbers::pi * j / sides;
                rows.add({{L.vx(k, step), std::cos(theta)}, {L.vy(k, step), std::sin(theta)}}, -kInf, bound);
            }
        }
    }

    // Pairwise separation.
    model.first_separation_row = static_cast<int>(rows.lower.size());
    const double tol = 1e-9 * coordinate_scale(sc);
    const int num_pairs = L.num_pairs();
    for (int k = 0; k < K; ++k) {
        for (int l = k + 1; l < K; ++l) {
            const double reach = sc.uavs[static_cast<std::size_t>(k)].gps_error_radius + sc.uavs[static_cast<std::size_t>(l)].gps_error_radius;
            const int pair = L.pair_index(k, l);
            Vec2 relative_motion;
            if (!literal) {
                relative_motion = (reference_position(*reference, k, w.last_slot) - reference_position(*reference, l, w.last_slot)) -
                                  (reference_position(*reference, k, w.first_slot) - reference_position(*reference, l, w.first_slot));
            }
            for (int step = 1; step <= W; ++step) {
                const int slot = w.first_slot + step;
                switch (request.mode) {
                    case SeparationMode::Literal: {
                        const int ax = L.aux_x(pair, step);
                        const int ay = L.aux_y(pair, step);
                        rows.add({{ax, 1.0}, {L.x(k, step), -1.0}, {L.x(l, step), 1.0}}, -kInf, 0.0);
                        rows.add({{ax, 1.0}, {L.x(l, step), -1.0}, {L.x(k, step), 1.0}}, -kInf, 0.0);
                        rows.add({{ay, 1.0}, {L.y(k, step), -1.0}, {L.y(l, step), 1.0}}, -kInf, 0.0);
                        rows.add({{ay, 1.0}, {L.y(l, step), -1.0}, {L.y(k, step), 1.0}}, -kInf, 0.0);
                        rows.add({{ax, -1.0}, {ay, -1.0}}, reach * reach, kInf);
                        rows.add({{ax, -1.0}}, 1.0, kInf);
                        rows.add({{ay, -1.0}}, 1.0, kInf);
                        break;
                    }
                    case SeparationMode::SignedL1: {
                        const Vec2 d = reference_position(*reference, k, slot) - reference_position(*reference, l, slot);
                        const Vec2 s = l1_signs(d, relative_motion, tol);
                        rows.add({{L.x(k, step), s.x}, {L.x(l, step), -s.x}, {L.y(k, step), s.y}, {L.y(l, step), -s.y}},
                                 std::numbers::sqrt2 * (reach + request.safety_margin), kInf);
                        break;
                    }
                    case SeparationMode::Scp: {
                        const Vec2 d = reference_position(*reference, k, slot) - reference_position(*reference, l, slot);
                        Vec2 normal;
                        if (d.norm() > tol) {
                            normal = d / d.norm();
                        } else if (scp.degenerate_direction_rule) {
                            // Coincident reference pair: push apart across the
                            // relative motion; fixed angle by pair rank when the
                            // pair does not move relative to each other.
                            const Vec2 across{-relative_motion.y, relative_motion.x};
                            if (across.norm() > tol) {
                                normal = across / across.norm();
                            } else {
                                const double angle = 2.0 * std::numbers::pi * pair / num_pairs;
                                normal = Vec2{std::cos(angle), std::sin(angle)};
                            }
                        } else {
                            throw Error(ErrorCode::DegenerateReferencePair, "reference positions of a pair coincide");
                        }
                        rows.add({{L.x(k, step), normal.x}, {L.x(l, step), -normal.x}, {L.y(k, step), normal.y}, {L.y(l, step), -normal.y}},
                                 reach + request.safety_margin, kInf);
                        break;
                    }
                }
            }
        }
    }
    model.separation_rows = static_cast<int>(rows.lower.size()) - model.first_separation_row;

    const int m = static_cast<int>(rows.lower.size());
    model.problem.A.resize(m, n);
    model.problem.A.setFromTriplets(rows.entries.begin(), rows.entries.end());
    model.problem.lower = Eigen::Map<const Eigen::VectorXd>(rows.lower.data(), m);
    model.problem.upper = Eigen::Map<const Eigen::VectorXd>(rows.upper.data(), m);
    return model;
}

SwarmPlan plan(const PlanRequest& request, const ScpSettings& scp, const qp::Settings& solver) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario& sc = request.scenario;
    sc.validate(SeparationCheck::Required);
    if (scp.max_outer < 1 || !(scp.convergence_tol > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "scp settings need max_outer >= 1 and convergence_tol > 0");
    }

    const Window w = resolve_window(request);
    SwarmPlan reference = request.reference ? *request.reference
                                            : straight_line_reference(sc, w.first_slot, w.initial);
    SolverStats stats;
    SwarmPlan result;

    if (request.mode != SeparationMode::Scp) {
        const Model model = build_model(request, &reference, scp);
        const qp::Solution sol = solve_checked(model, solver, std::nullopt);
        result = extract_plan(model, sol, sc.dt);
        accumulate(stats, sol, model.objective_constant);
        stats.outer_iterations = 1;
        if (request.mode == SeparationMode::SignedL1 && !(window_separation_slack(result, sc) > 0.0)) {
            throw Error(ErrorCode::ScenarioInfeasible, "signed-l1 plan violates separation");
        }
    } else {
        std::optional<qp::WarmStart> warm;
        bool have_result = false;
        for (int outer = 1; outer <= scp.max_outer; ++outer) {
            const Model model = build_model(request, &reference, scp);
            const qp::Solution sol = solve_checked(model, solver, warm);
            SwarmPlan iterate = extract_plan(model, sol, sc.dt);
            accumulate(stats, sol, model.objective_constant);
            stats.outer_iterations = outer;
            warm = qp::WarmStart{sol.x, sol.y};

            const double change = max_position_change(iterate, reference);
            // Every subproblem solution is separated: the halfspace normals are
            // unit vectors, so n'(p_k - p_l) >= d implies |p_k - p_l| >= d.
            if (window_separation_slack(iterate, sc) > 0.0) {
                result = iterate;
                have_result = true;
            }
            reference = std::move(iterate);
            if (change < scp.convergence_tol) break;
        }
        if (!have_result) {
            throw Error(ErrorCode::ScenarioInfeasible, "sequential convex iteration produced no separated plan");
        }
    }

    result.solver_stats = stats;
    result.solver_stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

VerificationReport verify_plan(const SwarmPlan& plan, const Scenario& scenario, double eps) {
    const int K = scenario.num_uavs();
    const int F = scenario.num_slots;
    if (plan.first_slot != 0 || static_cast<int>(plan.trajectories.size()) != K) {
        throw Error(ErrorCode::DimensionMismatch, "plan does not match the scenario swarm");
    }
    for (const auto& traj : plan.trajectories) {
        if (static_cast<int>(traj.positions.size()) != F + 1 || static_cast<int>(traj.velocities.size()) != F) {
            throw Error(ErrorCode::DimensionMismatch, "trajectory length does not match num_slots");
        }
    }

    VerificationReport report;
    report.min_separation_slack = kInf;
    report.max_speed_excess = -kInf;
    for (int k = 0; k < K; ++k) {
        const UavSpec& spec = scenario.uavs[static_cast<std::size_t>(k)];
        const Trajectory& traj = plan.trajectories[static_cast<std::size_t>(k)];
        report.max_endpoint_error = std::max({report.max_endpoint_error, distance(traj.positions.front(), spec.start),
                                              distance(traj.positions.back(), spec.goal)});
        for (int t = 1; t <= F; ++t) {
            const Vec2& v = traj.velocities[static_cast<std::size_t>(t - 1)];
            report.max_speed_excess = std::max(report.max_speed_excess, v.norm() - spec.v_max);
            const Vec2 predicted = traj.positions[static_cast<std::size_t>(t - 1)] + v * scenario.dt;
            report.max_kinematic_error = std::max(report.max_kinematic_error, distance(predicted, traj.positions[static_cast<std::size_t>(t)]));
        }
        for (int l = k + 1; l < K; ++l) {
            const double reach = spec.gps_error_radius + scenario.uavs[static_cast<std::size_t>(l)].gps_error_radius;
            const Trajectory& other = plan.trajectories[static_cast<std::size_t>(l)];
            for (int t = 0; t <= F; ++t) {
                report.min_separation_slack = std::min(
                    report.min_separation_slack,
                    distance(traj.positions[static_cast<std::size_t>(t)], other.positions[static_cast<std::size_t>(t)]) - reach);
            }
        }
    }
    report.separation_ok = report.min_separation_slack > 0.0;
    report.endpoints_ok = report.max_endpoint_error <= eps;
    report.velocity_ok = report.max_speed_excess <= eps;
    report.kinematics_ok = report.max_kinematic_error <= eps;
    return report;
}

bool literal_feasibility_probe(std::span<const Vec2> positions, std::span<const double> radii) {
    if (positions.size() != radii.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one radius per position is required");
    }
    const int K = static_cast<int>(positions.size());
    const int pairs = K * (K - 1) / 2;
    if (pairs == 0) return true;

    // Variables: (aux_x, aux_y) per pair; positions enter as constants.
    RowBuilder rows;
    int pair = 0;
    for (int k = 0; k < K; ++k) {
        for (int l = k + 1; l < K; ++l, ++pair) {
            const Vec2 d = positions[static_cast<std::size_t>(k)] - positions[static_cast<std::size_t>(l)];
            const double reach = radii[static_cast<std::size_t>(k)] + radii[static_cast<std::size_t>(l)];
            const int ax = 2 * pair;
            const int ay = 2 * pair + 1;
            rows.add({{ax, 1.0}}, -kInf, d.x);
            rows.add({{ax, 1.0}}, -kInf, -d.x);
            rows.add({{ay, 1.0}}, -kInf, d.y);
            rows.add({{ay, 1.0}}, -kInf, -d.y);
            rows.add({{ax, -1.0}, {ay, -1.0}}, reach * reach, kInf);
            rows.add({{ax, -1.0}}, 1.0, kInf);
            rows.add({{ay, -1.0}}, 1.0, kInf);
        }
    }
    const int n = 2 * pairs;
    const int m = static_cast<int>(rows.lower.size());
    qp::Problem problem;
    problem.P.resize(n, n);
    problem.q = Eigen::VectorXd::Zero(n);
    problem.A.resize(m, n);
    problem.A.setFromTriplets(rows.entries.begin(), rows.entries.end());
    problem.lower = Eigen::Map<const Eigen::VectorXd>(rows.lower.data(), m);
    problem.upper = Eigen::Map<const Eigen::VectorXd>(rows.upper.data(), m);

    const qp::Solution sol = qp::solve(problem);
    if (sol.status != qp::Status::Solved) return false;
    const double scale = std::max(1.0, (problem.A * sol.x).cwiseAbs().maxCoeff());
    return sol.primal_residual <= 1e-6 * scale;
}

}  // namespace edc::planner
