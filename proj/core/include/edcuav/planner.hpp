#pragma once

#include <optional>
#include <span>
#include <vector>

#include "edcuav/qp.hpp"
#include "edcuav/scenario.hpp"

namespace edc::planner {

/// Encoding of the pairwise separation constraint.
///   Literal:      auxiliary-variable |dX| + |dY| rows taken verbatim (they do
///                 not actually exclude overlap, see literal_feasibility_probe).
///   SignedL1:     s_x dX + s_y dY >= sqrt(2) (r_k + r_l + margin), signs fixed
///                 from a reference; implies Euclidean separation.
///   Scp:          supporting halfspace at the previous iterate, iterated to a
///                 fixed point.
enum class SeparationMode { Literal, SignedL1, Scp };

const char* to_string(SeparationMode mode);

struct Horizon {
    enum class Kind { Full, Receding };
    Kind kind = Kind::Full;
    int window = 0;  // slots per solve when Receding

    static Horizon full() { return Horizon{}; }
    static Horizon receding(int window) { return Horizon{Kind::Receding, window}; }
};

struct PlanRequest {
    Scenario scenario;
    SeparationMode mode = SeparationMode::SignedL1;
    Horizon horizon = Horizon::full();
    int start_slot = 0;
    std::vector<Vec2> current_positions;  // empty means the scenario starts
    double safety_margin = 1e-3;          // meters added to r_k + r_l
    int speed_polygon_sides = 16;
    // Plan whose slots cover the solve window; used for sign selection and as
    // the first SCP linearization point. Straight lines are used when absent.
    std::optional<SwarmPlan> reference;
};

struct ScpSettings {
    int max_outer = 20;
    double convergence_tol = 1e-3;  // meters, max position change between iterates
    bool degenerate_direction_rule = true;
};

/// Flat indices of the decision variables for one solve window.
/// Per UAV and local step (1..steps): X, Y, Vx, Vy; Literal adds two
/// auxiliaries per unordered pair and step after all UAV blocks.
class VariableLayout {
public:
    VariableLayout(int num_uavs, int steps, bool auxiliaries);

    int num_uavs() const { return num_uavs_; }
    int steps() const { return steps_; }
    int num_pairs() const { return num_uavs_ * (num_uavs_ - 1) / 2; }
    bool has_auxiliaries() const { return auxiliaries_; }
    int num_variables() const;

    int x(int k, int step) const { return base(k, step); }
    int y(int k, int step) const { return base(k, step) + 1; }
    int vx(int k, int step) const { return base(k, step) + 2; }
    int vy(int k, int step) const { return base(k, step) + 3; }
    int aux_x(int pair, int step) const { return aux_base(pair, step); }
    int aux_y(int pair, int step) const { return aux_base(pair, step) + 1; }

    /// Rank of the unordered pair {k, l} in lexicographic order of (min, max).
    int pair_index(int k, int l) const;

private:
    int base(int k, int step) const { return 4 * (k * steps_ + step - 1); }
    int aux_base(int pair, int step) const { return 4 * num_uavs_ * steps_ + 2 * (pair * steps_ + step - 1); }

    int num_uavs_;
    int steps_;
    bool auxiliaries_;
};

struct Model {
    qp::Problem problem;
    VariableLayout layout;
    double objective_constant = 0.0;  // dropped constant of the squared-step objective
    int first_slot = 0;
    int last_slot = 0;
    std::vector<Vec2> initial_positions;
    int separation_rows = 0;
    int first_separation_row = 0;
};

/// Equal-step straight flights from start to goal over all slots.
SwarmPlan straight_line_reference(const Scenario& scenario);

/// Straight flights from the given positions at start_slot, arriving at
/// each goal at the final slot.
SwarmPlan straight_line_reference(const Scenario& scenario, int start_slot, std::span<const Vec2> positions);

/// Builds the QP for one solve window. Throws MissingReference when a
/// reference-based mode is used without one, DegenerateReferencePair when a
/// reference pair coincides and the direction rule is disabled.
Model build_model(const PlanRequest& request, const SwarmPlan* reference, const ScpSettings& scp = {});

/// Plans the requested window; Scp iterates build/solve to a fixed point.
/// Throws ScenarioInfeasible or SolverFailure.
SwarmPlan plan(const PlanRequest& request, const ScpSettings& scp = {}, const qp::Settings& solver = {});

struct VerificationReport {
    bool separation_ok = false;
    bool endpoints_ok = false;
    bool velocity_ok = false;
    bool kinematics_ok = false;
    double min_separation_slack = 0.0;  // min over pairs/slots of distance - (r_k + r_l)
    double max_endpoint_error = 0.0;
    double max_speed_excess = 0.0;  // max of |v| - v_max
    double max_kinematic_error = 0.0;

    bool ok() const { return separation_ok && endpoints_ok && velocity_ok && kinematics_ok; }
};

/// Checks a full-mission plan (slots 0..F) against the scenario.
/// Throws DimensionMismatch when the plan shape does not match.
VerificationReport verify_plan(const SwarmPlan& plan, const Scenario& scenario, double eps);

/// True when auxiliaries exist that satisfy the literal linearized
/// separation rows with every position held fixed.
bool literal_feasibility_probe(std::span<const Vec2> positions, std::span<const double> radii);

}  // namespace edc::planner
