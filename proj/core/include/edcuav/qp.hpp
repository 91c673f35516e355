#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edc::qp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// minimize 1/2 x'Px + q'x  subject to  lower <= Ax <= upper.
/// Equality rows have lower == upper; missing bounds are +-infinity.
struct Problem {
    SparseMatrix P;
    Vector q;
    SparseMatrix A;
    Vector lower;
    Vector upper;

    Index num_variables() const { return q.size(); }
    Index num_constraints() const { return lower.size(); }
    double objective(const Vector& x) const;
};

enum class Status { Solved, MaxIterations, PrimalInfeasible };

const char* to_string(Status status);

struct Solution {
    Vector x;
    Vector y;
    Status status = Status::MaxIterations;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    long iterations = 0;
    double objective = 0.0;
    bool polished = false;
    double solve_time_s = 0.0;
};

struct Settings {
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    long max_iter = 20000;

    // Splitting iteration parameters.
    double rho = 0.1;
    double sigma = 1e-6;
    double alpha = 1.6;
    bool adaptive_rho = true;
    long adaptive_rho_interval = 25;
    double adaptive_rho_tolerance = 5.0;
    int scaling_iterations = 10;
    long check_interval = 5;
    double eps_primal_infeasible = 1e-5;

    bool polish = true;
    double polish_delta = 1e-7;
    int polish_refine_iterations = 5;
};

enum class IssueKind {
    DimensionMismatch,
    AsymmetricCost,
    BoundInversion,
    NonFiniteEntry,
    NotPositiveSemidefinite,
};

const char* to_string(IssueKind kind);

struct Issue {
    IssueKind kind;
    Index index = -1;  // row of the offending bound, when applicable
    std::string detail;
};

struct ValidationReport {
    std::vector<Issue> issues;

    bool ok() const { return issues.empty(); }
    bool has(IssueKind kind) const;
};

ValidationReport validate(const Problem& problem);

struct Residuals {
    double primal = 0.0;  // worst violation of lower <= Ax <= upper
    double dual = 0.0;    // ||Px + q + A'y||_inf
};

/// Throws DimensionMismatch when x or y do not fit the problem.
Residuals kkt_residuals(const Problem& problem, const Vector& x, const Vector& y);

/// Thresholds a point must meet to count as Solved:
/// eps_abs + eps_rel * max(||Ax||_inf)  and
/// eps_abs + eps_rel * max(||Px||_inf, ||A'y||_inf, ||q||_inf).
Residuals kkt_tolerances(const Problem& problem, const Vector& x, const Vector& y,
                         double eps_abs, double eps_rel);

struct WarmStart {
    Vector x;
    Vector y;
};

/// Operator-splitting (ADMM) solver with Ruiz equilibration, adaptive
/// penalty, infeasibility detection and active-set polishing. The caller is
/// expected to have checked validate(problem).
Solution solve(const Problem& problem, const Settings& settings = {},
               const std::optional<WarmStart>& warm_start = std::nullopt);

/// Number of solve() calls made on the current thread.
std::uint64_t solve_invocations();

}  // namespace edc::qp
