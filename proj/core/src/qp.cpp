#include "edcuav/qp.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "edcuav/error.hpp"

namespace edc::qp {
namespace {

thread_local std::uint64_t t_invocations = 0;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoEqualityFactor = 1e3;
constexpr double kMinScaling = 1e-4;
constexpr double kMaxScaling = 1e4;
constexpr double kDivisionFloor = 1e-10;

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
using Triplet = Eigen::Triplet<double, int>;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Vector column_inf_norms(const SparseMatrix& M) {
    Vector norms = Vector::Zero(M.cols());
    for (int j = 0; j < M.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(M, j); it; ++it) {
            norms[j] = std::max(norms[j], std::abs(it.value()));
        }
    }
    return norms;
}

Vector row_inf_norms(const SparseMatrix& M) {
    Vector norms = Vector::Zero(M.rows());
    for (int j = 0; j < M.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(M, j); it; ++it) {
            norms[it.row()] = std::max(norms[it.row()], std::abs(it.value()));
        }
    }
    return norms;
}

double limit_scaling(double v) {
    if (v < kMinScaling) return 1.0;
    return std::min(v, kMaxScaling);
}

// Problem after Ruiz equilibration: Ps = c D P D, qs = c D q, As = E A D.
struct ScaledProblem {
    SparseMatrix P;
    Vector q;
    SparseMatrix A;
    Vector lower;
    Vector upper;
    Vector D;
    Vector E;
    double c = 1.0;
};

ScaledProblem equilibrate(const Problem& problem, int iterations) {
    const Index n = problem.num_variables();
    const Index m = problem.num_constraints();
    ScaledProblem s{problem.P, problem.q, problem.A, problem.lower, problem.upper,
                    Vector::Ones(n), Vector::Ones(m), 1.0};

    for (int it = 0; it < iterations; ++it) {
        Vector col = column_inf_norms(s.P).cwiseMax(column_inf_norms(s.A));
        Vector row = row_inf_norms(s.A);
        Vector d(n);
        Vector e(m);
        for (Index j = 0; j < n; ++j) d[j] = 1.0 / std::sqrt(limit_scaling(col[j]));
        for (Index i = 0; i < m; ++i) e[i] = 1.0 / std::sqrt(limit_scaling(row[i]));

        s.P = d.asDiagonal() * s.P * d.asDiagonal();
        s.A = e.asDiagonal() * s.A * d.asDiagonal();
        s.q = s.q.cwiseProduct(d);
        s.D = s.D.cwiseProduct(d);
        s.E = s.E.cwiseProduct(e);

        const Vector pcol = column_inf_norms(s.P);
        const double mean_p = n > 0 ? pcol.mean() : 0.0;
        const double gamma = 1.0 / limit_scaling(std::max(mean_p, inf_norm(s.q)));
        s.P *= gamma;
        s.q *= gamma;
        s.c *= gamma;
    }
    for (Index i = 0; i < m; ++i) {
        if (std::isfinite(s.lower[i])) s.lower[i] *= s.E[i];
        if (std::isfinite(s.upper[i])) s.upper[i] *= s.E[i];
    }
    return s;
}

bool is_equality(double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && hi - lo <= 1e-12 * std::max(1.0, std::abs(lo)); }

Vector penalty_vector(const Vector& lower, const Vector& upper, double rho) {
    Vector r(lower.size());
    for (Index i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) && !std::isfinite(upper[i])) {
            r[i] = kRhoMin;
        } else if (is_equality(lower[i], upper[i])) {
            r[i] = std::min(kRhoEqualityFactor * rho, kRhoMax);
        } else {
            r[i] = rho;
        }
    }
    return r;
}

// Lower triangle of [P + sigma I, A'; A, -diag(1/rho)].
SparseMatrix assemble_kkt(const SparseMatrix& P, const SparseMatrix& A, double sigma, const Vector& rho) {
    const Index n = P.rows();
    const Index m = A.rows();
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(P.nonZeros() + A.nonZeros() + n + m));
    for (int j = 0; j < P.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(P, j); it; ++it) {
            if (it.row() > j) triplets.emplace_back(it.row(), j, it.value());
        }
    }
    Vector diag = Vector::Constant(n, sigma);
    for (int j = 0; j < P.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(P, j); it; ++it) {
            if (it.row() == j) diag[j] += it.value();
        }
    }
    for (Index j = 0; j < n; ++j) triplets.emplace_back(j, j, diag[j]);
    for (int j = 0; j < A.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
            triplets.emplace_back(static_cast<int>(n + it.row()), j, it.value());
        }
    }
    for (Index i = 0; i < m; ++i) triplets.emplace_back(n + i, n + i, -1.0 / rho[i]);
    SparseMatrix K(n + m, n + m);
    K.setFromTriplets(triplets.begin(), triplets.end());
    return K;
}

Vector project(const Vector& v, const Vector& lower, const Vector& upper) {
    return v.cwiseMax(lower).cwiseMin(upper);
}

struct Unscaled {
    Vector x;
    Vector y;
    Vector z;
};

Unscaled unscale(const ScaledProblem& s, const Vector& xs, const Vector& ys, const Vector& zs) {
    return Unscaled{s.D.cwiseProduct(xs), s.E.cwiseProduct(ys) / s.c, zs.cwiseQuotient(s.E)};
}

bool residuals_within(const Residuals& r, const Residuals& tol) {
    return r.primal <= tol.primal && r.dual <= tol.dual;
}

// Farkas-type certificate on the change of the dual iterate.
bool primal_infeasibility_certificate(const Problem& problem, const Vector& delta_y_unscaled, double eps) {
    const double norm = inf_norm(delta_y_unscaled);
    if (norm < kDivisionFloor) return false;
    const Vector dy = delta_y_unscaled / norm;
    double support = 0.0;
    for (Index i = 0; i < dy.size(); ++i) {
        if (dy[i] > eps) {
            if (!std::isfinite(problem.upper[i])) return false;
            support += problem.upper[i] * dy[i];
        } else if (dy[i] < -eps) {
            if (!std::isfinite(problem.lower[i])) return false;
            support += problem.lower[i] * dy[i];
        }
    }
    if (support >= -eps) return false;
    const Vector aty = problem.A.transpose() * dy;
    return inf_norm(aty) <= eps;
}

struct PolishResult {
    Vector x;
    Vector y;
};

// Solve the equality-constrained QP on the estimated active set and refine
// against the unregularized system.
std::optional<PolishResult> polish(const Problem& problem, const ScaledProblem& s, const Vector& zs,
                                   const Vector& ys, const Settings& settings, const Residuals& tol) {
    const Index n = s.q.size();
    const Index m = s.lower.size();
    std::vector<Index> rows;
    std::vector<double> targets;
    std::vector<int> side;  // -1 lower-active, +1 upper-active, 0 equality
    for (Index i = 0; i < m; ++i) {
        const bool lo_active = std::isfinite(s.lower[i]) && zs[i] - s.lower[i] < -ys[i];
        const bool hi_active = std::isfinite(s.upper[i]) && s.upper[i] - zs[i] < ys[i];
        if (is_equality(s.lower[i], s.upper[i])) {
            rows.push_back(i);
            targets.push_back(s.lower[i]);
            side.push_back(0);
        } else if (lo_active) {
            rows.push_back(i);
            targets.push_back(s.lower[i]);
            side.push_back(-1);
        } else if (hi_active) {
            rows.push_back(i);
            targets.push_back(s.upper[i]);
            side.push_back(1);
        }
    }
    const Index r = static_cast<Index>(rows.size());

    // Reduced constraint matrix (rows picked from As).
    std::vector<int> row_map(static_cast<std::size_t>(m), -1);
    for (Index k = 0; k < r; ++k) row_map[static_cast<std::size_t>(rows[k])] = static_cast<int>(k);
    std::vector<Triplet> red;
    for (int j = 0; j < s.A.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(s.A, j); it; ++it) {
            const int k = row_map[static_cast<std::size_t>(it.row())];
            if (k >= 0) red.emplace_back(k, j, it.value());
        }
    }
    SparseMatrix Ared(r, n);
    Ared.setFromTriplets(red.begin(), red.end());

    const double delta = settings.polish_delta;
    Vector rho_inv_delta = Vector::Constant(r, 1.0 / delta);
    SparseMatrix K = assemble_kkt(s.P, Ared, delta, rho_inv_delta);
    Ldlt ldlt;
    ldlt.compute(K);
    if (ldlt.info() != Eigen::Success) return std::nullopt;

    Vector rhs(n + r);
    rhs.head(n) = -s.q;
    for (Index k = 0; k < r; ++k) rhs[n + k] = targets[static_cast<std::size_t>(k)];

    Vector sol = ldlt.solve(rhs);
    for (int it = 0; it < settings.polish_refine_iterations; ++it) {
        Vector applied(n + r);
        applied.head(n) = s.P * sol.head(n) + Ared.transpose() * sol.tail(r);
        applied.tail(r) = Ared * sol.head(n);
        const Vector residual = rhs - applied;
        sol += ldlt.solve(residual);
    }
    if (!sol.allFinite()) return std::nullopt;

    Vector ys_full = Vector::Zero(m);
    for (Index k = 0; k < r; ++k) ys_full[rows[k]] = sol[n + k];
    Vector x = s.D.cwiseProduct(sol.head(n));
    Vector y = s.E.cwiseProduct(ys_full) / s.c;

    // Active-set guess must be consistent with the multiplier signs.
    for (Index k = 0; k < r; ++k) {
        const double yi = y[rows[k]];
        if (side[static_cast<std::size_t>(k)] < 0 && yi > tol.dual) return std::nullopt;
        if (side[static_cast<std::size_t>(k)] > 0 && yi < -tol.dual) return std::nullopt;
    }
    const Residuals res = kkt_residuals(problem, x, y);
    if (!residuals_within(res, kkt_tolerances(problem, x, y, settings.eps_abs, settings.eps_rel))) return std::nullopt;
    return PolishResult{std::move(x), std::move(y)};
}

}  // namespace

double Problem::objective(const Vector& x) const {
    return 0.5 * x.dot(P * x) + q.dot(x);
}

const char* to_string(Status status) {
    switch (status) {
        case Status::Solved: return "solved";
        case Status::MaxIterations: return "max_iterations";
        case Status::PrimalInfeasible: return "primal_infeasible";
    }
    return "unknown";
}

const char* to_string(IssueKind kind) {
    switch (kind) {
        case IssueKind::DimensionMismatch: return "DimensionMismatch";
        case IssueKind::AsymmetricCost: return "AsymmetricCost";
        case IssueKind::BoundInversion: return "BoundInversion";
        case IssueKind::NonFiniteEntry: return "NonFiniteEntry";
        case IssueKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    }
    return "Unknown";
}

bool ValidationReport::has(IssueKind kind) const {
    return std::any_of(issues.begin(), issues.end(), [kind](const Issue& i) { return i.kind == kind; });
}

ValidationReport validate(const Problem& problem) {
    ValidationReport report;
    const Index n = problem.num_variables();
    const Index m = problem.num_constraints();
    auto add = [&report](IssueKind kind, Index index, std::string detail) {
        report.issues.push_back(Issue{kind, index, std::move(detail)});
    };

    if (problem.P.rows() != n || problem.P.cols() != n) add(IssueKind::DimensionMismatch, -1, "P must be n x n");
    if (problem.A.rows() != m || problem.A.cols() != n) add(IssueKind::DimensionMismatch, -1, "A must be m x n");
    if (problem.upper.size() != m) add(IssueKind::DimensionMismatch, -1, "upper must have length m");
    if (!report.ok()) return report;

    for (Index j = 0; j < n; ++j) {
        if (!std::isfinite(problem.q[j])) add(IssueKind::NonFiniteEntry, j, "q entry not finite");
    }
    for (int j = 0; j < problem.P.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(problem.P, j); it; ++it) {
            if (!std::isfinite(it.value())) add(IssueKind::NonFiniteEntry, it.row(), "P entry not finite");
        }
    }
    for (int j = 0; j < problem.A.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(problem.A, j); it; ++it) {
            if (!std::isfinite(it.value())) add(IssueKind::NonFiniteEntry, it.row(), "A entry not finite");
        }
    }
    for (Index i = 0; i < m; ++i) {
        if (std::isnan(problem.lower[i]) || std::isnan(problem.upper[i]) || problem.lower[i] == kInf ||
            problem.upper[i] == -kInf) {
            add(IssueKind::NonFiniteEntry, i, "bound is NaN or infinite on the wrong side");
        } else if (problem.lower[i] > problem.upper[i]) {
            std::ostringstream msg;
            msg << "lower " << problem.lower[i] << " exceeds upper " << problem.upper[i];
            add(IssueKind::BoundInversion, i, msg.str());
        }
    }

    const SparseMatrix Pt = problem.P.transpose();
    const double asym = (SparseMatrix(problem.P - Pt)).coeffs().size() == 0
                            ? 0.0
                            : SparseMatrix(problem.P - Pt).coeffs().cwiseAbs().maxCoeff();
    if (asym > 1e-9) add(IssueKind::AsymmetricCost, -1, "P is not symmetric");

    if (!report.has(IssueKind::NonFiniteEntry) && !report.has(IssueKind::AsymmetricCost)) {
        SparseMatrix shifted = problem.P;
        for (Index j = 0; j < n; ++j) shifted.coeffRef(j, j) += 1e-10;
        Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower> llt(shifted);
        if (llt.info() != Eigen::Success) add(IssueKind::NotPositiveSemidefinite, -1, "P + 1e-10 I has no Cholesky factor");
    }
    return report;
}

Residuals kkt_residuals(const Problem& problem, const Vector& x, const Vector& y) {
    if (x.size() != problem.num_variables() || y.size() != problem.num_constraints()) {
        throw Error(ErrorCode::DimensionMismatch, "kkt_residuals: iterate does not match problem size");
    }
    const Vector ax = problem.A * x;
    double primal = 0.0;
    for (Index i = 0; i < ax.size(); ++i) {
        primal = std::max({primal, problem.lower[i] - ax[i], ax[i] - problem.upper[i]});
    }
    const Vector grad = problem.P * x + problem.q + problem.A.transpose() * y;
    return Residuals{primal, inf_norm(grad)};
}

Residuals kkt_tolerances(const Problem& problem, const Vector& x, const Vector& y, double eps_abs, double eps_rel) {
    const double primal_scale = inf_norm(problem.A * x);
    const double dual_scale = std::max({inf_norm(problem.P * x), inf_norm(problem.A.transpose() * y), inf_norm(problem.q)});
    return Residuals{eps_abs + eps_rel * primal_scale, eps_abs + eps_rel * dual_scale};
}

std::uint64_t solve_invocations() { return t_invocations; }

Solution solve(const Problem& problem, const Settings& settings, const std::optional<WarmStart>& warm_start) {
    ++t_invocations;
    const auto t0 = std::chrono::steady_clock::now();
    const Index n = problem.num_variables();
    const Index m = problem.num_constraints();

    const ScaledProblem s = equilibrate(problem, settings.scaling_iterations);

    Vector xs = Vector::Zero(n);
    Vector zs = Vector::Zero(m);
    Vector ys = Vector::Zero(m);
    if (warm_start && warm_start->x.size() == n && warm_start->y.size() == m) {
        xs = warm_start->x.cwiseQuotient(s.D);
        ys = warm_start->y.cwiseQuotient(s.E) * s.c;
        zs = project(s.A * xs, s.lower, s.upper);
    }

    double rho = settings.rho;
    Vector rho_vec = penalty_vector(s.lower, s.upper, rho);
    Ldlt ldlt;
    SparseMatrix K = assemble_kkt(s.P, s.A, settings.sigma, rho_vec);
    ldlt.analyzePattern(K);
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success) {
        throw Error(ErrorCode::SolverFailure, "KKT factorization failed");
    }

    Solution out;
    Vector rhs(n + m);
    Vector ys_prev = ys;
    long iter = 0;
    bool converged = false;
    bool infeasible = false;

    for (iter = 1; iter <= settings.max_iter; ++iter) {
        const Vector x_prev = xs;
        const Vector z_prev = zs;
        ys_prev = ys;

        rhs.head(n) = settings.sigma * x_prev - s.q;
        rhs.tail(m) = z_prev - ys.cwiseQuotient(rho_vec);
        const Vector sol = ldlt.solve(rhs);
        const Vector x_tilde = sol.head(n);
        const Vector z_tilde = z_prev + (sol.tail(m) - ys).cwiseQuotient(rho_vec);

        xs = settings.alpha * x_tilde + (1.0 - settings.alpha) * x_prev;
        const Vector z_relaxed = settings.alpha * z_tilde + (1.0 - settings.alpha) * z_prev;
        zs = project(z_relaxed + ys.cwiseQuotient(rho_vec), s.lower, s.upper);
        ys += rho_vec.cwiseProduct(z_relaxed - zs);

        const bool check = iter % settings.check_interval == 0 || iter == settings.max_iter;
        if (!check) continue;

        const Unscaled u = unscale(s, xs, ys, zs);
        const Vector ax = problem.A * u.x;
        const double gap = inf_norm(ax - u.z);
        const double gap_tol = settings.eps_abs + settings.eps_rel * std::max(inf_norm(ax), inf_norm(u.z));
        const Residuals res = kkt_residuals(problem, u.x, u.y);
        const Residuals tol = kkt_tolerances(problem, u.x, u.y, settings.eps_abs, settings.eps_rel);
        if (gap <= gap_tol && residuals_within(res, tol)) {
            converged = true;
            break;
        }
        if (m > 0 && primal_infeasibility_certificate(problem, s.E.cwiseProduct(ys - ys_prev), settings.eps_primal_infeasible)) {
            infeasible = true;
            break;
        }

        if (settings.adaptive_rho && m > 0 && iter % settings.adaptive_rho_interval == 0) {
            const Vector axs = s.A * xs;
            const Vector pxs = s.P * xs;
            const Vector atys = s.A.transpose() * ys;
            const double prim = inf_norm(axs - zs) / std::max({inf_norm(axs), inf_norm(zs), kDivisionFloor});
            const double dual = inf_norm(pxs + s.q + atys) /
                                std::max({inf_norm(pxs), inf_norm(atys), inf_norm(s.q), kDivisionFloor});
            const double rho_new = std::clamp(rho * std::sqrt(prim / std::max(dual, kDivisionFloor)), kRhoMin, kRhoMax);
            if (rho_new > rho * settings.adaptive_rho_tolerance || rho_new < rho / settings.adaptive_rho_tolerance) {
                rho = rho_new;
                rho_vec = penalty_vector(s.lower, s.upper, rho);
                K = assemble_kkt(s.P, s.A, settings.sigma, rho_vec);
                ldlt.factorize(K);
                if (ldlt.info() != Eigen::Success) {
                    throw Error(ErrorCode::SolverFailure, "KKT refactorization failed");
                }
            }
        }
    }
    out.iterations = std::min(iter, settings.max_iter);

    Unscaled u = unscale(s, xs, ys, zs);
    out.x = std::move(u.x);
    out.y = std::move(u.y);
    if (infeasible) {
        out.status = Status::PrimalInfeasible;
    } else if (converged) {
        out.status = Status::Solved;
        if (settings.polish && n > 0) {
            const Residuals tol = kkt_tolerances(problem, out.x, out.y, settings.eps_abs, settings.eps_rel);
            if (auto polished = polish(problem, s, zs, ys, settings, tol)) {
                out.x = std::move(polished->x);
                out.y = std::move(polished->y);
                out.polished = true;
            }
        }
    } else {
        out.status = Status::MaxIterations;
    }

    const Residuals res = kkt_residuals(problem, out.x, out.y);
    out.primal_residual = res.primal;
    out.dual_residual = res.dual;
    out.objective = problem.objective(out.x);
    out.solve_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace edc::qp
