#include "fq/convex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fq/error.hpp"

namespace fq {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-12;

struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;  // structural columns, rhs stored at index cols
    std::vector<double> a;
    std::vector<std::size_t> basis;
    std::vector<double> z;  // reduced costs, objective at index cols
    std::size_t pivots = 0;

    double& at(std::size_t i, std::size_t j) { return a[i * (cols + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * (cols + 1) + j]; }

    void pivot(std::size_t r, std::size_t c) {
        const std::size_t w = cols + 1;
        double* pr = a.data() + r * w;
        const double inv = 1.0 / pr[c];
        for (std::size_t j = 0; j < w; ++j) pr[j] *= inv;
        pr[c] = 1.0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            double* pi = a.data() + i * w;
            const double f = pi[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < w; ++j) pi[j] -= f * pr[j];
            pi[c] = 0.0;
        }
        const double f = z[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j < w; ++j) z[j] -= f * pr[j];
            z[c] = 0.0;
        }
        basis[r] = c;
        ++pivots;
    }

    // Reduced costs for cost vector c (size cols); z[cols] holds -objective.
    void price(const std::vector<double>& c) {
        z.assign(cols + 1, 0.0);
        for (std::size_t j = 0; j < cols; ++j) z[j] = c[j];
        for (std::size_t i = 0; i < rows; ++i) {
            const double cb = c[basis[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) z[j] -= cb * at(i, j);
        }
    }

    // Bland's rule; columns >= allowed are never entered.
    void run(std::size_t allowed) {
        const std::size_t limit = 100000 + 50 * (rows + cols);
        for (std::size_t it = 0; it < limit; ++it) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < allowed; ++j)
                if (z[j] < -kCostEps) {
                    enter = j;
                    break;
                }
            if (enter == cols) return;
            std::size_t leave = rows;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows; ++i) {
                const double v = at(i, enter);
                if (v <= kPivotEps) continue;
                const double ratio = at(i, cols) / v;
                if (ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && leave < rows && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == rows) fail(ErrorCode::numerical, "linear program is unbounded");
            pivot(leave, enter);
        }
        fail(ErrorCode::numerical, "simplex iteration limit reached");
    }
};

}  // namespace

void LinearProgram::add_le(std::vector<double> row, double rhs) {
    require(row.size() == n_vars, ErrorCode::dimension_mismatch, "LP row has wrong length");
    le_rows.push_back(std::move(row));
    le_rhs.push_back(rhs);
}

void LinearProgram::add_eq(std::vector<double> row, double rhs) {
    require(row.size() == n_vars, ErrorCode::dimension_mismatch, "LP row has wrong length");
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
}

LpSolution solve_lp(const LinearProgram& lp) {
    require(lp.cost.size() == lp.n_vars, ErrorCode::dimension_mismatch, "LP cost has wrong length");
    const std::size_t n = lp.n_vars;
    const std::size_t n_le = lp.le_rows.size();
    const std::size_t n_eq = lp.eq_rows.size();
    const std::size_t rows = n_le + n_eq;

    // Columns: x+ (n), x- (n), slacks (n_le), artificials (one per row that needs one).
    std::vector<std::size_t> art_row;
    for (std::size_t i = 0; i < n_le; ++i)
        if (lp.le_rhs[i] < 0.0) art_row.push_back(i);
    for (std::size_t i = 0; i < n_eq; ++i) art_row.push_back(n_le + i);
    const std::size_t n_struct = 2 * n + n_le;
    const std::size_t cols = n_struct + art_row.size();

    Tableau t;
    t.rows = rows;
    t.cols = cols;
    t.a.assign(rows * (cols + 1), 0.0);
    t.basis.assign(rows, 0);

    for (std::size_t i = 0; i < rows; ++i) {
        const bool is_le = i < n_le;
        const auto& row = is_le ? lp.le_rows[i] : lp.eq_rows[i - n_le];
        double rhs = is_le ? lp.le_rhs[i] : lp.eq_rhs[i - n_le];
        const double sign = rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            t.at(i, j) = sign * row[j];
            t.at(i, n + j) = -sign * row[j];
        }
        if (is_le) t.at(i, 2 * n + i) = sign;
        t.at(i, cols) = sign * rhs;
        if (is_le && rhs >= 0.0) t.basis[i] = 2 * n + i;
    }
    for (std::size_t k = 0; k < art_row.size(); ++k) {
        t.at(art_row[k], n_struct + k) = 1.0;
        t.basis[art_row[k]] = n_struct + k;
    }

    if (!art_row.empty()) {
        std::vector<double> c1(cols, 0.0);
        for (std::size_t k = 0; k < art_row.size(); ++k) c1[n_struct + k] = 1.0;
        t.price(c1);
        t.run(cols);
        if (-t.z[cols] > 1e-9) fail(ErrorCode::numerical, "linear program is infeasible");
        // Drive remaining artificials out of the basis; drop redundant rows.
        for (std::size_t i = 0; i < t.rows;) {
            if (t.basis[i] < n_struct) {
                ++i;
                continue;
            }
            std::size_t c = cols;
            for (std::size_t j = 0; j < n_struct; ++j)
                if (std::abs(t.at(i, j)) > 1e-9) {
                    c = j;
                    break;
                }
            if (c < cols) {
                t.pivot(i, c);
                ++i;
            } else {
                const std::size_t w = cols + 1;
                t.a.erase(t.a.begin() + static_cast<std::ptrdiff_t>(i * w),
                          t.a.begin() + static_cast<std::ptrdiff_t>((i + 1) * w));
                t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
                --t.rows;
            }
        }
    }

    std::vector<double> c2(cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        c2[j] = lp.cost[j];
        c2[n + j] = -lp.cost[j];
    }
    t.price(c2);
    t.run(n_struct);

    LpSolution sol;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < t.rows; ++i) {
        const std::size_t b = t.basis[i];
        if (b < n)
            sol.x[b] += t.at(i, cols);
        else if (b < 2 * n)
            sol.x[b - n] -= t.at(i, cols);
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.cost[j] * sol.x[j];
    sol.pivots = t.pivots;
    return sol;
}

double NormSumProblem::evaluate(std::span<const double> x) const {
    require(x.size() == dim, ErrorCode::dimension_mismatch, "point has wrong dimension");
    double total = 0.0;
    for (const auto& term : terms) {
        double v = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double e = std::abs(x[k] - term.center[k]);
            v = term.kind == NormTerm::Kind::l1 ? v + e : std::max(v, e);
        }
        total += term.weight * v;
    }
    return total;
}

void NormSumProblem::validate() const {
    require(dim >= 1, ErrorCode::invalid_argument, "problem dimension must be >= 1");
    require(!terms.empty(), ErrorCode::invalid_argument, "problem has no terms");
    for (const auto& t : terms) {
        require(t.center.size() == dim, ErrorCode::dimension_mismatch, "term center has wrong length");
        require(t.weight > 0.0 && std::isfinite(t.weight), ErrorCode::invalid_argument,
                "term weights must be positive");
    }
    require(eq_rows.size() == eq_rhs.size(), ErrorCode::dimension_mismatch,
            "constraint rows and right-hand sides differ in count");
    for (const auto& r : eq_rows)
        require(r.size() == dim, ErrorCode::dimension_mismatch, "constraint row has wrong length");
}

LinearProgram to_linear_program(const NormSumProblem& problem) {
    problem.validate();
    const std::size_t dim = problem.dim;
    // Variables: x (dim), then epigraph variables per term: one for linf,
    // dim for l1.
    std::size_t n = dim;
    std::vector<std::size_t> offset;
    for (const auto& t : problem.terms) {
        offset.push_back(n);
        n += t.kind == NormTerm::Kind::linf ? 1 : dim;
    }
    LinearProgram lp(n);
    for (std::size_t ti = 0; ti < problem.terms.size(); ++ti) {
        const auto& t = problem.terms[ti];
        for (std::size_t k = 0; k < dim; ++k) {
            const std::size_t e = t.kind == NormTerm::Kind::linf ? offset[ti] : offset[ti] + k;
            if (t.kind == NormTerm::Kind::l1 || k == 0) lp.cost[e] = t.weight;
            // x_k - c_k <= e  and  c_k - x_k <= e
            std::vector<double> up(n, 0.0), down(n, 0.0);
            up[k] = 1.0;
            up[e] = -1.0;
            down[k] = -1.0;
            down[e] = -1.0;
            lp.add_le(std::move(up), t.center[k]);
            lp.add_le(std::move(down), -t.center[k]);
        }
    }
    for (std::size_t i = 0; i < problem.eq_rows.size(); ++i) {
        std::vector<double> row(n, 0.0);
        std::copy(problem.eq_rows[i].begin(), problem.eq_rows[i].end(), row.begin());
        lp.add_eq(std::move(row), problem.eq_rhs[i]);
    }
    return lp;
}

NormSumSolution solve_simplex(const NormSumProblem& problem) {
    const auto sol = solve_lp(to_linear_program(problem));
    NormSumSolution out;
    out.x.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(problem.dim));
    out.objective = problem.evaluate(out.x);
    out.iterations = sol.pivots;
    return out;
}

void project_l1_ball(std::span<double> v, double radius) {
    double norm = 0.0;
    for (double x : v) norm += std::abs(x);
    if (norm <= radius) return;
    std::vector<double> mag(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
    std::sort(mag.begin(), mag.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        cum += mag[i];
        const double cand = (cum - radius) / static_cast<double>(i + 1);
        if (i + 1 == mag.size() || mag[i + 1] <= cand) {
            theta = cand;
            break;
        }
    }
    for (auto& x : v) {
        const double s = std::max(std::abs(x) - theta, 0.0);
        x = x > 0.0 ? s : -s;
    }
}

NormSumSolution solve_pdhg(const NormSumProblem& problem, const PdhgOptions& options) {
    problem.validate();
    const std::size_t dim = problem.dim;
    const std::size_t T = problem.terms.size();
    const std::size_t n_eq = problem.eq_rows.size();

    // Affine projection x -> x - C^T (C C^T)^+ (C x - g).
    Eigen::MatrixXd C(static_cast<Eigen::Index>(n_eq), static_cast<Eigen::Index>(dim));
    Eigen::VectorXd g(static_cast<Eigen::Index>(n_eq));
    for (std::size_t i = 0; i < n_eq; ++i) {
        for (std::size_t k = 0; k < dim; ++k)
            C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = problem.eq_rows[i][k];
        g(static_cast<Eigen::Index>(i)) = problem.eq_rhs[i];
    }
    Eigen::MatrixXd gram_inv;
    if (n_eq > 0) gram_inv = (C * C.transpose()).completeOrthogonalDecomposition().pseudoInverse();
    auto project_affine = [&](Eigen::VectorXd& x) {
        if (n_eq > 0) x -= C.transpose() * (gram_inv * (C * x - g));
    };
    auto project_range = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
        if (n_eq == 0) return Eigen::VectorXd::Zero(s.size());
        return C.transpose() * (gram_inv * (C * s));
    };

    const double step = 0.95 / std::sqrt(static_cast<double>(T));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    project_affine(x);
    Eigen::VectorXd xbar = x;
    std::vector<Eigen::VectorXd> y(T, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
    std::vector<Eigen::VectorXd> centers;
    for (const auto& t : problem.terms)
        centers.push_back(Eigen::Map<const Eigen::VectorXd>(t.center.data(),
                                                            static_cast<Eigen::Index>(dim)));

    auto project_dual = [&](std::size_t ti, Eigen::VectorXd& v) {
        const auto& term = problem.terms[ti];
        if (term.kind == NormTerm::Kind::l1)
            v = v.cwiseMax(-term.weight).cwiseMin(term.weight);
        else
            project_l1_ball(std::span<double>(v.data(), static_cast<std::size_t>(v.size())),
                            term.weight);
    };
    auto dual_norm = [&](std::size_t ti, const Eigen::VectorXd& v) {
        return problem.terms[ti].kind == NormTerm::Kind::l1 ? v.cwiseAbs().maxCoeff()
                                                            : v.cwiseAbs().sum();
    };

    NormSumSolution out;
    out.converged = false;
    std::vector<Eigen::VectorXd> yf(T);
    for (std::size_t it = 1; it <= options.max_iters; ++it) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
        for (std::size_t ti = 0; ti < T; ++ti) {
            y[ti] += step * (xbar - centers[ti]);
            project_dual(ti, y[ti]);
            sum += y[ti];
        }
        Eigen::VectorXd xn = x - step * sum;
        project_affine(xn);
        xbar = 2.0 * xn - x;
        x = std::move(xn);
        out.iterations = it;

        if (it % options.check_every != 0 && it != options.max_iters) continue;
        // Certified gap: make the dual iterate feasible, then compare.
        const Eigen::VectorXd resid = sum - project_range(sum);
        double lambda = 1.0;
        for (std::size_t ti = 0; ti < T; ++ti) {
            yf[ti] = y[ti] - resid / static_cast<double>(T);
            const double dn = dual_norm(ti, yf[ti]);
            if (dn > problem.terms[ti].weight) lambda = std::min(lambda, problem.terms[ti].weight / dn);
        }
        double dual = 0.0;
        for (std::size_t ti = 0; ti < T; ++ti) dual += lambda * yf[ti].dot(x - centers[ti]);
        const double primal =
            problem.evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
        out.gap = primal - dual;
        if (out.gap <= options.gap_tol) {
            out.converged = true;
            break;
        }
    }
    out.x.assign(x.data(), x.data() + x.size());
    out.objective = problem.evaluate(out.x);
    return out;
}

}  // namespace fq
