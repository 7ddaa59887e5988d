#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fq {

/// minimize cost.x over free variables x subject to le rows (row.x <= rhs)
/// and eq rows (row.x == rhs).
struct LinearProgram {
    std::size_t n_vars = 0;
    std::vector<double> cost;
    std::vector<std::vector<double>> le_rows;
    std::vector<double> le_rhs;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;

    explicit LinearProgram(std::size_t n = 0) : n_vars(n), cost(n, 0.0) {}
    void add_le(std::vector<double> row, double rhs);
    void add_eq(std::vector<double> row, double rhs);
};

struct LpSolution {
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// Dense two-phase simplex with Bland's rule. Throws ErrorCode::numerical
/// when the program is infeasible or unbounded.
LpSolution solve_lp(const LinearProgram& lp);

/// One term weight * ||x - center|| of a norm-sum objective.
struct NormTerm {
    enum class Kind { l1, linf };
    Kind kind = Kind::l1;
    double weight = 1.0;
    std::vector<double> center;
};

/// minimize sum_t weight_t ||x - center_t|| over x in R^dim with C x = g.
struct NormSumProblem {
    std::size_t dim = 0;
    std::vector<NormTerm> terms;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;

    double evaluate(std::span<const double> x) const;
    void validate() const;
};

/// Epigraph reformulation as a linear program.
LinearProgram to_linear_program(const NormSumProblem& problem);

struct NormSumSolution {
    std::vector<double> x;
    double objective = 0.0;
    double gap = 0.0;  // certified primal-dual gap (PDHG only)
    std::size_t iterations = 0;
    bool converged = true;
};

/// Exact route: the epigraph LP solved by simplex.
NormSumSolution solve_simplex(const NormSumProblem& problem);

struct PdhgOptions {
    std::size_t max_iters = 2'000'000;
    double gap_tol = 1e-10;
    std::size_t check_every = 200;
};

/// Independent route: primal-dual hybrid gradient on the saddle form, stopped
/// on a certified duality gap.
NormSumSolution solve_pdhg(const NormSumProblem& problem, const PdhgOptions& options = {});

/// Euclidean projection of v onto {y : ||y||_1 <= radius}.
void project_l1_ball(std::span<double> v, double radius);

}  // namespace fq
