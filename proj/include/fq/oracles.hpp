#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fq/process_sim.hpp"

namespace fq {

/// Finitely supported law on R^M.
struct AtomicLaw {
    std::vector<std::vector<double>> atoms;
    std::vector<double> probs;

    void validate() const;
};

/// p_n = (1/3)(2/3)^(n-1) for n < M with the tail mass (2/3)^M folded into
/// p_M, so every weight lies in (0, 1/2) for M >= 3 and the sum is 1.
std::vector<double> default_atom_probs(std::size_t M);

/// E||X - b||_inf for X uniform over the canonical basis with weights probs.
double c0_objective(std::span<const double> probs, std::span<const double> b);

struct C0Example {
    std::size_t M = 0;
    std::vector<double> probs;
    double value_at_half = 0.0;              // b = (1/2, ..., 1/2)
    double best_value = 0.0;                 // simplex
    std::vector<double> best_point;
    double best_value_pdhg = 0.0;
    std::vector<double> best_point_pdhg;
    double pdhg_gap = 0.0;
    std::vector<double> sequence_values;     // at a^(m) = 1/2 sum_{n<=m} u^(n), m = 1..M
    std::vector<double> sequence_closed_form;
    double tail_bound = 0.0;                 // mass beyond the truncation, (2/3)^M
};

C0Example c0_example(std::size_t M, std::span<const double> probs = {});

/// c_1 = c_2 = c_3 = 1, c_j = 4 - 4/j for j >= 4.
std::vector<double> default_hyperplane_c(std::size_t M);

struct L1HyperplaneExample {
    std::size_t M = 0;
    std::vector<double> c;
    double e_F = 0.0;  // exact minimum over a = (s+t)u1 - s u2 - t u3
    double e_F_s = 0.0;
    double e_F_t = 0.0;
    double e_l1 = 0.0;  // simplex over R^M
    std::vector<double> minimizer_l1;
    double e_l1_pdhg = 0.0;
    std::vector<double> minimizer_l1_pdhg;
    std::vector<std::size_t> candidate_k;      // k = 4..M
    std::vector<double> candidate_values;      // E||X - a^(k)||, a^(k) = u1 - u^(k)/c_k
    std::vector<double> candidate_closed_form; // 1 + 1/c_k
    double e_E_upper = 0.0;                    // min over candidates
};

L1HyperplaneExample l1_hyperplane_example(std::size_t M, std::span<const double> c = {});

/// E||X - a||_1 over the three-point law {0, u1 - u2, u1 - u3}, a in R^M.
double l1_example_objective(std::span<const double> a);

struct SharpConstantExample {
    std::size_t m = 0;
    double e_E = 0.0;      // simplex over R^m
    double e_E_at_u1 = 0.0;
    double e_F = 0.0;      // simplex over {a : sum a = 0}
    double e_F_pdhg = 0.0;
    double e_F_at_v1 = 0.0;
    double ratio = 0.0;    // e_F / e_E
    double ratio_closed_form = 0.0;  // 2(m-1)/m
};

SharpConstantExample sharp_constant_example(std::size_t m);

/// f_n(t) on [0, 1]: a unit tent left of 1/2 and its negative mirror.
double sup_tent(std::size_t n, double t);
/// h = 1/2 on [0, 1/2], -1/2 on (1/2, 1].
double sup_center(double t);

struct SupProbe {
    std::string name;
    std::vector<double> coeffs;  // polynomial in (2t - 1), lowest degree first
    std::vector<double> values;  // (E||X - g||^r)^(1/r) per r
};

struct SupCounterexample {
    std::size_t n_funcs = 0;
    std::size_t m = 0;
    std::vector<double> probs;
    std::vector<double> r_values;
    std::vector<double> dist_to_h;   // ||f_n - h||_sup on the grid, per n
    std::vector<double> value_at_h;  // per r
    std::vector<SupProbe> probes;
    double min_probe_margin = 0.0;   // min over probes and r of value - 1/2
};

/// Smallest uniform grid size resolving every feature of f_1..f_{n_funcs}.
std::size_t sup_min_grid(std::size_t n_funcs);

SupCounterexample sup_counterexample(std::size_t n_funcs, std::size_t m = 0,
                                     std::size_t n_random_probes = 32, std::uint64_t seed = 1);

struct ClosedFormQuery {
    ProcessKind process = ProcessKind::brownian;
    std::size_t n = 1;
    double p = 2.0;
    double r = 2.0;
    double t_start = 0.0;
    double t_end = 1.0;
    double measure_b = 0.0;  // weight e^(-b t); 0 is Lebesgue
};

/// Registered analytic values of e_{n,r}; throws ErrorCode::no_oracle otherwise.
double closed_form_error(const ClosedFormQuery& q);

}  // namespace fq
