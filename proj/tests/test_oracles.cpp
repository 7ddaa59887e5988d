#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fq/convex.hpp"
#include "fq/error.hpp"
#include "fq/oracles.hpp"

using namespace fq;

TEST_CASE("simplex on a small LP") {
    // min -x - y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  (8/5, 6/5)
    LinearProgram lp(2);
    lp.cost = {-1.0, -1.0};
    lp.add_le({1.0, 2.0}, 4.0);
    lp.add_le({3.0, 1.0}, 6.0);
    lp.add_le({-1.0, 0.0}, 0.0);
    lp.add_le({0.0, -1.0}, 0.0);
    auto sol = solve_lp(lp);
    CHECK(sol.x[0] == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(sol.x[1] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(sol.objective == doctest::Approx(-2.8).epsilon(1e-12));

    LinearProgram eq(2);
    eq.cost = {1.0, 0.0};
    eq.add_eq({1.0, 1.0}, 1.0);
    eq.add_le({-1.0, 0.0}, -0.25);
    eq.add_le({0.0, 1.0}, 10.0);
    auto e = solve_lp(eq);
    CHECK(e.x[0] == doctest::Approx(0.25));

    LinearProgram infeasible(1);
    infeasible.add_le({1.0}, -1.0);
    infeasible.add_le({-1.0}, -1.0);
    CHECK_THROWS_AS(solve_lp(infeasible), Error);

    LinearProgram unbounded(1);
    unbounded.cost = {-1.0};
    CHECK_THROWS_AS(solve_lp(unbounded), Error);
}

TEST_CASE("l1 ball projection") {
    std::vector<double> v{3.0, -1.0, 0.5};
    project_l1_ball(v, 2.0);
    CHECK(std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]) == doctest::Approx(2.0));
    CHECK(v[0] == doctest::Approx(2.0));
    CHECK(v[1] == 0.0);
    std::vector<double> inside{0.1, -0.2};
    project_l1_ball(inside, 1.0);
    CHECK(inside == std::vector<double>{0.1, -0.2});
}

TEST_CASE("norm-sum solvers agree") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 4; ++rep) {
        NormSumProblem prob;
        prob.dim = 4;
        for (int t = 0; t < 6; ++t) {
            NormTerm term;
            term.kind = t % 2 ? NormTerm::Kind::linf : NormTerm::Kind::l1;
            term.weight = 0.5 + std::abs(g(rng));
            term.center = {g(rng), g(rng), g(rng), g(rng)};
            prob.terms.push_back(term);
        }
        if (rep % 2) {
            prob.eq_rows.push_back({1.0, 1.0, 1.0, 1.0});
            prob.eq_rhs.push_back(0.0);
        }
        auto a = solve_simplex(prob);
        auto b = solve_pdhg(prob);
        CHECK(b.converged);
        CHECK(std::abs(a.objective - b.objective) < 1e-6);
        CHECK(a.objective == doctest::Approx(prob.evaluate(a.x)).epsilon(1e-10));
        // Local optimality: random perturbations within the constraint never improve.
        for (int k = 0; k < 50; ++k) {
            std::vector<double> x = a.x;
            std::vector<double> d{g(rng), g(rng), g(rng), g(rng)};
            if (rep % 2) {
                const double mean = (d[0] + d[1] + d[2] + d[3]) / 4.0;
                for (auto& v : d) v -= mean;
            }
            for (std::size_t q = 0; q < 4; ++q) x[q] += 1e-3 * d[q];
            CHECK(prob.evaluate(x) >= a.objective - 1e-12);
        }
    }
}

TEST_CASE("c0 example") {
    auto ex = c0_example(16);
    CHECK(std::abs(ex.value_at_half - 0.5) < 1e-12);
    CHECK(std::abs(ex.best_value - 0.5) < 1e-9);
    CHECK(std::abs(ex.best_value_pdhg - 0.5) < 1e-6);
    double total = std::accumulate(ex.probs.begin(), ex.probs.end(), 0.0);
    CHECK(std::abs(total - 1.0) < 1e-15);
    for (double p : ex.probs) {
        CHECK(p > 0.0);
        CHECK(p < 0.5);
    }
    for (std::size_t k = 0; k < ex.sequence_values.size(); ++k) {
        CHECK(std::abs(ex.sequence_values[k] - ex.sequence_closed_form[k]) < 1e-12);
        if (k > 0) CHECK(ex.sequence_values[k] < ex.sequence_values[k - 1]);
    }
    CHECK(std::abs(ex.sequence_values.back() - 0.5) < 1e-12);

    // Moving within 1/2 of some u^(n0) costs more than 1/2.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(-0.49, 0.49);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n0 = rep % 16;
        std::vector<double> b(16);
        for (std::size_t j = 0; j < 16; ++j) b[j] = (j == n0 ? 1.0 : 0.0) + unif(rng);
        CHECK(c0_objective(ex.probs, b) > 0.5);
    }
}

TEST_CASE("l1 hyperplane example") {
    auto ex = l1_hyperplane_example(16);
    CHECK(std::abs(ex.e_F - 4.0 / 3.0) < 1e-9);
    CHECK(std::abs(ex.e_l1 - 1.0) < 1e-6);
    CHECK(std::abs(ex.e_l1_pdhg - 1.0) < 1e-6);
    for (std::size_t j = 0; j < 16; ++j)
        CHECK(std::abs(ex.minimizer_l1[j] - (j == 0 ? 1.0 : 0.0)) < 1e-6);
    for (std::size_t q = 0; q < ex.candidate_k.size(); ++q) {
        CHECK(ex.candidate_values[q] == ex.candidate_closed_form[q]);
        CHECK(ex.candidate_closed_form[q] == 1.0 + 1.0 / ex.c[ex.candidate_k[q] - 1]);
    }
    CHECK(ex.e_E_upper < 4.0 / 3.0);

    // Independent grid search over a = (s+t)u1 - s u2 - t u3.
    double best = 1e300;
    for (int i = -300; i <= 300; ++i)
        for (int j = -300; j <= 300; ++j) {
            const double s = i / 300.0, t = j / 300.0;
            std::vector<double> a(16, 0.0);
            a[0] = s + t;
            a[1] = -s;
            a[2] = -t;
            best = std::min(best, l1_example_objective(a));
        }
    CHECK(best == doctest::Approx(4.0 / 3.0).epsilon(1e-9));

    std::vector<double> bad(16, 1.0);
    CHECK_THROWS_AS(l1_hyperplane_example(16, bad), Error);
}

TEST_CASE("sharp constant example") {
    double prev = 0.0;
    for (std::size_t m = 2; m <= 10; ++m) {
        auto ex = sharp_constant_example(m);
        const double closed = 2.0 * static_cast<double>(m - 1) / static_cast<double>(m);
        CHECK(std::abs(ex.ratio - closed) < 1e-9);
        CHECK(std::abs(ex.e_E - 1.0) < 1e-9);
        CHECK(std::abs(ex.e_E_at_u1 - 1.0) < 1e-12);
        CHECK(std::abs(ex.e_F_pdhg - ex.e_F) < 1e-6);
        CHECK(ex.ratio <= 2.0);
        CHECK(ex.ratio >= prev);
        prev = ex.ratio;
    }
    CHECK(sharp_constant_example(2).ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sharp_constant_example(10).ratio == doctest::Approx(1.8).epsilon(1e-12));
    CHECK_THROWS_AS(sharp_constant_example(1), Error);
}

TEST_CASE("sup-norm example") {
    auto ex = sup_counterexample(12);
    CHECK(ex.m == sup_min_grid(12));
    for (double d : ex.dist_to_h) CHECK(d == 0.5);
    for (double v : ex.value_at_h) CHECK(std::abs(v - 0.5) < 1e-12);
    CHECK(ex.min_probe_margin > 0.0);
    for (const auto& probe : ex.probes) {
        for (double v : probe.values) CHECK(v > 0.5);
        if (probe.name == "zero")
            for (double v : probe.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_WITH_AS(sup_counterexample(12, 1000), doctest::Contains("32769"), Error);
}

TEST_CASE("truncation stability") {
    for (std::size_t M : {8u, 12u}) {
        auto a = c0_example(M), b = c0_example(2 * M);
        CHECK(std::abs(a.best_value - b.best_value) <= a.tail_bound + 1e-12);
        auto la = l1_hyperplane_example(M), lb = l1_hyperplane_example(2 * M);
        CHECK(std::abs(la.e_l1 - lb.e_l1) < 1e-6);
        CHECK(std::abs(la.e_F - lb.e_F) < 1e-9);
        CHECK(lb.e_E_upper <= la.e_E_upper);
        CHECK(lb.e_E_upper - 1.25 < 1.0 / (static_cast<double>(2 * M) - 1.0));
    }
}

TEST_CASE("closed-form registry") {
    ClosedFormQuery q;
    CHECK(closed_form_error(q) == doctest::Approx(0.70710678).epsilon(1e-8));
    q.process = ProcessKind::bridge;
    CHECK(closed_form_error(q) == doctest::Approx(0.40824829).epsilon(1e-8));
    q.process = ProcessKind::ou;
    q.t_end = 4.0;
    q.measure_b = 1.0;
    CHECK(closed_form_error(q) == doctest::Approx(std::sqrt(1.0 - std::exp(-4.0))).epsilon(1e-12));
    q.process = ProcessKind::fbm;
    q.n = 3;
    try {
        closed_form_error(q);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_oracle);
        CHECK(std::string(e.what()).find("no oracle") != std::string::npos);
    }
}
