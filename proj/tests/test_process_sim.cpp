#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fq/error.hpp"
#include "fq/process_sim.hpp"
#include "support.hpp"

using namespace fq;
using namespace fq::testing;

namespace {

ProcessSpec spec_of(ProcessKind k) {
    ProcessSpec s;
    s.kind = k;
    return s;
}

}  // namespace

TEST_CASE("brownian covariance at t = 0.5, 1") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 3, 2.0);
    auto s = sample_paths(spec_of(ProcessKind::brownian), space, 100000, 42);
    const auto a = column(s, 0, 1), b = column(s, 0, 2);
    CHECK(std::abs(covariance(a, a) - 0.5) < 2e-2);
    CHECK(std::abs(covariance(a, b) - 0.5) < 2e-2);
    CHECK(std::abs(covariance(b, b) - 1.0) < 2e-2);
    for (double v : column(s, 0, 0)) CHECK(v == 0.0);
}

TEST_CASE("bridge is pinned at the end") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 64, 2.0, 2);
    auto s = sample_paths(spec_of(ProcessKind::bridge), space, 500, 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i](0, 63) == 0.0);
        CHECK(s[i](1, 63) == 0.0);
    }
}

TEST_CASE("fbm with H = 1/2 has brownian increments") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 9, 2.0);
    ProcessSpec f = spec_of(ProcessKind::fbm);
    f.hurst = 0.5;
    auto a = sample_paths(f, space, 10000, 3);
    auto b = sample_paths(spec_of(ProcessKind::brownian), space, 10000, 4);
    std::vector<double> ia, ib;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ia.push_back(a[i](0, 5) - a[i](0, 4));
        ib.push_back(b[i](0, 5) - b[i](0, 4));
    }
    CHECK(ks_statistic(ia, ib) < ks_critical_01(ia.size(), ib.size()));
}

TEST_CASE("fbm covariance matches the closed form") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 5, 2.0);
    ProcessSpec f = spec_of(ProcessKind::fbm);
    f.hurst = 0.75;
    auto s = sample_paths(f, space, 40000, 8);
    const auto x = column(s, 0, 2), y = column(s, 0, 4);
    const double h2 = 1.5;
    const double expected = 0.5 * (std::pow(0.5, h2) + 1.0 - std::pow(0.5, h2));
    CHECK(std::abs(covariance(x, y) - expected) < 3e-2);
    CHECK(std::abs(covariance(x, x) - std::pow(0.5, h2)) < 3e-2);
}

TEST_CASE("intrinsic semimetric") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 65, 2.0);
    auto bm = sample_paths(spec_of(ProcessKind::brownian), space, 100000, 5);
    CHECK(intrinsic_semimetric(bm, 2.0, 10, 10) == 0.0);
    for (std::size_t lag : {4u, 16u, 48u}) {
        const double rho = intrinsic_semimetric(bm, 2.0, 8, 8 + lag);
        const double dt = static_cast<double>(lag) / 64.0;
        CHECK(std::abs(rho * rho - dt) < 0.05 * dt);
    }

    ProcessSpec f = spec_of(ProcessKind::fbm);
    f.hurst = 0.7;
    auto fb = sample_paths(f, space, 20000, 6);
    std::vector<double> xs, ys;
    for (std::size_t lag : {1u, 2u, 4u, 8u, 16u, 32u}) {
        const double rho = intrinsic_semimetric(fb, 2.0, 0, lag);
        xs.push_back(std::log(static_cast<double>(lag)));
        ys.push_back(std::log(rho * rho));
    }
    const double slope = covariance(xs, ys) / covariance(xs, xs);
    CHECK(std::abs(slope - 1.4) < 0.1);

    CHECK_THROWS_AS(intrinsic_semimetric(PathSample(), 2.0, 0, 0), Error);
}

TEST_CASE("moment check") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 257, 2.0);
    auto bm = sample_paths(spec_of(ProcessKind::brownian), space, 20000, 9);
    auto rep = moment_check(bm, space, 2.0);
    CHECK(std::abs(rep.value - 0.5) < 0.02 * 0.5);
    CHECK(rep.stable);
    CHECK_FALSE(rep.heavy_tail);

    auto br = sample_paths(spec_of(ProcessKind::bridge), space, 20000, 10);
    CHECK(std::abs(moment_check(br, space, 2.0).value - 1.0 / 6.0) < 0.03 / 6.0);

    PathSample zero(1, 257, 50, 0, "zero");
    CHECK(moment_check(zero, space, 2.0).value == 0.0);
}

TEST_CASE("seed determinism") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 33, 2.0, 2);
    for (auto k : {ProcessKind::brownian, ProcessKind::ou, ProcessKind::fbm, ProcessKind::gamma,
                   ProcessKind::compound_poisson, ProcessKind::stable_levy}) {
        auto a = sample_paths(spec_of(k), space, 50, 77);
        auto b = sample_paths(spec_of(k), space, 50, 77);
        auto c = sample_paths(spec_of(k), space, 50, 78);
        CHECK(a == b);
        CHECK_FALSE(a == c);
        // Path i depends only on (seed, i).
        auto head = sample_paths(spec_of(k), space, 10, 77);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t q = 0; q < a.path_len(); ++q)
                CHECK(head[i].values[q] == a[i].values[q]);
    }
}

TEST_CASE("brownian self-similarity") {
    auto big = DiscretePathSpace::trapezoid(0.0, 4.0, 9, 2.0);
    auto unit = DiscretePathSpace::trapezoid(0.0, 1.0, 9, 2.0);
    auto a = sample_paths(spec_of(ProcessKind::brownian), big, 10000, 12);
    auto b = sample_paths(spec_of(ProcessKind::brownian), unit, 10000, 13);
    for (std::size_t k : {2u, 5u, 8u}) {
        auto xa = column(a, 0, k);
        for (auto& v : xa) v *= 0.5;
        CHECK(ks_statistic(xa, column(b, 0, k)) < ks_critical_01(xa.size(), b.size()));
    }
}

TEST_CASE("compound poisson jump count") {
    auto space = DiscretePathSpace::trapezoid(0.0, 2.0, 17, 2.0);
    ProcessSpec cp = spec_of(ProcessKind::compound_poisson);
    cp.lambda = 3.0;
    cp.jump.kind = JumpLaw::Kind::constant;
    cp.jump.mean = 1.0;
    auto s = sample_paths(cp, space, 100000, 14);
    CHECK(std::abs(mean(column(s, 0, 16)) - 6.0) < 0.02 * 6.0);
}

TEST_CASE("gamma marginals") {
    auto space = DiscretePathSpace::trapezoid(0.0, 2.0, 9, 2.0);
    ProcessSpec g = spec_of(ProcessKind::gamma);
    g.gamma_a = 2.0;
    auto s = sample_paths(g, space, 50000, 15);
    const auto x = column(s, 0, 8);
    CHECK(std::abs(mean(x) - 1.0) < 0.02);
    CHECK(std::abs(covariance(x, x) - 0.5) < 0.02);
    for (std::size_t i = 0; i < 100; ++i)
        for (std::size_t k = 1; k < 9; ++k) CHECK(s[i](0, k) >= s[i](0, k - 1));
}

TEST_CASE("stationary OU") {
    auto space = DiscretePathSpace::trapezoid(0.0, 4.0, 9, 2.0);
    ProcessSpec o = spec_of(ProcessKind::ou);
    o.ou_c = 1.0;
    auto s = sample_paths(o, space, 50000, 16);
    const auto x0 = column(s, 0, 0), x1 = column(s, 0, 2), x4 = column(s, 0, 8);
    CHECK(std::abs(covariance(x0, x0) - 1.0) < 0.03);
    CHECK(std::abs(covariance(x4, x4) - 1.0) < 0.03);
    CHECK(std::abs(covariance(x0, x1) - std::exp(-1.0)) < 0.03);
}

TEST_CASE("stable levy tail tagging") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 33, 2.0);
    ProcessSpec st = spec_of(ProcessKind::stable_levy);
    st.stable_rho = 1.5;
    auto s = sample_paths(st, space, 20000, 17);
    auto light = moment_check(s, space, 0.5);
    CHECK(std::isfinite(light.value));
    CHECK(light.stable);
    CHECK_FALSE(light.heavy_tail);
    auto heavy = moment_check(s, space, 1.5);
    CHECK(heavy.heavy_tail);
    CHECK(heavy.note.find("heavy-tail: r >= rho") != std::string::npos);
}

TEST_CASE("euler scheme mean of a linear SDE") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 65, 2.0);
    ProcessSpec ds = affine_diffusion(0.0, -1.0, 0.5, 0.0);
    ds.x0 = {1.0};
    auto s = sample_paths(ds, space, 20000, 18);
    // Euler mean is exactly (1 - dt)^k.
    const double expected = std::pow(1.0 - 1.0 / 64.0, 64.0);
    CHECK(std::abs(mean(column(s, 0, 64)) - expected) < 0.01);
    CHECK(std::abs(expected - std::exp(-1.0)) < 0.01);
}

TEST_CASE("invalid specs") {
    auto space = DiscretePathSpace::trapezoid(0.0, 1.0, 9, 2.0);
    ProcessSpec f = spec_of(ProcessKind::fbm);
    f.hurst = 1.0;
    CHECK_THROWS_AS(sample_paths(f, space, 5, 1), Error);
    ProcessSpec st = spec_of(ProcessKind::stable_levy);
    st.stable_rho = 2.0;
    CHECK_THROWS_AS(sample_paths(st, space, 5, 1), Error);
    ProcessSpec bm = spec_of(ProcessKind::brownian);
    bm.x0 = {0.0, 1.0};
    CHECK_THROWS_AS(sample_paths(bm, space, 5, 1), Error);
    CHECK_THROWS_AS(parse_process_kind("sheet"), Error);
    CHECK_THROWS_AS(sample_paths(spec_of(ProcessKind::diffusion_euler), space, 5, 1), Error);
}

TEST_CASE("fbm cholesky") {
    std::vector<double> t{0.25, 0.5, 0.75, 1.0};
    auto l = fbm_cholesky(t, 0.3);
    // L L^T reproduces the covariance.
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) s += l[a * 4 + k] * l[b * 4 + k];
            const double cov = 0.5 * (std::pow(t[a], 0.6) + std::pow(t[b], 0.6) -
                                      std::pow(std::abs(t[a] - t[b]), 0.6));
            CHECK(s == doctest::Approx(cov).epsilon(1e-9));
        }
}
