#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fq/path_space.hpp"

namespace fq {

enum class ProcessKind {
    brownian,
    bridge,
    ou,
    fbm,
    diffusion_euler,
    gamma,
    compound_poisson,
    stable_levy,
};

std::string to_string(ProcessKind kind);
ProcessKind parse_process_kind(const std::string& name);

/// Jump size law of a compound Poisson process. Must not charge 0.
struct JumpLaw {
    enum class Kind { normal, constant };
    Kind kind = Kind::normal;
    double mean = 0.0;  // normal mean, or the constant jump size
    double sd = 1.0;
};

/// drift: out[j] = b_j(t, x); diffusion: out is d x d row-major sigma(t, x).
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

struct ProcessSpec {
    ProcessKind kind = ProcessKind::brownian;

    double hurst = 0.5;       // fbm, H in (0,1)
    double ou_c = 1.0;        // stationary OU covariance exp(-c|s-t|)
    double gamma_a = 1.0;     // Gamma process rate a: X_t ~ Gamma(shape t, rate a)
    double lambda = 1.0;      // compound Poisson intensity
    JumpLaw jump;             // compound Poisson jump law
    double stable_rho = 1.5;  // symmetric stable index in (0,2)
    VectorField drift;        // diffusion_euler
    VectorField diffusion;    // diffusion_euler
    std::vector<double> x0;   // initial value in R^d; empty means 0

    void validate(std::size_t d) const;
    std::string tag() const;
};

/// Diffusion with coordinatewise affine coefficients:
/// b_j(t,x) = drift_a + drift_b x_j, sigma = diag(diff_a + diff_b x_j).
ProcessSpec affine_diffusion(double drift_a, double drift_b, double diff_a, double diff_b);

/**
 * N i.i.d. paths on the grid. Path i draws from its own stream
 * derive_seed(seed, i), so the result does not depend on generation order.
 *
 * Exact finite-dimensional laws for brownian, bridge, ou, fbm (Cholesky of
 * the covariance), gamma, compound_poisson and stable_levy (Chambers-Mallows-
 * Stuck increments); Euler-Maruyama on the space's grid for diffusion_euler.
 */
PathSample sample_paths(const ProcessSpec& spec, const DiscretePathSpace& space,
                        std::size_t n_paths, std::uint64_t seed);

/// Lower Cholesky factor of the fbm covariance at the grid nodes with t > 0,
/// m' x m' row-major. Throws if the factorization fails after diagonal jitter.
std::vector<double> fbm_cholesky(std::span<const double> times, double hurst);

/// Monte Carlo (E |X_s - X_t|_q^q)^(1/max(q,1)).
double intrinsic_semimetric(const PathSample& sample, double q, std::size_t s_idx,
                            std::size_t t_idx);

struct MomentReport {
    double value = 0.0;        // estimate of E ||X||_p^r
    double first_half = 0.0;
    double second_half = 0.0;
    bool stable = true;        // halves agree within 20% relative
    bool heavy_tail = false;   // r >= tail index of the generating law
    std::string note;
};

MomentReport moment_check(const PathSample& sample, const DiscretePathSpace& space, double r);

}  // namespace fq
