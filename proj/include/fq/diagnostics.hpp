#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fq/quantize_core.hpp"

namespace fq {

/**
 * First-order (L^r, ||.||_p) optimality residuals of a codebook on an
 * empirical law. For atom i and coordinate j the mean over cell i of
 *
 *     ||x - a_i||_p^(r-p) |a_ij - x_j|^(p-1) sign(a_ij - x_j)
 *
 * is a function on the grid (0 where x == a_i); its weighted L^q norm,
 * q = p/(p-1) (grid sup when p = 1), is residuals[i*d + j].
 */
struct StationarityReport {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> residuals;
    double max_residual = 0.0;
    /// D^((r-1)/r): the units of the residual, for relative thresholds.
    double distortion_scale = 0.0;
    std::vector<double> cell_masses;
    double tie_mass = 0.0;
    double atom_hit_mass = 0.0;               // empirical P(X in alpha)
    std::vector<std::uint8_t> hit_atoms;      // atom i coincides with some sample path
    std::vector<std::uint8_t> regularity_eligible;
    bool admissible = false;

    double residual(std::size_t i, std::size_t j) const { return residuals[i * d + j]; }
    double relative_max_residual() const {
        return distortion_scale > 0.0 ? max_residual / distortion_scale : max_residual;
    }
    double min_cell_mass() const;
};

inline constexpr double kDefaultTieThreshold = 1e-3;

StationarityReport stationarity_residual(const Codebook& codebook, const PathSample& sample,
                                         double r, double tie_threshold = kDefaultTieThreshold);
StationarityReport stationarity_residual(const Codebook& codebook, const PathSample& sample,
                                         const VoronoiAssignment& assignment, double r,
                                         double tie_threshold = kDefaultTieThreshold);

struct MonotonicityEntry {
    std::size_t n = 0;
    double error = 0.0;
    double std_error = 0.0;
    /// error is below the previous entry's error by more than 2 standard errors.
    bool significant_gap = false;
    bool flagged = false;
    std::string reason;
};

/// quant_error per codebook (sizes must strictly increase); flags sizes that
/// do not increase, non-decreasing errors, and increases beyond 2 standard errors.
std::vector<MonotonicityEntry> monotonicity_check(std::span<const Codebook> codebooks,
                                                  const PathSample& sample, double r);

/// Lags in grid steps; max_steps == 0 selects span/8.
struct LagRange {
    std::size_t min_steps = 1;
    std::size_t max_steps = 0;
};

struct HolderSeries {
    std::size_t atom = 0;
    std::size_t coord = 0;
    double beta = 0.0;  // +inf for a constant function
    double intercept = 0.0;
    double r_squared = 0.0;
    bool constant = false;
    std::vector<double> lags;            // lag in time units
    std::vector<double> max_increments;  // max_k |a(t_{k+l}) - a(t_k)|
};

struct HolderFit {
    std::vector<HolderSeries> series;
    std::size_t lag_min_steps = 0;
    std::size_t lag_max_steps = 0;
    double dt = 0.0;
};

/**
 * Log-log regression of the maximal increment at lag l against l*dt for each
 * atom and coordinate. Needs a uniform grid with m >= 64 and lags within
 * [dt, span/4].
 */
HolderFit holder_fit(const Codebook& codebook, LagRange range = {});
HolderFit holder_fit(std::span<const Path> functions, std::span<const double> grid,
                     LagRange range = {});

/// max over atoms, coordinates and the given nodes of |a_i(t) - value|.
double boundary_pinning(const Codebook& codebook, std::span<const std::size_t> nodes,
                        double value);

}  // namespace fq
