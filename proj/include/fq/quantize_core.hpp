#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fq/path_space.hpp"

namespace fq {

/// Which norm measures distance to the atoms: the space's L^p norm or the
/// grid sup norm max_{j,k} |f_jk|.
enum class NormKind { lp, sup };

/**
 * An n-quantizer: n >= 1 pairwise distinct atoms in a DiscretePathSpace.
 * Inserting an atom at distance 0 from an existing one is rejected.
 */
class Codebook {
public:
    Codebook(DiscretePathSpace space, std::vector<Path> atoms);

    std::size_t size() const { return atoms_.size(); }
    const Path& atom(std::size_t i) const { return atoms_[i]; }
    const std::vector<Path>& atoms() const { return atoms_; }
    const DiscretePathSpace& space() const { return space_; }

    void add(Path atom);
    void replace(std::size_t i, Path atom);
    void remove(std::size_t i);

private:
    void check_atom(const Path& atom, std::size_t skip) const;

    DiscretePathSpace space_;
    std::vector<Path> atoms_;
};

struct VoronoiAssignment {
    std::vector<std::uint32_t> cell_index;
    std::vector<std::uint8_t> tie_flags;
    /// Distance to the chosen atom: ||x - a||_p^p under NormKind::lp, sup distance otherwise.
    std::vector<double> dist;
    NormKind norm = NormKind::lp;

    std::size_t size() const { return cell_index.size(); }
    std::size_t tie_count() const;
    std::vector<std::size_t> cell_counts(std::size_t n) const;
};

/// Relative tolerance under which two atom distances count as a tie.
inline constexpr double kTieTolerance = 1e-12;

/**
 * Nearest-atom projection of every sample path. Ties go to the lowest atom
 * index and are flagged. `hint`, when given, seeds the search with the
 * previous cell of each path; it only changes speed, never the result.
 */
VoronoiAssignment assign(const Codebook& codebook, const PathSample& sample,
                         NormKind norm = NormKind::lp, const VoronoiAssignment* hint = nullptr);

struct DistortionReport {
    double value = 0.0;                       // mean of min_i ||x - a_i||^r
    std::vector<double> per_cell_mass;        // empirical P(X in C_i)
    std::vector<double> per_cell_distortion;  // contribution of C_i to value
    double std_error = 0.0;                   // Monte Carlo standard error of value
    double r = 2.0;
    double tie_mass = 0.0;
    std::size_t n_paths = 0;
    NormKind norm = NormKind::lp;
};

DistortionReport distortion(const Codebook& codebook, const PathSample& sample, double r,
                            NormKind norm = NormKind::lp);
DistortionReport distortion(const Codebook& codebook, const VoronoiAssignment& assignment,
                            double r);

/// Distance to the chosen atom raised to r (converts the stored p-th power).
double assigned_distance_pow(const Codebook& codebook, const VoronoiAssignment& assignment,
                             std::size_t path, double r);

/// Each path replaced by its atom.
PathSample quantize_paths(const Codebook& codebook, const PathSample& sample);

/// distortion^(1/r): an upper estimate of e_{n,r} for this codebook.
double quant_error(const Codebook& codebook, const PathSample& sample, double r,
                   NormKind norm = NormKind::lp);

/// Standard error of quant_error from the delta method.
double quant_error_std_error(const DistortionReport& report);

struct ExponentBounds {
    double lower = 0.0;
    double value = 0.0;
    double upper = 0.0;
    double low_exponent = 0.0;   // p ^ r
    double high_exponent = 0.0;  // p v r
};

/**
 * Sandwich of the codebook's (L^r, ||.||_p) error between the same atoms
 * measured in (L^{p^r}, ||.||_{p^r}) and (L^{pvr}, ||.||_{pvr}), with the
 * mass prefactors mu(T)^(1/p - 1/(p^r)) below and mu(T)^(1/p - 1/(pvr)) above.
 */
ExponentBounds cross_exponent_bounds(const PathSample& sample, const DiscretePathSpace& space,
                                     const Codebook& codebook, double r);

}  // namespace fq
