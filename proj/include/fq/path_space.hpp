#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fq {

/**
 * Discretized L^p_{R^d}(T, mu): an ordered time grid with strictly positive
 * quadrature masses, a norm exponent p >= 1 and a coordinate dimension d.
 *
 * Paths live on the grid nodes only; every integral reduces to a weighted
 * sum over the nodes.
 */
class DiscretePathSpace {
public:
    DiscretePathSpace(std::vector<double> grid, std::vector<double> weights,
                      double p, std::size_t d);

    /// Uniform grid of m nodes on [t_start, t_end], trapezoid weights for dt.
    static DiscretePathSpace trapezoid(double t_start, double t_end, std::size_t m,
                                       double p, std::size_t d = 1);

    /// Uniform grid with trapezoid weights for the measure exp(-b t) dt.
    static DiscretePathSpace exponential(double t_start, double t_end, std::size_t m,
                                         double b, double p, std::size_t d = 1);

    std::span<const double> grid() const { return grid_; }
    std::span<const double> weights() const { return weights_; }
    double p() const { return p_; }
    std::size_t d() const { return d_; }
    std::size_t m() const { return grid_.size(); }
    double total_mass() const { return total_mass_; }
    double span_length() const { return grid_.back() - grid_.front(); }

    /// Same grid and weights, different exponent and/or dimension.
    DiscretePathSpace with_p(double p) const;
    DiscretePathSpace with_d(std::size_t d) const;

private:
    std::vector<double> grid_;
    std::vector<double> weights_;
    double p_;
    std::size_t d_;
    double total_mass_;
};

/// Non-owning view of a d x m row-major block of path values.
struct PathView {
    std::span<const double> values;
    std::size_t d = 0;
    std::size_t m = 0;

    double operator()(std::size_t j, std::size_t k) const { return values[j * m + k]; }
    std::span<const double> row(std::size_t j) const { return values.subspan(j * m, m); }
};

/// One realization sampled on the grid: d x m, coordinate j at node k.
class Path {
public:
    Path() = default;
    Path(std::size_t d, std::size_t m, double fill = 0.0);
    Path(std::size_t d, std::size_t m, std::vector<double> values);
    explicit Path(PathView view);

    std::size_t d() const { return d_; }
    std::size_t m() const { return m_; }
    double& operator()(std::size_t j, std::size_t k) { return values_[j * m_ + k]; }
    double operator()(std::size_t j, std::size_t k) const { return values_[j * m_ + k]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    PathView view() const { return {values_, d_, m_}; }
    operator PathView() const { return view(); }

    bool operator==(const Path&) const = default;

private:
    std::size_t d_ = 0;
    std::size_t m_ = 0;
    std::vector<double> values_;
};

/// Affine image c * f + u, u given as a path of the same shape.
Path affine(PathView f, double c, PathView shift);

/**
 * Empirical law of a process: N paths stored contiguously (path-major, then
 * coordinate, then node), plus the seed and generator tag that produced it.
 */
class PathSample {
public:
    PathSample() = default;
    PathSample(std::size_t d, std::size_t m, std::size_t n_paths, std::uint64_t seed,
               std::string process_tag);
    PathSample(std::size_t d, std::size_t m, std::vector<double> data, std::uint64_t seed,
               std::string process_tag);

    std::size_t size() const { return n_paths_; }
    bool empty() const { return n_paths_ == 0; }
    std::size_t d() const { return d_; }
    std::size_t m() const { return m_; }
    std::size_t path_len() const { return d_ * m_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& process_tag() const { return process_tag_; }

    /// Largest moment order for which E|X|^r is finite (infinity unless heavy-tailed).
    double tail_index() const { return tail_index_; }
    void set_tail_index(double rho) { tail_index_ = rho; }

    PathView operator[](std::size_t i) const {
        return {std::span<const double>(data_).subspan(i * path_len(), path_len()), d_, m_};
    }
    std::span<double> mutable_path(std::size_t i) {
        return std::span<double>(data_).subspan(i * path_len(), path_len());
    }
    std::span<const double> data() const { return data_; }

    void push_back(PathView path);

    /// Coordinate j of every path as a d = 1 sample.
    PathSample marginal(std::size_t j) const;

    bool operator==(const PathSample&) const = default;

private:
    std::size_t d_ = 0;
    std::size_t m_ = 0;
    std::size_t n_paths_ = 0;
    std::vector<double> data_;
    std::uint64_t seed_ = 0;
    std::string process_tag_;
    double tail_index_ = std::numeric_limits<double>::infinity();
};

void check_shape(const DiscretePathSpace& space, PathView f);

/// (sum_j sum_k |f_jk|^p w_k)^(1/p)
double lp_norm(const DiscretePathSpace& space, PathView f);

/// sum_j sum_k |f_jk - g_jk|^p w_k, i.e. lp_dist^p without the root.
double lp_dist_pow(const DiscretePathSpace& space, PathView f, PathView g);

double lp_dist(const DiscretePathSpace& space, PathView f, PathView g);

double sup_norm(PathView f);
double sup_dist(PathView f, PathView g);

/**
 * Gateaux gradient of the L^p norm at f != 0 (the duality map):
 * entries (|f_jk| / ||f||_p)^(p-1) sign(f_jk). Throws for p == 1 and f == 0.
 */
Path norm_gradient(const DiscretePathSpace& space, PathView f);

/// <g, h> = sum_j sum_k g_jk h_jk w_k
double dual_pairing(const DiscretePathSpace& space, PathView g, PathView h);

}  // namespace fq
