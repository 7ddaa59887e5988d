#include "fq/path_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fq/error.hpp"

namespace fq {

namespace {

std::vector<double> uniform_grid(double t_start, double t_end, std::size_t m) {
    require(m >= 2, ErrorCode::invalid_argument, "grid needs at least 2 nodes");
    require(t_end > t_start, ErrorCode::invalid_argument, "grid end must exceed grid start");
    std::vector<double> grid(m);
    const double span = t_end - t_start;
    for (std::size_t k = 0; k < m; ++k)
        grid[k] = t_start + span * static_cast<double>(k) / static_cast<double>(m - 1);
    grid.back() = t_end;
    return grid;
}

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    const std::size_t m = grid.size();
    std::vector<double> w(m, 0.0);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double h = grid[k + 1] - grid[k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    return w;
}

std::string shape_str(std::size_t d, std::size_t m) {
    std::ostringstream os;
    os << d << "x" << m;
    return os.str();
}

inline double abs_pow(double v, double p) {
    const double a = std::abs(v);
    if (p == 2.0) return a * a;
    if (p == 1.0) return a;
    return std::pow(a, p);
}

}  // namespace

DiscretePathSpace::DiscretePathSpace(std::vector<double> grid, std::vector<double> weights,
                                     double p, std::size_t d)
    : grid_(std::move(grid)), weights_(std::move(weights)), p_(p), d_(d) {
    require(grid_.size() >= 2, ErrorCode::invalid_argument, "grid needs at least 2 nodes");
    require(weights_.size() == grid_.size(), ErrorCode::invalid_argument,
            "weights and grid differ in length");
    require(std::isfinite(p_) && p_ >= 1.0, ErrorCode::invalid_argument,
            "norm exponent p must be a finite real >= 1");
    require(d_ >= 1, ErrorCode::invalid_argument, "coordinate dimension d must be >= 1");
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        require(std::isfinite(grid_[k]), ErrorCode::invalid_argument, "grid node not finite");
        require(std::isfinite(weights_[k]) && weights_[k] > 0.0, ErrorCode::invalid_argument,
                "quadrature weights must be finite and strictly positive");
        if (k > 0)
            require(grid_[k] > grid_[k - 1], ErrorCode::invalid_argument,
                    "grid must be strictly increasing");
    }
    total_mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

DiscretePathSpace DiscretePathSpace::trapezoid(double t_start, double t_end, std::size_t m,
                                               double p, std::size_t d) {
    auto grid = uniform_grid(t_start, t_end, m);
    auto w = trapezoid_weights(grid);
    return DiscretePathSpace(std::move(grid), std::move(w), p, d);
}

DiscretePathSpace DiscretePathSpace::exponential(double t_start, double t_end, std::size_t m,
                                                 double b, double p, std::size_t d) {
    require(b > 0.0 && std::isfinite(b), ErrorCode::invalid_argument,
            "exponential measure rate b must be positive");
    auto grid = uniform_grid(t_start, t_end, m);
    auto w = trapezoid_weights(grid);
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        w[k] *= std::exp(-b * grid[k]);
        sum += w[k];
    }
    // Rescale so the discrete total mass matches int exp(-bt) dt exactly.
    const double exact = (std::exp(-b * t_start) - std::exp(-b * t_end)) / b;
    for (auto& wk : w) wk *= exact / sum;
    return DiscretePathSpace(std::move(grid), std::move(w), p, d);
}

DiscretePathSpace DiscretePathSpace::with_p(double p) const {
    return DiscretePathSpace(grid_, weights_, p, d_);
}

DiscretePathSpace DiscretePathSpace::with_d(std::size_t d) const {
    return DiscretePathSpace(grid_, weights_, p_, d);
}

Path::Path(std::size_t d, std::size_t m, double fill) : d_(d), m_(m), values_(d * m, fill) {}

Path::Path(std::size_t d, std::size_t m, std::vector<double> values)
    : d_(d), m_(m), values_(std::move(values)) {
    require(values_.size() == d_ * m_, ErrorCode::dimension_mismatch,
            "path value count does not match " + shape_str(d_, m_));
}

Path::Path(PathView view)
    : d_(view.d), m_(view.m), values_(view.values.begin(), view.values.end()) {}

Path affine(PathView f, double c, PathView shift) {
    require(f.d == shift.d && f.m == shift.m, ErrorCode::dimension_mismatch,
            "affine shift is " + shape_str(shift.d, shift.m) + " but path is " +
                shape_str(f.d, f.m));
    Path out(f.d, f.m);
    auto v = out.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * f.values[i] + shift.values[i];
    return out;
}

PathSample::PathSample(std::size_t d, std::size_t m, std::size_t n_paths, std::uint64_t seed,
                       std::string process_tag)
    : d_(d), m_(m), n_paths_(n_paths), data_(d * m * n_paths, 0.0), seed_(seed),
      process_tag_(std::move(process_tag)) {}

PathSample::PathSample(std::size_t d, std::size_t m, std::vector<double> data,
                       std::uint64_t seed, std::string process_tag)
    : d_(d), m_(m), data_(std::move(data)), seed_(seed), process_tag_(std::move(process_tag)) {
    require(d_ >= 1 && m_ >= 1, ErrorCode::invalid_argument, "sample shape must be positive");
    require(data_.size() % (d_ * m_) == 0, ErrorCode::dimension_mismatch,
            "sample data length is not a multiple of " + shape_str(d_, m_));
    n_paths_ = data_.size() / (d_ * m_);
}

void PathSample::push_back(PathView path) {
    if (n_paths_ == 0 && d_ == 0) {
        d_ = path.d;
        m_ = path.m;
    }
    require(path.d == d_ && path.m == m_, ErrorCode::dimension_mismatch,
            "path is " + shape_str(path.d, path.m) + " but sample holds " + shape_str(d_, m_));
    data_.insert(data_.end(), path.values.begin(), path.values.end());
    ++n_paths_;
}

PathSample PathSample::marginal(std::size_t j) const {
    require(j < d_, ErrorCode::invalid_argument, "marginal coordinate out of range");
    std::vector<double> out;
    out.reserve(n_paths_ * m_);
    for (std::size_t i = 0; i < n_paths_; ++i) {
        auto row = (*this)[i].row(j);
        out.insert(out.end(), row.begin(), row.end());
    }
    PathSample s(1, m_, std::move(out), seed_, process_tag_ + "[" + std::to_string(j) + "]");
    s.set_tail_index(tail_index_);
    return s;
}

void check_shape(const DiscretePathSpace& space, PathView f) {
    if (f.d != space.d() || f.m != space.m() || f.values.size() != f.d * f.m)
        fail(ErrorCode::dimension_mismatch, "path is " + shape_str(f.d, f.m) +
                                                " but space is " +
                                                shape_str(space.d(), space.m()));
}

double lp_norm(const DiscretePathSpace& space, PathView f) {
    check_shape(space, f);
    const auto w = space.weights();
    const double p = space.p();
    double s = 0.0;
    for (std::size_t j = 0; j < f.d; ++j) {
        auto row = f.row(j);
        for (std::size_t k = 0; k < f.m; ++k) s += abs_pow(row[k], p) * w[k];
    }
    return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double lp_dist_pow(const DiscretePathSpace& space, PathView f, PathView g) {
    check_shape(space, f);
    check_shape(space, g);
    const auto w = space.weights();
    const double p = space.p();
    double s = 0.0;
    for (std::size_t j = 0; j < f.d; ++j) {
        auto a = f.row(j);
        auto b = g.row(j);
        for (std::size_t k = 0; k < f.m; ++k) s += abs_pow(a[k] - b[k], p) * w[k];
    }
    return s;
}

double lp_dist(const DiscretePathSpace& space, PathView f, PathView g) {
    const double s = lp_dist_pow(space, f, g);
    return space.p() == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / space.p());
}

double sup_norm(PathView f) {
    double best = 0.0;
    for (double v : f.values) best = std::max(best, std::abs(v));
    return best;
}

double sup_dist(PathView f, PathView g) {
    require(f.d == g.d && f.m == g.m, ErrorCode::dimension_mismatch,
            "paths differ in shape: " + shape_str(f.d, f.m) + " vs " + shape_str(g.d, g.m));
    double best = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        best = std::max(best, std::abs(f.values[i] - g.values[i]));
    return best;
}

Path norm_gradient(const DiscretePathSpace& space, PathView f) {
    check_shape(space, f);
    const double p = space.p();
    if (p == 1.0) fail(ErrorCode::numerical, "non-smooth norm: L^1 norm has no gradient");
    const double norm = lp_norm(space, f);
    if (norm == 0.0) fail(ErrorCode::numerical, "gradient undefined at 0");
    Path g(f.d, f.m);
    auto out = g.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = f.values[i];
        if (v == 0.0) continue;
        const double ratio = std::abs(v) / norm;
        const double mag = p == 2.0 ? ratio : std::pow(ratio, p - 1.0);
        out[i] = v > 0.0 ? mag : -mag;
    }
    return g;
}

double dual_pairing(const DiscretePathSpace& space, PathView g, PathView h) {
    check_shape(space, g);
    check_shape(space, h);
    const auto w = space.weights();
    double s = 0.0;
    for (std::size_t j = 0; j < g.d; ++j) {
        auto a = g.row(j);
        auto b = h.row(j);
        for (std::size_t k = 0; k < g.m; ++k) s += a[k] * b[k] * w[k];
    }
    return s;
}

}  // namespace fq
