#include "fq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fq/error.hpp"

namespace fq {

namespace {

double signed_pow(double v, double e) {
    if (v == 0.0) return 0.0;
    const double mag = e == 1.0 ? std::abs(v) : (e == 0.0 ? 1.0 : std::pow(std::abs(v), e));
    return v > 0.0 ? mag : -mag;
}

}  // namespace

double StationarityReport::min_cell_mass() const {
    return cell_masses.empty() ? 0.0 : *std::min_element(cell_masses.begin(), cell_masses.end());
}

StationarityReport stationarity_residual(const Codebook& codebook, const PathSample& sample,
                                         double r, double tie_threshold) {
    return stationarity_residual(codebook, sample, assign(codebook, sample), r, tie_threshold);
}

StationarityReport stationarity_residual(const Codebook& codebook, const PathSample& sample,
                                         const VoronoiAssignment& assignment, double r,
                                         double tie_threshold) {
    require(r >= 1.0 && std::isfinite(r), ErrorCode::invalid_argument, "r must be >= 1");
    require(assignment.size() == sample.size(), ErrorCode::invalid_argument,
            "assignment does not match sample");
    const auto& space = codebook.space();
    const double p = space.p();
    const std::size_t n = codebook.size();
    const std::size_t d = space.d();
    const std::size_t m = space.m();
    const std::size_t len = d * m;
    const auto w = space.weights();

    StationarityReport rep;
    rep.n = n;
    rep.d = d;
    rep.residuals.assign(n * d, 0.0);
    rep.cell_masses.assign(n, 0.0);
    rep.hit_atoms.assign(n, 0);
    rep.regularity_eligible.assign(n, 1);

    const std::size_t N = sample.size();
    if (N == 0) return rep;

    std::vector<double> mean(n * len, 0.0);
    std::vector<std::size_t> count(n, 0);
    std::vector<double> u(len);
    std::size_t hits = 0;
    double dist_sum = 0.0;

    for (std::size_t s = 0; s < N; ++s) {
        const std::size_t i = assignment.cell_index[s];
        ++count[i];
        const auto x = sample[s].values;
        const auto a = codebook.atom(i).values();
        double norm_pow = 0.0;  // ||a - x||_p^p, or ||.||_1 for p = 1
        for (std::size_t q = 0; q < len; ++q) {
            u[q] = a[q] - x[q];
            const double au = std::abs(u[q]);
            norm_pow += (p == 2.0 ? au * au : (p == 1.0 ? au : std::pow(au, p))) * w[q % m];
        }
        if (norm_pow == 0.0) {
            ++hits;
            rep.hit_atoms[i] = 1;
            continue;  // 0/||0|| = 0
        }
        const double norm = p == 2.0 ? std::sqrt(norm_pow) : std::pow(norm_pow, 1.0 / p);
        dist_sum += std::pow(norm, r);
        const double factor = std::pow(norm, r - p);
        double* acc = mean.data() + i * len;
        for (std::size_t q = 0; q < len; ++q) acc[q] += factor * signed_pow(u[q], p - 1.0);
    }

    const double inv_n = 1.0 / static_cast<double>(N);
    for (std::size_t i = 0; i < n; ++i) {
        rep.cell_masses[i] = static_cast<double>(count[i]) * inv_n;
        if (count[i] == 0) continue;
        const double inv_c = 1.0 / static_cast<double>(count[i]);
        for (std::size_t j = 0; j < d; ++j) {
            const double* row = mean.data() + i * len + j * m;
            double res = 0.0;
            if (p == 1.0) {
                for (std::size_t k = 0; k < m; ++k) res = std::max(res, std::abs(row[k] * inv_c));
            } else {
                const double qexp = p / (p - 1.0);
                double s = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double v = std::abs(row[k] * inv_c);
                    s += (qexp == 2.0 ? v * v : std::pow(v, qexp)) * w[k];
                }
                res = qexp == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / qexp);
            }
            rep.residuals[i * d + j] = res;
        }
    }
    rep.max_residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
    rep.distortion_scale = std::pow(dist_sum * inv_n, (r - 1.0) / r);
    rep.tie_mass = static_cast<double>(assignment.tie_count()) * inv_n;
    rep.atom_hit_mass = static_cast<double>(hits) * inv_n;
    if (r > p)
        for (std::size_t i = 0; i < n; ++i) rep.regularity_eligible[i] = rep.hit_atoms[i] ? 0 : 1;
    rep.admissible = rep.min_cell_mass() > 0.0 && rep.tie_mass < tie_threshold;
    return rep;
}

std::vector<MonotonicityEntry> monotonicity_check(std::span<const Codebook> codebooks,
                                                  const PathSample& sample, double r) {
    std::vector<MonotonicityEntry> out;
    out.reserve(codebooks.size());
    for (std::size_t k = 0; k < codebooks.size(); ++k) {
        const auto rep = distortion(codebooks[k], sample, r);
        MonotonicityEntry e;
        e.n = codebooks[k].size();
        e.error = std::pow(rep.value, 1.0 / r);
        e.std_error = quant_error_std_error(rep);
        if (k > 0) {
            const auto& prev = out.back();
            const double noise = 2.0 * std::max(e.std_error, prev.std_error);
            e.significant_gap = prev.error - e.error > noise;
            if (e.n <= prev.n) {
                e.flagged = true;
                e.reason = "size does not increase";
            }
            if (e.error >= prev.error) {
                e.flagged = true;
                if (!e.reason.empty()) e.reason += "; ";
                e.reason += e.error > prev.error + noise ? "error increases beyond 2 standard errors"
                                                         : "error does not decrease";
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

HolderFit holder_fit(const Codebook& codebook, LagRange range) {
    const auto& space = codebook.space();
    return holder_fit(codebook.atoms(), space.grid(), range);
}

HolderFit holder_fit(std::span<const Path> functions, std::span<const double> grid,
                     LagRange range) {
    const std::size_t m = grid.size();
    require(m >= 64, ErrorCode::invalid_argument, "Hölder fit needs at least 64 grid nodes");
    const double span = grid[m - 1] - grid[0];
    const double dt = span / static_cast<double>(m - 1);
    for (std::size_t k = 1; k < m; ++k)
        require(std::abs((grid[k] - grid[k - 1]) - dt) <= 1e-9 * dt, ErrorCode::invalid_argument,
                "Hölder fit needs a uniform grid");

    std::size_t lo = std::max<std::size_t>(range.min_steps, 1);
    std::size_t hi = range.max_steps == 0 ? (m - 1) / 8 : range.max_steps;
    require(static_cast<double>(hi) * dt <= 0.25 * span * (1.0 + 1e-12),
            ErrorCode::invalid_argument, "largest lag exceeds span/4");
    require(hi > lo, ErrorCode::invalid_argument, "lag range needs at least two lags");

    // Roughly log-uniform integer lags.
    std::vector<std::size_t> lags;
    const double ratio = std::pow(static_cast<double>(hi) / static_cast<double>(lo), 1.0 / 24.0);
    for (double l = static_cast<double>(lo); ; l *= ratio) {
        auto v = static_cast<std::size_t>(std::llround(l));
        v = std::min(v, hi);
        if (lags.empty() || v != lags.back()) lags.push_back(v);
        if (v >= hi) break;
    }

    HolderFit fit;
    fit.lag_min_steps = lo;
    fit.lag_max_steps = hi;
    fit.dt = dt;
    for (std::size_t a = 0; a < functions.size(); ++a) {
        const Path& f = functions[a];
        require(f.m() == m, ErrorCode::dimension_mismatch, "function length differs from grid");
        for (std::size_t j = 0; j < f.d(); ++j) {
            HolderSeries s;
            s.atom = a;
            s.coord = j;
            std::vector<double> xs, ys;
            for (std::size_t l : lags) {
                double best = 0.0;
                for (std::size_t k = 0; k + l < m; ++k)
                    best = std::max(best, std::abs(f(j, k + l) - f(j, k)));
                const double lag = static_cast<double>(l) * dt;
                s.lags.push_back(lag);
                s.max_increments.push_back(best);
                if (best > 0.0) {
                    xs.push_back(std::log(lag));
                    ys.push_back(std::log(best));
                }
            }
            if (xs.size() < 2) {
                s.constant = true;
                s.beta = std::numeric_limits<double>::infinity();
            } else {
                const double nx = static_cast<double>(xs.size());
                double mx = 0.0, my = 0.0;
                for (std::size_t q = 0; q < xs.size(); ++q) {
                    mx += xs[q];
                    my += ys[q];
                }
                mx /= nx;
                my /= nx;
                double sxx = 0.0, sxy = 0.0, syy = 0.0;
                for (std::size_t q = 0; q < xs.size(); ++q) {
                    sxx += (xs[q] - mx) * (xs[q] - mx);
                    sxy += (xs[q] - mx) * (ys[q] - my);
                    syy += (ys[q] - my) * (ys[q] - my);
                }
                s.beta = sxy / sxx;
                s.intercept = my - s.beta * mx;
                s.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
            }
            fit.series.push_back(std::move(s));
        }
    }
    return fit;
}

double boundary_pinning(const Codebook& codebook, std::span<const std::size_t> nodes,
                        double value) {
    const std::size_t m = codebook.space().m();
    double worst = 0.0;
    for (std::size_t k : nodes) {
        require(k < m, ErrorCode::invalid_argument, "pin node out of range");
        for (const auto& a : codebook.atoms())
            for (std::size_t j = 0; j < a.d(); ++j) worst = std::max(worst, std::abs(a(j, k) - value));
    }
    return worst;
}

}  // namespace fq
