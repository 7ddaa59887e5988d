#include "fq/process_sim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fq/error.hpp"
#include "fq/rng.hpp"

namespace fq {

namespace {

constexpr double kCholeskyJitter = 1e-12;

double initial(const ProcessSpec& spec, std::size_t j) {
    return spec.x0.empty() ? 0.0 : spec.x0[j];
}

void require_nonnegative_start(const DiscretePathSpace& space, const ProcessSpec& spec) {
    require(space.grid()[0] >= 0.0, ErrorCode::simulation,
            to_string(spec.kind) + " starts at t = 0; grid must lie in [0, inf)");
}

// Symmetric rho-stable variate with unit scale (Chambers-Mallows-Stuck, skew 0).
double symmetric_stable(Rng& rng, double alpha) {
    std::uniform_real_distribution<double> uni(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
    std::exponential_distribution<double> expo(1.0);
    const double v = uni(rng);
    if (alpha == 1.0) return std::tan(v);
    const double w = expo(rng);
    return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

double draw_jump(const JumpLaw& law, Rng& rng) {
    if (law.kind == JumpLaw::Kind::constant) return law.mean;
    std::normal_distribution<double> z(law.mean, law.sd);
    return z(rng);
}

// Fills one coordinate row from independent increments over the grid; the
// value at grid[0] is the increment over [0, grid[0]].
template <class IncrementFn>
void levy_row(std::span<double> row, std::span<const double> grid, double x0, IncrementFn inc) {
    double prev_t = 0.0;
    double x = x0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double dt = grid[k] - prev_t;
        if (dt > 0.0) x += inc(dt);
        row[k] = x;
        prev_t = grid[k];
    }
}

}  // namespace

std::string to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::brownian: return "brownian";
        case ProcessKind::bridge: return "bridge";
        case ProcessKind::ou: return "ou";
        case ProcessKind::fbm: return "fbm";
        case ProcessKind::diffusion_euler: return "diffusion_euler";
        case ProcessKind::gamma: return "gamma";
        case ProcessKind::compound_poisson: return "compound_poisson";
        case ProcessKind::stable_levy: return "stable_levy";
    }
    return "unknown";
}

ProcessKind parse_process_kind(const std::string& name) {
    for (auto k : {ProcessKind::brownian, ProcessKind::bridge, ProcessKind::ou, ProcessKind::fbm,
                   ProcessKind::diffusion_euler, ProcessKind::gamma,
                   ProcessKind::compound_poisson, ProcessKind::stable_levy})
        if (to_string(k) == name) return k;
    fail(ErrorCode::invalid_argument, "unknown process kind '" + name + "'");
}

void ProcessSpec::validate(std::size_t d) const {
    auto finite = [](double v) { return std::isfinite(v); };
    require(x0.empty() || x0.size() == d, ErrorCode::invalid_argument,
            "x0 has " + std::to_string(x0.size()) + " entries but d = " + std::to_string(d));
    for (double v : x0) require(finite(v), ErrorCode::invalid_argument, "x0 not finite");
    switch (kind) {
        case ProcessKind::fbm:
            require(finite(hurst) && hurst > 0.0 && hurst < 1.0, ErrorCode::invalid_argument,
                    "fbm Hurst exponent must lie in (0,1)");
            break;
        case ProcessKind::ou:
            require(finite(ou_c) && ou_c > 0.0, ErrorCode::invalid_argument,
                    "OU rate c must be positive");
            break;
        case ProcessKind::gamma:
            require(finite(gamma_a) && gamma_a > 0.0, ErrorCode::invalid_argument,
                    "gamma rate a must be positive");
            break;
        case ProcessKind::compound_poisson:
            require(finite(lambda) && lambda > 0.0, ErrorCode::invalid_argument,
                    "compound Poisson intensity must be positive");
            require(finite(jump.mean) && finite(jump.sd), ErrorCode::invalid_argument,
                    "jump law parameters not finite");
            require(jump.kind == JumpLaw::Kind::normal ? jump.sd > 0.0 : jump.mean != 0.0,
                    ErrorCode::invalid_argument, "jump law must not charge 0");
            break;
        case ProcessKind::stable_levy:
            require(finite(stable_rho) && stable_rho > 0.0 && stable_rho < 2.0,
                    ErrorCode::invalid_argument, "stable index rho must lie in (0,2)");
            break;
        case ProcessKind::diffusion_euler:
            require(static_cast<bool>(drift) && static_cast<bool>(diffusion),
                    ErrorCode::invalid_argument, "diffusion needs drift and diffusion fields");
            break;
        default:
            break;
    }
}

std::string ProcessSpec::tag() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind);
    switch (kind) {
        case ProcessKind::fbm: os << "(H=" << hurst << ")"; break;
        case ProcessKind::ou: os << "(c=" << ou_c << ")"; break;
        case ProcessKind::gamma: os << "(a=" << gamma_a << ")"; break;
        case ProcessKind::compound_poisson: os << "(lambda=" << lambda << ")"; break;
        case ProcessKind::stable_levy: os << "(rho=" << stable_rho << ")"; break;
        default: break;
    }
    return os.str();
}

ProcessSpec affine_diffusion(double drift_a, double drift_b, double diff_a, double diff_b) {
    ProcessSpec spec;
    spec.kind = ProcessKind::diffusion_euler;
    spec.drift = [=](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = drift_a + drift_b * x[j];
    };
    spec.diffusion = [=](double, std::span<const double> x, std::span<double> out) {
        const std::size_t d = x.size();
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t j = 0; j < d; ++j) out[j * d + j] = diff_a + diff_b * x[j];
    };
    return spec;
}

std::vector<double> fbm_cholesky(std::span<const double> times, double hurst) {
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd cov(n, n);
    const double h2 = 2.0 * hurst;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double s = times[a], t = times[b];
            const double c =
                0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(s - t), h2));
            cov(a, b) = c;
            cov(b, a) = c;
        }
    cov.diagonal().array() += kCholeskyJitter;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::simulation,
             "fbm covariance Cholesky failed even with 1e-12 diagonal jitter fallback");
    Eigen::MatrixXd lower = llt.matrixL();
    std::vector<double> out(static_cast<std::size_t>(n * n));
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) out[a * n + b] = lower(a, b);
    return out;
}

PathSample sample_paths(const ProcessSpec& spec, const DiscretePathSpace& space,
                        std::size_t n_paths, std::uint64_t seed) {
    require(n_paths >= 1, ErrorCode::invalid_argument, "n_paths must be >= 1");
    const std::size_t d = space.d();
    const std::size_t m = space.m();
    spec.validate(d);
    const auto grid = space.grid();

    PathSample sample(d, m, n_paths, seed, spec.tag());
    if (spec.kind == ProcessKind::stable_levy) sample.set_tail_index(spec.stable_rho);

    // fbm: factor once, over the nodes with t > 0.
    std::vector<double> chol;
    std::size_t first_pos = 0;
    if (spec.kind == ProcessKind::fbm) {
        require_nonnegative_start(space, spec);
        while (first_pos < m && grid[first_pos] == 0.0) ++first_pos;
        chol = fbm_cholesky(grid.subspan(first_pos), spec.hurst);
    }

    std::vector<double> state(d), drift(d), sigma(d * d), dw(d), z;
    for (std::size_t i = 0; i < n_paths; ++i) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> normal(0.0, 1.0);
        auto path = sample.mutable_path(i);
        auto row = [&](std::size_t j) { return path.subspan(j * m, m); };

        switch (spec.kind) {
            case ProcessKind::brownian:
            case ProcessKind::bridge: {
                require_nonnegative_start(space, spec);
                const double t_end = grid[m - 1];
                for (std::size_t j = 0; j < d; ++j) {
                    auto r = row(j);
                    levy_row(r, grid, 0.0, [&](double dt) { return std::sqrt(dt) * normal(rng); });
                    if (spec.kind == ProcessKind::bridge) {
                        const double w_end = r[m - 1];
                        for (std::size_t k = 0; k < m; ++k) r[k] -= (grid[k] / t_end) * w_end;
                        r[m - 1] = 0.0;
                    }
                    for (auto& v : r) v += initial(spec, j);
                }
                break;
            }
            case ProcessKind::ou: {
                for (std::size_t j = 0; j < d; ++j) {
                    auto r = row(j);
                    double x = normal(rng);
                    r[0] = x;
                    for (std::size_t k = 1; k < m; ++k) {
                        const double rho = std::exp(-spec.ou_c * (grid[k] - grid[k - 1]));
                        x = rho * x + std::sqrt(1.0 - rho * rho) * normal(rng);
                        r[k] = x;
                    }
                    for (auto& v : r) v += initial(spec, j);
                }
                break;
            }
            case ProcessKind::fbm: {
                const std::size_t mp = m - first_pos;
                z.resize(mp);
                for (std::size_t j = 0; j < d; ++j) {
                    auto r = row(j);
                    for (auto& v : z) v = normal(rng);
                    for (std::size_t k = 0; k < first_pos; ++k) r[k] = initial(spec, j);
                    for (std::size_t a = 0; a < mp; ++a) {
                        double acc = 0.0;
                        const double* l = chol.data() + a * mp;
                        for (std::size_t b = 0; b <= a; ++b) acc += l[b] * z[b];
                        r[first_pos + a] = initial(spec, j) + acc;
                    }
                }
                break;
            }
            case ProcessKind::diffusion_euler: {
                for (std::size_t j = 0; j < d; ++j) state[j] = initial(spec, j);
                for (std::size_t j = 0; j < d; ++j) row(j)[0] = state[j];
                for (std::size_t k = 1; k < m; ++k) {
                    const double t = grid[k - 1];
                    const double dt = grid[k] - t;
                    spec.drift(t, state, drift);
                    spec.diffusion(t, state, sigma);
                    for (auto& v : dw) v = std::sqrt(dt) * normal(rng);
                    for (std::size_t a = 0; a < d; ++a) {
                        double noise = 0.0;
                        for (std::size_t b = 0; b < d; ++b) noise += sigma[a * d + b] * dw[b];
                        state[a] += drift[a] * dt + noise;
                    }
                    for (std::size_t j = 0; j < d; ++j) {
                        require(std::isfinite(state[j]), ErrorCode::simulation,
                                "Euler-Maruyama path diverged to a non-finite value");
                        row(j)[k] = state[j];
                    }
                }
                break;
            }
            case ProcessKind::gamma: {
                require_nonnegative_start(space, spec);
                for (std::size_t j = 0; j < d; ++j)
                    levy_row(row(j), grid, initial(spec, j), [&](double dt) {
                        std::gamma_distribution<double> g(dt, 1.0 / spec.gamma_a);
                        return g(rng);
                    });
                break;
            }
            case ProcessKind::compound_poisson: {
                require_nonnegative_start(space, spec);
                for (std::size_t j = 0; j < d; ++j)
                    levy_row(row(j), grid, initial(spec, j), [&](double dt) {
                        std::poisson_distribution<long> count(spec.lambda * dt);
                        const long n_jumps = count(rng);
                        double s = 0.0;
                        for (long q = 0; q < n_jumps; ++q) s += draw_jump(spec.jump, rng);
                        return s;
                    });
                break;
            }
            case ProcessKind::stable_levy: {
                require_nonnegative_start(space, spec);
                const double alpha = spec.stable_rho;
                for (std::size_t j = 0; j < d; ++j)
                    levy_row(row(j), grid, initial(spec, j), [&](double dt) {
                        return std::pow(dt, 1.0 / alpha) * symmetric_stable(rng, alpha);
                    });
                break;
            }
        }
    }
    return sample;
}

double intrinsic_semimetric(const PathSample& sample, double q, std::size_t s_idx,
                            std::size_t t_idx) {
    require(!sample.empty(), ErrorCode::invalid_argument, "empty sample");
    require(q > 0.0 && std::isfinite(q), ErrorCode::invalid_argument, "q must be positive");
    require(s_idx < sample.m() && t_idx < sample.m(), ErrorCode::invalid_argument,
            "grid index out of range");
    if (s_idx == t_idx) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto x = sample[i];
        for (std::size_t j = 0; j < x.d; ++j) acc += std::pow(std::abs(x(j, s_idx) - x(j, t_idx)), q);
    }
    const double mean = acc / static_cast<double>(sample.size());
    return std::pow(mean, 1.0 / std::max(q, 1.0));
}

MomentReport moment_check(const PathSample& sample, const DiscretePathSpace& space, double r) {
    require(r > 0.0 && std::isfinite(r), ErrorCode::invalid_argument, "moment order r must be > 0");
    MomentReport rep;
    const std::size_t n = sample.size();
    if (n == 0) {
        rep.note = "empty sample";
        return rep;
    }
    const std::size_t half = n / 2;
    double total = 0.0, first = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::pow(lp_norm(space, sample[i]), r);
        total += v;
        if (i < half) first += v;
    }
    rep.value = total / static_cast<double>(n);
    rep.first_half = half > 0 ? first / static_cast<double>(half) : rep.value;
    rep.second_half = (total - first) / static_cast<double>(n - half);
    const double scale = std::max(std::abs(rep.first_half), std::abs(rep.second_half));
    rep.stable = std::isfinite(rep.value) &&
                 (scale == 0.0 || std::abs(rep.first_half - rep.second_half) <= 0.2 * scale);
    if (r >= sample.tail_index()) {
        rep.heavy_tail = true;
        std::ostringstream os;
        os << "heavy-tail: r >= rho (rho = " << sample.tail_index() << ")";
        rep.note = os.str();
    } else if (!rep.stable) {
        rep.note = "half-sample estimates differ by more than 20%";
    }
    return rep;
}

}  // namespace fq
