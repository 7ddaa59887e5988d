#include "fq/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fq/diagnostics.hpp"
#include "fq/rng.hpp"

namespace fq {

namespace {

constexpr double kSplitNudge = 0.25;
constexpr std::size_t kResampleTries = 64;

bool lloyd_applicable(const DiscretePathSpace& space, double r) {
    return space.p() == 2.0 && r >= 2.0;
}

// Replaces the atoms of empty cells until every cell holds a path.
void repair_empty_cells(Codebook& cb, const PathSample& sample, VoronoiAssignment& asg,
                        double r, EmptyCellPolicy policy, std::uint64_t seed,
                        std::size_t& events) {
    const std::size_t n = cb.size();
    for (std::size_t round = 0; round <= n; ++round) {
        const auto counts = asg.cell_counts(n);
        const auto empty = std::find(counts.begin(), counts.end(), std::size_t{0});
        if (empty == counts.end()) return;
        const std::size_t dead = static_cast<std::size_t>(empty - counts.begin());

        if (policy == EmptyCellPolicy::split_largest) {
            const auto rep = distortion(cb, asg, r);
            const auto largest = static_cast<std::size_t>(
                std::max_element(rep.per_cell_distortion.begin(), rep.per_cell_distortion.end()) -
                rep.per_cell_distortion.begin());
            if (rep.per_cell_distortion[largest] <= 0.0)
                fail(ErrorCode::optimization,
                     "cannot refill an empty cell: every path already sits on an atom");
            std::size_t far = sample.size();
            double far_dist = -1.0;
            for (std::size_t s = 0; s < sample.size(); ++s)
                if (asg.cell_index[s] == largest && asg.dist[s] > far_dist) {
                    far_dist = asg.dist[s];
                    far = s;
                }
            const auto a = cb.atom(largest).values();
            const auto x = sample[far].values;
            Path fresh(cb.space().d(), cb.space().m());
            auto f = fresh.values();
            for (std::size_t q = 0; q < f.size(); ++q) f[q] = a[q] + 0.5 * (x[q] - a[q]);
            cb.replace(dead, std::move(fresh));
        } else {
            Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(events)));
            std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
            bool placed = false;
            for (std::size_t t = 0; t < kResampleTries && !placed; ++t) {
                try {
                    cb.replace(dead, Path(sample[pick(rng)]));
                    placed = true;
                } catch (const Error&) {
                }
            }
            if (!placed)
                fail(ErrorCode::optimization, "cannot refill an empty cell by resampling");
        }
        ++events;
        asg = assign(cb, sample, NormKind::lp, &asg);
    }
    fail(ErrorCode::optimization, "empty cells persist after repair");
}

// Weighted cell means with weights ||x - a_i||^(r-2); cells whose total
// weight vanishes keep their atom.
Codebook centroid_update(const Codebook& cb, const PathSample& sample,
                         const VoronoiAssignment& asg, double r) {
    const std::size_t n = cb.size();
    const std::size_t len = sample.path_len();
    std::vector<double> sums(n * len, 0.0);
    std::vector<double> mass(n, 0.0);
    for (std::size_t s = 0; s < sample.size(); ++s) {
        const std::size_t i = asg.cell_index[s];
        double w = 1.0;
        if (r != 2.0) {
            const double dist = std::sqrt(asg.dist[s]);
            w = std::pow(dist, r - 2.0);
            if (w == 0.0) continue;
        }
        const auto x = sample[s].values;
        double* acc = sums.data() + i * len;
        for (std::size_t q = 0; q < len; ++q) acc[q] += w * x[q];
        mass[i] += w;
    }
    std::vector<Path> atoms;
    atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (mass[i] == 0.0) {
            atoms.push_back(cb.atom(i));
            continue;
        }
        Path a(sample.d(), sample.m());
        auto v = a.values();
        const double* acc = sums.data() + i * len;
        for (std::size_t q = 0; q < len; ++q) v[q] = acc[q] / mass[i];
        atoms.push_back(std::move(a));
    }
    return Codebook(cb.space(), std::move(atoms));
}

bool same_atoms(const Codebook& a, const Codebook& b) { return a.atoms() == b.atoms(); }

double relative_residual(const Codebook& cb, const PathSample& sample, double r) {
    return stationarity_residual(cb, sample, r).relative_max_residual();
}

}  // namespace

std::string to_string(OptimizerMethod m) {
    return m == OptimizerMethod::lloyd ? "lloyd" : "sgd";
}

std::string to_string(EmptyCellPolicy p) {
    return p == EmptyCellPolicy::split_largest ? "split_largest" : "resample";
}

void OptimizerConfig::validate() const {
    require(max_iters >= 1, ErrorCode::invalid_argument, "max_iters must be >= 1");
    require(tol > 0.0 && std::isfinite(tol), ErrorCode::invalid_argument, "tol must be > 0");
    require(sgd_c0 >= 0.0 && std::isfinite(sgd_c0), ErrorCode::invalid_argument,
            "sgd c0 must be positive (0 selects the default)");
    require(std::isfinite(sgd_decay), ErrorCode::invalid_argument, "sgd decay must be finite");
}

Codebook lloyd_step(const Codebook& codebook, const PathSample& sample, double r,
                    EmptyCellPolicy policy, std::uint64_t seed, std::size_t* empty_events) {
    require(codebook.space().p() == 2.0, ErrorCode::invalid_argument,
            "Lloyd update needs p = 2");
    require(r >= 2.0 && std::isfinite(r), ErrorCode::invalid_argument, "Lloyd update needs r >= 2");
    require(!sample.empty(), ErrorCode::optimization, "all cells empty: sample has no paths");
    Codebook work = codebook;
    auto asg = assign(work, sample);
    std::size_t events = 0;
    repair_empty_cells(work, sample, asg, r, policy, seed, events);
    if (empty_events) *empty_events += events;
    return centroid_update(work, sample, asg, r);
}

OptimizeResult lloyd_run(const OptimizerConfig& config, const Codebook& init,
                         const PathSample& sample, double r) {
    config.validate();
    require(lloyd_applicable(init.space(), r), ErrorCode::invalid_argument,
            "Lloyd iteration needs p = 2 and r >= 2");
    require(!sample.empty(), ErrorCode::optimization, "all cells empty: sample has no paths");

    Codebook cb = init;
    OptimizeTrace trace;
    VoronoiAssignment asg;
    bool have_asg = false;
    double prev = 0.0;
    trace.exit_reason = "max_iters";
    for (std::size_t it = 0; it < config.max_iters; ++it) {
        asg = assign(cb, sample, NormKind::lp, have_asg ? &asg : nullptr);
        have_asg = true;
        repair_empty_cells(cb, sample, asg, r, config.empty_cell_policy,
                           derive_seed(config.seed, "lloyd-empty"), trace.empty_cell_events);
        const double dist = distortion(cb, asg, r).value;
        trace.iteration.push_back(it);
        trace.distortion.push_back(dist);
        trace.residual.push_back(
            stationarity_residual(cb, sample, asg, r).relative_max_residual());
        trace.iterations = it + 1;
        if (it > 0 && (prev <= 0.0 || (prev - dist) < config.tol * prev)) {
            trace.exit_reason = "tolerance";
            break;
        }
        prev = dist;
        Codebook next = centroid_update(cb, sample, asg, r);
        if (same_atoms(next, cb)) {
            trace.exit_reason = "fixed_point";
            break;
        }
        cb = std::move(next);
    }
    trace.exit_residual = relative_residual(cb, sample, r);
    return {std::move(cb), std::move(trace)};
}

OptimizeResult sgd_run(const OptimizerConfig& config, const Codebook& init,
                       const PathSample& sample, double r) {
    config.validate();
    const auto& space = init.space();
    const double p = space.p();
    require(p > 1.0, ErrorCode::invalid_argument, "SGD needs a smooth norm (p > 1)");
    require(r >= 1.0 && std::isfinite(r), ErrorCode::invalid_argument, "SGD needs r >= 1");
    require(!sample.empty(), ErrorCode::optimization, "empty sample");
    const std::size_t N = sample.size();
    const std::size_t n = init.size();
    const std::size_t len = sample.path_len();
    const std::size_t m = space.m();
    const auto w = space.weights();

    if (r == 1.0) {
        const auto asg = assign(init, sample);
        for (double dv : asg.dist)
            require(dv > 0.0, ErrorCode::invalid_argument,
                    "r = 1 needs P(X in alpha) = 0: a sample path coincides with an atom");
    }

    const auto initial = distortion(init, sample, r);
    const double d0 = initial.value;
    const double scale = std::pow(d0, 1.0 / r);
    const double c0 = config.sgd_c0 > 0.0 ? config.sgd_c0 : 0.1 * std::pow(scale, 2.0 - r);
    const double decay = config.sgd_decay >= 0.0 ? config.sgd_decay : 1.0 / static_cast<double>(N);
    const std::size_t eval_every = config.sgd_eval_interval > 0 ? config.sgd_eval_interval : N;

    std::vector<Path> atoms = init.atoms();
    Rng rng = make_rng(derive_seed(config.seed, "sgd"));
    std::uniform_int_distribution<std::size_t> pick(0, N - 1);

    OptimizeTrace trace;
    trace.iteration.push_back(0);
    trace.distortion.push_back(d0);
    trace.residual.push_back(relative_residual(init, sample, r));
    trace.exit_reason = "max_iters";

    for (std::size_t k = 0; k < config.max_iters; ++k) {
        const auto x = sample[pick(rng)].values;
        std::size_t best_i = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = atoms[i].values();
            double s = 0.0;
            for (std::size_t q = 0; q < len; ++q) {
                const double v = std::abs(a[q] - x[q]);
                s += (p == 2.0 ? v * v : std::pow(v, p)) * w[q % m];
            }
            if (s < best) {
                best = s;
                best_i = i;
            }
        }
        trace.iterations = k + 1;
        if (best > 0.0) {
            auto a = atoms[best_i].values();
            const double norm = std::pow(best, 1.0 / p);
            const double step = c0 / (1.0 + decay * static_cast<double>(k));
            // r ||u||^(r-1) (|u|/||u||)^(p-1) sign(u) = r ||u||^(r-p) |u|^(p-1) sign(u)
            const double coef = step * r * std::pow(norm, r - p);
            bool finite = std::isfinite(coef);
            for (std::size_t q = 0; q < len; ++q) {
                const double uq = a[q] - x[q];
                if (uq == 0.0) continue;
                const double mag = p == 2.0 ? std::abs(uq) : std::pow(std::abs(uq), p - 1.0);
                a[q] -= coef * (uq > 0.0 ? mag : -mag);
                finite = finite && std::isfinite(a[q]);
            }
            if (!finite) {
                trace.iteration.push_back(k + 1);
                trace.distortion.push_back(std::numeric_limits<double>::infinity());
                throw DivergenceError("SGD diverged: iterate left the finite range", trace);
            }
        }
        if ((k + 1) % eval_every == 0 || k + 1 == config.max_iters) {
            Codebook cb(space, atoms);
            const auto asg = assign(cb, sample);
            const double dist = distortion(cb, asg, r).value;
            trace.iteration.push_back(k + 1);
            trace.distortion.push_back(dist);
            if (!(dist <= 10.0 * d0))
                throw DivergenceError("SGD diverged: distortion exceeds 10x its initial value",
                                      trace);
            const double res = stationarity_residual(cb, sample, asg, r).relative_max_residual();
            trace.residual.push_back(res);
            if (res < config.tol) {
                trace.exit_reason = "tolerance";
                break;
            }
        }
    }
    Codebook out(space, std::move(atoms));
    trace.exit_residual = trace.residual.back();
    return {std::move(out), std::move(trace)};
}

OptimizeResult optimize(const OptimizerConfig& config, const Codebook& init,
                        const PathSample& sample, double r) {
    if (config.method == OptimizerMethod::lloyd && lloyd_applicable(init.space(), r))
        return lloyd_run(config, init, sample, r);
    return sgd_run(config, init, sample, r);
}

std::vector<Path> distortion_gradient(const Codebook& codebook, const PathSample& sample,
                                      double r) {
    const auto& space = codebook.space();
    const double p = space.p();
    require(p > 1.0, ErrorCode::invalid_argument, "distortion gradient needs p > 1");
    require(r >= 1.0, ErrorCode::invalid_argument, "distortion gradient needs r >= 1");
    require(!sample.empty(), ErrorCode::invalid_argument, "empty sample");
    const auto asg = assign(codebook, sample);
    const std::size_t n = codebook.size();
    std::vector<Path> grad(n, Path(space.d(), space.m()));
    const double inv_n = 1.0 / static_cast<double>(sample.size());
    for (std::size_t s = 0; s < sample.size(); ++s) {
        const std::size_t i = asg.cell_index[s];
        if (asg.dist[s] == 0.0) continue;  // x == a_i is excluded
        Path u(space.d(), space.m());
        auto uv = u.values();
        const auto x = sample[s].values;
        const auto a = codebook.atom(i).values();
        for (std::size_t q = 0; q < uv.size(); ++q) uv[q] = a[q] - x[q];
        const double norm = lp_norm(space, u);
        const Path g = norm_gradient(space, u);
        const double coef = r * std::pow(norm, r - 1.0) * inv_n;
        auto out = grad[i].values();
        const auto gv = g.values();
        for (std::size_t q = 0; q < out.size(); ++q) out[q] += coef * gv[q];
    }
    return grad;
}

Path sample_mean(const PathSample& sample) {
    require(!sample.empty(), ErrorCode::invalid_argument, "empty sample");
    Path mean(sample.d(), sample.m());
    auto v = mean.values();
    for (std::size_t s = 0; s < sample.size(); ++s) {
        const auto x = sample[s].values;
        for (std::size_t q = 0; q < v.size(); ++q) v[q] += x[q];
    }
    const double inv = 1.0 / static_cast<double>(sample.size());
    for (auto& q : v) q *= inv;
    return mean;
}

std::vector<Codebook> splitting_ladder(const PathSample& sample, const DiscretePathSpace& space,
                                       std::size_t n, double r, std::uint64_t seed,
                                       const OptimizerConfig& config,
                                       std::vector<OptimizeTrace>* traces) {
    require(n >= 1, ErrorCode::invalid_argument, "codebook size n must be >= 1");
    require(!sample.empty(), ErrorCode::invalid_argument, "empty sample");
    std::vector<Codebook> ladder;
    ladder.reserve(n);

    auto run = [&](const Codebook& init, std::size_t k) {
        OptimizerConfig cfg = config;
        cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
        auto res = optimize(cfg, init, sample, r);
        if (traces) traces->push_back(std::move(res.trace));
        return std::move(res.codebook);
    };

    ladder.push_back(run(Codebook(space, {sample_mean(sample)}), 1));
    Rng rng = make_rng(derive_seed(seed, "splitting"));
    for (std::size_t k = 2; k <= n; ++k) {
        const Codebook& prev = ladder.back();
        const auto asg = assign(prev, sample);
        const auto rep = distortion(prev, asg, r);
        const auto largest = static_cast<std::size_t>(
            std::max_element(rep.per_cell_distortion.begin(), rep.per_cell_distortion.end()) -
            rep.per_cell_distortion.begin());
        if (rep.per_cell_distortion[largest] <= 0.0)
            fail(ErrorCode::optimization, "sample has fewer than " + std::to_string(k) +
                                              " distinct paths; cannot split further");
        std::vector<std::size_t> members;
        for (std::size_t s = 0; s < sample.size(); ++s)
            if (asg.cell_index[s] == largest && asg.dist[s] > 0.0) members.push_back(s);
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
        const auto x = sample[members[pick(rng)]].values;
        const auto a = prev.atom(largest).values();
        Path fresh(space.d(), space.m());
        auto f = fresh.values();
        for (std::size_t q = 0; q < f.size(); ++q) f[q] = a[q] + kSplitNudge * (x[q] - a[q]);
        Codebook grown = prev;
        grown.add(std::move(fresh));
        ladder.push_back(run(grown, k));
    }
    return ladder;
}

Codebook splitting_init(const PathSample& sample, const DiscretePathSpace& space, std::size_t n,
                        double r, std::uint64_t seed, const OptimizerConfig& config) {
    return splitting_ladder(sample, space, n, r, seed, config).back();
}

Codebook product_quantizer(std::span<const Codebook> marginals, std::size_t cap) {
    require(!marginals.empty(), ErrorCode::invalid_argument, "no marginal codebooks");
    const auto& base = marginals[0].space();
    std::size_t total = 1;
    for (const auto& cb : marginals) {
        const auto& s = cb.space();
        require(s.d() == 1, ErrorCode::invalid_argument, "marginal codebooks must be 1-dimensional");
        require(s.m() == base.m() && std::equal(s.grid().begin(), s.grid().end(), base.grid().begin()) &&
                    std::equal(s.weights().begin(), s.weights().end(), base.weights().begin()) &&
                    s.p() == base.p(),
                ErrorCode::invalid_argument, "marginal codebooks must share grid, weights and p");
        require(total <= cap / cb.size(), ErrorCode::invalid_argument,
                "product codebook size exceeds cap " + std::to_string(cap));
        total *= cb.size();
    }
    const std::size_t d = marginals.size();
    const std::size_t m = base.m();
    std::vector<Path> atoms;
    atoms.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t c = 0; c < total; ++c) {
        Path a(d, m);
        for (std::size_t j = 0; j < d; ++j) {
            const auto src = marginals[j].atom(idx[j]).values();
            std::copy(src.begin(), src.end(), a.values().begin() + static_cast<std::ptrdiff_t>(j * m));
        }
        atoms.push_back(std::move(a));
        for (std::size_t j = d; j-- > 0;) {
            if (++idx[j] < marginals[j].size()) break;
            idx[j] = 0;
        }
    }
    return Codebook(base.with_d(d), std::move(atoms));
}

}  // namespace fq
