#include "fq/quantize_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fq/error.hpp"

namespace fq {

namespace {

constexpr std::size_t kBoundCheckBlock = 32;

// Weighted sum of |x - a|^p over the flattened d*m entries, abandoned as soon
// as the partial sum exceeds `bound` (the returned value is then > bound).
double bounded_lp_pow(std::span<const double> x, std::span<const double> a,
                      std::span<const double> wflat, double p, double bound) {
    const std::size_t n = x.size();
    double s = 0.0;
    std::size_t i = 0;
    while (i < n) {
        const std::size_t end = std::min(n, i + kBoundCheckBlock);
        if (p == 2.0) {
            for (; i < end; ++i) {
                const double v = x[i] - a[i];
                s += v * v * wflat[i];
            }
        } else if (p == 1.0) {
            for (; i < end; ++i) s += std::abs(x[i] - a[i]) * wflat[i];
        } else {
            for (; i < end; ++i) s += std::pow(std::abs(x[i] - a[i]), p) * wflat[i];
        }
        if (s > bound) return s;
    }
    return s;
}

double bounded_sup(std::span<const double> x, std::span<const double> a, double bound) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s = std::max(s, std::abs(x[i] - a[i]));
        if (s > bound) return s;
    }
    return s;
}

std::vector<double> flat_weights(const DiscretePathSpace& space) {
    const auto w = space.weights();
    std::vector<double> out(space.d() * space.m());
    for (std::size_t j = 0; j < space.d(); ++j)
        std::copy(w.begin(), w.end(), out.begin() + static_cast<std::ptrdiff_t>(j * space.m()));
    return out;
}

void check_sample(const Codebook& codebook, const PathSample& sample) {
    const auto& s = codebook.space();
    if (sample.size() > 0 && (sample.d() != s.d() || sample.m() != s.m()))
        fail(ErrorCode::dimension_mismatch,
             "sample paths are " + std::to_string(sample.d()) + "x" + std::to_string(sample.m()) +
                 " but codebook space is " + std::to_string(s.d()) + "x" +
                 std::to_string(s.m()));
}

}  // namespace

Codebook::Codebook(DiscretePathSpace space, std::vector<Path> atoms)
    : space_(std::move(space)) {
    require(!atoms.empty(), ErrorCode::invalid_argument, "codebook needs at least one atom");
    atoms_.reserve(atoms.size());
    for (auto& a : atoms) add(std::move(a));
}

void Codebook::check_atom(const Path& atom, std::size_t skip) const {
    check_shape(space_, atom);
    for (double v : atom.values())
        require(std::isfinite(v), ErrorCode::numerical, "atom has non-finite entries");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i == skip) continue;
        if (lp_dist_pow(space_, atoms_[i], atom) == 0.0)
            fail(ErrorCode::invalid_argument,
                 "duplicate atom: distance 0 to atom " + std::to_string(i));
    }
}

void Codebook::add(Path atom) {
    check_atom(atom, atoms_.size());
    atoms_.push_back(std::move(atom));
}

void Codebook::replace(std::size_t i, Path atom) {
    require(i < atoms_.size(), ErrorCode::invalid_argument, "atom index out of range");
    check_atom(atom, i);
    atoms_[i] = std::move(atom);
}

void Codebook::remove(std::size_t i) {
    require(i < atoms_.size(), ErrorCode::invalid_argument, "atom index out of range");
    require(atoms_.size() > 1, ErrorCode::invalid_argument, "cannot remove the last atom");
    atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(i));
}

std::size_t VoronoiAssignment::tie_count() const {
    return static_cast<std::size_t>(std::count(tie_flags.begin(), tie_flags.end(), 1));
}

std::vector<std::size_t> VoronoiAssignment::cell_counts(std::size_t n) const {
    std::vector<std::size_t> counts(n, 0);
    for (auto c : cell_index) ++counts[c];
    return counts;
}

VoronoiAssignment assign(const Codebook& codebook, const PathSample& sample, NormKind norm,
                         const VoronoiAssignment* hint) {
    check_sample(codebook, sample);
    const std::size_t n = codebook.size();
    const std::size_t N = sample.size();
    const double p = codebook.space().p();
    const auto wflat = flat_weights(codebook.space());
    const bool use_hint = hint != nullptr && hint->size() == N;

    VoronoiAssignment out;
    out.norm = norm;
    out.cell_index.resize(N);
    out.tie_flags.assign(N, 0);
    out.dist.resize(N);

    std::vector<double> dist(n);
    for (std::size_t i = 0; i < N; ++i) {
        const auto x = sample[i].values;
        std::size_t first = use_hint ? std::min<std::size_t>(hint->cell_index[i], n - 1) : 0;
        double best = std::numeric_limits<double>::infinity();
        // Visit the hinted atom first for a tight early-exit bound.
        for (std::size_t step = 0; step < n; ++step) {
            const std::size_t a = (first + step) % n;
            const double bound = best * (1.0 + kTieTolerance);
            const auto av = codebook.atom(a).values();
            dist[a] = norm == NormKind::lp ? bounded_lp_pow(x, av, wflat, p, bound)
                                           : bounded_sup(x, av, bound);
            best = std::min(best, dist[a]);
        }
        // Abandoned distances exceed an earlier bound >= best*(1+tol), so they
        // can be neither the minimum nor tied with it.
        const double limit = best * (1.0 + kTieTolerance);
        std::size_t chosen = n;
        std::size_t ties = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (dist[a] <= limit) {
                if (chosen == n) chosen = a;
                ++ties;
            }
        }
        out.cell_index[i] = static_cast<std::uint32_t>(chosen);
        out.tie_flags[i] = ties > 1 ? 1 : 0;
        out.dist[i] = dist[chosen];
    }
    return out;
}

double assigned_distance_pow(const Codebook& codebook, const VoronoiAssignment& assignment,
                             std::size_t path, double r) {
    const double d = assignment.dist[path];
    if (assignment.norm == NormKind::sup) return r == 1.0 ? d : std::pow(d, r);
    const double p = codebook.space().p();
    if (r == p) return d;
    if (p == 2.0 && r == 1.0) return std::sqrt(d);
    return std::pow(d, r / p);
}

DistortionReport distortion(const Codebook& codebook, const VoronoiAssignment& assignment,
                            double r) {
    require(r > 0.0 && std::isfinite(r), ErrorCode::invalid_argument,
            "distortion exponent r must be > 0");
    const std::size_t n = codebook.size();
    const std::size_t N = assignment.size();
    DistortionReport rep;
    rep.r = r;
    rep.norm = assignment.norm;
    rep.n_paths = N;
    rep.per_cell_mass.assign(n, 0.0);
    rep.per_cell_distortion.assign(n, 0.0);
    if (N == 0) return rep;

    std::vector<double> cell_sum(n, 0.0);
    std::vector<std::size_t> cell_count(n, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double v = assigned_distance_pow(codebook, assignment, i, r);
        const auto c = assignment.cell_index[i];
        cell_sum[c] += v;
        ++cell_count[c];
        sum += v;
        sum_sq += v * v;
    }
    const double inv_n = 1.0 / static_cast<double>(N);
    for (std::size_t c = 0; c < n; ++c) {
        rep.per_cell_mass[c] = static_cast<double>(cell_count[c]) * inv_n;
        rep.per_cell_distortion[c] = cell_sum[c] * inv_n;
    }
    rep.value = sum * inv_n;
    if (N > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum * inv_n) / static_cast<double>(N - 1));
        rep.std_error = std::sqrt(var * inv_n);
    }
    rep.tie_mass = static_cast<double>(assignment.tie_count()) * inv_n;
    return rep;
}

DistortionReport distortion(const Codebook& codebook, const PathSample& sample, double r,
                            NormKind norm) {
    return distortion(codebook, assign(codebook, sample, norm), r);
}

PathSample quantize_paths(const Codebook& codebook, const PathSample& sample) {
    require(!sample.empty(), ErrorCode::invalid_argument, "empty sample");
    const auto asg = assign(codebook, sample);
    PathSample out(sample.d(), sample.m(), sample.size(), sample.seed(),
                   "quantized:" + sample.process_tag());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto a = codebook.atom(asg.cell_index[i]).values();
        std::copy(a.begin(), a.end(), out.mutable_path(i).begin());
    }
    return out;
}

double quant_error(const Codebook& codebook, const PathSample& sample, double r, NormKind norm) {
    const auto rep = distortion(codebook, sample, r, norm);
    return std::pow(rep.value, 1.0 / r);
}

double quant_error_std_error(const DistortionReport& report) {
    if (report.value <= 0.0) return 0.0;
    // d(D^(1/r)) = D^(1/r - 1) dD / r
    return std::pow(report.value, 1.0 / report.r - 1.0) * report.std_error / report.r;
}

ExponentBounds cross_exponent_bounds(const PathSample& sample, const DiscretePathSpace& space,
                                     const Codebook& codebook, double r) {
    require(r >= 1.0 && std::isfinite(r), ErrorCode::invalid_argument, "r must be >= 1");
    const double p = space.p();
    const double lo = std::min(p, r);
    const double hi = std::max(p, r);
    const double mass = space.total_mass();

    auto rebased = [&](double q) {
        std::vector<Path> atoms(codebook.atoms());
        return Codebook(space.with_p(q), std::move(atoms));
    };

    ExponentBounds b;
    b.low_exponent = lo;
    b.high_exponent = hi;
    b.value = quant_error(rebased(p), sample, r);
    b.lower = std::pow(mass, 1.0 / p - 1.0 / lo) * quant_error(rebased(lo), sample, lo);
    b.upper = std::pow(mass, 1.0 / p - 1.0 / hi) * quant_error(rebased(hi), sample, hi);
    return b;
}

}  // namespace fq
