#include "fq/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fq/convex.hpp"
#include "fq/error.hpp"
#include "fq/rng.hpp"

namespace fq {

namespace {

std::vector<double> unit(std::size_t M, std::size_t k) {
    std::vector<double> u(M, 0.0);
    u[k] = 1.0;
    return u;
}

void check_probs(std::span<const double> probs) {
    require(probs.size() >= 3, ErrorCode::invalid_argument, "truncation level M must be >= 3");
    double sum = 0.0;
    for (double p : probs) {
        require(p > 0.0 && p < 0.5, ErrorCode::invalid_argument,
                "atom probabilities must lie in (0, 1/2)");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-15 * static_cast<double>(probs.size()),
            ErrorCode::invalid_argument, "atom probabilities must sum to 1");
}

double polynomial(std::span<const double> coeffs, double t) {
    const double x = 2.0 * t - 1.0;
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
    return v;
}

}  // namespace

void AtomicLaw::validate() const {
    require(!atoms.empty() && atoms.size() == probs.size(), ErrorCode::invalid_argument,
            "atomic law needs matching atoms and probabilities");
    double sum = 0.0;
    for (double p : probs) {
        require(p > 0.0, ErrorCode::invalid_argument, "probabilities must be positive");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-15 * static_cast<double>(probs.size()),
            ErrorCode::invalid_argument, "probabilities must sum to 1");
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(atoms[i] != atoms[j], ErrorCode::invalid_argument, "atoms must be distinct");
}

std::vector<double> default_atom_probs(std::size_t M) {
    require(M >= 3, ErrorCode::invalid_argument, "truncation level M must be >= 3");
    std::vector<double> p(M);
    double q = 1.0 / 3.0;
    for (std::size_t n = 0; n + 1 < M; ++n) {
        p[n] = q;
        q *= 2.0 / 3.0;
    }
    // Fold the tail in so the weights sum to 1 up to rounding.
    double head = 0.0;
    for (std::size_t n = 0; n + 1 < M; ++n) head += p[n];
    p[M - 1] = 1.0 - head;
    return p;
}

double c0_objective(std::span<const double> probs, std::span<const double> b) {
    require(b.size() == probs.size(), ErrorCode::dimension_mismatch,
            "point and law have different truncation levels");
    const std::size_t M = probs.size();
    // ||u^(n) - b||_inf = max(|1 - b_n|, max_{k != n} |b_k|); keep the two largest |b_k|.
    double top1 = 0.0, top2 = 0.0;
    std::size_t arg1 = M;
    for (std::size_t k = 0; k < M; ++k) {
        const double v = std::abs(b[k]);
        if (arg1 == M || v > top1) {
            top2 = top1;
            top1 = v;
            arg1 = k;
        } else if (v > top2) {
            top2 = v;
        }
    }
    double total = 0.0;
    for (std::size_t n = 0; n < M; ++n) {
        const double others = n == arg1 ? top2 : top1;
        total += probs[n] * std::max(std::abs(1.0 - b[n]), others);
    }
    return total;
}

C0Example c0_example(std::size_t M, std::span<const double> probs_in) {
    C0Example ex;
    ex.M = M;
    ex.probs = probs_in.empty() ? default_atom_probs(M)
                                : std::vector<double>(probs_in.begin(), probs_in.end());
    require(ex.probs.size() == M, ErrorCode::invalid_argument,
            "probability vector length differs from M");
    check_probs(ex.probs);
    ex.tail_bound = std::pow(2.0 / 3.0, static_cast<double>(M));

    const std::vector<double> half(M, 0.5);
    ex.value_at_half = c0_objective(ex.probs, half);

    NormSumProblem prob;
    prob.dim = M;
    for (std::size_t n = 0; n < M; ++n)
        prob.terms.push_back({NormTerm::Kind::linf, ex.probs[n], unit(M, n)});
    const auto lp = solve_simplex(prob);
    ex.best_value = lp.objective;
    ex.best_point = lp.x;
    const auto pd = solve_pdhg(prob);
    ex.best_value_pdhg = pd.objective;
    ex.best_point_pdhg = pd.x;
    ex.pdhg_gap = pd.gap;

    std::vector<double> a(M, 0.0);
    double head = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        a[m] = 0.5;
        ex.sequence_values.push_back(c0_objective(ex.probs, a));
        head += ex.probs[m];
        double tail = 0.0;
        for (std::size_t n = m + 1; n < M; ++n) tail += ex.probs[n];
        ex.sequence_closed_form.push_back(0.5 * head + tail);
    }
    return ex;
}

std::vector<double> default_hyperplane_c(std::size_t M) {
    require(M >= 4, ErrorCode::invalid_argument, "hyperplane example needs M >= 4");
    std::vector<double> c(M, 1.0);
    for (std::size_t j = 4; j <= M; ++j) c[j - 1] = 4.0 - 4.0 / static_cast<double>(j);
    return c;
}

double l1_example_objective(std::span<const double> a) {
    require(a.size() >= 3, ErrorCode::invalid_argument, "point needs at least 3 coordinates");
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        // v^(1) = 0, v^(2) = u1 - u2, v^(3) = u1 - u3
        double d = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            double v = 0.0;
            if (i > 0 && k == 0) v = 1.0;
            if (i > 0 && k == i) v = -1.0;
            d += std::abs(v - a[k]);
        }
        total += d;
    }
    return total / 3.0;
}

L1HyperplaneExample l1_hyperplane_example(std::size_t M, std::span<const double> c_in) {
    L1HyperplaneExample ex;
    ex.M = M;
    ex.c = c_in.empty() ? default_hyperplane_c(M) : std::vector<double>(c_in.begin(), c_in.end());
    require(M >= 4 && ex.c.size() == M, ErrorCode::invalid_argument,
            "constraint vector must have M >= 4 entries");
    require(ex.c[0] == 1.0 && ex.c[1] == 1.0 && ex.c[2] == 1.0, ErrorCode::invalid_argument,
            "c_1 = c_2 = c_3 = 1 required");
    for (std::size_t j = 3; j < M; ++j)
        require(std::isfinite(ex.c[j]) && ex.c[j] > ex.c[j - 1], ErrorCode::invalid_argument,
                "(c_j)_{j>=3} must be finite and strictly increasing");
    require(ex.c[M - 1] > 3.0, ErrorCode::invalid_argument, "sup_j |c_j| must exceed 3");

    // Exact minimization over F: the objective is piecewise linear in (s, t)
    // with kinks on s+t, s, t in {0, 1}; the minimum sits at a vertex.
    struct Line {
        double a, b, rhs;  // a s + b t = rhs
    };
    std::vector<Line> lines;
    for (double rhs : {0.0, 1.0}) {
        lines.push_back({1.0, 1.0, rhs});
        lines.push_back({1.0, 0.0, rhs});
        lines.push_back({0.0, 1.0, rhs});
    }
    auto obj_f = [&](double s, double t) {
        std::vector<double> a(M, 0.0);
        a[0] = s + t;
        a[1] = -s;
        a[2] = -t;
        return l1_example_objective(a);
    };
    ex.e_F = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const double det = lines[i].a * lines[j].b - lines[i].b * lines[j].a;
            if (det == 0.0) continue;
            const double s = (lines[i].rhs * lines[j].b - lines[i].b * lines[j].rhs) / det;
            const double t = (lines[i].a * lines[j].rhs - lines[i].rhs * lines[j].a) / det;
            const double v = obj_f(s, t);
            if (v < ex.e_F) {
                ex.e_F = v;
                ex.e_F_s = s;
                ex.e_F_t = t;
            }
        }

    NormSumProblem prob;
    prob.dim = M;
    prob.terms.push_back({NormTerm::Kind::l1, 1.0 / 3.0, std::vector<double>(M, 0.0)});
    for (std::size_t i = 1; i < 3; ++i) {
        auto v = unit(M, 0);
        v[i] = -1.0;
        prob.terms.push_back({NormTerm::Kind::l1, 1.0 / 3.0, v});
    }
    const auto lp = solve_simplex(prob);
    ex.e_l1 = lp.objective;
    ex.minimizer_l1 = lp.x;
    const auto pd = solve_pdhg(prob);
    ex.e_l1_pdhg = pd.objective;
    ex.minimizer_l1_pdhg = pd.x;

    ex.e_E_upper = std::numeric_limits<double>::infinity();
    for (std::size_t k = 4; k <= M; ++k) {
        auto a = unit(M, 0);
        a[k - 1] = -1.0 / ex.c[k - 1];
        ex.candidate_k.push_back(k);
        const double v = l1_example_objective(a);
        ex.candidate_values.push_back(v);
        ex.candidate_closed_form.push_back(1.0 + 1.0 / ex.c[k - 1]);
        ex.e_E_upper = std::min(ex.e_E_upper, v);
    }
    return ex;
}

SharpConstantExample sharp_constant_example(std::size_t m) {
    require(m >= 2, ErrorCode::invalid_argument, "support size m must be >= 2");
    SharpConstantExample ex;
    ex.m = m;
    // v^(i) = u1 - u^(i), uniform over i = 1..m (v^(1) = 0).
    NormSumProblem prob;
    prob.dim = m;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> v(m, 0.0);
        if (i > 0) {
            v[0] = 1.0;
            v[i] = -1.0;
        }
        prob.terms.push_back({NormTerm::Kind::l1, 1.0 / static_cast<double>(m), v});
    }
    ex.e_E_at_u1 = prob.evaluate(unit(m, 0));
    ex.e_E = solve_simplex(prob).objective;

    // F = span{v^(i)} = {a in R^m : sum a = 0}.
    NormSumProblem sub = prob;
    sub.eq_rows.push_back(std::vector<double>(m, 1.0));
    sub.eq_rhs.push_back(0.0);
    ex.e_F_at_v1 = sub.evaluate(std::vector<double>(m, 0.0));
    ex.e_F = solve_simplex(sub).objective;
    ex.e_F_pdhg = solve_pdhg(sub).objective;
    ex.ratio = ex.e_F / ex.e_E;
    ex.ratio_closed_form = 2.0 * static_cast<double>(m - 1) / static_cast<double>(m);
    return ex;
}

double sup_tent(std::size_t n, double t) {
    require(n >= 1, ErrorCode::invalid_argument, "tent index starts at 1");
    if (t > 0.5) return -sup_tent(n, 1.0 - t);
    const double s = std::ldexp(1.0, -static_cast<int>(n));  // 2^-n
    const double left = 0.5 - s;
    const double peak = 0.5 - 0.75 * s;
    const double right = 0.5 - 0.5 * s;
    const double slope = std::ldexp(1.0, static_cast<int>(n) + 1);  // 2^(n+1)
    if (t <= left || t >= right) return 0.0;
    if (t <= peak) return slope * (2.0 * t - 1.0) + 4.0;
    return slope * (1.0 - 2.0 * t) - 2.0;
}

double sup_center(double t) { return t <= 0.5 ? 0.5 : -0.5; }

std::size_t sup_min_grid(std::size_t n_funcs) {
    require(n_funcs >= 1 && n_funcs <= 40, ErrorCode::invalid_argument,
            "n_funcs must lie in [1, 40]");
    return (std::size_t{1} << (n_funcs + 3)) + 1;
}

SupCounterexample sup_counterexample(std::size_t n_funcs, std::size_t m,
                                     std::size_t n_random_probes, std::uint64_t seed) {
    require(n_funcs >= 3, ErrorCode::invalid_argument, "n_funcs must be >= 3");
    const std::size_t min_m = sup_min_grid(n_funcs);
    if (m == 0) m = min_m;
    const std::size_t feature = std::size_t{1} << (n_funcs + 2);
    if (m < min_m || (m - 1) % feature != 0)
        fail(ErrorCode::invalid_argument,
             "grid too coarse for " + std::to_string(n_funcs) + " tent functions: need m >= " +
                 std::to_string(min_m) + " uniform nodes with (m-1) a multiple of " +
                 std::to_string(feature));

    SupCounterexample ex;
    ex.n_funcs = n_funcs;
    ex.m = m;
    ex.probs = default_atom_probs(n_funcs);
    ex.r_values = {1.0, 2.0, 4.0};

    std::vector<double> grid(m);
    for (std::size_t k = 0; k < m; ++k) grid[k] = static_cast<double>(k) / static_cast<double>(m - 1);
    std::vector<std::vector<double>> f(n_funcs, std::vector<double>(m));
    for (std::size_t n = 0; n < n_funcs; ++n)
        for (std::size_t k = 0; k < m; ++k) f[n][k] = sup_tent(n + 1, grid[k]);

    auto sup_dists = [&](auto&& g) {
        std::vector<double> d(n_funcs, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const double gv = g(grid[k]);
            for (std::size_t n = 0; n < n_funcs; ++n) d[n] = std::max(d[n], std::abs(f[n][k] - gv));
        }
        return d;
    };
    auto moments = [&](const std::vector<double>& d) {
        std::vector<double> out;
        for (double r : ex.r_values) {
            double s = 0.0;
            for (std::size_t n = 0; n < n_funcs; ++n) s += ex.probs[n] * std::pow(d[n], r);
            out.push_back(std::pow(s, 1.0 / r));
        }
        return out;
    };

    ex.dist_to_h = sup_dists(sup_center);
    ex.value_at_h = moments(ex.dist_to_h);

    auto add_probe = [&](std::string name, std::vector<double> coeffs) {
        SupProbe p;
        p.name = std::move(name);
        p.coeffs = std::move(coeffs);
        p.values = moments(sup_dists([&](double t) { return polynomial(p.coeffs, t); }));
        ex.probes.push_back(std::move(p));
    };
    add_probe("zero", {0.0});

    // Least-squares degree-5 fit to h on the grid.
    constexpr int kDegree = 5;
    Eigen::MatrixXd V(static_cast<Eigen::Index>(m), kDegree + 1);
    Eigen::VectorXd hv(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        const double x = 2.0 * grid[k] - 1.0;
        double pw = 1.0;
        for (int j = 0; j <= kDegree; ++j) {
            V(static_cast<Eigen::Index>(k), j) = pw;
            pw *= x;
        }
        hv(static_cast<Eigen::Index>(k)) = sup_center(grid[k]);
    }
    const Eigen::VectorXd fit = V.colPivHouseholderQr().solve(hv);
    add_probe("lsq_fit_h", std::vector<double>(fit.data(), fit.data() + fit.size()));

    Rng rng = make_rng(derive_seed(seed, "sup-probes"));
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> degree(0, kDegree);
    for (std::size_t i = 0; i < n_random_probes; ++i) {
        std::vector<double> cs(static_cast<std::size_t>(degree(rng)) + 1);
        for (auto& v : cs) v = coef(rng);
        add_probe("random_" + std::to_string(i), std::move(cs));
    }

    ex.min_probe_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : ex.probes)
        for (double v : p.values) ex.min_probe_margin = std::min(ex.min_probe_margin, v - 0.5);
    return ex;
}

double closed_form_error(const ClosedFormQuery& q) {
    const bool base = q.n == 1 && q.p == 2.0 && q.r == 2.0 && q.t_end > q.t_start;
    const double T = q.t_end;
    const double b = q.measure_b;
    if (base && q.process == ProcessKind::ou) {
        // Unit stationary variance: e^2 = mu(T).
        const double mass = b == 0.0 ? T - q.t_start
                                     : (std::exp(-b * q.t_start) - std::exp(-b * T)) / b;
        return std::sqrt(mass);
    }
    if (base && q.t_start == 0.0) {
        if (q.process == ProcessKind::brownian) {
            // E int W_t^2 mu(dt) = int t mu(dt)
            if (b == 0.0) return std::sqrt(0.5 * T * T);
            return std::sqrt((1.0 - std::exp(-b * T) * (1.0 + b * T)) / (b * b));
        }
        if (q.process == ProcessKind::bridge && b == 0.0) return std::sqrt(T * T / 6.0);
    }
    fail(ErrorCode::no_oracle, "no oracle for " + to_string(q.process) + " with n=" +
                                   std::to_string(q.n) + ", p=" + std::to_string(q.p) +
                                   ", r=" + std::to_string(q.r));
}

}  // namespace fq
