#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fq/path_space.hpp"

namespace fq::testing {

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// Asymptotic critical value at level 0.01.
inline double ks_critical_01(std::size_t na, std::size_t nb) {
    const double a = static_cast<double>(na), b = static_cast<double>(nb);
    return 1.628 * std::sqrt((a + b) / (a * b));
}

inline std::vector<double> column(const PathSample& s, std::size_t j, std::size_t k) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i](j, k);
    return out;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double covariance(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size() - 1);
}

// Samples built from explicit constant levels, d = 1.
inline PathSample constant_sample(const std::vector<double>& levels, std::size_t m) {
    PathSample s(1, m, 0, 0, "constants");
    for (double c : levels) s.push_back(Path(1, m, c));
    return s;
}

}  // namespace fq::testing
