#pragma once

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "pvfp/error.hpp"

namespace pvfp::stats {

enum class Alternative { Greater, TwoSided };

struct TestResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
    Alternative alternative = Alternative::TwoSided;
};

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

// Student-t CDF via the regularized incomplete beta function.
inline double t_cdf(double x, double dof) {
    if (!(dof > 0.0)) throw Error("t_cdf: degrees of freedom must be positive");
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return boost::math::cdf(boost::math::students_t_distribution<double>(dof), x);
}

// Upper tail P(T > x), without the cancellation of 1 - t_cdf for large x.
inline double t_sf(double x, double dof) {
    if (!(dof > 0.0)) throw Error("t_sf: degrees of freedom must be positive");
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::students_t_distribution<double>(dof), x));
}

// H0: mean <= 0 against H1: mean > 0.
inline TestResult t_test_one_sample_greater(std::span<const double> diffs) {
    if (diffs.size() < 2) throw Error("one-sample t-test needs at least 2 values");
    TestResult r;
    r.alternative = Alternative::Greater;
    r.dof = static_cast<double>(diffs.size() - 1);
    const double m = mean(diffs);
    const double sd = std::sqrt(variance(diffs));
    if (sd == 0.0) {
        r.statistic = m > 0 ? std::numeric_limits<double>::infinity()
                            : (m < 0 ? -std::numeric_limits<double>::infinity() : 0.0);
        r.p_value = m > 0 ? 0.0 : 1.0;
        return r;
    }
    r.statistic = m / (sd / std::sqrt(static_cast<double>(diffs.size())));
    r.p_value = t_sf(r.statistic, r.dof);
    return r;
}

// Welch's unequal-variance two-sample t-test, two-sided, with
// Welch-Satterthwaite degrees of freedom.
inline TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw DegenerateError("insufficient duration observations");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = variance(a) / na;
    const double vb = variance(b) / nb;
    const double diff = mean(a) - mean(b);
    TestResult r;
    r.alternative = Alternative::TwoSided;
    const double se2 = va + vb;
    if (se2 == 0.0) {
        r.dof = na + nb - 2.0;
        r.statistic = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        r.p_value = diff == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = diff / std::sqrt(se2);
    r.dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.p_value = std::min(1.0, 2.0 * t_sf(std::abs(r.statistic), r.dof));
    return r;
}

// Benjamini-Hochberg adjusted p-values (q-values), same order as the input.
inline std::vector<double> benjamini_hochberg(std::span<const double> p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<double> q(m);
    double running = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const std::size_t i = order[k];
        running = std::min(running, p[i] * static_cast<double>(m) / static_cast<double>(k + 1));
        q[i] = std::max(running, p[i]);  // guards p * m / m rounding below p
    }
    return q;
}

// Edge-frequency baseline: two-sided pooled two-proportion z-test on the share
// of traces containing an edge (k1 of n1 against k2 of n2).
inline TestResult two_proportion_z_test(std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2) {
    if (n1 == 0 || n2 == 0) throw Error("two-proportion test needs non-empty samples");
    const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    TestResult r;
    r.dof = std::numeric_limits<double>::infinity();
    if (se == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.statistic = (p1 - p2) / se;
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(),
                                                               std::abs(r.statistic)));
    return r;
}

}  // namespace pvfp::stats
