#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "ers/error.hpp"

namespace ers {

// ---------------------------------------------------------------------------
// Special functions (for chi-square critical values).
// ---------------------------------------------------------------------------

namespace detail {

// Regularized lower incomplete gamma P(a, x): series for x < a+1, continued
// fraction for the complement otherwise.
inline double gamma_p(double a, double x) {
    if (x < 0 || a <= 0) throw precondition_error("gamma_p: bad arguments");
    if (x == 0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15)
                return sum * std::exp(-x + a * std::log(x) - gln);
        }
        throw invalid_state_error("gamma_p: series did not converge");
    }
    // Lentz's continued fraction for Q(a, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

} // namespace detail

inline double chi2_cdf(double x, double df) {
    return detail::gamma_p(df / 2.0, x / 2.0);
}

/// Upper quantile of the chi-square distribution (bisection on the CDF).
inline double chi2_quantile(double q, double df) {
    if (!(q > 0 && q < 1)) throw precondition_error("chi2_quantile: q in (0,1)");
    double lo = 0.0, hi = df + 10.0;
    while (chi2_cdf(hi, df) < q) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi2_cdf(mid, df) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double cauchy_cdf(double x, double scale = 1.0) {
    return 0.5 + std::atan(x / scale) / std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Goodness-of-fit machinery.
// ---------------------------------------------------------------------------

/// One line of a verification report.
struct TestResult {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

/// Two-sided Kolmogorov-Smirnov statistic against a continuous CDF.
/// Sorts a copy of the samples.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    if (samples.size() < 8)
        throw precondition_error("ks_statistic: need at least 8 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max((i + 1) / n - f, f - i / n));
    }
    return d;
}

/// Asymptotic KS critical value at significance alpha.
inline double ks_critical(size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2)) / std::sqrt(static_cast<double>(n));
}

inline TestResult ks_test(const std::string& name, std::vector<double> samples,
                          const std::function<double(double)>& cdf,
                          double alpha = 0.01) {
    const size_t n = samples.size();
    const double d = ks_statistic(std::move(samples), cdf);
    TestResult r{name, d, ks_critical(n, alpha), false, {}};
    r.pass = d < r.threshold;
    return r;
}

/// Chi-square goodness of fit of observed counts against expected counts.
/// Cells with expected < min_expected are pooled into their neighbor from
/// the right, keeping the test valid in thin tails.
struct Chi2Stat {
    double statistic = 0.0;
    double df = 0.0;
};

inline Chi2Stat chi2_gof(const std::vector<double>& observed,
                         const std::vector<double>& expected,
                         double min_expected = 5.0) {
    if (observed.size() != expected.size() || observed.empty())
        throw precondition_error("chi2_gof: size mismatch");
    std::vector<double> obs, exp;
    double o_acc = 0, e_acc = 0;
    for (size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0;
        }
    }
    if (e_acc > 0) { // fold the remainder into the last cell
        if (obs.empty()) throw precondition_error("chi2_gof: too little mass");
        obs.back() += o_acc;
        exp.back() += e_acc;
    }
    if (obs.size() < 2) throw precondition_error("chi2_gof: too few cells");
    double stat = 0.0;
    for (size_t i = 0; i < obs.size(); ++i) {
        const double diff = obs[i] - exp[i];
        stat += diff * diff / exp[i];
    }
    return {stat, static_cast<double>(obs.size() - 1)};
}

inline TestResult chi2_test(const std::string& name,
                            const std::vector<double>& observed,
                            const std::vector<double>& expected,
                            double alpha = 0.01) {
    const Chi2Stat s = chi2_gof(observed, expected);
    TestResult r{name, s.statistic, chi2_quantile(1 - alpha, s.df), false,
                 "df=" + std::to_string(static_cast<int>(s.df))};
    r.pass = s.statistic < r.threshold;
    return r;
}

/// Chi-square independence test on an r x c contingency table (counts).
inline Chi2Stat chi2_independence(const std::vector<std::vector<double>>& table) {
    const size_t rows = table.size();
    if (rows < 2) throw precondition_error("chi2_independence: need >= 2 rows");
    const size_t cols = table[0].size();
    if (cols < 2) throw precondition_error("chi2_independence: need >= 2 cols");
    std::vector<double> row_sum(rows, 0), col_sum(cols, 0);
    double total = 0;
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) {
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
            total += table[i][j];
        }
    if (total <= 0) throw precondition_error("chi2_independence: empty table");
    double stat = 0;
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) {
            const double e = row_sum[i] * col_sum[j] / total;
            if (e <= 0) continue;
            const double d = table[i][j] - e;
            stat += d * d / e;
        }
    return {stat, static_cast<double>((rows - 1) * (cols - 1))};
}

// ---------------------------------------------------------------------------
// Correlation.
// ---------------------------------------------------------------------------

inline double pearson_corr(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw precondition_error("pearson_corr: bad input");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n; my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> ranks(const std::vector<double>& xs) {
    std::vector<size_t> order(xs.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(xs.size());
    for (size_t i = 0; i < order.size(); ++i)
        r[order[i]] = static_cast<double>(i + 1);
    return r;
}

inline double spearman_corr(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
    return pearson_corr(ranks(xs), ranks(ys));
}

} // namespace ers
