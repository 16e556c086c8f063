#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "ers/oracle.hpp"
#include "ers/poisson2d.hpp"
#include "ers/samplers.hpp"
#include "ers/stats.hpp"

using namespace ers;
using Catch::Approx;

namespace {

Stream make_stream(uint64_t key, const char* seed_hex = "5eed") {
    static std::map<std::string, Prf> prfs;
    auto [it, _] = prfs.emplace(seed_hex, Prf(Seed256::from_hex(seed_hex)));
    return Stream(it->second, Domain::stat_stream, key);
}

// Chi-square of sampled draws against an exact pmf table.
template <typename Sampler>
TestResult sampled_vs_table(const std::string& name, Sampler&& draw, int n_draws,
                            const std::map<int64_t, Rational>& table) {
    std::map<int64_t, double> counts;
    for (int i = 0; i < n_draws; ++i) counts[draw()] += 1.0;
    std::vector<double> observed, expected;
    for (const auto& [x, p] : table) {
        observed.push_back(counts.count(x) ? counts[x] : 0.0);
        expected.push_back(p.to_double() * n_draws);
        counts.erase(x);
    }
    // Draws outside the table's support are an automatic failure.
    if (!counts.empty()) return {name, 1e18, 0.0, false, "off-support draw"};
    return chi2_test(name, observed, expected, 0.01);
}

} // namespace

TEST_CASE("binomial_half: exact bit-counting path") {
    SECTION("degenerate draws") {
        Stream s = make_stream(1);
        CHECK(sample_binomial_half(s, 0) == 0);
    }
    SECTION("chi-square against the exact pmf, n = 10") {
        Stream s = make_stream(2);
        std::map<int64_t, Rational> table;
        for (int64_t x = 0; x <= 10; ++x)
            table[x] = Rational(binom128(10, x), __int128{1} << 10);
        auto r = sampled_vs_table(
            "binomial10", [&] { return static_cast<int64_t>(sample_binomial_half(s, 10)); },
            200000, table);
        INFO(r.statistic << " vs " << r.threshold);
        CHECK(r.pass);
    }
    SECTION("chi-square across the popcount word boundary, n = 130") {
        Stream s = make_stream(3);
        std::map<int64_t, double> counts;
        const int draws = 200000;
        for (int i = 0; i < draws; ++i) counts[static_cast<int64_t>(sample_binomial_half(s, 130))] += 1.0;
        // Exact binomial probabilities via lgamma.
        std::vector<double> observed, expected;
        for (int64_t x = 0; x <= 130; ++x) {
            const double logp = std::lgamma(131.0) - std::lgamma(x + 1.0) -
                                std::lgamma(131.0 - x) - 130.0 * std::log(2.0);
            expected.push_back(std::exp(logp) * draws);
            observed.push_back(counts.count(x) ? counts[x] : 0.0);
        }
        auto r = chi2_test("binomial130", observed, expected, 0.01);
        INFO(r.statistic << " vs " << r.threshold);
        CHECK(r.pass);
    }
}

TEST_CASE("binomial_half: BTRS large path moments and fit") {
    Stream s = make_stream(4);
    const uint64_t n = 10000; // beyond the bit-counting threshold
    const int draws = 200000;
    std::map<int64_t, double> counts;
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = static_cast<double>(sample_binomial_half(s, n));
        counts[static_cast<int64_t>(x)] += 1.0;
        mean += x;
        m2 += x * x;
    }
    mean /= draws;
    const double var = m2 / draws - mean * mean;
    // mean n/2, variance n/4; 3-sigma bands for the estimators.
    const double se_mean = std::sqrt(n / 4.0) / std::sqrt(draws);
    CHECK(std::fabs(mean - n / 2.0) < 3 * se_mean);
    const double se_var = (n / 4.0) * std::sqrt(2.0 / (draws - 1));
    CHECK(std::fabs(var - n / 4.0) < 3 * se_var);
    // Chi-square against exact probabilities around the mode.
    std::vector<double> observed, expected;
    const int64_t lo = 4800, hi = 5200;
    double obs_tail_lo = 0, obs_tail_hi = 0;
    for (const auto& [x, c] : counts) {
        if (x < lo) obs_tail_lo += c;
        else if (x > hi) obs_tail_hi += c;
    }
    auto log_pmf = [&](int64_t x) {
        return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(x + 1.0) -
               std::lgamma(static_cast<double>(n) - x + 1.0) -
               static_cast<double>(n) * std::log(2.0);
    };
    double exp_tail_lo = 0, exp_tail_hi = 0;
    for (int64_t x = lo - 300; x < lo; ++x) exp_tail_lo += std::exp(log_pmf(x));
    for (int64_t x = hi + 1; x <= hi + 300; ++x) exp_tail_hi += std::exp(log_pmf(x));
    observed.push_back(obs_tail_lo);
    expected.push_back(exp_tail_lo * draws);
    for (int64_t x = lo; x <= hi; x += 10) {
        double o = 0, e = 0;
        for (int64_t y = x; y < x + 10 && y <= hi; ++y) {
            o += counts.count(y) ? counts[y] : 0.0;
            e += std::exp(log_pmf(y));
        }
        observed.push_back(o);
        expected.push_back(e * draws);
    }
    observed.push_back(obs_tail_hi);
    expected.push_back(exp_tail_hi * draws);
    auto r = chi2_test("btrs10000", observed, expected, 0.01);
    INFO(r.statistic << " vs " << r.threshold);
    CHECK(r.pass);
}

TEST_CASE("poisson sampler: inversion and PTRS regimes") {
    SECTION("rate must be positive") {
        Stream s = make_stream(5);
        CHECK_THROWS_AS(sample_poisson(s, 0.0), precondition_error);
    }
    for (double mu : {3.0, 25.0, 120.0}) {
        DYNAMIC_SECTION("chi-square fit at mu = " << mu) {
            Stream s = make_stream(static_cast<uint64_t>(mu * 100));
            const int draws = 200000;
            std::map<int64_t, double> counts;
            for (int i = 0; i < draws; ++i)
                counts[static_cast<int64_t>(sample_poisson(s, mu))] += 1.0;
            const int64_t hi = static_cast<int64_t>(mu + 8 * std::sqrt(mu)) + 2;
            std::vector<double> observed, expected;
            double covered = 0.0;
            for (int64_t x = 0; x < hi; ++x) {
                const double p =
                    std::exp(x * std::log(mu) - mu - std::lgamma(x + 1.0));
                observed.push_back(counts.count(x) ? counts[x] : 0.0);
                expected.push_back(p * draws);
                covered += p;
                counts.erase(x);
            }
            // everything beyond hi in one tail cell
            double tail_obs = 0.0;
            for (const auto& [x, c] : counts) tail_obs += c;
            observed.push_back(tail_obs);
            expected.push_back((1.0 - covered) * draws);
            auto r = chi2_test("poisson", observed, expected, 0.01);
            INFO(r.statistic << " vs " << r.threshold);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("hypergeometric sampler: exact table fit in both regimes") {
    SECTION("parameter validation and degenerate cases") {
        Stream s = make_stream(6);
        CHECK_THROWS_AS(sample_hypergeometric(s, 5, 6, 2), precondition_error);
        CHECK(sample_hypergeometric(s, 9, 0, 4) == 0);
        CHECK(sample_hypergeometric(s, 9, 9, 4) == 4);
        CHECK(sample_hypergeometric(s, 9, 4, 0) == 0);
    }
    SECTION("small-parameter inversion, N=10 K=4 n=5") {
        Stream s = make_stream(7);
        auto table = hypergeometric_pmf(10, 4, 5);
        auto r = sampled_vs_table(
            "hyp10", [&] { return static_cast<int64_t>(sample_hypergeometric(s, 10, 4, 5)); },
            200000, table);
        INFO(r.statistic << " vs " << r.threshold);
        CHECK(r.pass);
    }
    SECTION("asymmetric reductions, N=12 K=9 n=8") {
        Stream s = make_stream(8);
        auto table = hypergeometric_pmf(12, 9, 8);
        auto r = sampled_vs_table(
            "hyp12", [&] { return static_cast<int64_t>(sample_hypergeometric(s, 12, 9, 8)); },
            200000, table);
        INFO(r.statistic << " vs " << r.threshold);
        CHECK(r.pass);
    }
    SECTION("HRUA large path: moments at N=1e6, K=3e5, n=1e4") {
        Stream s = make_stream(9);
        const double N = 1e6, K = 3e5, n = 1e4;
        const int draws = 50000;
        double mean = 0.0, m2 = 0.0;
        for (int i = 0; i < draws; ++i) {
            const double x = static_cast<double>(sample_hypergeometric(
                s, static_cast<uint64_t>(N), static_cast<uint64_t>(K),
                static_cast<uint64_t>(n)));
            mean += x;
            m2 += x * x;
        }
        mean /= draws;
        const double var = m2 / draws - mean * mean;
        const double expect_mean = n * K / N;
        const double expect_var = n * (K / N) * (1 - K / N) * (N - n) / (N - 1);
        CHECK(std::fabs(mean - expect_mean) <
              3 * std::sqrt(expect_var / draws));
        CHECK(std::fabs(var - expect_var) <
              3 * expect_var * std::sqrt(2.0 / (draws - 1)) + 1.0);
    }
}

TEST_CASE("cauchy split sampler: KS against the normalized conditional density") {
    // f(x|z) with n = 1; numeric CDF by integrating the closed-form density.
    const double z = 1.0;
    auto density = [&](double x) {
        return (4 + z * z) /
               (2 * std::numbers::pi * (1 + x * x) * (1 + (z - x) * (z - x)));
    };
    Stream s = make_stream(10);
    std::vector<double> samples;
    for (int i = 0; i < 4000; ++i) samples.push_back(sample_cauchy_split(s, z, 1.0));
    std::sort(samples.begin(), samples.end());
    // CDF at each sample by incremental Simpson integration between samples,
    // anchored far in the left tail (density ~ x^-4).
    std::vector<double> cdf_at(samples.size());
    double x0 = -1e5, acc = density(-1e5) * 0.0;
    // integrate from -1e5 using tan substitution piecewise
    auto segment = [&](double a, double b) {
        // Simpson with enough points over the mapped interval
        const int steps = 64;
        double sum = 0.0;
        const double ta = std::atan(a), tb = std::atan(b);
        const double h = (tb - ta) / steps;
        for (int i = 0; i < steps; ++i) {
            const double t1 = ta + i * h, t2 = t1 + h, tm = 0.5 * (t1 + t2);
            auto g = [&](double t) {
                const double c = std::cos(t);
                return density(std::tan(t)) / (c * c);
            };
            sum += (t2 - t1) / 6 * (g(t1) + 4 * g(tm) + g(t2));
        }
        return sum;
    };
    for (size_t i = 0; i < samples.size(); ++i) {
        acc += segment(x0, samples[i]);
        x0 = samples[i];
        cdf_at[i] = acc;
    }
    double d = 0.0;
    const double n = static_cast<double>(samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
        d = std::max(d, std::max((i + 1) / n - cdf_at[i], cdf_at[i] - i / n));
    const double crit = ks_critical(samples.size(), 0.01);
    INFO("KS " << d << " vs " << crit);
    CHECK(d < crit);
}

TEST_CASE("split-kernel tables: sampled pmf matches the exact conditional table") {
    SECTION("four-way split equals hypergeometric, exact rationals") {
        for (int64_t sg = 0; sg <= 12; ++sg)
            for (int64_t sh = 0; sh <= sg; ++sh)
                for (int64_t sv = 0; sv <= sg; ++sv) {
                    auto lhs = four_way_split_pmf(sh, sv, sg);
                    auto rhs = hypergeometric_pmf(sg, sv, sh);
                    REQUIRE(lhs.size() == rhs.size());
                    for (const auto& [x, p] : lhs) REQUIRE(p == rhs.at(x));
                }
    }
    SECTION("sampled four-way split matches the table") {
        Stream s = make_stream(11);
        auto table = four_way_split_pmf(5, 7, 12);
        auto r = sampled_vs_table(
            "fourway", [&] { return static_cast<int64_t>(four_way_split_sample(5, 7, 12, s)); },
            200000, table);
        INFO(r.statistic << " vs " << r.threshold);
        CHECK(r.pass);
    }
}
