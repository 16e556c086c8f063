#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "ers/randomness.hpp"

namespace ers {

namespace detail {

// Correction term delta(k) in Stirling's series: lgamma(k+1) =
// 0.5*log(2*pi) + (k+0.5)*log(k+1) - (k+1) + delta(k). Tabulated for small k.
inline double stirling_tail(double k) {
    static const double table[] = {
        0.0810614667953272,  0.0413406959554092, 0.0276779256849983,
        0.02079067210376509, 0.0166446911898211, 0.0138761288230707,
        0.0118967099458917,  0.0104112652619720, 0.00925546218271273,
        0.00833056343336287};
    if (k < 10.0) return table[static_cast<int>(k)];
    const double kp1sq = (k + 1) * (k + 1);
    return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Binomial(n, 1/2)
// ---------------------------------------------------------------------------

/// Fair-coin binomial. Small n counts bits of the stream directly (exact);
/// large n uses Hormann's BTRS transformed rejection.
inline uint64_t sample_binomial_half(Stream& stream, uint64_t n) {
    if (n == 0) return 0;
    if (n <= 4096) {
        uint64_t ones = 0;
        uint64_t left = n;
        while (left >= 64) {
            ones += static_cast<uint64_t>(std::popcount(stream.next_u64()));
            left -= 64;
        }
        if (left > 0)
            ones += static_cast<uint64_t>(
                std::popcount(stream.next_u64() & ((uint64_t{1} << left) - 1)));
        return ones;
    }
    const double nd = static_cast<double>(n);
    const double p = 0.5;
    const double spq = std::sqrt(nd * p * (1 - p));
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double m = std::floor((nd + 1) * p);
    for (;;) {
        const double u = stream.next_unit() - 0.5;
        double v = stream.next_unit();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2 * a / us + b) * u + c);
        if (kd < 0 || kd > nd) continue;
        if (us >= 0.07 && v <= vr) return static_cast<uint64_t>(kd);
        v = std::log(v * alpha / (a / (us * us) + b));
        const double ub =
            (m + 0.5) * std::log((m + 1) / (nd - m + 1)) +
            (nd + 1) * std::log((nd - m + 1) / (nd - kd + 1)) +
            (kd + 0.5) * std::log((nd - kd + 1) / (kd + 1)) +
            detail::stirling_tail(m) + detail::stirling_tail(nd - m) -
            detail::stirling_tail(kd) - detail::stirling_tail(nd - kd);
        if (v <= ub) return static_cast<uint64_t>(kd);
    }
}

// ---------------------------------------------------------------------------
// Poisson(mu)
// ---------------------------------------------------------------------------

/// Exact inversion (chop-down) below mu = 30, Hormann's PTRS transformed
/// rejection above.
inline uint64_t sample_poisson(Stream& stream, double mu) {
    if (!(mu > 0))
        throw precondition_error("sample_poisson: rate must be positive");
    if (mu < 30.0) {
        double u = stream.next_unit();
        double pmf = std::exp(-mu);
        double cum = pmf;
        uint64_t x = 0;
        while (u > cum) {
            ++x;
            pmf *= mu / static_cast<double>(x);
            cum += pmf;
            if (x > 1000) break; // cum ~ 1 long before this
        }
        return x;
    }
    const double b = 0.931 + 2.53 * std::sqrt(mu);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2);
    const double log_mu = std::log(mu);
    for (;;) {
        const double u = stream.next_unit() - 0.5;
        const double v = stream.next_unit();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2 * a / us + b) * u + mu + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<uint64_t>(kd);
        if (kd < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kd * log_mu - mu - std::lgamma(kd + 1))
            return static_cast<uint64_t>(kd);
    }
}

// ---------------------------------------------------------------------------
// Hypergeometric(population N, successes K, draws n)
// ---------------------------------------------------------------------------

namespace detail {

inline uint64_t hypergeometric_inversion(Stream& stream, uint64_t total,
                                         uint64_t good, uint64_t draws) {
    // CDF inversion along the pmf recurrence from the lower support end.
    const int64_t N = static_cast<int64_t>(total);
    const int64_t K = static_cast<int64_t>(good);
    const int64_t n = static_cast<int64_t>(draws);
    const int64_t lo = std::max<int64_t>(0, n + K - N);
    const int64_t hi = std::min<int64_t>(K, n);
    // log pmf at the lower end, then walk up.
    double logp = std::lgamma(K + 1) - std::lgamma(lo + 1) - std::lgamma(K - lo + 1) +
                  std::lgamma(N - K + 1) - std::lgamma(n - lo + 1) -
                  std::lgamma(N - K - n + lo + 1) - std::lgamma(N + 1) +
                  std::lgamma(n + 1) + std::lgamma(N - n + 1);
    double pmf = std::exp(logp);
    double u = stream.next_unit();
    int64_t x = lo;
    double cum = pmf;
    while (u > cum && x < hi) {
        pmf *= static_cast<double>(K - x) * static_cast<double>(n - x) /
               (static_cast<double>(x + 1) *
                static_cast<double>(N - K - n + x + 1));
        ++x;
        cum += pmf;
    }
    return static_cast<uint64_t>(x);
}

inline double logfact(double k) { return std::lgamma(k + 1); }

// HRUA ratio-of-uniforms rejection (the classic large-parameter scheme).
inline uint64_t hypergeometric_hrua(Stream& stream, uint64_t total,
                                    uint64_t good, uint64_t draws) {
    const double d1 = 1.7155277699214135;  // 2*sqrt(2/e)
    const double d2 = 0.8989161620588988;  // 3 - 2*sqrt(3/e)
    const double N = static_cast<double>(total);
    const double mingoodbad = std::min<double>(static_cast<double>(good),
                                               N - static_cast<double>(good));
    const double maxgoodbad = N - mingoodbad;
    const double m = std::min<double>(static_cast<double>(draws),
                                      N - static_cast<double>(draws));
    const double d4 = mingoodbad / N;
    const double d5 = 1.0 - d4;
    const double d6 = m * d4 + 0.5;
    const double d7 = std::sqrt((N - m) * m * d4 * d5 / (N - 1) + 0.5);
    const double d8 = d1 * d7 + d2;
    const double d9 = std::floor((m + 1) * (mingoodbad + 1) / (N + 2));
    const double d10 = logfact(d9) + logfact(mingoodbad - d9) +
                       logfact(m - d9) + logfact(maxgoodbad - m + d9);
    const double d11 =
        std::min(std::min(m, mingoodbad) + 1.0, std::floor(d6 + 16 * d7));
    double Z;
    for (;;) {
        const double X = stream.next_unit();
        const double Y = stream.next_unit();
        const double W = d6 + d8 * (Y - 0.5) / X;
        if (W < 0.0 || W >= d11) continue;
        Z = std::floor(W);
        const double T = d10 - (logfact(Z) + logfact(mingoodbad - Z) +
                                logfact(m - Z) + logfact(maxgoodbad - m + Z));
        if (X * (4.0 - X) - 3.0 <= T) break;
        if (X * (X - T) >= 1) continue;
        if (2.0 * std::log(X) <= T) break;
    }
    // Undo the symmetry reductions.
    if (static_cast<double>(good) > N - static_cast<double>(good))
        Z = m - Z;
    if (static_cast<double>(draws) > N - static_cast<double>(draws))
        Z = static_cast<double>(good) - Z;
    return static_cast<uint64_t>(Z);
}

} // namespace detail

/// Number of "good" items among `draws` draws without replacement from a
/// population of `total` items containing `good` good ones.
inline uint64_t sample_hypergeometric(Stream& stream, uint64_t total,
                                      uint64_t good, uint64_t draws) {
    if (good > total || draws > total)
        throw precondition_error("sample_hypergeometric: invalid parameters");
    if (draws == 0 || good == 0) return 0;
    if (good == total) return draws;
    const uint64_t m = std::min(std::min(good, total - good),
                                std::min(draws, total - draws));
    uint64_t x;
    if (m < 64) {
        // Inversion in the reduced coordinate (numerically exact range).
        const uint64_t mingood = std::min(good, total - good);
        const uint64_t mindraw = std::min(draws, total - draws);
        x = detail::hypergeometric_inversion(stream, total, mingood, mindraw);
        if (good > total - good) x = mindraw - x;
        if (draws > total - draws) x = good - x;
    } else {
        x = detail::hypergeometric_hrua(stream, total, good, draws);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Heavy-tail and kernel samplers.
// ---------------------------------------------------------------------------

inline double sample_cauchy(Stream& stream, double scale) {
    return scale * std::tan(std::numbers::pi * (stream.next_unit() - 0.5));
}

inline double cauchy_density(double x, double scale) {
    return scale / (std::numbers::pi * (x * x + scale * scale));
}

/// Lower-half draw for a Cauchy dyadic split: samples f(x|z) =
/// phi_n(x) phi_n(z-x) / phi_2n(z) with phi_n the Cauchy(0, n) density, by
/// rejection against the equal mixture of Cauchy(0, n) and Cauchy(z, n).
/// The envelope constant is exactly 4, so acceptance averages 1/4.
inline double sample_cauchy_split(Stream& stream, double z, double n,
                                  int max_iters = 10000) {
    const double denom = cauchy_density(z, 2 * n);
    for (int it = 0; it < max_iters; ++it) {
        double x = sample_cauchy(stream, n);
        if (stream.next_u64() & 1) x = z - x; // mixture component
        const double fa = cauchy_density(x, n);
        const double fb = cauchy_density(z - x, n);
        const double target = fa * fb / denom;
        const double envelope = 0.5 * (fa + fb);
        if (stream.next_unit() * 4.0 * envelope <= target) return x;
    }
    throw invalid_state_error("sample_cauchy_split: rejection cap exceeded");
}

} // namespace ers
