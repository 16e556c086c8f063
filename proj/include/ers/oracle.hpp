#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "ers/dst1d.hpp"
#include "ers/haar.hpp"
#include "ers/randomness.hpp"
#include "ers/rational.hpp"
#include "ers/universe.hpp"

namespace ers {

// ---------------------------------------------------------------------------
// Dense inverse-HWT brute force.
// ---------------------------------------------------------------------------

/// A fully materialized universe: the coefficient vector w (canonical
/// CoeffRef order) and the underlying values x = M^T w. Ground truth for
/// the efficient path; computed by a separate dense multiply.
struct DenseRealization {
    Universe universe;
    std::vector<double> w;
    std::vector<double> x;
};

inline CoeffRef coeff_ref_from_flat(uint64_t flat, const Universe& u) {
    CoeffRef ref;
    ref.d = u.d;
    for (int t = u.d - 1; t >= 0; --t) {
        auto [m, j] = CoeffRef::from_index_1d(flat % u.delta());
        ref.m[t] = static_cast<int8_t>(m);
        ref.j[t] = j;
        flat /= u.delta();
    }
    return ref;
}

inline DenseRealization dense_inverse_hwt(const CoeffSource& src, const Universe& u,
                                          uint64_t cap = DenseHaarMatrix::kDefaultCap) {
    DenseHaarMatrix m(u, cap);
    const uint64_t n = m.size();
    DenseRealization out;
    out.universe = u;
    out.w.resize(n);
    for (uint64_t a = 0; a < n; ++a)
        out.w[a] = src.coeff_value(coeff_ref_from_flat(a, u));
    out.x.assign(n, 0.0);
    for (uint64_t a = 0; a < n; ++a) {
        const double wa = out.w[a];
        for (uint64_t i = 0; i < n; ++i) out.x[i] += m.at(a, i) * wa;
    }
    return out;
}

/// Plain summation of the materialized values over a box.
inline double brute_range_sum(const DenseRealization& dr, const RangeD& r) {
    r.validate(dr.universe);
    const Universe& u = dr.universe;
    double total = 0.0;
    std::array<uint64_t, kMaxDims> idx{};
    for (int t = 0; t < u.d; ++t) idx[t] = r.dims[t].l;
    for (;;) {
        uint64_t flat = 0;
        for (int t = 0; t < u.d; ++t) flat = flat * u.delta() + idx[t];
        total += dr.x[flat];
        int t = u.d - 1;
        while (t >= 0) {
            if (++idx[t] < r.dims[t].u) break;
            idx[t] = r.dims[t].l;
            --t;
        }
        if (t < 0) break;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Paper-exact negative cases.
// ---------------------------------------------------------------------------

/// Exact enumeration of the 2x2 Rademacher universe (16 sign patterns):
/// returns Pr(S^V_0 = 0 | S = 0) and
/// Pr(S^V_0 = 0 | S^H_0 = 2, S^H_1 = -2, S = 0). The two differ (2/3 vs 1),
/// witnessing that strip-sums are not conditionally independent given S.
inline std::pair<Rational, Rational> rademacher_2x2_conditional() {
    int64_t s0_count = 0, s0_v0_count = 0;
    int64_t cond_count = 0, cond_v0_count = 0;
    for (int bits = 0; bits < 16; ++bits) {
        const int x00 = (bits & 1) ? 1 : -1;
        const int x01 = (bits & 2) ? 1 : -1;
        const int x10 = (bits & 4) ? 1 : -1;
        const int x11 = (bits & 8) ? 1 : -1;
        const int s = x00 + x01 + x10 + x11;
        if (s != 0) continue;
        const int sh0 = x00 + x01, sh1 = x10 + x11;
        const int sv0 = x00 + x10;
        ++s0_count;
        if (sv0 == 0) ++s0_v0_count;
        if (sh0 == 2 && sh1 == -2) {
            ++cond_count;
            if (sv0 == 0) ++cond_v0_count;
        }
    }
    return {Rational(s0_v0_count, s0_count), Rational(cond_v0_count, cond_count)};
}

namespace detail {

// Adaptive Simpson on [a, b] with absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb,
                               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0)
        throw invalid_state_error("adaptive quadrature did not converge");
    if (std::fabs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

} // namespace detail

struct CauchyG0 {
    double numeric;
    double closed_form;
};

/// g(0|z) for the Cauchy strip-dependence computation: the convolution value
/// integral(f(x|z) f(-x|-z) dx) evaluated by adaptive quadrature over the
/// whole line (tan substitution), against the closed form
/// (20 + z^2) / (4 pi (4 + z^2)).
inline CauchyG0 cauchy_g0(double z, double tol = 1e-9) {
    if (!std::isfinite(z)) throw precondition_error("cauchy_g0: z must be finite");
    auto f = [z](double x) {
        return (4 + z * z) /
               (2 * std::numbers::pi * (1 + x * x) * (1 + (z - x) * (z - x)));
    };
    // f(-x|-z) == f(x|z); integrate f^2 with x = tan(t).
    auto integrand = [&](double t) {
        const double c = std::cos(t);
        if (c == 0.0) return 0.0; // integrand decays as x^-8, limit is 0
        const double x = std::tan(t);
        const double v = f(x);
        return v * v / (c * c);
    };
    const double half_pi = std::numbers::pi / 2;
    const double numeric = detail::integrate(integrand, -half_pi, half_pi, tol);
    const double closed = (20 + z * z) / (4 * std::numbers::pi * (4 + z * z));
    return {numeric, closed};
}

// ---------------------------------------------------------------------------
// Exact split-kernel tables from the conditional-split formula.
// ---------------------------------------------------------------------------

/// Exact normalized conditional pmf of the lower half-sum S_l given parent
/// sum z over 2n leaves, built directly from phi_n(x) phi_n(z-x) / phi_2n(z)
/// for the discrete targets. Keys are S_l values.
///   Poisson:     support {0..z},               pmf C(z,x)/2^z (any rate).
///   Rademacher:  support {-n,-n+2,...} cap z,  hypergeometric in the
///                positive-sign count.
inline std::map<int64_t, Rational> eq1_pmf(const TargetDist& dist, int64_t z,
                                           int64_t n) {
    std::map<int64_t, Rational> table;
    if (dist.kind == TargetDist::Kind::poisson) {
        if (z < 0) throw precondition_error("eq1_pmf: Poisson sum must be >= 0");
        if (z > 60) throw precondition_error("eq1_pmf: table too large");
        // phi_n ~ Poisson(n*lambda); the rates cancel into Binomial(z, 1/2).
        __int128 denom = __int128{1} << z;
        for (int64_t x = 0; x <= z; ++x)
            table[x] = Rational(binom128(z, x), denom);
        return table;
    }
    if (dist.kind == TargetDist::Kind::rademacher) {
        if (n < 1 || n > 30) throw precondition_error("eq1_pmf: n out of range");
        if (std::llabs(z) > 2 * n || ((2 * n + z) & 1))
            throw precondition_error("eq1_pmf: infeasible Rademacher sum");
        // phi_n(s) = C(n, (n+s)/2) / 2^n on s in {-n, -n+2, ..., n}.
        Rational norm(0);
        std::map<int64_t, __int128> raw;
        for (int64_t k = 0; k <= n; ++k) { // k = positive signs in the lower half
            const int64_t x = 2 * k - n;
            const int64_t rest = z - x;
            if (std::llabs(rest) > n || ((n + rest) & 1)) continue;
            const __int128 ways = binom128(n, k) * binom128(n, (n + rest) / 2);
            if (ways == 0) continue;
            raw[x] = ways;
        }
        __int128 total = 0;
        for (const auto& [x, ways] : raw) total += ways;
        for (const auto& [x, ways] : raw) table[x] = Rational(ways, total);
        return table;
    }
    throw precondition_error("eq1_pmf: continuous target, use quadrature");
}

/// Exact normalized 4-way-split table 1/c * 1/(x!(s_h-x)!(s_v-x)!(s_g-s_h-s_v+x)!)
/// as rationals; equals the Hypergeometric(s_g, s_v, s_h) pmf.
inline std::map<int64_t, Rational> four_way_split_pmf(int64_t s_h, int64_t s_v,
                                                      int64_t s_g) {
    if (s_h < 0 || s_v < 0 || s_h > s_g || s_v > s_g)
        throw precondition_error("four_way_split_pmf: invalid conditional");
    if (s_g > 33) throw precondition_error("four_way_split_pmf: table too large");
    // Multiply the reciprocal-factorial kernel by s_g! to stay integral:
    // s_g! / (x!(s_h-x)!(s_v-x)!(s_g-s_h-s_v+x)!) = C(s_g, x, s_h-x, s_v-x, ...)
    auto fact = [](int64_t k) {
        __int128 r = 1;
        for (int64_t i = 2; i <= k; ++i) r *= i;
        return r;
    };
    std::map<int64_t, __int128> raw;
    __int128 total = 0;
    const __int128 sg_fact = fact(s_g);
    for (int64_t x = std::max<int64_t>(0, s_h + s_v - s_g);
         x <= std::min(s_h, s_v); ++x) {
        const __int128 ways = sg_fact / fact(x) / fact(s_h - x) / fact(s_v - x) /
                              fact(s_g - s_h - s_v + x);
        raw[x] = ways;
        total += ways;
    }
    std::map<int64_t, Rational> table;
    for (const auto& [x, ways] : raw) table[x] = Rational(ways, total);
    return table;
}

/// Hypergeometric(population N, successes K, draws n) pmf as exact rationals.
inline std::map<int64_t, Rational> hypergeometric_pmf(int64_t N, int64_t K,
                                                      int64_t n) {
    if (K < 0 || n < 0 || K > N || n > N)
        throw precondition_error("hypergeometric_pmf: invalid parameters");
    std::map<int64_t, Rational> table;
    const __int128 denom = binom128(N, n);
    for (int64_t x = std::max<int64_t>(0, n + K - N); x <= std::min(K, n); ++x)
        table[x] = Rational(binom128(K, x) * binom128(N - K, n - x), denom);
    return table;
}

} // namespace ers
