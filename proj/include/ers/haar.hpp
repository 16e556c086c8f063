#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ers/universe.hpp"

namespace ers {

struct HaarCoeff {
    CoeffRef ref;
    double weight = 0.0;
};

/// Nonzero HWT coefficients of a range indicator, sorted in canonical
/// CoeffRef order. For a 1D range there are at most 2 entries per scale and
/// 2L+2 in total; a point has exactly one entry per scale.
using SparseHaarVector = std::vector<HaarCoeff>;

namespace detail {

struct ScaleLocWeight {
    int m;
    uint64_t j;
    double w;
};

// sqrt(2^m / delta), exact for even exponents.
inline double haar_scale_factor(int m, int log2_delta) {
    return std::sqrt(std::ldexp(1.0, m - log2_delta));
}

// Per-dimension sparse coefficients of 1_{[l,u)}, in (m, j) dictionary order.
// Intersection counts stay integers until the final scaling.
inline std::vector<ScaleLocWeight> haar_coeffs_dim(const Range1D& r,
                                                   const Universe& u) {
    const uint64_t delta = u.delta();
    const int L = u.log2_delta;
    std::vector<ScaleLocWeight> out;
    out.reserve(2 * static_cast<size_t>(L) + 2);
    // Scale -1: the averaging row contributes (u - l) * delta^{-1/2}.
    out.push_back({-1, 0, static_cast<double>(r.size()) *
                              std::sqrt(std::ldexp(1.0, -L))});
    for (int m = 0; m < L; ++m) {
        const uint64_t len = delta >> m; // |I^m_j|
        const uint64_t half = len >> 1;
        // Only the dyadic ranges covering l or u can intersect [l, u) partially.
        const uint64_t j_lo = r.l >> (L - m);
        const uint64_t j_hi = r.u >> (L - m); // may equal 2^m when u == delta
        const uint64_t cands[2] = {j_lo, j_hi};
        const int ncand = (j_hi == j_lo) ? 1 : 2;
        for (int ci = 0; ci < ncand; ++ci) {
            const uint64_t j = cands[ci];
            if (j >= (uint64_t{1} << m)) continue;
            const uint64_t start = j * len;
            const uint64_t mid = start + half;
            const uint64_t stop = start + len;
            const uint64_t c1 = std::min(r.u, mid) > std::max(r.l, start)
                                    ? std::min(r.u, mid) - std::max(r.l, start)
                                    : 0;
            const uint64_t c2 = std::min(r.u, stop) > std::max(r.l, mid)
                                    ? std::min(r.u, stop) - std::max(r.l, mid)
                                    : 0;
            if (c1 == c2) continue;
            const double diff =
                static_cast<double>(static_cast<int64_t>(c1) - static_cast<int64_t>(c2));
            out.push_back({m, j, diff * haar_scale_factor(m, L)});
        }
    }
    return out;
}

// Odometer over the per-dimension coefficient lists; row-major order matches
// the canonical CoeffRef order because each list is already sorted.
template <typename Fn>
inline void for_each_product(const std::vector<std::vector<ScaleLocWeight>>& per_dim,
                             Fn&& fn) {
    const int d = static_cast<int>(per_dim.size());
    std::array<size_t, kMaxDims> idx{};
    CoeffRef ref;
    ref.d = d;
    for (;;) {
        double w = 1.0;
        for (int t = 0; t < d; ++t) {
            const ScaleLocWeight& slw = per_dim[t][idx[t]];
            ref.m[t] = static_cast<int8_t>(slw.m);
            ref.j[t] = slw.j;
            w *= slw.w;
        }
        fn(ref, w);
        int t = d - 1;
        while (t >= 0 && ++idx[t] == per_dim[t].size()) idx[t--] = 0;
        if (t < 0) break;
    }
}

} // namespace detail

inline SparseHaarVector haar_range_coeffs_1d(const Range1D& r, const Universe& u) {
    if (u.d != 1) throw precondition_error("haar_range_coeffs_1d: universe must be 1D");
    r.validate(u);
    SparseHaarVector out;
    for (const auto& slw : detail::haar_coeffs_dim(r, u)) {
        CoeffRef ref;
        ref.d = 1;
        ref.m[0] = static_cast<int8_t>(slw.m);
        ref.j[0] = slw.j;
        out.push_back({ref, slw.w});
    }
    return out;
}

inline SparseHaarVector haar_point_coeffs_1d(uint64_t i, const Universe& u) {
    if (i >= u.delta())
        throw precondition_error("haar_point_coeffs_1d: index out of range");
    return haar_range_coeffs_1d({i, i + 1}, u);
}

inline SparseHaarVector haar_range_coeffs_dd(const RangeD& r, const Universe& u) {
    r.validate(u);
    std::vector<std::vector<detail::ScaleLocWeight>> per_dim;
    per_dim.reserve(u.d);
    Universe axis{1, u.log2_delta};
    for (int t = 0; t < u.d; ++t)
        per_dim.push_back(detail::haar_coeffs_dim(r.dims[t], axis));
    SparseHaarVector out;
    size_t total = 1;
    for (const auto& v : per_dim) total *= v.size();
    out.reserve(total);
    detail::for_each_product(per_dim, [&](const CoeffRef& ref, double w) {
        out.push_back({ref, w});
    });
    return out;
}

/// Dense d-dimensional HWT matrix (the d-fold Kronecker power of the 1D Haar
/// matrix), rows in canonical CoeffRef order, columns in dictionary order of
/// the point index. Row-major storage, delta^d x delta^d.
class DenseHaarMatrix {
public:
    static constexpr uint64_t kDefaultCap = 4096;

    DenseHaarMatrix(const Universe& u, uint64_t cap = kDefaultCap) : u_(u) {
        uint64_t rows = 1;
        for (int t = 0; t < u.d; ++t) {
            if (rows > cap / u.delta())
                throw oracle_cap_error("DenseHaarMatrix: delta^d exceeds oracle cap");
            rows *= u.delta();
        }
        n_ = rows;
        // 1D Haar matrix.
        const uint64_t delta = u.delta();
        std::vector<double> h(delta * delta, 0.0);
        const double root = std::sqrt(std::ldexp(1.0, -u.log2_delta));
        for (uint64_t col = 0; col < delta; ++col) h[col] = root;
        for (int m = 0; m < u.log2_delta; ++m) {
            const uint64_t len = delta >> m;
            const double val = detail::haar_scale_factor(m, u.log2_delta);
            for (uint64_t j = 0; j < (uint64_t{1} << m); ++j) {
                const uint64_t row = CoeffRef::index_1d(m, j);
                for (uint64_t c = j * len; c < j * len + len / 2; ++c)
                    h[row * delta + c] = val;
                for (uint64_t c = j * len + len / 2; c < (j + 1) * len; ++c)
                    h[row * delta + c] = -val;
            }
        }
        // Kronecker power; h stays alive as the right factor.
        m_ = h;
        uint64_t cur = delta;
        while (cur < n_) {
            const uint64_t next = cur * delta;
            std::vector<double> out(next * next);
            for (uint64_t r1 = 0; r1 < cur; ++r1)
                for (uint64_t r2 = 0; r2 < delta; ++r2)
                    for (uint64_t c1 = 0; c1 < cur; ++c1) {
                        const double a = m_[r1 * cur + c1];
                        double* dst = &out[(r1 * delta + r2) * next + c1 * delta];
                        const double* src = &h[r2 * delta];
                        for (uint64_t c2 = 0; c2 < delta; ++c2) dst[c2] = a * src[c2];
                    }
            m_ = std::move(out);
            cur = next;
        }
    }

    uint64_t size() const { return n_; }
    double at(uint64_t row, uint64_t col) const { return m_[row * n_ + col]; }
    const std::vector<double>& data() const { return m_; }
    const Universe& universe() const { return u_; }

private:
    Universe u_;
    uint64_t n_ = 0;
    std::vector<double> m_;
};

inline DenseHaarMatrix dense_haar_matrix(const Universe& u,
                                         uint64_t cap = DenseHaarMatrix::kDefaultCap) {
    return DenseHaarMatrix(u, cap);
}

} // namespace ers
