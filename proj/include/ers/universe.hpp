#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "ers/error.hpp"

namespace ers {

inline constexpr int kMaxDims = 8;

/// The index universe [0, delta)^d with delta = 2^log2_delta, shared across
/// dimensions.
struct Universe {
    int d = 1;
    int log2_delta = 1;

    Universe() = default;
    Universe(int d_, int log2_delta_) : d(d_), log2_delta(log2_delta_) {
        if (d < 1 || d > kMaxDims)
            throw precondition_error("Universe: d must be in [1, " +
                                     std::to_string(kMaxDims) + "]");
        if (log2_delta < 1 || log2_delta > 62)
            throw precondition_error("Universe: log2_delta must be in [1, 62]");
    }

    uint64_t delta() const { return uint64_t{1} << log2_delta; }
    // Number of Haar scales per dimension (m = -1, 0, ..., L-1).
    int scales_per_dim() const { return log2_delta + 1; }

    friend bool operator==(const Universe&, const Universe&) = default;
};

/// Half-open 1D range [l, u), 0 <= l < u <= delta.
struct Range1D {
    uint64_t l = 0;
    uint64_t u = 0;

    uint64_t size() const { return u - l; }

    void validate(const Universe& uni) const {
        if (l >= u || u > uni.delta())
            throw precondition_error("Range1D: need 0 <= l < u <= delta, got [" +
                                     std::to_string(l) + ", " + std::to_string(u) +
                                     ") with delta=" + std::to_string(uni.delta()));
    }

    friend bool operator==(const Range1D&, const Range1D&) = default;
};

/// Half-open axis-aligned box, one Range1D per dimension.
struct RangeD {
    int d = 0;
    std::array<Range1D, kMaxDims> dims{};

    RangeD() = default;
    explicit RangeD(std::initializer_list<Range1D> rs) {
        if (rs.size() == 0 || rs.size() > kMaxDims)
            throw precondition_error("RangeD: dimension count out of range");
        d = static_cast<int>(rs.size());
        int t = 0;
        for (const Range1D& r : rs) dims[t++] = r;
    }
    static RangeD from_vec(const std::vector<Range1D>& rs) {
        if (rs.empty() || rs.size() > kMaxDims)
            throw precondition_error("RangeD: dimension count out of range");
        RangeD r;
        r.d = static_cast<int>(rs.size());
        for (size_t t = 0; t < rs.size(); ++t) r.dims[t] = rs[t];
        return r;
    }

    void validate(const Universe& uni) const {
        if (d != uni.d)
            throw precondition_error("RangeD: dimension mismatch with universe");
        for (int t = 0; t < d; ++t) dims[t].validate(uni);
    }

    // Number of lattice points covered.
    uint64_t volume() const {
        uint64_t v = 1;
        for (int t = 0; t < d; ++t) v *= dims[t].size();
        return v;
    }

    friend bool operator==(const RangeD&, const RangeD&) = default;
};

/// A 1D dyadic range identified by scale m and location j.
///
/// m = -1 denotes the whole universe [0, delta). For m >= 1 it denotes
/// I^m_j = [j*delta/2^m, (j+1)*delta/2^m). The degenerate alias m = 0
/// (which would also denote the full universe) is never produced; leaves
/// [i, i+1) carry m = L. Haar coefficients reuse the same (m, j) indexing
/// restricted to m in [-1, L-1].
struct DyadicRange1D {
    int m = -1;
    uint64_t j = 0;

    static DyadicRange1D full() { return {-1, 0}; }

    bool is_full() const { return m == -1; }
    // Tree depth: the full universe sits at depth 0.
    int depth() const { return m < 0 ? 0 : m; }

    uint64_t length(const Universe& u) const { return u.delta() >> depth(); }
    uint64_t begin(const Universe& u) const { return j * length(u); }
    uint64_t end(const Universe& u) const { return (j + 1) * length(u); }
    Range1D range(const Universe& u) const { return {begin(u), end(u)}; }

    void validate(const Universe& u) const {
        if (m < -1 || m > u.log2_delta)
            throw precondition_error("DyadicRange1D: scale out of range");
        if (j >= (uint64_t{1} << depth()))
            throw precondition_error("DyadicRange1D: location out of range");
    }

    DyadicRange1D parent() const {
        if (depth() == 0)
            throw precondition_error("DyadicRange1D: full universe has no parent");
        return m == 1 ? DyadicRange1D{-1, 0} : DyadicRange1D{m - 1, j >> 1};
    }
    DyadicRange1D child(int side) const { return {depth() + 1, 2 * j + side}; }

    friend bool operator==(const DyadicRange1D&, const DyadicRange1D&) = default;
    friend auto operator<=>(const DyadicRange1D& a, const DyadicRange1D& b) {
        if (a.m != b.m) return a.m <=> b.m;
        return a.j <=> b.j;
    }
};

/// Scale/location index of one d-dimensional HWT coefficient.
struct CoeffRef {
    int d = 0;
    std::array<int8_t, kMaxDims> m{};
    std::array<uint64_t, kMaxDims> j{};

    // Position of a 1D coefficient in the canonical dictionary order of
    // (m, j): (-1,0) first, then (0,0), (1,0), (1,1), (2,0), ...
    static uint64_t index_1d(int m, uint64_t j) {
        return m < 0 ? 0 : (uint64_t{1} << m) + j;
    }
    static std::pair<int, uint64_t> from_index_1d(uint64_t idx) {
        if (idx == 0) return {-1, 0};
        int m = std::bit_width(idx) - 1;
        return {m, idx - (uint64_t{1} << m)};
    }

    // Row index in the dense d-dimensional HWT matrix (row-major across
    // dimensions, dictionary order within each dimension).
    uint64_t flat_index(const Universe& u) const {
        uint64_t idx = 0;
        for (int t = 0; t < d; ++t) idx = idx * u.delta() + index_1d(m[t], j[t]);
        return idx;
    }

    void validate(const Universe& u) const {
        if (d != u.d) throw precondition_error("CoeffRef: dimension mismatch");
        for (int t = 0; t < d; ++t) {
            if (m[t] < -1 || m[t] >= u.log2_delta)
                throw precondition_error("CoeffRef: scale out of range");
            uint64_t locs = uint64_t{1} << (m[t] < 0 ? 0 : m[t]);
            if (j[t] >= locs)
                throw precondition_error("CoeffRef: location out of range");
        }
    }

    friend bool operator==(const CoeffRef&, const CoeffRef&) = default;
    friend bool operator<(const CoeffRef& a, const CoeffRef& b) {
        for (int t = 0; t < a.d; ++t) {
            uint64_t ia = index_1d(a.m[t], a.j[t]);
            uint64_t ib = index_1d(b.m[t], b.j[t]);
            if (ia != ib) return ia < ib;
        }
        return false;
    }
};

/// Splits [l, u) into maximal dyadic pieces, greedily emitting the largest
/// dyadic range that starts at the current left edge and fits. The result is
/// sorted, disjoint, covers the range exactly, and has at most 2*log2_delta
/// pieces; the full universe comes back as the single piece (m = -1).
inline std::vector<DyadicRange1D> decompose_dyadic_1d(const Range1D& r,
                                                      const Universe& u) {
    r.validate(u);
    const uint64_t delta = u.delta();
    std::vector<DyadicRange1D> pieces;
    uint64_t l = r.l;
    while (l < r.u) {
        uint64_t len = (l == 0) ? delta : (l & (~l + 1)); // largest 2^k dividing l
        if (len > delta) len = delta;
        while (len > r.u - l) len >>= 1;
        if (len == delta) {
            pieces.push_back(DyadicRange1D::full());
        } else {
            int m = u.log2_delta - std::countr_zero(len);
            pieces.push_back({m, l / len});
        }
        l += len;
    }
    return pieces;
}

} // namespace ers
