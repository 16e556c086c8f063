#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>

#include "ers/samplers.hpp"
#include "ers/universe.hpp"

namespace ers {

/// 2D dyadic rectangle: the Cartesian product of a vertical (first
/// dimension) and a horizontal (second dimension) 1D dyadic range.
struct Dyadic2D {
    DyadicRange1D v;
    DyadicRange1D h;

    bool is_root() const { return v.depth() == 0 && h.depth() == 0; }

    void validate(const Universe& u) const {
        Universe axis{1, u.log2_delta};
        v.validate(axis);
        h.validate(axis);
    }

    friend bool operator==(const Dyadic2D&, const Dyadic2D&) = default;
};

/// The direct generation ancestors of a 2D dyadic range: the vertical parent
/// doubles the first dimension, the horizontal parent doubles the second,
/// and the lattice grandparent doubles both. A side that already spans the
/// universe has no parent on that side.
struct Dgas {
    std::optional<Dyadic2D> horizontal_parent;
    std::optional<Dyadic2D> vertical_parent;
    std::optional<Dyadic2D> lattice_grandparent;
};

inline Dgas dgas(const Dyadic2D& n) {
    if (n.is_root())
        throw precondition_error("dgas: the full universe has no ancestors");
    Dgas out;
    if (n.h.depth() > 0) out.horizontal_parent = Dyadic2D{n.v, n.h.parent()};
    if (n.v.depth() > 0) out.vertical_parent = Dyadic2D{n.v.parent(), n.h};
    if (n.v.depth() > 0 && n.h.depth() > 0)
        out.lattice_grandparent = Dyadic2D{n.v.parent(), n.h.parent()};
    return out;
}

/// Conditional 4-way-split draw: the sum x of one quadrant given its
/// horizontal parent s_h, vertical parent s_v, and lattice grandparent s_g.
/// The normalized conditional pmf 1/c * 1/(x!(s_h-x)!(s_v-x)!(s_g-s_h-s_v+x)!)
/// is exactly Hypergeometric(population s_g, successes s_v, draws s_h).
inline uint64_t four_way_split_sample(uint64_t s_h, uint64_t s_v, uint64_t s_g,
                                      Stream& stream) {
    if (s_h > s_g || s_v > s_g)
        throw invalid_state_error(
            "four_way_split_sample: parent sum exceeds grandparent sum");
    return sample_hypergeometric(stream, s_g, s_v, s_h);
}

/// PRF-backed node streams for the 2D simulation. Each (use, node) pair owns
/// an independent counter-mode stream; a node's generation draw and the
/// three kinds of splits it can host never share randomness.
class PrfNodeSource2D {
public:
    enum class Use { generate, split_v, split_h, split_4 };

    PrfNodeSource2D() = default;
    explicit PrfNodeSource2D(const Seed256& seed) : prf_(seed) {}

    Stream stream(Use use, uint64_t node_key) const {
        Domain dom;
        switch (use) {
            case Use::generate: dom = Domain::p2d_generate; break;
            case Use::split_v: dom = Domain::p2d_split_v; break;
            case Use::split_h: dom = Domain::p2d_split_h; break;
            default: dom = Domain::p2d_split_4; break;
        }
        return Stream(prf_, dom, node_key);
    }

private:
    Prf prf_;
};

/// 2D Poisson efficient range-summability via recursive 4-way splits over
/// direct generation ancestors, with memoized integer dyadic sums.
///
/// Realization order is pinned: an interior node is realized by splitting its
/// lattice grandparent, sampling the grandparent's lower-left quadrant from
/// the conditional law and deriving the other three quadrants by subtraction
/// from the two parent strips. Strip nodes degenerate to a Binomial(z, 1/2)
/// 2-way split of their single parent. The memo mutates on query: one
/// exclusive user per instance.
template <class NodeSource = PrfNodeSource2D>
class PoissonErs2D {
public:
    PoissonErs2D(const Universe& u, double lambda, NodeSource src)
        : u_(u), lambda_(lambda), src_(std::move(src)) {
        if (u.d != 2) throw precondition_error("PoissonErs2D: universe must be 2D");
        if (u.log2_delta > 26)
            throw precondition_error("PoissonErs2D: log2_delta must be <= 26");
        if (!(lambda > 0))
            throw precondition_error("PoissonErs2D: rate must be positive");
    }

    PoissonErs2D(const Universe& u, double lambda, const Seed256& seed)
        : PoissonErs2D(u, lambda, NodeSource(seed)) {}

    const Universe& universe() const { return u_; }
    double lambda() const { return lambda_; }

    /// Realized (memoized) sum of a 2D dyadic range.
    uint64_t dyadic_sum(const Dyadic2D& n) {
        n.validate(u_);
        return node_value(n.v.depth(), n.v.j, n.h.depth(), n.h.j);
    }

    /// Sum over a general 2D range: the Cartesian product of the two 1D
    /// dyadic decompositions, sharing the memo across pieces.
    uint64_t range_sum(const RangeD& r) {
        r.validate(u_);
        Universe axis{1, u_.log2_delta};
        const auto pieces_v = decompose_dyadic_1d(r.dims[0], axis);
        const auto pieces_h = decompose_dyadic_1d(r.dims[1], axis);
        uint64_t total = 0;
        for (const auto& pv : pieces_v)
            for (const auto& ph : pieces_h)
                total += node_value(pv.depth(), pv.j, ph.depth(), ph.j);
        return total;
    }

    /// Number of memoized nodes so far (instrumentation for the O(log^2)
    /// realization bound).
    size_t realized_nodes() const { return memo_.size(); }

private:
    using Use = typename NodeSource::Use;

    static uint64_t key(int t1, uint64_t j1, int t2, uint64_t j2) {
        return (static_cast<uint64_t>(t1) << 59) |
               (static_cast<uint64_t>(t2) << 54) | (j1 << 27) | j2;
    }

    void memoize(int t1, uint64_t j1, int t2, uint64_t j2, uint64_t value) {
        memo_.emplace(key(t1, j1, t2, j2), value);
    }

    uint64_t node_value(int t1, uint64_t j1, int t2, uint64_t j2) {
        auto it = memo_.find(key(t1, j1, t2, j2));
        if (it != memo_.end()) return it->second;

        uint64_t v;
        if (t1 == 0 && t2 == 0) {
            Stream stream = src_.stream(Use::generate, key(0, 0, 0, 0));
            const double area = static_cast<double>(u_.delta()) *
                                static_cast<double>(u_.delta());
            v = sample_poisson(stream, lambda_ * area);
            memoize(0, 0, 0, 0, v);
        } else if (t1 == 0 || t2 == 0) {
            // Strip: a single parent, 2-way Binomial(z, 1/2) split. The
            // even-location child receives the sampled half.
            const bool along_v = (t2 == 0); // splitting subdivides dim 1
            const int pt1 = along_v ? t1 - 1 : 0;
            const uint64_t pj1 = along_v ? (j1 >> 1) : 0;
            const int pt2 = along_v ? 0 : t2 - 1;
            const uint64_t pj2 = along_v ? 0 : (j2 >> 1);
            const uint64_t z = node_value(pt1, pj1, pt2, pj2);
            Stream stream = src_.stream(along_v ? Use::split_v : Use::split_h,
                                        key(pt1, pj1, pt2, pj2));
            const uint64_t lower = sample_binomial_half(stream, z);
            if (along_v) {
                memoize(t1, pj1 * 2, 0, 0, lower);
                memoize(t1, pj1 * 2 + 1, 0, 0, z - lower);
            } else {
                memoize(0, 0, t2, pj2 * 2, lower);
                memoize(0, 0, t2, pj2 * 2 + 1, z - lower);
            }
            v = memo_.at(key(t1, j1, t2, j2));
        } else {
            // Interior: realize the grandparent's 4-way split.
            const uint64_t gj1 = j1 >> 1, gj2 = j2 >> 1;
            const uint64_t s_g = node_value(t1 - 1, gj1, t2 - 1, gj2);
            // Parents of the lower-left quadrant (child 0 on both sides).
            const uint64_t s_h = node_value(t1, gj1 * 2, t2 - 1, gj2);
            const uint64_t s_v = node_value(t1 - 1, gj1, t2, gj2 * 2);
            Stream stream =
                src_.stream(Use::split_4, key(t1 - 1, gj1, t2 - 1, gj2));
            const uint64_t q00 = four_way_split_sample(s_h, s_v, s_g, stream);
            if (q00 > s_h || q00 > s_v || s_g + q00 < s_h + s_v)
                throw invalid_state_error(
                    "PoissonErs2D: quadrant inconsistent with parents");
            memoize(t1, gj1 * 2, t2, gj2 * 2, q00);
            memoize(t1, gj1 * 2, t2, gj2 * 2 + 1, s_h - q00);
            memoize(t1, gj1 * 2 + 1, t2, gj2 * 2, s_v - q00);
            memoize(t1, gj1 * 2 + 1, t2, gj2 * 2 + 1, s_g + q00 - s_h - s_v);
            v = memo_.at(key(t1, j1, t2, j2));
        }
        return v;
    }

    Universe u_;
    double lambda_;
    NodeSource src_;
    std::unordered_map<uint64_t, uint64_t> memo_;
};

} // namespace ers
