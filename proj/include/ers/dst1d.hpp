#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ers/samplers.hpp"
#include "ers/universe.hpp"

namespace ers {

struct TargetDist {
    enum class Kind { gaussian, poisson, cauchy, rademacher };

    Kind kind = Kind::gaussian;
    double lambda = 1.0; // Poisson rate per underlying RV

    static TargetDist gaussian() { return {Kind::gaussian, 0.0}; }
    static TargetDist poisson(double lambda) {
        if (!(lambda > 0))
            throw precondition_error("TargetDist: Poisson rate must be positive");
        return {Kind::poisson, lambda};
    }
    static TargetDist cauchy() { return {Kind::cauchy, 0.0}; }
    // Values are +1/-1 with probability 1/2 each.
    static TargetDist rademacher() { return {Kind::rademacher, 0.0}; }

    bool integer_valued() const {
        return kind == Kind::poisson || kind == Kind::rademacher;
    }
};

/// What a node's private stream is being consumed for. Generation and the
/// split it hosts draw from disjoint streams, so neither can desynchronize
/// the other.
enum class NodeUse { generate, split };

/// Node-randomness source backed by the keyed PRF: each (use, depth,
/// location) triple owns an independent counter-mode stream, so realized
/// values depend only on (seed, node, ancestors) and never on query order.
class PrfNodeSource {
public:
    PrfNodeSource() = default;
    explicit PrfNodeSource(const Seed256& seed) : prf_(seed) {}

    Stream stream(NodeUse use, int depth, uint64_t loc) const {
        const uint64_t key = (static_cast<uint64_t>(depth) << 57) | loc;
        return Stream(prf_, use == NodeUse::generate ? Domain::dst_generate
                                                     : Domain::dst_node,
                      key);
    }

private:
    Prf prf_;
};

/// 1D dyadic simulation tree with pluggable split kernels. The root is drawn
/// from the target's delta-fold convolution; every other dyadic sum is
/// realized by conditional splits down from the root, memoized write-once.
/// The memo mutates on query: one exclusive user per instance.
template <class NodeSource = PrfNodeSource>
class Dst1D {
public:
    Dst1D(const Universe& u, TargetDist dist, NodeSource src)
        : u_(u), dist_(dist), src_(std::move(src)) {
        if (u.d != 1) throw precondition_error("Dst1D: universe must be 1D");
        if (u.log2_delta > 56)
            throw precondition_error("Dst1D: log2_delta must be <= 56");
    }

    Dst1D(const Universe& u, TargetDist dist, const Seed256& seed)
        : Dst1D(u, dist, NodeSource(seed)) {}

    const Universe& universe() const { return u_; }
    const TargetDist& dist() const { return dist_; }

    /// Realizes (and memoizes) the total sum of the universe.
    double root_sample() { return node_value(0, 0); }

    /// Sum over [l, u): decompose into dyadic pieces, realize each from the
    /// root down, and add. Repeated queries return identical values.
    double range_sum(const Range1D& r) {
        r.validate(u_);
        double total = 0.0;
        for (const DyadicRange1D& piece : decompose_dyadic_1d(r, u_))
            total += node_value(piece.depth(), piece.j);
        return total;
    }

    /// The split kernel, exposed for oracle tests: given a parent node
    /// holding 2n leaves with realized sum z, draws (S_l, S_u) from the
    /// conditional law using that node's private stream. Calling it again
    /// returns the same pair the tree realization uses.
    std::pair<double, double> split(double z, uint64_t half_size,
                                    const DyadicRange1D& node) const {
        Stream stream = src_.stream(NodeUse::split, node.depth(), node.j);
        return split_with(stream, z, half_size);
    }

    /// Number of memoized nodes (instrumentation).
    size_t realized_nodes() const { return memo_.size(); }

private:
    static uint64_t key(int depth, uint64_t loc) {
        return (static_cast<uint64_t>(depth) << 57) | loc;
    }

    double node_value(int depth, uint64_t loc) {
        auto it = memo_.find(key(depth, loc));
        if (it != memo_.end()) return it->second;
        double v;
        if (depth == 0) {
            Stream stream = src_.stream(NodeUse::generate, 0, 0);
            v = generate_root(stream);
            memo_.emplace(key(0, 0), v);
        } else {
            const uint64_t parent_loc = loc >> 1;
            const double z = node_value(depth - 1, parent_loc);
            Stream stream = src_.stream(NodeUse::split, depth - 1, parent_loc);
            const uint64_t half = u_.delta() >> depth;
            auto [sl, su] = split_with(stream, z, half);
            memo_.emplace(key(depth, parent_loc * 2), sl);
            memo_.emplace(key(depth, parent_loc * 2 + 1), su);
            v = (loc & 1) ? su : sl;
        }
        return v;
    }

    double generate_root(Stream& stream) const {
        const double delta = static_cast<double>(u_.delta());
        switch (dist_.kind) {
            case TargetDist::Kind::gaussian:
                return std::sqrt(delta) *
                       field_value_to_gaussian(field61::reduce(stream.next_u64()));
            case TargetDist::Kind::poisson:
                return static_cast<double>(
                    sample_poisson(stream, dist_.lambda * delta));
            case TargetDist::Kind::cauchy:
                return sample_cauchy(stream, delta);
            case TargetDist::Kind::rademacher: {
                const uint64_t pos = sample_binomial_half(stream, u_.delta());
                return 2.0 * static_cast<double>(pos) - delta;
            }
        }
        throw invalid_state_error("Dst1D: unknown distribution");
    }

    std::pair<double, double> split_with(Stream& stream, double z,
                                         uint64_t half) const {
        switch (dist_.kind) {
            case TargetDist::Kind::gaussian: {
                const double y =
                    field_value_to_gaussian(field61::reduce(stream.next_u64()));
                const double sl =
                    z / 2 + std::sqrt(static_cast<double>(half) / 2) * y;
                return {sl, z - sl};
            }
            case TargetDist::Kind::poisson: {
                if (z < 0)
                    throw invalid_state_error("Dst1D: negative Poisson sum");
                const uint64_t zi = static_cast<uint64_t>(z);
                const double sl =
                    static_cast<double>(sample_binomial_half(stream, zi));
                return {sl, z - sl};
            }
            case TargetDist::Kind::cauchy: {
                const double sl =
                    sample_cauchy_split(stream, z, static_cast<double>(half));
                return {sl, z - sl};
            }
            case TargetDist::Kind::rademacher: {
                const int64_t zi = static_cast<int64_t>(z);
                const int64_t two_n = static_cast<int64_t>(2 * half);
                if (std::llabs(zi) > two_n || ((two_n + zi) & 1))
                    throw invalid_state_error("Dst1D: inconsistent Rademacher sum");
                const uint64_t positives = static_cast<uint64_t>((two_n + zi) / 2);
                const uint64_t k = sample_hypergeometric(
                    stream, static_cast<uint64_t>(two_n), positives, half);
                const double sl =
                    2.0 * static_cast<double>(k) - static_cast<double>(half);
                return {sl, z - sl};
            }
        }
        throw invalid_state_error("Dst1D: unknown distribution");
    }

    Universe u_;
    TargetDist dist_;
    NodeSource src_;
    std::unordered_map<uint64_t, double> memo_;
};

} // namespace ers
