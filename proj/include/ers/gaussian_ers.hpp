#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ers/haar.hpp"
#include "ers/randomness.hpp"

namespace ers {

namespace detail {

/// Neumaier compensated accumulator; keeps the additivity identities tight
/// even with (2L+2)^d terms.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace detail

/// dD Gaussian efficient range-summability: any rectangular range-sum of the
/// delta^d virtual i.i.d. N(0,1) variables is the inner product of the
/// range's sparse HWT coefficients with on-demand Gaussian coefficients. The
/// underlying vector is never materialized. Queries are read-only; safe for
/// concurrent use.
class GaussianErs {
public:
    GaussianErs(const Universe& u, HashMode mode, const Seed256& seed, int k = 4)
        : u_(u), src_(u, mode, seed, k) {}

    const Universe& universe() const { return u_; }
    const CoeffSource& source() const { return src_; }

    double range_sum(const RangeD& r) const {
        uint64_t evals = 0;
        return range_sum_counted(r, evals);
    }

    double point_value(std::span<const uint64_t> i) const {
        if (static_cast<int>(i.size()) != u_.d)
            throw precondition_error("point_value: dimension mismatch");
        RangeD r;
        r.d = u_.d;
        for (int t = 0; t < u_.d; ++t) {
            if (i[t] >= u_.delta())
                throw precondition_error("point_value: index out of range");
            r.dims[t] = {i[t], i[t] + 1};
        }
        return range_sum(r);
    }
    double point_value(std::initializer_list<uint64_t> i) const {
        return point_value(std::span<const uint64_t>(i.begin(), i.size()));
    }

    /// Exact number of coefficient evaluations the query performs.
    uint64_t hash_evals_for(const RangeD& r) const {
        uint64_t evals = 0;
        range_sum_counted(r, evals);
        return evals;
    }

    /// Weighted sum over the sparse coefficients in canonical CoeffRef order
    /// (bit-reproducible), with compensated accumulation.
    double range_sum_counted(const RangeD& r, uint64_t& evals) const {
        r.validate(u_);
        std::vector<std::vector<detail::ScaleLocWeight>> per_dim;
        per_dim.reserve(u_.d);
        Universe axis{1, u_.log2_delta};
        for (int t = 0; t < u_.d; ++t)
            per_dim.push_back(detail::haar_coeffs_dim(r.dims[t], axis));
        detail::CompensatedSum acc;
        uint64_t count = 0;
        detail::for_each_product(per_dim, [&](const CoeffRef& ref, double w) {
            acc.add(w * src_.coeff_value(ref));
            ++count;
        });
        evals = count;
        return acc.value();
    }

private:
    Universe u_;
    CoeffSource src_;
};

} // namespace ers
