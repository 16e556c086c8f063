#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ers/gaussian_ers.hpp"
#include "ers/universe.hpp"

namespace ers {

// ---------------------------------------------------------------------------
// Update-stream records.
// ---------------------------------------------------------------------------

struct PointUpdate {
    std::array<uint64_t, kMaxDims> index{};
    int64_t value = 0;
};
struct RangeUpdate {
    RangeD range;
    int64_t value = 0;
};
struct RangeQuery {
    RangeD range;
};
using StreamUpdate = std::variant<PointUpdate, RangeUpdate, RangeQuery>;

/// Parses one text record: `P i_1 .. i_d v`, `R l_1 .. l_d u_1 .. u_d v`, or
/// `Q l_1 .. l_d u_1 .. u_d`. Throws format_error with a description on any
/// malformed field.
inline StreamUpdate parse_stream_record(const std::string& line, int d) {
    std::istringstream in(line);
    std::string kind;
    if (!(in >> kind)) throw format_error("empty record");
    auto read_u64 = [&](const char* what) {
        uint64_t v;
        if (!(in >> v)) throw format_error(std::string("missing or bad ") + what);
        return v;
    };
    auto read_i64 = [&](const char* what) {
        int64_t v;
        if (!(in >> v)) throw format_error(std::string("missing or bad ") + what);
        return v;
    };
    auto expect_end = [&] {
        std::string extra;
        if (in >> extra) throw format_error("trailing fields in record");
    };
    if (kind == "P") {
        PointUpdate p;
        for (int t = 0; t < d; ++t) p.index[t] = read_u64("point coordinate");
        p.value = read_i64("update value");
        expect_end();
        return p;
    }
    auto read_range = [&] {
        RangeD r;
        r.d = d;
        std::array<uint64_t, kMaxDims> lo{}, hi{};
        for (int t = 0; t < d; ++t) lo[t] = read_u64("range lower bound");
        for (int t = 0; t < d; ++t) hi[t] = read_u64("range upper bound");
        for (int t = 0; t < d; ++t) r.dims[t] = {lo[t], hi[t]};
        return r;
    };
    if (kind == "R") {
        RangeUpdate r;
        r.range = read_range();
        r.value = read_i64("update value");
        expect_end();
        return r;
    }
    if (kind == "Q") {
        RangeQuery q;
        q.range = read_range();
        expect_end();
        return q;
    }
    throw format_error("unknown record kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// The median-of-means sketch.
// ---------------------------------------------------------------------------

/// Linear sketch over a streaming d-dimensional data cube: rows x cols
/// independent Gaussian-ERS estimators (4-wise independent mode, pinned),
/// each keeping one accumulator Y = sum of v * S(update range). A query
/// returns the median over rows of the mean over each row's estimators of
/// Y * S(query range). Updates mutate the accumulators (single writer);
/// queries are read-only.
class Sketch {
public:
    static constexpr char kMagic[8] = {'E', 'R', 'S', 'K', 'E', 'T', 'C', 'H'};
    static constexpr uint32_t kVersion = 1;

    Sketch(const Universe& u, const Seed256& master, uint32_t rows = 5,
           uint32_t cols = 16)
        : u_(u), master_(master), rows_(rows), cols_(cols) {
        if (rows_ < 1 || cols_ < 1 || rows_ > 4096 || cols_ > 4096)
            throw precondition_error("Sketch: rows/cols out of range");
        acc_.assign(static_cast<size_t>(rows_) * cols_, 0.0);
        estimators_.reserve(acc_.size());
        Prf prf(master);
        for (size_t e = 0; e < acc_.size(); ++e) {
            Seed256 derived;
            for (int word = 0; word < 4; ++word)
                derived.w[word] = prf.at(Domain::sketch_seed, e,
                                         static_cast<uint64_t>(word));
            estimators_.emplace_back(u_, HashMode::kwise, derived, 4);
        }
    }

    const Universe& universe() const { return u_; }
    const Seed256& master_seed() const { return master_; }
    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }
    const std::vector<double>& accumulators() const { return acc_; }
    const GaussianErs& estimator(size_t idx) const { return estimators_.at(idx); }

    void apply(const PointUpdate& p) {
        RangeD r;
        r.d = u_.d;
        for (int t = 0; t < u_.d; ++t) {
            if (p.index[t] >= u_.delta())
                throw precondition_error("Sketch: point outside universe");
            r.dims[t] = {p.index[t], p.index[t] + 1};
        }
        apply(RangeUpdate{r, p.value});
    }

    void apply(const RangeUpdate& upd) {
        upd.range.validate(u_);
        const double v = static_cast<double>(upd.value);
        for (size_t e = 0; e < estimators_.size(); ++e)
            acc_[e] += v * estimators_[e].range_sum(upd.range);
    }

    double query(const RangeD& r) const {
        r.validate(u_);
        std::vector<double> row_means(rows_);
        for (uint32_t row = 0; row < rows_; ++row) {
            double sum = 0.0;
            for (uint32_t col = 0; col < cols_; ++col) {
                const size_t e = static_cast<size_t>(row) * cols_ + col;
                sum += acc_[e] * estimators_[e].range_sum(r);
            }
            row_means[row] = sum / cols_;
        }
        std::sort(row_means.begin(), row_means.end());
        // Median; even row counts average the two middle values.
        return (rows_ % 2 == 1)
                   ? row_means[rows_ / 2]
                   : 0.5 * (row_means[rows_ / 2 - 1] + row_means[rows_ / 2]);
    }

    // ---- persistence ----
    // Little-endian layout: magic[8], u32 version, u32 d, u32 L, u32 rows,
    // u32 cols, seed[32], then rows*cols accumulators as f64.

    void save(std::ostream& out) const {
        out.write(kMagic, 8);
        put_u32(out, kVersion);
        put_u32(out, static_cast<uint32_t>(u_.d));
        put_u32(out, static_cast<uint32_t>(u_.log2_delta));
        put_u32(out, rows_);
        put_u32(out, cols_);
        for (uint64_t word : master_.w) put_u64(out, word);
        for (double a : acc_) {
            uint64_t bits;
            std::memcpy(&bits, &a, 8);
            put_u64(out, bits);
        }
        if (!out) throw format_error("Sketch::save: write failed");
    }

    static Sketch load(std::istream& in) {
        char magic[8];
        if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
            throw format_error("Sketch::load: bad magic");
        const uint32_t version = get_u32(in);
        if (version != kVersion)
            throw format_error("Sketch::load: unsupported format version " +
                               std::to_string(version));
        const uint32_t d = get_u32(in);
        const uint32_t log2_delta = get_u32(in);
        const uint32_t rows = get_u32(in);
        const uint32_t cols = get_u32(in);
        Seed256 seed;
        for (auto& word : seed.w) word = get_u64(in);
        Sketch s(Universe(static_cast<int>(d), static_cast<int>(log2_delta)),
                 seed, rows, cols);
        for (double& a : s.acc_) {
            const uint64_t bits = get_u64(in);
            std::memcpy(&a, &bits, 8);
        }
        // Must be exactly at end-of-data for the accumulator block.
        if (!in) throw format_error("Sketch::load: truncated input");
        return s;
    }

private:
    static void put_u32(std::ostream& out, uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(b, 4);
    }
    static void put_u64(std::ostream& out, uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(b, 8);
    }
    static uint32_t get_u32(std::istream& in) {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4))
            throw format_error("Sketch::load: truncated input");
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    static uint64_t get_u64(std::istream& in) {
        unsigned char b[8];
        if (!in.read(reinterpret_cast<char*>(b), 8))
            throw format_error("Sketch::load: truncated input");
        uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    Universe u_;
    Seed256 master_;
    uint32_t rows_;
    uint32_t cols_;
    std::vector<GaussianErs> estimators_;
    std::vector<double> acc_;
};

// ---------------------------------------------------------------------------
// Dense ground truth with the same update/query API.
// ---------------------------------------------------------------------------

/// Exact counter cube for desk-scale verification of sketch estimates.
class ExactCounter {
public:
    explicit ExactCounter(const Universe& u, uint64_t cap = 1 << 24) : u_(u) {
        uint64_t cells = 1;
        for (int t = 0; t < u.d; ++t) {
            if (cells > cap / u.delta())
                throw oracle_cap_error("ExactCounter: delta^d exceeds cap");
            cells *= u.delta();
        }
        counters_.assign(cells, 0);
    }

    void apply(const PointUpdate& p) {
        uint64_t flat = 0;
        for (int t = 0; t < u_.d; ++t) {
            if (p.index[t] >= u_.delta())
                throw precondition_error("ExactCounter: point outside universe");
            flat = flat * u_.delta() + p.index[t];
        }
        counters_[flat] += p.value;
    }

    void apply(const RangeUpdate& upd) {
        upd.range.validate(u_);
        for_each_cell(upd.range, [&](uint64_t flat) { counters_[flat] += upd.value; });
    }

    int64_t query(const RangeD& r) const {
        r.validate(u_);
        int64_t total = 0;
        for_each_cell(r, [&](uint64_t flat) { total += counters_[flat]; });
        return total;
    }

private:
    template <typename Fn>
    void for_each_cell(const RangeD& r, Fn&& fn) const {
        std::array<uint64_t, kMaxDims> idx{};
        for (int t = 0; t < u_.d; ++t) idx[t] = r.dims[t].l;
        for (;;) {
            uint64_t flat = 0;
            for (int t = 0; t < u_.d; ++t) flat = flat * u_.delta() + idx[t];
            fn(flat);
            int t = u_.d - 1;
            while (t >= 0) {
                if (++idx[t] < r.dims[t].u) break;
                idx[t] = r.dims[t].l;
                --t;
            }
            if (t < 0) break;
        }
    }

    Universe u_;
    std::vector<int64_t> counters_;
};

} // namespace ers
