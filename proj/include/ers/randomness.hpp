#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "ers/universe.hpp"

namespace ers {

// ---------------------------------------------------------------------------
// Arithmetic in GF(p), p = 2^61 - 1.
// ---------------------------------------------------------------------------

inline constexpr uint64_t kMersenne61 = (uint64_t{1} << 61) - 1;

namespace field61 {

// Fold a value < 2^64 into [0, p).
inline uint64_t reduce(uint64_t x) {
    x = (x & kMersenne61) + (x >> 61);
    if (x >= kMersenne61) x -= kMersenne61;
    return x;
}

inline uint64_t add(uint64_t a, uint64_t b) {
    uint64_t s = a + b; // a, b < p < 2^61, no overflow
    if (s >= kMersenne61) s -= kMersenne61;
    return s;
}

// Exact a*b mod p via 128-bit intermediates; 2^61 == 1 (mod p) makes the
// reduction a shift-and-add fold.
inline uint64_t mul(uint64_t a, uint64_t b) {
    unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
    uint64_t lo = static_cast<uint64_t>(t & kMersenne61);
    uint64_t hi = static_cast<uint64_t>(t >> 61);
    return reduce(lo + reduce(hi));
}

} // namespace field61

// ---------------------------------------------------------------------------
// Seeds and the keyed counter-mode PRF.
// ---------------------------------------------------------------------------

/// 256-bit master seed; parsed from up to 64 hex digits (big-endian).
struct Seed256 {
    std::array<uint64_t, 4> w{};

    static Seed256 from_hex(std::string_view hex) {
        if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X'))
            hex.remove_prefix(2);
        if (hex.empty() || hex.size() > 64)
            throw precondition_error("Seed256: expected 1..64 hex digits");
        Seed256 s;
        // Right-align: last 16 digits land in w[3].
        for (size_t i = 0; i < hex.size(); ++i) {
            char c = hex[hex.size() - 1 - i];
            uint64_t nib;
            if (c >= '0' && c <= '9') nib = static_cast<uint64_t>(c - '0');
            else if (c >= 'a' && c <= 'f') nib = static_cast<uint64_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') nib = static_cast<uint64_t>(c - 'A' + 10);
            else throw precondition_error("Seed256: invalid hex digit");
            s.w[3 - i / 16] |= nib << (4 * (i % 16));
        }
        return s;
    }

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(64, '0');
        for (int word = 0; word < 4; ++word)
            for (int nib = 0; nib < 16; ++nib)
                out[word * 16 + nib] =
                    digits[(w[word] >> (4 * (15 - nib))) & 0xf];
        return out;
    }

    friend bool operator==(const Seed256&, const Seed256&) = default;
};

inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

/// Domain separators for every independent use of the master seed.
enum class Domain : uint64_t {
    kwise_coeffs = 1,   // coefficient material for the per-scale hashes
    proxy_coeff = 2,    // truly-random-proxy HWT coefficients
    dst_node = 3,       // 1D dyadic simulation split streams
    dst_generate = 10,  // 1D dyadic simulation root generation
    p2d_generate = 4,   // 2D Poisson root generation
    p2d_split_v = 5,    // 2D Poisson 2-way split along dim 1
    p2d_split_h = 6,    // 2D Poisson 2-way split along dim 2
    p2d_split_4 = 7,    // 2D Poisson 4-way split
    sketch_seed = 8,    // per-estimator seed derivation
    stat_stream = 9,    // reference streams for statistical self-tests
};

/// Keyed pseudorandom function: a pinned splitmix-style mixing chain over
/// (seed, domain, key, counter). Stands in for an off-the-shelf keyed hash;
/// every output is a pure function of its four inputs.
class Prf {
public:
    Prf() = default;
    explicit Prf(const Seed256& seed) : seed_(seed) {}

    uint64_t at(Domain domain, uint64_t key, uint64_t ctr) const {
        uint64_t h = mix64(seed_.w[0] ^ (static_cast<uint64_t>(domain) *
                                         0x9e3779b97f4a7c15ull));
        h = mix64(h ^ seed_.w[1] ^ key);
        h = mix64(h ^ seed_.w[2] ^ ctr);
        return mix64(h ^ seed_.w[3]);
    }

    const Seed256& seed() const { return seed_; }

private:
    Seed256 seed_;
};

/// Counter-mode view of the PRF at a fixed (domain, key): a deterministic
/// random stream private to one logical node.
class Stream {
public:
    Stream(const Prf& prf, Domain domain, uint64_t key)
        : prf_(&prf), domain_(domain), key_(key) {}

    uint64_t next_u64() { return prf_->at(domain_, key_, ctr_++); }

    /// Uniform draw in the open interval (0, 1): (v + 0.5) / p with
    /// v = raw mod p, so 0 and 1 are never produced.
    double next_unit() {
        uint64_t v = field61::reduce(next_u64());
        return (static_cast<double>(v) + 0.5) /
               static_cast<double>(kMersenne61);
    }

    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    const Prf* prf_;
    Domain domain_;
    uint64_t key_;
    uint64_t ctr_ = 0;
};

// ---------------------------------------------------------------------------
// k-wise independent hashing.
// ---------------------------------------------------------------------------

/// Degree-(k-1) polynomial over GF(2^61 - 1) with uniformly drawn
/// coefficients: any k distinct keys hash to jointly uniform values.
class KWiseHash {
public:
    KWiseHash() = default;

    /// coeffs[i] is the coefficient of x^i; k = coeffs.size() >= 2.
    explicit KWiseHash(std::vector<uint64_t> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() < 2)
            throw precondition_error("KWiseHash: independence order k must be >= 2");
        for (uint64_t c : coeffs_)
            if (c >= kMersenne61)
                throw precondition_error("KWiseHash: coefficient out of field");
    }

    /// Draws k coefficients uniformly from [0, p) off the given stream.
    static KWiseHash sample(Stream& stream, int k) {
        if (k < 2)
            throw precondition_error("KWiseHash: independence order k must be >= 2");
        std::vector<uint64_t> coeffs(static_cast<size_t>(k));
        for (auto& c : coeffs) {
            // 61-bit rejection keeps the draw exactly uniform on [0, p).
            do {
                c = stream.next_u64() & kMersenne61;
            } while (c == kMersenne61);
        }
        return KWiseHash(std::move(coeffs));
    }

    int k() const { return static_cast<int>(coeffs_.size()); }
    const std::vector<uint64_t>& coeffs() const { return coeffs_; }

    uint64_t eval(uint64_t key) const {
        const uint64_t x = field61::reduce(key);
        uint64_t h = coeffs_.back();
        for (size_t i = coeffs_.size() - 1; i-- > 0;)
            h = field61::add(field61::mul(h, x), coeffs_[i]);
        return h;
    }

private:
    std::vector<uint64_t> coeffs_;
};

inline uint64_t kwise_eval(const KWiseHash& h, uint64_t key) { return h.eval(key); }

// ---------------------------------------------------------------------------
// Uniform-to-Gaussian mapping.
// ---------------------------------------------------------------------------

/// Box-Muller transform; u1 must be positive.
inline double uniform_to_gaussian(double u1, double u2) {
    if (!(u1 > 0.0))
        throw precondition_error("uniform_to_gaussian: u1 must be > 0");
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

/// Splits one 61-bit field value into the two Box-Muller uniforms
/// (31 high bits -> u1, 30 low bits -> u2); both land in (0, 1). One field
/// value per Gaussian keeps k hash outputs mapping to k independent
/// Gaussians.
inline double field_value_to_gaussian(uint64_t v) {
    const double u1 = (static_cast<double>(v >> 30) + 0.5) / 2147483648.0; // 2^31
    const double u2 =
        (static_cast<double>(v & ((uint64_t{1} << 30) - 1)) + 0.5) / 1073741824.0;
    return uniform_to_gaussian(u1, u2);
}

// ---------------------------------------------------------------------------
// The seeded HWT-coefficient source.
// ---------------------------------------------------------------------------

enum class HashMode { truly_random_proxy, kwise };

/// Maps a CoeffRef to its standard-Gaussian HWT coefficient, either through
/// per-scale k-wise independent hashes or through the keyed PRF proxy.
/// Immutable after construction; a fixed (mode, seed) reproduces the same
/// coefficient stream forever.
class CoeffSource {
public:
    CoeffSource(const Universe& u, HashMode mode, const Seed256& seed, int k = 4)
        : u_(u), mode_(mode), k_(mode == HashMode::kwise ? k : 0), prf_(seed) {
        if (u.d * u.log2_delta > 64 || (u.d >= 3 && u.log2_delta > 20))
            throw precondition_error(
                "CoeffSource: location packing requires d*L <= 64 (and L <= 20 "
                "for d >= 3)");
        if (mode_ == HashMode::kwise) {
            scale_count_ = 1;
            for (int t = 0; t < u.d; ++t)
                scale_count_ *= static_cast<uint64_t>(u.scales_per_dim());
            scale_hashes_.reserve(scale_count_);
            for (uint64_t s = 0; s < scale_count_; ++s) {
                Stream stream(prf_, Domain::kwise_coeffs, s);
                scale_hashes_.push_back(KWiseHash::sample(stream, k_));
            }
            scale_evals_ = std::make_unique<std::atomic<uint64_t>[]>(scale_count_);
        }
    }

    const Universe& universe() const { return u_; }
    HashMode mode() const { return mode_; }
    int k() const { return k_; }
    const Seed256& seed() const { return prf_.seed(); }

    /// Flat index of a scale vector: mixed-radix over (m_t + 1), radix L+1.
    uint64_t scale_index(const CoeffRef& ref) const {
        uint64_t idx = 0;
        for (int t = 0; t < ref.d; ++t)
            idx = idx * static_cast<uint64_t>(u_.scales_per_dim()) +
                  static_cast<uint64_t>(ref.m[t] + 1);
        return idx;
    }

    /// Locations packed big-endian, L bits per dimension.
    uint64_t location_key(const CoeffRef& ref) const {
        uint64_t key = 0;
        for (int t = 0; t < ref.d; ++t)
            key = (key << u_.log2_delta) | ref.j[t];
        return key;
    }

    double coeff_value(const CoeffRef& ref) const {
        const uint64_t scale = scale_index(ref);
        const uint64_t key = location_key(ref);
        uint64_t raw;
        if (mode_ == HashMode::kwise) {
            if (scale >= scale_count_)
                throw invalid_state_error("CoeffSource: unknown scale vector");
            scale_evals_[scale].fetch_add(1, std::memory_order_relaxed);
            raw = scale_hashes_[scale].eval(key);
        } else {
            raw = field61::reduce(prf_.at(Domain::proxy_coeff, key, scale));
        }
        return field_value_to_gaussian(raw);
    }

    uint64_t scale_hash_count() const { return scale_count_; }
    const KWiseHash& hash_for_scale(uint64_t idx) const { return scale_hashes_.at(idx); }
    uint64_t scale_eval_count(uint64_t idx) const {
        return scale_evals_ ? scale_evals_[idx].load(std::memory_order_relaxed) : 0;
    }

private:
    Universe u_;
    HashMode mode_;
    int k_;
    Prf prf_;
    uint64_t scale_count_ = 0;
    std::vector<KWiseHash> scale_hashes_;
    mutable std::unique_ptr<std::atomic<uint64_t>[]> scale_evals_;
};

} // namespace ers
