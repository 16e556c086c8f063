#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "ers/haar.hpp"

using namespace ers;
using Catch::Approx;

namespace {

std::map<std::pair<int, uint64_t>, double> as_map_1d(const SparseHaarVector& v) {
    std::map<std::pair<int, uint64_t>, double> out;
    for (const auto& e : v) {
        auto [it, inserted] = out.emplace(
            std::make_pair(static_cast<int>(e.ref.m[0]), e.ref.j[0]), e.weight);
        REQUIRE(inserted); // no duplicate refs
    }
    return out;
}

// Dense-oracle coefficients of a box indicator: H^{(d)} * 1_R, by explicit
// matrix-vector multiply.
std::vector<double> dense_coeffs(const RangeD& r, const Universe& u) {
    DenseHaarMatrix m(u);
    std::vector<double> ind(m.size(), 0.0);
    for (uint64_t flat = 0; flat < m.size(); ++flat) {
        uint64_t rem = flat;
        bool inside = true;
        for (int t = u.d - 1; t >= 0; --t) {
            const uint64_t coord = rem % u.delta();
            rem /= u.delta();
            if (coord < r.dims[t].l || coord >= r.dims[t].u) inside = false;
        }
        if (inside) ind[flat] = 1.0;
    }
    std::vector<double> w(m.size(), 0.0);
    for (uint64_t row = 0; row < m.size(); ++row)
        for (uint64_t col = 0; col < m.size(); ++col)
            w[row] += m.at(row, col) * ind[col];
    return w;
}

void check_against_dense(const RangeD& r, const Universe& u) {
    const auto dense = dense_coeffs(r, u);
    const auto sparse = haar_range_coeffs_dd(r, u);
    std::vector<double> reconstructed(dense.size(), 0.0);
    for (const auto& e : sparse) {
        REQUIRE(e.weight != 0.0);
        reconstructed[e.ref.flat_index(u)] = e.weight;
    }
    for (uint64_t i = 0; i < dense.size(); ++i)
        REQUIRE(reconstructed[i] == Approx(dense[i]).margin(1e-10));
}

} // namespace

TEST_CASE("1D range coefficients: spec examples") {
    Universe u(1, 2); // delta = 4
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    SECTION("full range has the single averaging coefficient sqrt(delta)") {
        auto v = as_map_1d(haar_range_coeffs_1d({0, 4}, u));
        REQUIRE(v.size() == 1);
        CHECK(v.at({-1, 0}) == Approx(2.0));
    }
    SECTION("[1,3)") {
        auto v = as_map_1d(haar_range_coeffs_1d({1, 3}, u));
        REQUIRE(v.size() == 3);
        CHECK(v.at({-1, 0}) == Approx(1.0));
        CHECK(v.at({1, 0}) == Approx(-inv_sqrt2));
        CHECK(v.at({1, 1}) == Approx(inv_sqrt2));
    }
    SECTION("[0,2)") {
        auto v = as_map_1d(haar_range_coeffs_1d({0, 2}, u));
        REQUIRE(v.size() == 2);
        CHECK(v.at({-1, 0}) == Approx(1.0));
        CHECK(v.at({0, 0}) == Approx(1.0));
    }
}

TEST_CASE("1D point coefficients: paper linear forms at delta=4") {
    Universe u(1, 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    SECTION("X_0 = W/2 + W/2 + W/sqrt(2)") {
        auto v = as_map_1d(haar_point_coeffs_1d(0, u));
        REQUIRE(v.size() == 3);
        CHECK(v.at({-1, 0}) == Approx(0.5));
        CHECK(v.at({0, 0}) == Approx(0.5));
        CHECK(v.at({1, 0}) == Approx(inv_sqrt2));
    }
    SECTION("X_3 = W/2 - W/2 - W/sqrt(2)") {
        auto v = as_map_1d(haar_point_coeffs_1d(3, u));
        REQUIRE(v.size() == 3);
        CHECK(v.at({-1, 0}) == Approx(0.5));
        CHECK(v.at({0, 0}) == Approx(-0.5));
        CHECK(v.at({1, 1}) == Approx(-inv_sqrt2));
    }
    SECTION("delta=2, i=1") {
        Universe u2(1, 1);
        auto v = as_map_1d(haar_point_coeffs_1d(1, u2));
        REQUIRE(v.size() == 2);
        CHECK(v.at({-1, 0}) == Approx(inv_sqrt2));
        CHECK(v.at({0, 0}) == Approx(-inv_sqrt2));
    }
    CHECK_THROWS_AS(haar_point_coeffs_1d(4, u), precondition_error);
}

TEST_CASE("coefficient count bounds, exhaustive") {
    // Per scale <= 2, total <= 2L+2 for every range; exactly one per scale
    // for every point. Exact integer assertions.
    for (int L = 1; L <= 6; ++L) {
        Universe u(1, L);
        const uint64_t delta = u.delta();
        for (uint64_t l = 0; l < delta; ++l) {
            for (uint64_t hi = l + 1; hi <= delta; ++hi) {
                auto v = haar_range_coeffs_1d({l, hi}, u);
                REQUIRE(v.size() <= 2 * static_cast<size_t>(L) + 2);
                std::map<int, int> per_scale;
                for (const auto& e : v) per_scale[e.ref.m[0]]++;
                for (const auto& [m, count] : per_scale) REQUIRE(count <= 2);
            }
        }
        for (uint64_t i = 0; i < delta; ++i) {
            auto v = haar_point_coeffs_1d(i, u);
            REQUIRE(v.size() == static_cast<size_t>(L) + 1);
            std::map<int, int> per_scale;
            for (const auto& e : v) per_scale[e.ref.m[0]]++;
            for (int m = -1; m < L; ++m) REQUIRE(per_scale[m] == 1);
        }
    }
}

TEST_CASE("sparse equals dense oracle for all small ranges") {
    for (int L = 1; L <= 4; ++L) {
        Universe u(1, L);
        const uint64_t delta = u.delta();
        for (uint64_t l = 0; l < delta; ++l)
            for (uint64_t hi = l + 1; hi <= delta; ++hi)
                check_against_dense(RangeD({{l, hi}}), u);
    }
    // 2D spot checks on every range of a small square universe.
    Universe u2(2, 2);
    for (uint64_t l1 = 0; l1 < 4; ++l1)
        for (uint64_t u1 = l1 + 1; u1 <= 4; ++u1)
            for (uint64_t l2 = 0; l2 < 4; ++l2)
                for (uint64_t u2_ = l2 + 1; u2_ <= 4; ++u2_)
                    check_against_dense(RangeD({{l1, u1}, {l2, u2_}}), u2);
}

TEST_CASE("dD coefficients: spec examples") {
    Universe u(2, 2);
    SECTION("full square is one entry of weight 2*2") {
        auto v = haar_range_coeffs_dd(RangeD({{0, 4}, {0, 4}}), u);
        REQUIRE(v.size() == 1);
        CHECK(v[0].ref.m[0] == -1);
        CHECK(v[0].ref.m[1] == -1);
        CHECK(v[0].weight == Approx(4.0));
    }
    SECTION("point (0,0) has (L+1)^2 = 9 entries, products of 1D weights") {
        auto v = haar_range_coeffs_dd(RangeD({{0, 1}, {0, 1}}), u);
        REQUIRE(v.size() == 9);
        auto v1 = haar_point_coeffs_1d(0, Universe(1, 2));
        double total = 0.0;
        for (const auto& e : v) total += e.weight;
        double total1 = 0.0;
        for (const auto& e : v1) total1 += e.weight;
        CHECK(total == Approx(total1 * total1));
    }
    SECTION("[1,3)x[0,2) is the 3x2 product of the 1D examples") {
        auto v = haar_range_coeffs_dd(RangeD({{1, 3}, {0, 2}}), u);
        REQUIRE(v.size() == 6);
    }
    SECTION("entries are sorted in canonical order") {
        auto v = haar_range_coeffs_dd(RangeD({{1, 3}, {0, 2}}), u);
        for (size_t i = 0; i + 1 < v.size(); ++i) REQUIRE(v[i].ref < v[i + 1].ref);
    }
}

TEST_CASE("wavelet rows balance on their support") {
    // <psi^m_j, 1_{I^m_j}> = 0 for every m >= 0.
    for (int L = 1; L <= 5; ++L) {
        Universe u(1, L);
        for (int m = 0; m < L; ++m) {
            for (uint64_t j = 0; j < (uint64_t{1} << m); ++j) {
                DyadicRange1D node{m, j};
                auto v = as_map_1d(haar_range_coeffs_1d(node.range(u), u));
                CHECK(v.find({m, j}) == v.end());
            }
        }
    }
}

TEST_CASE("dense Haar matrix: known small matrices and orthonormality") {
    SECTION("delta=2 1D") {
        DenseHaarMatrix m(Universe(1, 1));
        const double s = 1.0 / std::sqrt(2.0);
        CHECK(m.at(0, 0) == Approx(s));
        CHECK(m.at(0, 1) == Approx(s));
        CHECK(m.at(1, 0) == Approx(s));
        CHECK(m.at(1, 1) == Approx(-s));
    }
    SECTION("delta=4 1D rows match the scale/location layout") {
        DenseHaarMatrix m(Universe(1, 2));
        const double s = 1.0 / std::sqrt(2.0);
        const double expected[4][4] = {{0.5, 0.5, 0.5, 0.5},
                                       {0.5, 0.5, -0.5, -0.5},
                                       {s, -s, 0, 0},
                                       {0, 0, s, -s}};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                CHECK(m.at(r, c) == Approx(expected[r][c]));
    }
    SECTION("delta=2 2D is the order-4 half matrix") {
        DenseHaarMatrix m(Universe(2, 1));
        for (uint64_t r = 0; r < 4; ++r)
            for (uint64_t c = 0; c < 4; ++c)
                CHECK(std::fabs(m.at(r, c)) == Approx(0.5));
    }
    SECTION("M M^T = I within 1e-12") {
        for (const Universe& u :
             {Universe(1, 1), Universe(1, 2), Universe(1, 3), Universe(1, 4),
              Universe(2, 1), Universe(2, 2)}) {
            DenseHaarMatrix m(u);
            const uint64_t n = m.size();
            for (uint64_t r = 0; r < n; ++r)
                for (uint64_t c = 0; c < n; ++c) {
                    double dot = 0.0;
                    for (uint64_t i = 0; i < n; ++i) dot += m.at(r, i) * m.at(c, i);
                    REQUIRE(std::fabs(dot - (r == c ? 1.0 : 0.0)) < 1e-12);
                }
        }
    }
    SECTION("oracle cap enforced") {
        CHECK_THROWS_AS(DenseHaarMatrix(Universe(2, 4), 100), oracle_cap_error);
    }
}
