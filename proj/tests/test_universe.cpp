#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>

#include "ers/universe.hpp"

using namespace ers;

namespace {

// Minimal number of disjoint dyadic intervals covering [l, u) exactly,
// by exhaustive recursion over every dyadic prefix. Independent of the
// greedy implementation.
int minimal_dyadic_cover(uint64_t l, uint64_t u, const Universe& uni,
                         std::map<std::pair<uint64_t, uint64_t>, int>& memo) {
    if (l == u) return 0;
    auto it = memo.find({l, u});
    if (it != memo.end()) return it->second;
    int best = 1 << 20;
    for (uint64_t len = 1; len <= u - l; len <<= 1) {
        if (l % len != 0) break; // larger powers cannot start at l either
        best = std::min(best, 1 + minimal_dyadic_cover(l + len, u, uni, memo));
    }
    memo[{l, u}] = best;
    return best;
}

} // namespace

TEST_CASE("dyadic decomposition: spec examples") {
    Universe u(1, 3); // delta = 8
    SECTION("whole universe is the single full piece") {
        auto pieces = decompose_dyadic_1d({0, 8}, u);
        REQUIRE(pieces.size() == 1);
        CHECK(pieces[0] == DyadicRange1D::full());
    }
    SECTION("[1,7) splits into [1,2),[2,4),[4,6),[6,7)") {
        auto pieces = decompose_dyadic_1d({1, 7}, u);
        REQUIRE(pieces.size() == 4);
        CHECK(pieces[0].range(u) == Range1D{1, 2});
        CHECK(pieces[1].range(u) == Range1D{2, 4});
        CHECK(pieces[2].range(u) == Range1D{4, 6});
        CHECK(pieces[3].range(u) == Range1D{6, 7});
    }
    SECTION("an already-dyadic leaf comes back unchanged") {
        auto pieces = decompose_dyadic_1d({3, 4}, u);
        REQUIRE(pieces.size() == 1);
        CHECK(pieces[0].range(u) == Range1D{3, 4});
        CHECK(pieces[0].m == 3);
        CHECK(pieces[0].j == 3);
    }
}

TEST_CASE("dyadic decomposition: soundness over all ranges") {
    for (int L = 1; L <= 6; ++L) {
        Universe u(1, L);
        const uint64_t delta = u.delta();
        std::map<std::pair<uint64_t, uint64_t>, int> memo;
        for (uint64_t l = 0; l < delta; ++l) {
            for (uint64_t hi = l + 1; hi <= delta; ++hi) {
                auto pieces = decompose_dyadic_1d({l, hi}, u);
                // Disjoint, sorted, exact cover.
                uint64_t cursor = l;
                for (const auto& p : pieces) {
                    REQUIRE(p.begin(u) == cursor);
                    cursor = p.end(u);
                }
                REQUIRE(cursor == hi);
                // Count bound and minimality against the brute-force cover.
                REQUIRE(pieces.size() <= 2 * static_cast<size_t>(L));
                REQUIRE(static_cast<int>(pieces.size()) ==
                        minimal_dyadic_cover(l, hi, u, memo));
                // Maximality: no two adjacent pieces merge into one dyadic range.
                for (size_t i = 0; i + 1 < pieces.size(); ++i) {
                    const auto& a = pieces[i];
                    const auto& b = pieces[i + 1];
                    const bool same_len = a.length(u) == b.length(u);
                    const bool aligned =
                        same_len && a.begin(u) % (2 * a.length(u)) == 0;
                    REQUIRE_FALSE(aligned);
                }
            }
        }
    }
}

TEST_CASE("dyadic decomposition: invalid ranges rejected") {
    Universe u(1, 3);
    CHECK_THROWS_AS(decompose_dyadic_1d({3, 3}, u), precondition_error);
    CHECK_THROWS_AS(decompose_dyadic_1d({5, 3}, u), precondition_error);
    CHECK_THROWS_AS(decompose_dyadic_1d({0, 9}, u), precondition_error);
}

TEST_CASE("universe and type validation") {
    CHECK_THROWS_AS(Universe(0, 3), precondition_error);
    CHECK_THROWS_AS(Universe(1, 0), precondition_error);
    CHECK_THROWS_AS(Universe(9, 3), precondition_error);

    Universe u(2, 2);
    RangeD ok({{0, 4}, {1, 3}});
    CHECK_NOTHROW(ok.validate(u));
    RangeD bad({{0, 4}, {3, 3}});
    CHECK_THROWS_AS(bad.validate(u), precondition_error);
    RangeD wrong_d({{0, 4}});
    CHECK_THROWS_AS(wrong_d.validate(u), precondition_error);
}

TEST_CASE("CoeffRef canonical order matches flat index order") {
    Universe u(2, 2);
    // Enumerate all refs from flat indices; the order relation must agree.
    std::vector<CoeffRef> refs;
    for (uint64_t a = 0; a < 16; ++a) {
        CoeffRef r;
        r.d = 2;
        auto [m1, j1] = CoeffRef::from_index_1d(a / 4);
        auto [m2, j2] = CoeffRef::from_index_1d(a % 4);
        r.m[0] = static_cast<int8_t>(m1);
        r.j[0] = j1;
        r.m[1] = static_cast<int8_t>(m2);
        r.j[1] = j2;
        REQUIRE(r.flat_index(u) == a);
        refs.push_back(r);
    }
    CHECK(std::is_sorted(refs.begin(), refs.end()));
}
