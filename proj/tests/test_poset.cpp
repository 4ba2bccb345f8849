#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "pold/poset.hpp"
#include "support/random_orders.hpp"

using pold::Poset;
using testsupport::Rng;
using testsupport::index_labels;
using testsupport::random_poset;

namespace {

Poset diamond() {
    return Poset({"bot", "a", "b", "top"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

}  // namespace

TEST_CASE("chain construction orders by position and finds the greatest") {
    auto p = Poset::chain({"0", "1", "2"});
    CHECK(p.size() == 3);
    CHECK(p.leq(0, 1));
    CHECK(p.leq(0, 2));
    CHECK(p.leq(1, 2));
    CHECK_FALSE(p.leq(2, 1));
    CHECK_FALSE(p.leq(1, 0));
    REQUIRE(p.greatest().has_value());
    CHECK(*p.greatest() == 2);
}

TEST_CASE("diamond construction") {
    auto p = diamond();
    REQUIRE(p.greatest().has_value());
    CHECK(*p.greatest() == 3);
    CHECK(p.leq(0, 3));
    CHECK_FALSE(p.leq(1, 2));
    CHECK_FALSE(p.leq(2, 1));
}

TEST_CASE("cyclic cover relations are rejected") {
    CHECK_THROWS_AS(Poset({"0", "1"}, {{0, 1}, {1, 0}}), pold::CycleDetected);
    CHECK_THROWS_AS(Poset({"0"}, {{0, 0}}), pold::CycleDetected);
    CHECK_THROWS_AS(Poset({"0", "1", "2"}, {{0, 1}, {1, 2}, {2, 0}}),
                    pold::CycleDetected);
}

TEST_CASE("transitively implied edges are rejected") {
    CHECK_THROWS_AS(Poset({"0", "1", "2"}, {{0, 1}, {1, 2}, {0, 2}}),
                    pold::NonImmediateCover);
}

TEST_CASE("labels must be distinct and edges in range") {
    CHECK_THROWS_AS(Poset({"x", "x"}, {}), pold::DuplicateLabel);
    CHECK_THROWS_AS(Poset({"x", "y"}, {{0, 2}}), pold::InvalidElement);
    CHECK_THROWS_AS(Poset({"x", "y"}, {{-1, 0}}), pold::InvalidElement);
}

TEST_CASE("reflexivity holds everywhere") {
    auto p = diamond();
    for (int x = 0; x < p.size(); ++x) CHECK(p.leq(x, x));
}

TEST_CASE("upper covers") {
    auto c = Poset::chain({"0", "1", "2"});
    CHECK(c.upper_covers(0) == std::vector<int>{1});
    CHECK(c.upper_covers(2).empty());
    auto d = diamond();
    CHECK(d.upper_covers(0) == std::vector<int>{1, 2});
}

TEST_CASE("q2 on chains and the diamond") {
    auto c = Poset::chain({"0", "1", "2"});
    CHECK(c.q2(0, 1) == std::vector<int>{1});
    CHECK(c.q2(1, 2) == std::vector<int>{2});
    auto d = diamond();
    CHECK(d.q2(0, 1) == std::vector<int>{1});
    CHECK(d.q2(0, 2) == std::vector<int>{2});
}

TEST_CASE("q2 on a five-element poset with a side element") {
    // 0 < 1, 0 < 2, 1 < 3, 2 < 3, plus e with e < 3 only.
    Poset p({"0", "1", "2", "3", "e"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {4, 3}});
    auto got = p.q2(1, 3);
    CHECK(got == std::vector<int>{2, 3, 4});
}

TEST_CASE("q2 rejects non-covers") {
    auto c = Poset::chain({"0", "1", "2"});
    CHECK_THROWS_AS(c.q2(0, 2), pold::NotACover);
    CHECK_THROWS_AS(c.q2(1, 0), pold::NotACover);
}

TEST_CASE("reversal flips the order and is an involution") {
    auto c = Poset::chain({"0", "1", "2"});
    auto r = c.reversed();
    CHECK(r.leq(2, 0));
    CHECK_FALSE(r.leq(0, 2));
    REQUIRE(r.greatest().has_value());
    CHECK(*r.greatest() == 0);
    CHECK(r.reversed() == c);

    auto d = diamond();
    auto rd = d.reversed();
    CHECK(*rd.greatest() == 0);
    CHECK(rd.leq(3, 1));
    CHECK(rd.reversed() == d);
}

TEST_CASE("factories") {
    auto c = Poset::chain({"low", "med", "high"});
    CHECK(c.is_chain());
    CHECK(c.leq(0, 2));
    auto a = Poset::antichain({"r", "g", "b"});
    CHECK(a.is_antichain());
    CHECK_FALSE(a.leq(0, 1));
    CHECK_FALSE(a.greatest().has_value());
    // A singleton is both a chain and an antichain.
    CHECK(Poset::chain({"x"}) == Poset::antichain({"x"}));
}

TEST_CASE("greatest is absent when two elements are maximal") {
    Poset p({"a", "b", "c"}, {{0, 1}, {0, 2}});
    CHECK_FALSE(p.greatest().has_value());
}

TEST_CASE("extending with a greatest element") {
    auto a = Poset::antichain({"r", "g", "b"});
    auto e = a.extended_with_greatest("__top__");
    CHECK(e.size() == 4);
    REQUIRE(e.greatest().has_value());
    CHECK(e.label(*e.greatest()) == "__top__");
    for (int x = 0; x < 3; ++x) CHECK(e.leq(x, *e.greatest()));
    // Already-complete posets come back unchanged.
    CHECK(e.extended_with_greatest("__top__") == e);
    auto c = Poset::chain({"0", "1", "2"});
    CHECK(c.extended_with_greatest("__top__") == c);
}

TEST_CASE("random posets satisfy partial-order laws") {
    Rng rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + rng.below(8);
        auto p = random_poset(rng, k);
        for (int a = 0; a < k; ++a) {
            CHECK(p.leq(a, a));
            for (int b = 0; b < k; ++b) {
                if (a != b && p.leq(a, b)) CHECK_FALSE(p.leq(b, a));
                for (int c = 0; c < k; ++c)
                    if (p.leq(a, b) && p.leq(b, c)) CHECK(p.leq(a, c));
            }
        }
        // Cover lists match the definition computed from the order.
        for (int x = 0; x < k; ++x) {
            std::vector<int> expect;
            for (int y = 0; y < k; ++y) {
                if (!p.less(x, y)) continue;
                bool immediate = true;
                for (int c = 0; c < k && immediate; ++c)
                    if (p.less(x, c) && p.less(c, y)) immediate = false;
                if (immediate) expect.push_back(y);
            }
            CHECK(p.upper_covers(x) == expect);
        }
        // q2 equals a definition scan for every cover pair.
        for (int x = 0; x < k; ++x)
            for (int y : p.upper_covers(x)) {
                std::vector<int> expect;
                for (int a = 0; a < k; ++a)
                    if (!p.leq(a, x) && p.leq(a, y)) expect.push_back(a);
                auto got = p.q2(x, y);
                CHECK(got == expect);
                CHECK(std::find(got.begin(), got.end(), y) != got.end());
            }
        CHECK(p.reversed().reversed() == p);
    }
}
