#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "pold/product_space.hpp"
#include "support/random_orders.hpp"

using pold::Element;
using pold::Poset;
using pold::ProductSpace;
using testsupport::Rng;

namespace {

ProductSpace c3c3() {
    return ProductSpace({Poset::chain({"0", "1", "2"}), Poset::chain({"0", "1", "2"})});
}

ProductSpace boolean_square() {
    return ProductSpace({Poset::chain({"0", "1"}), Poset::chain({"0", "1"})});
}

std::set<Element> as_set(const std::vector<Element>& v) {
    return std::set<Element>(v.begin(), v.end());
}

}  // namespace

TEST_CASE("componentwise order") {
    auto sp = c3c3();
    CHECK(sp.leq({0, 1}, {1, 1}));
    CHECK_FALSE(sp.leq({1, 0}, {0, 1}));
    CHECK_FALSE(sp.leq({0, 1}, {1, 0}));
    CHECK(sp.leq({1, 1}, {1, 1}));

    auto bs = boolean_square();
    for (const auto& x : bs.all_elements()) CHECK(bs.leq({0, 0}, x));
}

TEST_CASE("element validation") {
    auto sp = c3c3();
    CHECK_THROWS_AS(sp.leq({0}, {1, 1}), pold::DimensionMismatch);
    CHECK_THROWS_AS(sp.leq({0, 3}, {1, 1}), pold::InvalidElement);
}

TEST_CASE("upward closure") {
    auto bs = boolean_square();
    CHECK(as_set(bs.upward_closure({{1, 0}, {0, 1}})) ==
          std::set<Element>{{0, 1}, {1, 0}, {1, 1}});
    CHECK(bs.upward_closure({}).empty());
    auto sp = c3c3();
    CHECK(as_set(sp.upward_closure({{1, 1}})) ==
          std::set<Element>{{1, 1}, {1, 2}, {2, 1}, {2, 2}});
}

TEST_CASE("downward closure") {
    auto sp = c3c3();
    CHECK(as_set(sp.downward_closure({{1, 1}})) ==
          std::set<Element>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(sp.downward_closure({}).empty());
}

TEST_CASE("maximal independent elements by exhaustive scan") {
    auto bs = boolean_square();
    CHECK(bs.brute_force_max_independent({{1, 0}, {0, 1}}) ==
          std::vector<Element>{{0, 0}});
    auto sp = c3c3();
    CHECK(sp.brute_force_max_independent({{1, 1}}) ==
          std::vector<Element>{{0, 2}, {2, 0}});
    CHECK(sp.brute_force_max_independent({{2, 0}, {0, 2}}) ==
          std::vector<Element>{{1, 1}});
    // Empty R leaves every element independent; the maximal ones remain.
    CHECK(sp.brute_force_max_independent({}) == std::vector<Element>{{2, 2}});
}

TEST_CASE("minimal independent elements by exhaustive scan") {
    auto sp = c3c3();
    CHECK(sp.brute_force_min_independent({{1, 1}}) ==
          std::vector<Element>{{0, 2}, {2, 0}});
    CHECK(sp.brute_force_min_independent({}) == std::vector<Element>{{0, 0}});
}

TEST_CASE("scan bound") {
    auto sp = c3c3();
    CHECK_THROWS_AS(sp.all_elements(8), pold::SpaceTooLarge);
    CHECK_THROWS_AS(sp.upward_closure({{1, 1}}, 8), pold::SpaceTooLarge);
    CHECK_NOTHROW(sp.all_elements(9));
}

TEST_CASE("top element") {
    auto sp = c3c3();
    CHECK(sp.top() == Element{2, 2});
    ProductSpace with_anti({Poset::chain({"0", "1"}), Poset::antichain({"r", "g"})});
    CHECK_THROWS_AS(with_anti.top(), pold::NoGreatestElement);
}

TEST_CASE("random instances: independence oracles behave per definition") {
    Rng rng(7011);
    for (int trial = 0; trial < 150; ++trial) {
        auto sp = testsupport::random_space(rng, 4, 4);
        auto r = testsupport::random_subset(rng, sp, 12);
        auto maxind = sp.brute_force_max_independent(r);
        auto up = as_set(sp.upward_closure(r));

        // Antichain, disjoint from R+.
        for (const auto& x : maxind) {
            CHECK(up.count(x) == 0);
            for (const auto& y : maxind)
                if (x != y) CHECK_FALSE(sp.leq(x, y));
        }
        // Every outside element sits below some representative.
        for (const auto& x : sp.all_elements()) {
            if (up.count(x)) continue;
            bool dominated = false;
            for (const auto& m : maxind)
                if (sp.leq(x, m)) {
                    dominated = true;
                    break;
                }
            CHECK(dominated);
        }
        // Reversal swaps the two oracles.
        auto rev = sp.reversed();
        CHECK(as_set(sp.brute_force_min_independent(r)) ==
              as_set(rev.brute_force_max_independent(r)));
    }
}

TEST_CASE("duality involution recovers the extremes of R") {
    Rng rng(7012);
    int nontrivial = 0;
    for (int trial = 0; trial < 220; ++trial) {
        auto sp = testsupport::random_space(rng, 4, 4);
        auto r = testsupport::random_subset(rng, sp, 12);

        std::vector<Element> min_r, max_r;
        for (const auto& x : r) {
            bool is_min = true, is_max = true;
            for (const auto& y : r) {
                if (y != x && sp.leq(y, x)) is_min = false;
                if (y != x && sp.leq(x, y)) is_max = false;
            }
            if (is_min && !std::count(min_r.begin(), min_r.end(), x)) min_r.push_back(x);
            if (is_max && !std::count(max_r.begin(), max_r.end(), x)) max_r.push_back(x);
        }

        auto twice_up = sp.brute_force_min_independent(sp.brute_force_max_independent(r));
        CHECK(as_set(twice_up) == as_set(min_r));
        auto twice_down = sp.brute_force_max_independent(sp.brute_force_min_independent(r));
        CHECK(as_set(twice_down) == as_set(max_r));
        if (!r.empty()) ++nontrivial;

        // For an antichain the involution gives the antichain back.
        auto anti = sp.brute_force_max_independent(r);
        auto again = sp.brute_force_min_independent(sp.brute_force_max_independent(anti));
        CHECK(as_set(again) == as_set(anti));
    }
    CHECK(nontrivial >= 150);
}

TEST_CASE("lexicographic element stream") {
    auto bs = boolean_square();
    CHECK(bs.all_elements() ==
          std::vector<Element>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(bs.cardinality() == 4);
    CHECK(c3c3().cardinality() == 9);
}
