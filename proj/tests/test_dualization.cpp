#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "pold/dualization.hpp"
#include "support/random_orders.hpp"

using pold::CoveringMatrix;
using pold::Element;
using pold::EnumerationOptions;
using pold::Poset;
using pold::ProductSpace;
using pold::SigmaCovering;
using testsupport::Rng;
using testsupport::boolean_space;
using testsupport::chain_space;

namespace {

std::set<Element> as_set(const std::vector<Element>& v) {
    return std::set<Element>(v.begin(), v.end());
}

// Every well-formed candidate covering of the space: all strictly increasing
// column subsets, all non-greatest value tuples.
std::vector<SigmaCovering> all_candidates(const ProductSpace& sp) {
    std::vector<std::vector<int>> allowed(sp.arity());
    for (int j = 0; j < sp.arity(); ++j)
        for (int v = 0; v < sp.factor(j).size(); ++v)
            if (!sp.factor(j).greatest() || *sp.factor(j).greatest() != v)
                allowed[j].push_back(v);
    std::vector<SigmaCovering> out;
    const int n = sp.arity();
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (mask >> j & 1) cols.push_back(j);
        std::vector<size_t> pick(cols.size(), 0);
        for (;;) {
            SigmaCovering c;
            c.columns = cols;
            bool ok = true;
            for (size_t i = 0; i < cols.size(); ++i) {
                if (allowed[cols[i]].empty()) {
                    ok = false;
                    break;
                }
                c.sigma.push_back(allowed[cols[i]][pick[i]]);
            }
            if (ok) out.push_back(c);
            if (cols.empty() || !ok) break;
            size_t i = cols.size();
            while (i > 0 && ++pick[i - 1] == allowed[cols[i - 1]].size()) pick[--i] = 0;
            if (i == 0) break;
        }
    }
    return out;
}

std::vector<SigmaCovering> by_definition(const CoveringMatrix& m) {
    std::vector<SigmaCovering> out;
    for (const auto& c : all_candidates(m.space()))
        if (pold::is_ordered_irredundant_covering(m, c)) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("checker on the frozen examples") {
    CoveringMatrix b(boolean_space(2), {{1, 0}, {0, 1}});
    CHECK(pold::is_ordered_irredundant_covering(b, {{0, 1}, {0, 0}}));

    CoveringMatrix m(chain_space({3, 3}), {{1, 1}});
    CHECK(pold::is_ordered_irredundant_covering(m, {{0}, {0}}));
    CHECK(pold::is_ordered_irredundant_covering(m, {{1}, {0}}));
    CHECK_FALSE(pold::is_ordered_irredundant_covering(m, {{0, 1}, {0, 0}}));
    // A row equal to sigma on H violates condition (2).
    CHECK_FALSE(pold::is_ordered_irredundant_covering(m, {{0, 1}, {1, 1}}));
}

TEST_CASE("checker validates candidate shape") {
    CoveringMatrix m(chain_space({3, 3}), {{1, 1}});
    CHECK_THROWS_AS(pold::is_ordered_irredundant_covering(m, {{1, 0}, {0, 0}}),
                    pold::InvalidElement);
    CHECK_THROWS_AS(pold::is_ordered_irredundant_covering(m, {{0}, {5}}),
                    pold::InvalidElement);
    CHECK_THROWS_AS(pold::is_ordered_irredundant_covering(m, {{0}, {2}}),
                    pold::InvalidElement);  // greatest element as sigma
    CHECK_THROWS_AS(pold::is_ordered_irredundant_covering(m, {{0, 1}, {0}}),
                    pold::DimensionMismatch);
}

TEST_CASE("enumerator on the frozen examples") {
    auto sp = chain_space({3, 3});
    {
        CoveringMatrix m(sp, {{1, 1}});
        auto got = pold::enumerate_coverings(m);
        REQUIRE(got.size() == 2);
        CHECK(got[0] == SigmaCovering{{0}, {0}});
        CHECK(got[1] == SigmaCovering{{1}, {0}});
        CHECK(pold::covering_to_element(sp, got[0]) == Element{0, 2});
        CHECK(pold::covering_to_element(sp, got[1]) == Element{2, 0});
    }
    {
        CoveringMatrix m(sp, {{2, 0}, {0, 2}});
        auto got = pold::enumerate_coverings(m);
        REQUIRE(got.size() == 1);
        CHECK(got[0] == SigmaCovering{{0, 1}, {1, 1}});
        CHECK(pold::covering_to_element(sp, got[0]) == Element{1, 1});
    }
    {
        CoveringMatrix m(sp, {});
        auto got = pold::enumerate_coverings(m);
        REQUIRE(got.size() == 1);
        CHECK(got[0] == SigmaCovering{{}, {}});
        CHECK(pold::covering_to_element(sp, got[0]) == Element{2, 2});
    }
}

TEST_CASE("enumerator equals the definition checker over all candidates") {
    Rng rng(31001);
    for (int trial = 0; trial < 120; ++trial) {
        auto sp = testsupport::random_space(rng, 3, 4);
        auto rows = testsupport::random_subset(rng, sp, 8);
        CoveringMatrix m(sp, rows);
        auto got = pold::enumerate_coverings(m);
        CHECK(got == by_definition(m));
    }
}

TEST_CASE("enumerator equals the element-space oracle on complete spaces") {
    Rng rng(31002);
    for (int trial = 0; trial < 150; ++trial) {
        auto sp = testsupport::random_complete_space(rng, 4, 4);
        auto rows = testsupport::random_subset(rng, sp, 12);
        CoveringMatrix m(sp, rows);
        auto got = pold::enumerate_coverings(m);
        std::set<Element> mapped;
        for (const auto& c : got) {
            auto x = pold::covering_to_element(sp, c);
            CHECK(mapped.insert(x).second);  // no duplicates
        }
        CHECK(mapped == as_set(sp.brute_force_max_independent(rows)));
        // Emitted coverings pass the definition checker.
        for (const auto& c : got) CHECK(pold::is_ordered_irredundant_covering(m, c));
        // Canonical order is sorted order.
        CHECK(std::is_sorted(got.begin(), got.end()));
    }
}

TEST_CASE("duplicate rows do not change the solution set") {
    Rng rng(31003);
    for (int trial = 0; trial < 60; ++trial) {
        auto sp = testsupport::random_complete_space(rng, 3, 4);
        auto rows = testsupport::random_subset(rng, sp, 6);
        auto doubled = rows;
        for (const auto& r : rows) doubled.push_back(r);
        CHECK(pold::enumerate_coverings(CoveringMatrix(sp, rows)) ==
              pold::enumerate_coverings(CoveringMatrix(sp, doubled)));
    }
}

TEST_CASE("rank bound filters by |H|") {
    Rng rng(31004);
    for (int trial = 0; trial < 60; ++trial) {
        auto sp = testsupport::random_complete_space(rng, 4, 4);
        auto rows = testsupport::random_subset(rng, sp, 8);
        CoveringMatrix m(sp, rows);
        auto full = pold::enumerate_coverings(m);
        for (int rank = 0; rank <= sp.arity(); ++rank) {
            EnumerationOptions opts;
            opts.max_rank = rank;
            auto bounded = pold::enumerate_coverings(m, opts);
            std::vector<SigmaCovering> expect;
            for (const auto& c : full)
                if (static_cast<int>(c.columns.size()) <= rank) expect.push_back(c);
            CHECK(bounded == expect);
        }
        EnumerationOptions unbounded_as_n;
        unbounded_as_n.max_rank = sp.arity();
        CHECK(pold::enumerate_coverings(m, unbounded_as_n) == full);
    }
}

TEST_CASE("streaming can stop early and discovery order sorts to canonical") {
    auto sp = chain_space({3, 3, 3});
    CoveringMatrix m(sp, {{1, 1, 1}, {2, 0, 1}});
    std::vector<SigmaCovering> raw;
    pold::enumerate_coverings_stream(m, [&](const SigmaCovering& c) {
        raw.push_back(c);
        return true;
    });
    auto sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == pold::enumerate_coverings(m));
    REQUIRE(raw.size() >= 2);

    std::vector<SigmaCovering> first;
    pold::enumerate_coverings_stream(m, [&](const SigmaCovering& c) {
        first.push_back(c);
        return false;
    });
    REQUIRE(first.size() == 1);
    CHECK(first[0] == raw[0]);
}

TEST_CASE("partitioned search matches the single-threaded run") {
    Rng rng(31005);
    for (int trial = 0; trial < 40; ++trial) {
        auto sp = testsupport::random_complete_space(rng, 4, 4);
        auto rows = testsupport::random_subset(rng, sp, 10);
        CoveringMatrix m(sp, rows);
        EnumerationOptions par;
        par.threads = 4;
        CHECK(pold::enumerate_coverings(m, par) == pold::enumerate_coverings(m));
        EnumerationOptions par_raw;
        par_raw.threads = 3;
        par_raw.sort_output = false;
        EnumerationOptions seq_raw;
        seq_raw.sort_output = false;
        CHECK(pold::enumerate_coverings(m, par_raw) ==
              pold::enumerate_coverings(m, seq_raw));
    }
}

TEST_CASE("element mapping round-trips") {
    auto sp = chain_space({3, 3});
    CHECK(pold::covering_to_element(sp, {{0}, {0}}) == Element{0, 2});
    CHECK(pold::element_to_covering(sp, {2, 2}) == SigmaCovering{{}, {}});
    CHECK(pold::element_to_covering(sp, {0, 1}) == SigmaCovering{{0, 1}, {0, 1}});

    Rng rng(31006);
    for (int trial = 0; trial < 80; ++trial) {
        auto rsp = testsupport::random_complete_space(rng, 4, 4);
        auto x = testsupport::random_element(rng, rsp);
        CHECK(pold::covering_to_element(rsp, pold::element_to_covering(rsp, x)) == x);
    }

    ProductSpace incomplete({Poset::chain({"0", "1"}), Poset::antichain({"r", "g"})});
    CHECK_THROWS_AS(pold::covering_to_element(incomplete, {{0}, {0}}),
                    pold::NoGreatestElement);
    // Selecting the incomplete factor sidesteps the missing greatest.
    CHECK(pold::covering_to_element(incomplete, {{0, 1}, {0, 1}}) == Element{0, 1});
}

TEST_CASE("boolean irreducible coverings on the frozen examples") {
    using M = std::vector<std::vector<int>>;
    CHECK(pold::irreducible_boolean_coverings(M{{1, 0}, {0, 1}}) ==
          M{{0, 1}});
    CHECK(pold::irreducible_boolean_coverings(M{{1, 1}, {1, 0}}) == M{{0}});
    CHECK(pold::irreducible_boolean_coverings(M{}) == M{{}});
    // An all-zero row admits no covering at all.
    CHECK(pold::irreducible_boolean_coverings(M{{0, 0}}).empty());
}

TEST_CASE("boolean specialization agrees with the classical enumeration") {
    Rng rng(31007);
    for (int trial = 0; trial < 80; ++trial) {
        auto rows = testsupport::random_boolean_matrix(rng, 6, 8);
        const int ncols =
            rows.empty() ? 1 + rng.below(8) : static_cast<int>(rows[0].size());
        std::vector<Element> elems;
        for (const auto& r : rows) elems.push_back(Element(r.begin(), r.end()));
        CoveringMatrix m(boolean_space(ncols), elems);
        auto covs = pold::enumerate_coverings(m);
        std::vector<std::vector<int>> zero_sigma;
        for (const auto& c : covs)
            if (std::all_of(c.sigma.begin(), c.sigma.end(), [](int v) { return v == 0; }))
                zero_sigma.push_back(c.columns);
        CHECK(zero_sigma == pold::irreducible_boolean_coverings(rows));
    }
}

TEST_CASE("chain-specialized checker agrees with the general checker") {
    Rng rng(31008);
    for (int trial = 0; trial < 80; ++trial) {
        std::vector<int> sizes;
        const int n = 1 + rng.below(3);
        for (int i = 0; i < n; ++i) sizes.push_back(2 + rng.below(3));
        auto sp = chain_space(sizes);
        CoveringMatrix m(sp, testsupport::random_subset(rng, sp, 8));
        for (const auto& c : all_candidates(sp))
            CHECK(pold::is_ordered_irredundant_covering(m, c) ==
                  pold::is_ordered_irredundant_covering_chain(m, c));
    }
    // The specialized checker refuses non-chain factors.
    ProductSpace with_anti({Poset::antichain({"a", "b"}).extended_with_greatest("^")});
    CoveringMatrix m(with_anti, {});
    CHECK_THROWS_AS(pold::is_ordered_irredundant_covering_chain(m, {{0}, {0}}),
                    pold::Error);
}

TEST_CASE("emitted set maps to an antichain") {
    Rng rng(31009);
    for (int trial = 0; trial < 60; ++trial) {
        auto sp = testsupport::random_complete_space(rng, 3, 4);
        auto rows = testsupport::random_subset(rng, sp, 8);
        auto covs = pold::enumerate_coverings(CoveringMatrix(sp, rows));
        std::vector<Element> elems;
        for (const auto& c : covs) elems.push_back(pold::covering_to_element(sp, c));
        for (const auto& x : elems)
            for (const auto& y : elems)
                if (x != y) CHECK_FALSE(sp.leq(x, y));
    }
}
