#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "pold/errors.hpp"
#include "pold/poset.hpp"

namespace pold {

// One point of a product space: one element index per factor.
using Element = std::vector<int>;

// Product of finitely many posets with the componentwise order.
// Exhaustive scans (closures, independence oracles) are gated by a
// cardinality bound; they exist to validate the enumerator, not to scale.
class ProductSpace {
public:
    static constexpr std::uint64_t kDefaultScanBound = 1'000'000;

    explicit ProductSpace(std::vector<Poset> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) throw DimensionMismatch("product needs at least one factor");
    }

    int arity() const { return static_cast<int>(factors_.size()); }

    const Poset& factor(int i) const {
        if (i < 0 || i >= arity())
            throw DimensionMismatch("factor index out of range");
        return factors_[i];
    }

    const std::vector<Poset>& factors() const { return factors_; }

    std::uint64_t cardinality() const {
        std::uint64_t card = 1;
        for (const auto& f : factors_) {
            card *= static_cast<std::uint64_t>(f.size());
            if (card > (std::uint64_t(1) << 62)) return std::uint64_t(1) << 62;
        }
        return card;
    }

    void check_element(const Element& x) const {
        if (static_cast<int>(x.size()) != arity())
            throw DimensionMismatch("element arity does not match the space");
        for (int i = 0; i < arity(); ++i)
            if (x[i] < 0 || x[i] >= factors_[i].size())
                throw InvalidElement("component " + std::to_string(i) + " out of range");
    }

    bool leq(const Element& x, const Element& y) const {
        check_element(x);
        check_element(y);
        for (int i = 0; i < arity(); ++i)
            if (!factors_[i].leq(x[i], y[i])) return false;
        return true;
    }

    bool less(const Element& x, const Element& y) const { return x != y && leq(x, y); }

    // All components at their factor's greatest element.
    // Throws NoGreatestElement when some factor has none.
    Element top() const {
        Element t(arity());
        for (int i = 0; i < arity(); ++i) {
            auto g = factors_[i].greatest();
            if (!g)
                throw NoGreatestElement("factor " + std::to_string(i) +
                                        " has no greatest element");
            t[i] = *g;
        }
        return t;
    }

    ProductSpace reversed() const {
        std::vector<Poset> rev;
        rev.reserve(factors_.size());
        for (const auto& f : factors_) rev.push_back(f.reversed());
        return ProductSpace(std::move(rev));
    }

    // Every element of the space in lexicographic component order.
    std::vector<Element> all_elements(std::uint64_t bound = kDefaultScanBound) const {
        check_scan(bound);
        std::vector<Element> out;
        out.reserve(cardinality());
        Element cur(arity(), 0);
        for (;;) {
            out.push_back(cur);
            int i = arity() - 1;
            while (i >= 0 && cur[i] + 1 == factors_[i].size()) cur[i--] = 0;
            if (i < 0) break;
            ++cur[i];
        }
        return out;
    }

    std::vector<Element> upward_closure(const std::vector<Element>& r,
                                        std::uint64_t bound = kDefaultScanBound) const {
        return closure(r, /*upward=*/true, bound);
    }

    std::vector<Element> downward_closure(const std::vector<Element>& r,
                                          std::uint64_t bound = kDefaultScanBound) const {
        return closure(r, /*upward=*/false, bound);
    }

    // I(R+): maximal elements of P \ R+, by exhaustive scan, in lexicographic
    // order. Ground truth for the covering enumerator.
    std::vector<Element> brute_force_max_independent(
        const std::vector<Element>& r, std::uint64_t bound = kDefaultScanBound) const {
        return independent(r, /*maximal=*/true, bound);
    }

    // I(R-): minimal elements of P \ R-.
    std::vector<Element> brute_force_min_independent(
        const std::vector<Element>& r, std::uint64_t bound = kDefaultScanBound) const {
        return independent(r, /*maximal=*/false, bound);
    }

    bool operator==(const ProductSpace& o) const { return factors_ == o.factors_; }

private:
    void check_scan(std::uint64_t bound) const {
        if (cardinality() > bound)
            throw SpaceTooLarge("product cardinality exceeds the scan bound");
    }

    std::vector<Element> closure(const std::vector<Element>& r, bool upward,
                                 std::uint64_t bound) const {
        check_scan(bound);
        for (const auto& x : r) check_element(x);
        std::vector<Element> out;
        for (const auto& x : all_elements(bound)) {
            bool in = false;
            for (const auto& a : r)
                if (upward ? leq(a, x) : leq(x, a)) {
                    in = true;
                    break;
                }
            if (in) out.push_back(x);
        }
        return out;
    }

    std::vector<Element> independent(const std::vector<Element>& r, bool maximal,
                                     std::uint64_t bound) const {
        check_scan(bound);
        for (const auto& x : r) check_element(x);
        const auto all = all_elements(bound);
        std::vector<Element> outside;
        for (const auto& x : all) {
            bool covered = false;
            for (const auto& a : r)
                if (maximal ? leq(a, x) : leq(x, a)) {
                    covered = true;
                    break;
                }
            if (!covered) outside.push_back(x);
        }
        std::vector<Element> out;
        for (const auto& x : outside) {
            bool extreme = true;
            for (const auto& y : outside)
                if (x != y && (maximal ? leq(x, y) : leq(y, x))) {
                    extreme = false;
                    break;
                }
            if (extreme) out.push_back(x);
        }
        return out;
    }

    std::vector<Poset> factors_;
};

// Label reserved for greatest elements synthesized during completion.
inline const std::string kSyntheticTopLabel = "__top__";

inline Poset complete_greatest(const Poset& p) {
    if (p.greatest()) return p;
    if (p.index_of(kSyntheticTopLabel))
        throw ReservedLabelCollision("label " + kSyntheticTopLabel +
                                     " is reserved for synthetic greatest elements");
    return p.extended_with_greatest(kSyntheticTopLabel);
}

inline ProductSpace complete_greatest(const ProductSpace& sp) {
    std::vector<Poset> factors;
    factors.reserve(sp.factors().size());
    for (const auto& f : sp.factors()) factors.push_back(complete_greatest(f));
    return ProductSpace(std::move(factors));
}

}  // namespace pold
