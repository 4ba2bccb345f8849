#pragma once

// Elementary classifiers over partially ordered feature domains.
//
// An elementary classifier (sigma, H) prescribes one value per feature in H.
// An object is close to it when every prescribed component dominates the
// object's component in its factor order; training reduces the search for
// irredundant classifiers to the covering enumeration in dualization.hpp.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pold/dualization.hpp"
#include "pold/errors.hpp"
#include "pold/product_space.hpp"

namespace pold {

struct ElementaryClassifier {
    std::vector<int> features;  // strictly increasing feature indices
    std::vector<int> sigma;     // one prescribed value per feature

    int rank() const { return static_cast<int>(features.size()); }

    friend bool operator==(const ElementaryClassifier&,
                           const ElementaryClassifier&) = default;
    friend bool operator<(const ElementaryClassifier& a,
                          const ElementaryClassifier& b) {
        return std::tie(a.features, a.sigma) < std::tie(b.features, b.sigma);
    }
};

// Labeled objects over a common feature space. Class indices are dense:
// every class in 0..num_classes-1 owns at least one object.
class TrainingSet {
public:
    TrainingSet(ProductSpace space, std::vector<Element> objects,
                std::vector<int> labels)
        : space_(std::move(space)),
          objects_(std::move(objects)),
          labels_(std::move(labels)) {
        if (objects_.size() != labels_.size())
            throw DimensionMismatch("object and label counts differ");
        if (objects_.empty()) throw Error("training set has no objects");
        for (const auto& s : objects_) space_.check_element(s);
        int top = 0;
        for (int l : labels_) {
            if (l < 0) throw Error("negative class index");
            top = std::max(top, l);
        }
        members_.resize(top + 1);
        for (size_t i = 0; i < labels_.size(); ++i)
            members_[labels_[i]].push_back(static_cast<int>(i));
        for (int k = 0; k <= top; ++k)
            if (members_[k].empty())
                throw Error("class " + std::to_string(k) + " has no objects");
    }

    const ProductSpace& space() const { return space_; }
    const std::vector<Element>& objects() const { return objects_; }
    const std::vector<int>& labels() const { return labels_; }
    int num_classes() const { return static_cast<int>(members_.size()); }

    // Object indices belonging to class k.
    const std::vector<int>& members(int k) const {
        check_class(k);
        return members_[k];
    }

    std::vector<Element> class_objects(int k) const {
        std::vector<Element> out;
        for (int i : members(k)) out.push_back(objects_[i]);
        return out;
    }

    std::vector<Element> rest_objects(int k) const {
        check_class(k);
        std::vector<Element> out;
        for (size_t i = 0; i < objects_.size(); ++i)
            if (labels_[i] != k) out.push_back(objects_[i]);
        return out;
    }

    void check_class(int k) const {
        if (k < 0 || k >= num_classes())
            throw Error("class index " + std::to_string(k) + " out of range");
    }

private:
    ProductSpace space_;
    std::vector<Element> objects_;
    std::vector<int> labels_;
    std::vector<std::vector<int>> members_;
};

// Order-aware proximity: 1 iff the object lies below sigma on every selected
// feature. Rank 0 matches everything.
inline bool proximity_ordered(const ProductSpace& sp,
                              const ElementaryClassifier& ec, const Element& s) {
    for (size_t i = 0; i < ec.features.size(); ++i) {
        const int j = ec.features[i];
        if (!sp.factor(j).leq(s[j], ec.sigma[i])) return false;
    }
    return true;
}

// Equality-based proximity, blind to the order. Cross-check for the antichain
// case; the library itself votes with proximity_ordered.
inline bool proximity_classical(const ElementaryClassifier& ec, const Element& s) {
    for (size_t i = 0; i < ec.features.size(); ++i)
        if (s[ec.features[i]] != ec.sigma[i]) return false;
    return true;
}

// Correct for class k: never close to an object of k and an object outside k
// at the same time.
inline bool is_correct(const TrainingSet& ts, const ElementaryClassifier& ec,
                       int k) {
    ts.check_class(k);
    bool inside = false, outside = false;
    for (size_t i = 0; i < ts.objects().size(); ++i) {
        if (!proximity_ordered(ts.space(), ec, ts.objects()[i])) continue;
        (ts.labels()[i] == k ? inside : outside) = true;
        if (inside && outside) return false;
    }
    return true;
}

// Representative for k: correct, and generated by (close to) at least one
// object of k.
inline bool is_representative(const TrainingSet& ts,
                              const ElementaryClassifier& ec, int k) {
    ts.check_class(k);
    bool inside = false;
    for (size_t i = 0; i < ts.objects().size(); ++i) {
        if (!proximity_ordered(ts.space(), ec, ts.objects()[i])) continue;
        if (ts.labels()[i] == k)
            inside = true;
        else
            return false;
    }
    return inside;
}

// Covering of k: close to no object of k. Other classes play no role.
inline bool is_covering(const TrainingSet& ts, const ElementaryClassifier& ec,
                        int k) {
    ts.check_class(k);
    for (int i : ts.members(k))
        if (proximity_ordered(ts.space(), ec, ts.objects()[i])) return false;
    return true;
}

// A feature set is a test when every training object generates a
// representative classifier of its own class on exactly these features.
// Decided by scanning all value assignments over the set.
inline bool is_test(const TrainingSet& ts, const std::vector<int>& features) {
    if (features.empty()) throw Error("a test needs at least one feature");
    int prev = -1;
    for (int j : features) {
        if (j < 0 || j >= ts.space().arity())
            throw Error("feature index " + std::to_string(j) + " out of range");
        if (j <= prev) throw Error("test features must be strictly increasing");
        prev = j;
    }
    const int r = static_cast<int>(features.size());
    for (size_t o = 0; o < ts.objects().size(); ++o) {
        const int k = ts.labels()[o];
        ElementaryClassifier ec{features, std::vector<int>(r, 0)};
        bool found = false;
        for (;;) {
            if (proximity_ordered(ts.space(), ec, ts.objects()[o]) &&
                is_representative(ts, ec, k)) {
                found = true;
                break;
            }
            int i = r - 1;
            while (i >= 0 &&
                   ec.sigma[i] + 1 == ts.space().factor(features[i]).size()) {
                ec.sigma[i] = 0;
                --i;
            }
            if (i < 0) break;
            ++ec.sigma[i];
        }
        if (!found) return false;
    }
    return true;
}

// The element whose non-selected components sit at their factor's greatest.
inline Element embed(const ProductSpace& sp, const ElementaryClassifier& ec) {
    return covering_to_element(sp, SigmaCovering{ec.features, ec.sigma});
}

struct WeightedClassifier {
    ElementaryClassifier classifier;
    std::int64_t weight = 1;

    friend bool operator==(const WeightedClassifier&,
                           const WeightedClassifier&) = default;
};

// Irredundant coverings of class k: the covering enumeration over the matrix
// of k's own objects, each solution read back as a classifier. Weight 1.
inline std::vector<WeightedClassifier> train_coverings(
    const TrainingSet& ts, int k, std::optional<int> max_rank = {},
    int threads = 1) {
    ts.check_class(k);
    CoveringMatrix m(ts.space(), ts.class_objects(k));
    EnumerationOptions opts{max_rank, threads, /*sort_output=*/true};
    std::vector<WeightedClassifier> out;
    for (auto& c : enumerate_coverings(m, opts))
        out.push_back({{std::move(c.columns), std::move(c.sigma)}, 1});
    return out;
}

// Irredundant representative classifiers of class k: coverings of the rest of
// the training set that at least one object of k generates. Weight counts the
// generating objects.
inline std::vector<WeightedClassifier> train_representatives(
    const TrainingSet& ts, int k, std::optional<int> max_rank = {},
    int threads = 1) {
    ts.check_class(k);
    CoveringMatrix m(ts.space(), ts.rest_objects(k));
    EnumerationOptions opts{max_rank, threads, /*sort_output=*/true};
    std::vector<WeightedClassifier> out;
    for (auto& c : enumerate_coverings(m, opts)) {
        ElementaryClassifier ec{std::move(c.columns), std::move(c.sigma)};
        std::int64_t generators = 0;
        for (int i : ts.members(k))
            if (proximity_ordered(ts.space(), ec, ts.objects()[i])) ++generators;
        if (generators > 0) out.push_back({std::move(ec), generators});
    }
    return out;
}

namespace detail {

// Reversal can leave a factor without a greatest element; complete it with a
// synthetic top whose label avoids everything already present, including tops
// synthesized before reversal.
inline Poset completed_reversed(const Poset& f) {
    Poset r = f.reversed();
    if (r.greatest()) return r;
    std::string label = kSyntheticTopLabel;
    for (int suffix = 2; r.index_of(label); ++suffix)
        label = kSyntheticTopLabel + std::to_string(suffix);
    return r.extended_with_greatest(label);
}

}  // namespace detail

// The factors of sp followed by their reversed completions.
inline ProductSpace duplicated_space(const ProductSpace& sp) {
    std::vector<Poset> factors = sp.factors();
    for (const auto& f : sp.factors())
        factors.push_back(detail::completed_reversed(f));
    return ProductSpace(std::move(factors));
}

// Appends to every object a copy of itself living in the reversed orders, so
// that objects of different classes become incomparable. Reversed factors are
// completed with a synthetic greatest element when reversal leaves none.
// Demands classes with pairwise distinct descriptions.
inline TrainingSet duplicate_features(const TrainingSet& ts) {
    const auto& objs = ts.objects();
    for (size_t i = 0; i < objs.size(); ++i)
        for (size_t j = i + 1; j < objs.size(); ++j)
            if (objs[i] == objs[j] && ts.labels()[i] != ts.labels()[j])
                throw OverlappingClasses(
                    "identical description in classes " +
                    std::to_string(ts.labels()[i]) + " and " +
                    std::to_string(ts.labels()[j]));

    std::vector<Element> doubled;
    doubled.reserve(objs.size());
    for (const auto& s : objs) {
        Element d = s;
        d.insert(d.end(), s.begin(), s.end());
        doubled.push_back(std::move(d));
    }
    return TrainingSet(duplicated_space(ts.space()), std::move(doubled),
                       ts.labels());
}

enum class TrainMethod { representative, covering };

// Immutable after training; safe to share across prediction threads.
struct TrainedModel {
    TrainMethod method = TrainMethod::representative;
    ProductSpace space;  // feature space the classifiers live in (post-duplication)
    std::vector<std::vector<WeightedClassifier>> per_class;
    std::string order_fingerprint;  // canonical digest of the order spec, if known
    bool duplicated = false;
};

struct TrainOptions {
    TrainMethod method = TrainMethod::representative;
    std::optional<int> max_rank{};
    bool duplicate = false;
    int threads = 1;
};

inline TrainedModel train(const TrainingSet& ts, const TrainOptions& opts = {}) {
    const TrainingSet* use = &ts;
    std::optional<TrainingSet> doubled;
    if (opts.duplicate) {
        doubled = duplicate_features(ts);
        use = &*doubled;
    }
    TrainedModel model{opts.method, use->space(), {}, "", opts.duplicate};
    for (int k = 0; k < use->num_classes(); ++k)
        model.per_class.push_back(
            opts.method == TrainMethod::covering
                ? train_coverings(*use, k, opts.max_rank, opts.threads)
                : train_representatives(*use, k, opts.max_rank, opts.threads));
    return model;
}

// Per-class vote tally. raw/scale is the normalized score; scale is the
// class's total weight (representative) or classifier count (covering).
struct ClassScore {
    std::int64_t raw = 0;
    std::int64_t scale = 0;

    double normalized() const {
        return scale == 0 ? 0.0 : static_cast<double>(raw) / static_cast<double>(scale);
    }
};

enum class TiePolicy { abstain, lowest_index };

namespace detail {

// Objects from the pre-duplication space are doubled on the fly, so a model
// trained with duplication still accepts raw descriptions.
inline Element adapt_to_model(const TrainedModel& m, const Element& s) {
    Element x = s;
    if (m.duplicated && static_cast<int>(s.size()) * 2 == m.space.arity())
        x.insert(x.end(), s.begin(), s.end());
    if (static_cast<int>(x.size()) != m.space.arity())
        throw SpaceMismatch("object does not fit the model's feature space");
    try {
        m.space.check_element(x);
    } catch (const Error&) {
        throw SpaceMismatch("object value outside the model's feature space");
    }
    return x;
}

}  // namespace detail

inline std::vector<ClassScore> estimate(const TrainedModel& m, const Element& s) {
    const Element x = detail::adapt_to_model(m, s);
    std::vector<ClassScore> scores(m.per_class.size());
    for (size_t k = 0; k < m.per_class.size(); ++k) {
        for (const auto& wc : m.per_class[k]) {
            const bool close = proximity_ordered(m.space, wc.classifier, x);
            if (m.method == TrainMethod::representative) {
                scores[k].raw += close ? wc.weight : 0;
                scores[k].scale += wc.weight;
            } else {
                scores[k].raw += close ? 0 : 1;
                scores[k].scale += 1;
            }
        }
    }
    return scores;
}

// Argmax of the normalized scores, compared exactly by cross-multiplication.
// A shared maximum abstains by default.
inline std::optional<int> classify(const TrainedModel& m, const Element& s,
                                   TiePolicy tie = TiePolicy::abstain) {
    const auto scores = estimate(m, s);
    if (scores.empty()) return std::nullopt;
    auto num = [&](int k) { return scores[k].scale == 0 ? 0 : scores[k].raw; };
    auto den = [&](int k) { return scores[k].scale == 0 ? 1 : scores[k].scale; };
    int best = 0;
    bool shared = false;
    for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
        const std::int64_t lhs = num(k) * den(best);
        const std::int64_t rhs = num(best) * den(k);
        if (lhs > rhs) {
            best = k;
            shared = false;
        } else if (lhs == rhs) {
            shared = true;
        }
    }
    if (shared && tie == TiePolicy::abstain) return std::nullopt;
    return best;
}

}  // namespace pold
