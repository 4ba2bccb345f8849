#pragma once

// Stratified k-fold cross-validation over a labeled object set. Fold
// assignment, training, and voting are all deterministic functions of the
// seed, so a report is reproducible bit for bit across runs and thread
// counts.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pold/classifier.hpp"
#include "pold/errors.hpp"

namespace pold {

struct EvalOptions {
    TrainMethod method = TrainMethod::representative;
    std::optional<int> max_rank;
    bool duplicate = false;
    int folds = 3;
    std::uint32_t seed = 0;
    int threads = 1;
};

struct EvalReport {
    TrainMethod method = TrainMethod::representative;
    int folds = 0;
    std::uint32_t seed = 0;
    int num_objects = 0;
    int num_features = 0;
    int num_classes = 0;
    std::vector<int> fold_size;
    std::vector<int> fold_correct;
    std::vector<int> fold_abstained;
    std::vector<double> fold_accuracy;
    double accuracy = 0.0;          // unweighted mean over folds
    double abstain_fraction = 0.0;  // abstentions over all objects
    long long timing_ms = 0;        // wall clock; not part of the report text
};

namespace detail {

// mt19937 with explicit modulo, so the split is identical on every platform.
class SplitRng {
  public:
    explicit SplitRng(std::uint32_t seed) : gen_(seed) {}
    int below(int n) {
        return static_cast<int>(gen_() % static_cast<std::uint32_t>(n));
    }

  private:
    std::mt19937 gen_;
};

inline void shuffle(std::vector<int>& v, SplitRng& rng) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
        std::swap(v[i], v[rng.below(i + 1)]);
}

}  // namespace detail

// Fold index per object. Each class is shuffled once and dealt round robin,
// so per class the fold sizes differ by at most one.
inline std::vector<int> stratified_folds(const std::vector<int>& labels,
                                         int num_classes, int folds,
                                         std::uint32_t seed) {
    if (folds < 2) throw Error("cross-validation needs at least two folds");
    detail::SplitRng rng(seed);
    std::vector<int> fold(labels.size(), -1);
    for (int k = 0; k < num_classes; ++k) {
        std::vector<int> members;
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == k) members.push_back(static_cast<int>(i));
        if (static_cast<int>(members.size()) < folds)
            throw TooFewObjectsPerClass(
                "class " + std::to_string(k) + " has " +
                std::to_string(members.size()) + " objects but " +
                std::to_string(folds) + " folds were requested");
        detail::shuffle(members, rng);
        for (size_t i = 0; i < members.size(); ++i)
            fold[members[i]] = static_cast<int>(i) % folds;
    }
    return fold;
}

inline EvalReport evaluate(const ProductSpace& space,
                           const std::vector<Element>& objects,
                           const std::vector<int>& labels,
                           const EvalOptions& opts = {}) {
    const TrainingSet all(space, objects, labels);  // validates the full set
    const auto fold =
        stratified_folds(labels, all.num_classes(), opts.folds, opts.seed);

    EvalReport report;
    report.method = opts.method;
    report.folds = opts.folds;
    report.seed = opts.seed;
    report.num_objects = static_cast<int>(objects.size());
    report.num_features = space.arity();
    report.num_classes = all.num_classes();

    const auto start = std::chrono::steady_clock::now();
    int abstained_total = 0;
    for (int f = 0; f < opts.folds; ++f) {
        std::vector<Element> train_objects;
        std::vector<int> train_labels;
        std::vector<int> held;
        for (size_t i = 0; i < objects.size(); ++i) {
            if (fold[i] == f) {
                held.push_back(static_cast<int>(i));
            } else {
                train_objects.push_back(objects[i]);
                train_labels.push_back(labels[i]);
            }
        }
        const TrainingSet ts(space, std::move(train_objects),
                             std::move(train_labels));
        const auto model = train(
            ts, {opts.method, opts.max_rank, opts.duplicate, opts.threads});

        int correct = 0, abstained = 0;
        for (int i : held) {
            const auto got = classify(model, objects[i]);
            if (!got) ++abstained;
            if (got && *got == labels[i]) ++correct;
        }
        report.fold_size.push_back(static_cast<int>(held.size()));
        report.fold_correct.push_back(correct);
        report.fold_abstained.push_back(abstained);
        report.fold_accuracy.push_back(
            held.empty() ? 0.0 : static_cast<double>(correct) / held.size());
        abstained_total += abstained;
    }
    report.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();

    double sum = 0.0;
    for (double a : report.fold_accuracy) sum += a;
    report.accuracy = sum / opts.folds;
    report.abstain_fraction =
        static_cast<double>(abstained_total) / report.num_objects;
    return report;
}

// Canonical report text. Omits timing so that equal evaluations produce
// equal bytes.
inline std::string format_report(const EvalReport& r) {
    auto fixed4 = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", x);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "evaluation\n";
    out << "method "
        << (r.method == TrainMethod::covering ? "covering" : "representative")
        << "\n";
    out << "folds " << r.folds << "\n";
    out << "seed " << r.seed << "\n";
    out << "objects " << r.num_objects << "\n";
    out << "features " << r.num_features << "\n";
    out << "classes " << r.num_classes << "\n";
    for (int f = 0; f < r.folds; ++f)
        out << "fold " << (f + 1) << " size " << r.fold_size[f] << " correct "
            << r.fold_correct[f] << " abstained " << r.fold_abstained[f]
            << " accuracy " << fixed4(r.fold_accuracy[f]) << "\n";
    out << "accuracy " << fixed4(r.accuracy) << "\n";
    out << "abstain_fraction " << fixed4(r.abstain_fraction) << "\n";
    return out.str();
}

}  // namespace pold
