// Command line front end: train and apply classifiers, cross-validate,
// enumerate coverings for standalone instances, and spot-check the
// enumerator against the exhaustive oracle.
//
// Exit codes: 0 success, 2 validation or parse failure, 3 oracle mismatch.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pold/dataio.hpp"
#include "pold/evaluate.hpp"

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw pold::Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw pold::Error("cannot write " + path);
    out << text;
}

std::string fixed4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

pold::TrainMethod parse_method(const std::string& name) {
    return name == "covering" ? pold::TrainMethod::covering
                              : pold::TrainMethod::representative;
}

// The order spec comes from --orders when given, otherwise from the data
// document itself (structured datasets embed their feature blocks).
pold::OrderSpec resolve_spec(const std::string& orders_path,
                             const std::string& data_path,
                             const std::string& data_text) {
    if (!orders_path.empty())
        return pold::parse_order_spec(read_input(orders_path), orders_path);
    return pold::parse_order_spec(data_text, data_path);
}

struct TrainArgs {
    std::string data, orders, method = "representative", out;
    int max_rank = 0;
    int threads = 1;
    bool duplicate = false;
};

int run_train(const TrainArgs& a) {
    const auto data_text = read_input(a.data);
    const auto spec = resolve_spec(a.orders, a.data, data_text);
    const auto raw = pold::parse_dataset(data_text, spec, a.data);
    const auto ts = pold::build_training_set(raw, spec);
    pold::TrainOptions opts;
    opts.method = parse_method(a.method);
    if (a.max_rank > 0) opts.max_rank = a.max_rank;
    opts.duplicate = a.duplicate || spec.duplicate_reversed;
    opts.threads = a.threads;
    const auto model = pold::train(ts, opts);
    write_output(a.out, pold::serialize_model(model, spec, raw.class_order));
    return 0;
}

struct PredictArgs {
    std::string model, orders, data, out, on_tie = "abstain";
};

int run_predict(const PredictArgs& a) {
    const auto spec =
        pold::parse_order_spec(read_input(a.orders), a.orders);
    const auto mf = pold::load_model(read_input(a.model), spec, a.model);
    const auto data_text = read_input(a.data);
    const auto objects = pold::parse_objects(data_text, spec, a.data);
    const auto tie = a.on_tie == "first" ? pold::TiePolicy::lowest_index
                                         : pold::TiePolicy::abstain;
    std::ostringstream out;
    for (const auto& s : objects) {
        const auto scores = pold::estimate(mf.model, s);
        const auto got = pold::classify(mf.model, s, tie);
        out << (got ? mf.class_labels[*got] : std::string("abstain"));
        for (size_t k = 0; k < scores.size(); ++k)
            out << " " << mf.class_labels[k] << "="
                << fixed4(scores[k].normalized());
        out << "\n";
    }
    write_output(a.out, out.str());
    return 0;
}

struct EvaluateArgs {
    std::string data, orders, method = "representative", out;
    int max_rank = 0;
    int folds = 3;
    std::uint32_t seed = 0;
    int threads = 1;
    bool duplicate = false;
};

int run_evaluate(const EvaluateArgs& a) {
    const auto data_text = read_input(a.data);
    const auto spec = resolve_spec(a.orders, a.data, data_text);
    const auto raw = pold::parse_dataset(data_text, spec, a.data);
    const auto ts = pold::build_training_set(raw, spec);
    pold::EvalOptions opts;
    opts.method = parse_method(a.method);
    if (a.max_rank > 0) opts.max_rank = a.max_rank;
    opts.duplicate = a.duplicate || spec.duplicate_reversed;
    opts.folds = a.folds;
    opts.seed = a.seed;
    opts.threads = a.threads;
    const auto report =
        pold::evaluate(ts.space(), ts.objects(), ts.labels(), opts);
    write_output(a.out, pold::format_report(report));
    std::cerr << "timing_ms " << report.timing_ms << "\n";
    return 0;
}

struct DualizeArgs {
    std::string instance, out;
    int max_rank = 0;
    int threads = 1;
};

int run_dualize(const DualizeArgs& a) {
    const auto inst = pold::parse_instance(read_input(a.instance), a.instance);
    const auto space = pold::complete_greatest(inst.spec);
    const pold::CoveringMatrix matrix(space, inst.rows);
    pold::EnumerationOptions opts;
    if (a.max_rank > 0) opts.max_rank = a.max_rank;
    opts.threads = a.threads;
    std::ostringstream out;
    for (const auto& c : pold::enumerate_coverings(matrix, opts)) {
        out << "covering";
        for (size_t i = 0; i < c.columns.size(); ++i)
            out << " " << inst.spec.features[c.columns[i]].name << "="
                << space.factor(c.columns[i]).label(c.sigma[i]);
        out << "\n";
    }
    write_output(a.out, out.str());
    return 0;
}

struct CheckArgs {
    int count = 200;
    std::uint32_t seed = 0;
    int max_features = 4;
    int max_values = 4;
    int max_rows = 12;
};

class CheckRng {
  public:
    explicit CheckRng(std::uint32_t seed) : gen_(seed) {}
    int below(int n) {
        return static_cast<int>(gen_() % static_cast<std::uint32_t>(n));
    }

  private:
    std::mt19937 gen_;
};

pold::Poset random_complete_factor(CheckRng& rng, int max_values) {
    const int k = 1 + rng.below(max_values);
    std::vector<std::string> labels;
    for (int i = 0; i < k; ++i) labels.push_back("v" + std::to_string(i));
    std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (rng.below(2) == 0) reach[i][j] = true;
    for (int m = 0; m < k; ++m)
        for (int i = 0; i < m; ++i)
            for (int j = m + 1; j < k; ++j)
                if (reach[i][m] && reach[m][j]) reach[i][j] = true;
    std::vector<std::pair<int, int>> covers;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            if (!reach[i][j]) continue;
            bool direct = true;
            for (int m = i + 1; m < j && direct; ++m)
                if (reach[i][m] && reach[m][j]) direct = false;
            if (direct) covers.emplace_back(i, j);
        }
    return pold::complete_greatest(pold::Poset(labels, std::move(covers)));
}

void dump_instance(const pold::ProductSpace& space,
                   const std::vector<pold::Element>& rows) {
    for (int j = 0; j < space.arity(); ++j) {
        const auto& f = space.factor(j);
        std::cerr << "  factor " << j << ":";
        for (const auto& [a, b] : f.cover_edges())
            std::cerr << " " << f.label(a) << "<" << f.label(b);
        std::cerr << " (" << f.size() << " values)\n";
    }
    for (const auto& r : rows) {
        std::cerr << "  row";
        for (size_t j = 0; j < r.size(); ++j)
            std::cerr << " " << space.factor(static_cast<int>(j)).label(r[j]);
        std::cerr << "\n";
    }
}

int run_oracle_check(const CheckArgs& a) {
    CheckRng rng(a.seed);
    for (int t = 0; t < a.count; ++t) {
        const int n = 1 + rng.below(a.max_features);
        std::vector<pold::Poset> factors;
        for (int j = 0; j < n; ++j)
            factors.push_back(random_complete_factor(rng, a.max_values));
        const pold::ProductSpace space(std::move(factors));
        const int m = rng.below(a.max_rows + 1);
        std::vector<pold::Element> rows;
        for (int i = 0; i < m; ++i) {
            pold::Element r;
            for (int j = 0; j < n; ++j)
                r.push_back(rng.below(space.factor(j).size()));
            rows.push_back(std::move(r));
        }

        const pold::CoveringMatrix matrix(space, rows);
        const auto sols = pold::enumerate_coverings(matrix);
        std::vector<pold::Element> embedded;
        for (const auto& c : sols)
            embedded.push_back(pold::covering_to_element(space, c));
        std::sort(embedded.begin(), embedded.end());
        const auto oracle = space.brute_force_max_independent(rows);
        if (embedded != oracle) {
            std::cerr << "oracle mismatch on instance " << t << " (seed "
                      << a.seed << "): enumerator " << embedded.size()
                      << " solutions, oracle " << oracle.size() << "\n";
            dump_instance(space, rows);
            return 3;
        }

        pold::EnumerationOptions split;
        split.threads = 2 + rng.below(3);
        if (pold::enumerate_coverings(matrix, split) != sols) {
            std::cerr << "partitioned enumeration diverged on instance " << t
                      << " (seed " << a.seed << ")\n";
            dump_instance(space, rows);
            return 3;
        }
    }
    std::cout << "checked " << a.count << " instances, all solution sets match\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rule-based classification over partially ordered feature values"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train a classifier model");
    train->add_option("--data", train_args.data, "Training data file")
        ->required();
    train->add_option("--orders", train_args.orders,
                      "Order spec file (defaults to the data document)");
    train->add_option("--method", train_args.method, "Training method")
        ->check(CLI::IsMember({"representative", "covering"}));
    train->add_option("--max-rank", train_args.max_rank,
                      "Bound on selected features per rule");
    train->add_flag("--duplicate", train_args.duplicate,
                    "Append reversed copies of all features");
    train->add_option("--threads", train_args.threads, "Enumeration threads");
    train->add_option("--out", train_args.out, "Model output file");

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "Classify objects");
    predict->add_option("--model", predict_args.model, "Model file")
        ->required();
    predict->add_option("--orders", predict_args.orders, "Order spec file")
        ->required();
    predict->add_option("--data", predict_args.data, "Objects file")
        ->required();
    predict->add_option("--on-tie", predict_args.on_tie, "Tie handling")
        ->check(CLI::IsMember({"abstain", "first"}));
    predict->add_option("--out", predict_args.out, "Predictions output file");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Stratified cross-validation on labeled data");
    evaluate->add_option("--data", eval_args.data, "Labeled data file")
        ->required();
    evaluate->add_option("--orders", eval_args.orders,
                         "Order spec file (defaults to the data document)");
    evaluate->add_option("--method", eval_args.method, "Training method")
        ->check(CLI::IsMember({"representative", "covering"}));
    evaluate->add_option("--max-rank", eval_args.max_rank,
                         "Bound on selected features per rule");
    evaluate->add_flag("--duplicate", eval_args.duplicate,
                       "Append reversed copies of all features");
    evaluate->add_option("--folds", eval_args.folds, "Number of folds");
    evaluate->add_option("--seed", eval_args.seed, "Shuffle seed");
    evaluate->add_option("--threads", eval_args.threads, "Enumeration threads");
    evaluate->add_option("--out", eval_args.out, "Report output file");

    DualizeArgs dual_args;
    auto* dualize = app.add_subcommand(
        "dualize", "Enumerate ordered irredundant coverings of an instance");
    dualize->add_option("--instance", dual_args.instance, "Instance file")
        ->required();
    dualize->add_option("--max-rank", dual_args.max_rank,
                        "Bound on selected columns");
    dualize->add_option("--threads", dual_args.threads, "Enumeration threads");
    dualize->add_option("--out", dual_args.out, "Coverings output file");

    CheckArgs check_args;
    auto* check = app.add_subcommand(
        "oracle-check", "Compare the enumerator against exhaustive search");
    check->add_option("--count", check_args.count, "Instances to check");
    check->add_option("--seed", check_args.seed, "Base seed");
    check->add_option("--max-features", check_args.max_features,
                      "Largest arity to draw");
    check->add_option("--max-values", check_args.max_values,
                      "Largest factor size to draw");
    check->add_option("--max-rows", check_args.max_rows,
                      "Largest row count to draw");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return run_train(train_args);
        if (predict->parsed()) return run_predict(predict_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (dualize->parsed()) return run_dualize(dual_args);
        if (check->parsed()) return run_oracle_check(check_args);
    } catch (const pold::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
