#pragma once

// Text formats for order specifications, datasets, trained models, and
// dualization instances.
//
// Structured documents are line oriented: '#' starts a comment line, blank
// lines are skipped, tokens are whitespace separated. The first line names
// the document kind (orders, dataset, instance, model). Datasets may instead
// be comma separated tables whose last column is the class; those need a
// separate order spec. Labels are restricted to [A-Za-z0-9_.+-] so every
// format can embed them unquoted.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pold/classifier.hpp"
#include "pold/errors.hpp"

namespace pold {

enum class OrderKind { chain, antichain, poset, chain_auto };

inline const char* order_kind_name(OrderKind k) {
    switch (k) {
        case OrderKind::chain: return "chain";
        case OrderKind::antichain: return "antichain";
        case OrderKind::poset: return "poset";
        default: return "chain_auto";
    }
}

struct FeatureSpec {
    std::string name;
    OrderKind kind = OrderKind::antichain;
    std::vector<std::string> values;  // chains run least to greatest
    std::vector<std::pair<std::string, std::string>> edges;  // poset covers, lower first

    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct OrderSpec {
    std::vector<FeatureSpec> features;
    bool duplicate_reversed = false;

    friend bool operator==(const OrderSpec&, const OrderSpec&) = default;
};

// A parsed dataset before value resolution: everything is still a label.
struct RawDataset {
    std::vector<std::string> feature_names;
    std::string class_column = "class";
    std::vector<std::vector<std::string>> rows;  // value labels, one per feature
    std::vector<std::string> row_classes;        // class label per row
    std::vector<std::string> class_order;        // class index -> label
};

struct DualizationInstance {
    OrderSpec spec;
    std::vector<Element> rows;
};

namespace detail {

inline bool valid_label(const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s)
        if (!std::isalnum(c) && c != '_' && c != '.' && c != '+' && c != '-')
            return false;
    return true;
}

inline std::optional<long long> numeric_label(const std::string& s) {
    if (s.empty()) return std::nullopt;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return std::nullopt;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    try {
        return std::stoll(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

struct TokenLine {
    int number = 0;
    std::vector<std::string> tokens;
};

inline std::vector<TokenLine> token_lines(const std::string& text) {
    std::vector<TokenLine> out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        TokenLine tl{number, {}};
        std::string tok;
        while (ls >> tok) tl.tokens.push_back(tok);
        if (tl.tokens.empty() || tl.tokens[0][0] == '#') continue;
        out.push_back(std::move(tl));
    }
    return out;
}

// Shared shape of the structured documents: a kind tag, optional scalar
// settings, feature blocks, and row lines. Callers reject the parts their
// document may not contain.
struct RawDocument {
    std::string tag;
    bool duplicate_reversed = false;
    std::vector<FeatureSpec> features;
    std::vector<int> feature_lines;
    std::vector<std::string> declared_classes;
    std::vector<TokenLine> rows;  // tokens after "row"
};

inline RawDocument parse_document(const std::string& text,
                                  const std::string& file) {
    const auto lines = token_lines(text);
    if (lines.empty()) throw ParseError(file, 1, "empty document");
    RawDocument doc;
    doc.tag = lines[0].tokens[0];
    if (lines[0].tokens.size() != 1 ||
        (doc.tag != "orders" && doc.tag != "dataset" && doc.tag != "instance"))
        throw ParseError(file, lines[0].number,
                         "expected a document tag: orders, dataset, or instance");

    bool seen_flag = false, seen_classes = false;
    FeatureSpec current;
    int current_line = 0;
    bool open = false;
    for (size_t i = 1; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& key = l.tokens[0];
        auto fail = [&](const std::string& msg) -> ParseError {
            return ParseError(file, l.number, msg);
        };
        if (key == "feature") {
            if (open) throw fail("feature block is missing its end");
            if (l.tokens.size() != 2) throw fail("feature needs exactly one name");
            if (!valid_label(l.tokens[1]))
                throw fail("bad feature name '" + l.tokens[1] + "'");
            current = FeatureSpec{l.tokens[1], OrderKind::antichain, {}, {}};
            current_line = l.number;
            open = true;
        } else if (key == "kind") {
            if (!open) throw fail("kind outside a feature block");
            if (l.tokens.size() != 2) throw fail("kind needs exactly one value");
            const auto& k = l.tokens[1];
            if (k == "chain") current.kind = OrderKind::chain;
            else if (k == "antichain") current.kind = OrderKind::antichain;
            else if (k == "poset") current.kind = OrderKind::poset;
            else if (k == "chain_auto") current.kind = OrderKind::chain_auto;
            else throw fail("unknown kind '" + k + "'");
        } else if (key == "values") {
            if (!open) throw fail("values outside a feature block");
            if (l.tokens.size() < 2) throw fail("values needs at least one label");
            for (size_t t = 1; t < l.tokens.size(); ++t) {
                if (!valid_label(l.tokens[t]))
                    throw fail("bad value label '" + l.tokens[t] + "'");
                current.values.push_back(l.tokens[t]);
            }
        } else if (key == "edge") {
            if (!open) throw fail("edge outside a feature block");
            if (l.tokens.size() != 3) throw fail("edge needs two labels");
            current.edges.emplace_back(l.tokens[1], l.tokens[2]);
        } else if (key == "end") {
            if (!open) throw fail("end without an open feature block");
            if (l.tokens.size() != 1) throw fail("end takes no arguments");
            doc.features.push_back(std::move(current));
            doc.feature_lines.push_back(current_line);
            open = false;
        } else if (key == "duplicate_reversed") {
            if (open) throw fail("duplicate_reversed inside a feature block");
            if (doc.tag == "instance")
                throw fail("duplicate_reversed does not apply to instances");
            if (seen_flag) throw fail("duplicate_reversed given twice");
            if (l.tokens.size() != 2 ||
                (l.tokens[1] != "true" && l.tokens[1] != "false"))
                throw fail("duplicate_reversed needs true or false");
            doc.duplicate_reversed = l.tokens[1] == "true";
            seen_flag = true;
        } else if (key == "classes") {
            if (open) throw fail("classes inside a feature block");
            if (doc.tag != "dataset")
                throw fail("classes only belong in dataset documents");
            if (seen_classes) throw fail("classes given twice");
            if (l.tokens.size() < 2) throw fail("classes needs at least one label");
            for (size_t t = 1; t < l.tokens.size(); ++t) {
                if (!valid_label(l.tokens[t]))
                    throw fail("bad class label '" + l.tokens[t] + "'");
                doc.declared_classes.push_back(l.tokens[t]);
            }
            seen_classes = true;
        } else if (key == "row") {
            if (open) throw fail("row inside a feature block");
            if (doc.tag == "orders") throw fail("orders documents have no rows");
            TokenLine row{l.number, {l.tokens.begin() + 1, l.tokens.end()}};
            doc.rows.push_back(std::move(row));
        } else {
            throw fail("unknown directive '" + key + "'");
        }
    }
    if (open)
        throw ParseError(file, current_line, "feature block is missing its end");
    return doc;
}

}  // namespace detail

// The factor poset a feature describes, without greatest-element completion.
inline Poset feature_poset(const FeatureSpec& f) {
    switch (f.kind) {
        case OrderKind::chain:
            return Poset::chain(f.values);
        case OrderKind::antichain:
            return Poset::antichain(f.values);
        case OrderKind::chain_auto: {
            std::vector<std::pair<long long, std::string>> keyed;
            for (const auto& v : f.values) {
                auto num = detail::numeric_label(v);
                if (!num)
                    throw Error("chain_auto value '" + v + "' is not numeric");
                keyed.emplace_back(*num, v);
            }
            std::sort(keyed.begin(), keyed.end());
            for (size_t i = 1; i < keyed.size(); ++i)
                if (keyed[i].first == keyed[i - 1].first)
                    throw Error("chain_auto values '" + keyed[i - 1].second +
                                "' and '" + keyed[i].second +
                                "' are numerically equal");
            std::vector<std::string> sorted;
            for (auto& [num, v] : keyed) sorted.push_back(std::move(v));
            return Poset::chain(sorted);
        }
        default: {
            std::map<std::string, int> index;
            for (size_t i = 0; i < f.values.size(); ++i)
                index[f.values[i]] = static_cast<int>(i);
            if (index.size() != f.values.size())
                throw DuplicateLabel("feature " + f.name + " repeats a value");
            std::vector<std::pair<int, int>> covers;
            for (const auto& [a, b] : f.edges) {
                auto ia = index.find(a), ib = index.find(b);
                if (ia == index.end())
                    throw Error("edge endpoint '" + a + "' is not a value");
                if (ib == index.end())
                    throw Error("edge endpoint '" + b + "' is not a value");
                covers.emplace_back(ia->second, ib->second);
            }
            return Poset(f.values, std::move(covers));
        }
    }
}

// Factors exactly as specified; prefer complete_greatest for training.
inline ProductSpace order_space(const OrderSpec& spec) {
    std::vector<Poset> factors;
    for (const auto& f : spec.features) factors.push_back(feature_poset(f));
    return ProductSpace(std::move(factors));
}

// Every factor completed with a greatest element under the reserved label.
inline ProductSpace complete_greatest(const OrderSpec& spec) {
    std::vector<Poset> factors;
    for (const auto& f : spec.features) {
        for (const auto& v : f.values)
            if (v == kSyntheticTopLabel)
                throw ReservedLabelCollision("feature " + f.name + " uses " +
                                             kSyntheticTopLabel);
        factors.push_back(
            feature_poset(f).extended_with_greatest(kSyntheticTopLabel));
    }
    return ProductSpace(std::move(factors));
}

namespace detail {

// Validates every feature and rewrites it into canonical form: chain_auto
// values numerically sorted, poset edges in index order without duplicates.
inline void canonicalize(OrderSpec& spec, const std::vector<int>& lines,
                         const std::string& file) {
    if (spec.features.empty())
        throw ParseError(file, 1, "an order spec needs at least one feature");
    std::map<std::string, bool> names;
    for (size_t i = 0; i < spec.features.size(); ++i) {
        auto& f = spec.features[i];
        const int at = i < lines.size() ? lines[i] : 1;
        if (names[f.name])
            throw ParseError(file, at, "duplicate feature name '" + f.name + "'");
        names[f.name] = true;
        if (f.values.empty())
            throw ParseError(file, at, "feature " + f.name + " has no values");
        if (f.kind != OrderKind::poset && !f.edges.empty())
            throw ParseError(file, at, "edges need kind poset");
        std::optional<Poset> p;
        try {
            p = feature_poset(f);
        } catch (const Error& e) {
            throw ParseError(file, at, "feature " + f.name + ": " + e.what());
        }
        if (f.kind == OrderKind::chain_auto) f.values = p->labels();
        if (f.kind == OrderKind::poset) {
            f.edges.clear();
            for (const auto& [a, b] : p->cover_edges())
                f.edges.emplace_back(p->label(a), p->label(b));
        }
    }
}

}  // namespace detail

// Accepts an orders document, or a dataset/instance document with inline
// feature blocks.
inline OrderSpec parse_order_spec(const std::string& text,
                                  const std::string& file = "<input>") {
    auto doc = detail::parse_document(text, file);
    OrderSpec spec{std::move(doc.features), doc.duplicate_reversed};
    detail::canonicalize(spec, doc.feature_lines, file);
    return spec;
}

inline std::string serialize_order_spec(const OrderSpec& spec) {
    std::ostringstream out;
    out << "orders\n";
    out << "duplicate_reversed " << (spec.duplicate_reversed ? "true" : "false")
        << "\n";
    for (const auto& f : spec.features) {
        out << "feature " << f.name << "\n";
        out << "kind " << order_kind_name(f.kind) << "\n";
        out << "values";
        for (const auto& v : f.values) out << " " << v;
        out << "\n";
        for (const auto& [a, b] : f.edges) out << "edge " << a << " " << b << "\n";
        out << "end\n";
    }
    return out.str();
}

// FNV-1a over the canonical serialization, as 16 hex digits.
inline std::string order_fingerprint(const OrderSpec& spec) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : serialize_order_spec(spec)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        size_t a = cell.find_first_not_of(" \t");
        size_t b = cell.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline bool structured_first_line(const std::string& text, const char* tag) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string first, extra;
        if (!(ls >> first) || first[0] == '#') continue;
        return first == tag && !(ls >> extra);
    }
    return false;
}

inline int value_index(const FeatureSpec& f, const std::string& v,
                       const std::string& file, int line) {
    for (size_t i = 0; i < f.values.size(); ++i)
        if (f.values[i] == v) return static_cast<int>(i);
    throw UnknownValue(file, line,
                       "feature " + f.name + " has no value '" + v + "'");
}

}  // namespace detail

// Structured dataset documents must carry the same inline spec; CSV tables
// must match the spec's feature names column for column, class last.
inline RawDataset parse_dataset(const std::string& text, const OrderSpec& spec,
                                const std::string& file = "<input>") {
    RawDataset data;
    const int n = static_cast<int>(spec.features.size());
    for (const auto& f : spec.features) data.feature_names.push_back(f.name);

    std::vector<detail::TokenLine> rows;
    if (detail::structured_first_line(text, "dataset")) {
        auto doc = detail::parse_document(text, file);
        OrderSpec inline_spec{std::move(doc.features), doc.duplicate_reversed};
        detail::canonicalize(inline_spec, doc.feature_lines, file);
        if (!(inline_spec == spec))
            throw ParseError(file, 1,
                             "inline order spec differs from the given one");
        data.class_order = doc.declared_classes;
        rows = std::move(doc.rows);
        for (auto& r : rows)
            if (static_cast<int>(r.tokens.size()) != n + 1)
                throw ParseError(file, r.number,
                                 "row needs " + std::to_string(n) +
                                     " values and a class");
    } else {
        const auto lines = detail::token_lines(text);
        if (lines.empty()) throw ParseError(file, 1, "empty document");
        std::istringstream in(text);
        std::string line;
        int number = 0;
        bool header_done = false;
        while (std::getline(in, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            if (line[line.find_first_not_of(" \t")] == '#') continue;
            auto cells = detail::split_csv(line);
            if (!header_done) {
                if (static_cast<int>(cells.size()) != n + 1)
                    throw ParseError(file, number,
                                     "header needs " + std::to_string(n) +
                                         " feature columns and a class column");
                for (int j = 0; j < n; ++j)
                    if (cells[j] != spec.features[j].name)
                        throw ParseError(file, number,
                                         "column '" + cells[j] +
                                             "' does not match feature '" +
                                             spec.features[j].name + "'");
                if (!detail::valid_label(cells[n]))
                    throw ParseError(file, number, "bad class column name");
                data.class_column = cells[n];
                header_done = true;
                continue;
            }
            if (static_cast<int>(cells.size()) != n + 1)
                throw ParseError(file, number,
                                 "row needs " + std::to_string(n + 1) +
                                     " cells");
            detail::TokenLine row{number, std::move(cells)};
            rows.push_back(std::move(row));
        }
        if (!header_done) throw ParseError(file, number, "missing header line");
    }

    const bool declared = !data.class_order.empty();
    for (auto& r : rows) {
        for (int j = 0; j <= n; ++j)
            if (!detail::valid_label(r.tokens[j]))
                throw ParseError(file, r.number,
                                 "bad label '" + r.tokens[j] + "'");
        std::vector<std::string> values(r.tokens.begin(), r.tokens.begin() + n);
        for (int j = 0; j < n; ++j)
            detail::value_index(spec.features[j], values[j], file, r.number);
        const auto& cls = r.tokens[n];
        if (std::find(data.class_order.begin(), data.class_order.end(), cls) ==
            data.class_order.end()) {
            if (declared)
                throw ParseError(file, r.number, "undeclared class '" + cls + "'");
            data.class_order.push_back(cls);
        }
        data.rows.push_back(std::move(values));
        data.row_classes.push_back(cls);
    }
    if (data.rows.empty()) throw ParseError(file, 1, "dataset has no rows");
    return data;
}

// Unlabeled objects for prediction: a dataset document (classes ignored) or a
// CSV table, with the class column optional.
inline std::vector<Element> parse_objects(const std::string& text,
                                          const OrderSpec& spec,
                                          const std::string& file = "<input>") {
    const int n = static_cast<int>(spec.features.size());
    std::vector<std::pair<int, std::vector<std::string>>> rows;
    if (detail::structured_first_line(text, "dataset") ||
        detail::structured_first_line(text, "instance")) {
        auto doc = detail::parse_document(text, file);
        OrderSpec inline_spec{std::move(doc.features), spec.duplicate_reversed};
        detail::canonicalize(inline_spec, doc.feature_lines, file);
        if (!(inline_spec.features == spec.features))
            throw ParseError(file, 1,
                             "inline order spec differs from the given one");
        // Dataset rows may carry a class label; it is ignored here.
        const int extra = doc.tag == "dataset" ? 1 : 0;
        for (auto& r : doc.rows) {
            const int have = static_cast<int>(r.tokens.size());
            if (have < n || have > n + extra)
                throw ParseError(file, r.number,
                                 "row needs " + std::to_string(n) + " values");
            r.tokens.resize(n);
            rows.emplace_back(r.number, std::move(r.tokens));
        }
    } else {
        std::istringstream in(text);
        std::string line;
        int number = 0;
        bool header_done = false;
        bool has_class = false;
        while (std::getline(in, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            if (line[line.find_first_not_of(" \t")] == '#') continue;
            auto cells = detail::split_csv(line);
            if (!header_done) {
                if (static_cast<int>(cells.size()) != n &&
                    static_cast<int>(cells.size()) != n + 1)
                    throw ParseError(file, number, "header does not fit the spec");
                has_class = static_cast<int>(cells.size()) == n + 1;
                for (int j = 0; j < n; ++j)
                    if (cells[j] != spec.features[j].name)
                        throw ParseError(file, number,
                                         "column '" + cells[j] +
                                             "' does not match feature '" +
                                             spec.features[j].name + "'");
                header_done = true;
                continue;
            }
            if (static_cast<int>(cells.size()) != n + (has_class ? 1 : 0))
                throw ParseError(file, number, "row does not fit the header");
            cells.resize(n);
            rows.emplace_back(number, std::move(cells));
        }
        if (!header_done) throw ParseError(file, number, "missing header line");
    }
    std::vector<Element> out;
    for (const auto& [number, values] : rows) {
        Element x;
        for (int j = 0; j < n; ++j)
            x.push_back(
                detail::value_index(spec.features[j], values[j], file, number));
        out.push_back(std::move(x));
    }
    return out;
}

// Resolves labels to element indices over the completed space. Class indices
// follow the dataset's class order.
inline TrainingSet build_training_set(const RawDataset& data,
                                      const OrderSpec& spec) {
    ProductSpace space = complete_greatest(spec);
    std::vector<Element> objects;
    for (const auto& row : data.rows) {
        Element x;
        for (size_t j = 0; j < row.size(); ++j)
            x.push_back(detail::value_index(spec.features[j], row[j],
                                            "<dataset>", 0));
        objects.push_back(std::move(x));
    }
    std::vector<int> labels;
    std::vector<int> counts(data.class_order.size(), 0);
    for (const auto& cls : data.row_classes) {
        const auto it =
            std::find(data.class_order.begin(), data.class_order.end(), cls);
        if (it == data.class_order.end())
            throw Error("class '" + cls + "' is not in the class order");
        const int k =
            static_cast<int>(std::distance(data.class_order.begin(), it));
        labels.push_back(k);
        ++counts[k];
    }
    for (size_t k = 0; k < counts.size(); ++k)
        if (counts[k] == 0)
            throw Error("class '" + data.class_order[k] + "' has no objects");
    return TrainingSet(std::move(space), std::move(objects), std::move(labels));
}

// Dualization instances: feature blocks plus unlabeled rows over the
// completed space.
inline DualizationInstance parse_instance(const std::string& text,
                                          const std::string& file = "<input>") {
    auto doc = detail::parse_document(text, file);
    if (doc.tag != "instance")
        throw ParseError(file, 1, "expected an instance document");
    if (!doc.declared_classes.empty())
        throw ParseError(file, 1, "instance documents have no classes");
    OrderSpec spec{std::move(doc.features), false};
    detail::canonicalize(spec, doc.feature_lines, file);
    const int n = static_cast<int>(spec.features.size());
    DualizationInstance inst{std::move(spec), {}};
    for (const auto& r : doc.rows) {
        if (static_cast<int>(r.tokens.size()) != n)
            throw ParseError(file, r.number,
                             "row needs " + std::to_string(n) + " values");
        Element x;
        for (int j = 0; j < n; ++j)
            x.push_back(detail::value_index(inst.spec.features[j], r.tokens[j],
                                            file, r.number));
        inst.rows.push_back(std::move(x));
    }
    return inst;
}

namespace detail {

inline std::string model_feature_name(const OrderSpec& spec, int j) {
    const int n = static_cast<int>(spec.features.size());
    if (j < n) return spec.features[j].name;
    return spec.features[j - n].name + "@rev";
}

}  // namespace detail

// Model files record the method, the order-spec fingerprint, the duplication
// flag, the class order, and per class the weighted classifiers by label.
// serialize(load(text)) == text on files this writer produced.
inline std::string serialize_model(const TrainedModel& model,
                                   const OrderSpec& spec,
                                   const std::vector<std::string>& classes) {
    if (classes.size() != model.per_class.size())
        throw DimensionMismatch("class label count does not match the model");
    std::ostringstream out;
    out << "model\n";
    out << "method "
        << (model.method == TrainMethod::covering ? "covering" : "representative")
        << "\n";
    out << "orders_fingerprint " << order_fingerprint(spec) << "\n";
    out << "duplicated " << (model.duplicated ? "true" : "false") << "\n";
    out << "classes";
    for (const auto& c : classes) out << " " << c;
    out << "\n";
    for (size_t k = 0; k < classes.size(); ++k) {
        out << "class " << classes[k] << "\n";
        for (const auto& wc : model.per_class[k]) {
            out << "rule";
            for (size_t i = 0; i < wc.classifier.features.size(); ++i) {
                const int j = wc.classifier.features[i];
                out << " " << detail::model_feature_name(spec, j) << "="
                    << model.space.factor(j).label(wc.classifier.sigma[i]);
            }
            out << " weight=" << wc.weight << "\n";
        }
        out << "end\n";
    }
    return out.str();
}

struct ModelFile {
    TrainedModel model;
    std::vector<std::string> class_labels;
};

inline ModelFile load_model(const std::string& text, const OrderSpec& spec,
                            const std::string& file = "<model>") {
    const auto lines = detail::token_lines(text);
    if (lines.empty()) throw ParseError(file, 1, "empty document");
    if (lines[0].tokens.size() != 1 || lines[0].tokens[0] != "model")
        throw ParseError(file, lines[0].number, "expected a model document");

    const int n = static_cast<int>(spec.features.size());
    std::optional<TrainMethod> method;
    std::optional<bool> duplicated;
    std::optional<std::string> fingerprint;
    std::vector<std::string> classes;
    std::vector<std::vector<WeightedClassifier>> per_class;
    // Materialized once the header fixes the duplication flag.
    std::optional<ProductSpace> space;
    int open_class = -1;
    size_t next_block = 0;  // class blocks appear once each, in order

    auto resolve_feature = [&](const std::string& name, int line) {
        for (int j = 0; j < n; ++j)
            if (spec.features[j].name == name) return j;
        if (*duplicated) {
            const std::string suffix = "@rev";
            if (name.size() > suffix.size() &&
                name.compare(name.size() - suffix.size(), suffix.size(),
                             suffix) == 0) {
                const std::string stem = name.substr(0, name.size() - suffix.size());
                for (int j = 0; j < n; ++j)
                    if (spec.features[j].name == stem) return n + j;
            }
        }
        throw ParseError(file, line, "unknown feature '" + name + "'");
    };

    for (size_t i = 1; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& key = l.tokens[0];
        auto fail = [&](const std::string& msg) -> ParseError {
            return ParseError(file, l.number, msg);
        };
        if (key == "method") {
            if (l.tokens.size() != 2) throw fail("method needs one value");
            if (l.tokens[1] == "representative")
                method = TrainMethod::representative;
            else if (l.tokens[1] == "covering")
                method = TrainMethod::covering;
            else
                throw fail("unknown method '" + l.tokens[1] + "'");
        } else if (key == "orders_fingerprint") {
            if (l.tokens.size() != 2)
                throw fail("orders_fingerprint needs one value");
            if (l.tokens[1] != order_fingerprint(spec))
                throw fail("model was trained under a different order spec");
            fingerprint = l.tokens[1];
        } else if (key == "duplicated") {
            if (l.tokens.size() != 2 ||
                (l.tokens[1] != "true" && l.tokens[1] != "false"))
                throw fail("duplicated needs true or false");
            duplicated = l.tokens[1] == "true";
        } else if (key == "classes") {
            if (!classes.empty()) throw fail("classes given twice");
            if (l.tokens.size() < 2) throw fail("classes needs at least one label");
            classes.assign(l.tokens.begin() + 1, l.tokens.end());
            per_class.resize(classes.size());
        } else if (key == "class") {
            if (open_class >= 0) throw fail("class block is missing its end");
            if (!method || !duplicated || !fingerprint || classes.empty())
                throw fail("class blocks come after method, orders_fingerprint, "
                           "duplicated, and classes");
            if (l.tokens.size() != 2) throw fail("class needs one label");
            if (next_block >= classes.size() || classes[next_block] != l.tokens[1])
                throw fail("class blocks follow the declared order");
            if (!space) {
                ProductSpace base = complete_greatest(spec);
                space = *duplicated ? duplicated_space(base) : std::move(base);
            }
            open_class = static_cast<int>(next_block++);
        } else if (key == "rule") {
            if (open_class < 0) throw fail("rule outside a class block");
            WeightedClassifier wc;
            bool weighted = false;
            for (size_t t = 1; t < l.tokens.size(); ++t) {
                const auto& tok = l.tokens[t];
                const auto eq = tok.find('=');
                if (eq == std::string::npos)
                    throw fail("rule tokens look like name=value");
                const std::string name = tok.substr(0, eq);
                const std::string value = tok.substr(eq + 1);
                if (name == "weight") {
                    if (t + 1 != l.tokens.size())
                        throw fail("weight comes last in a rule");
                    auto w = detail::numeric_label(value);
                    if (!w || *w < 1) throw fail("bad weight '" + value + "'");
                    wc.weight = *w;
                    weighted = true;
                } else {
                    const int j = resolve_feature(name, l.number);
                    if (!wc.classifier.features.empty() &&
                        wc.classifier.features.back() >= j)
                        throw fail("rule features must be strictly increasing");
                    auto v = space->factor(j).index_of(value);
                    if (!v)
                        throw UnknownValue(file, l.number,
                                           "feature " + name +
                                               " has no value '" + value + "'");
                    wc.classifier.features.push_back(j);
                    wc.classifier.sigma.push_back(*v);
                }
            }
            if (!weighted) throw fail("rule is missing its weight");
            per_class[open_class].push_back(std::move(wc));
        } else if (key == "end") {
            if (open_class < 0) throw fail("end without an open class block");
            open_class = -1;
        } else {
            throw fail("unknown directive '" + key + "'");
        }
    }
    if (open_class >= 0)
        throw ParseError(file, lines.back().number,
                         "class block is missing its end");
    if (!method || !duplicated || !fingerprint || classes.empty())
        throw ParseError(file, lines.back().number, "model document is incomplete");
    if (next_block != classes.size())
        throw ParseError(file, lines.back().number,
                         "every declared class needs a block");

    TrainedModel model{*method, std::move(*space), std::move(per_class),
                       *fingerprint, *duplicated};
    return ModelFile{std::move(model), std::move(classes)};
}

}  // namespace pold
