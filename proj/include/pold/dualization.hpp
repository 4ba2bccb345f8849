#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "pold/errors.hpp"
#include "pold/product_space.hpp"

namespace pold {

// Column subset H with one prescribed value per selected column.
// Well-formed when columns are strictly increasing and no value is the
// greatest element of its factor.
struct SigmaCovering {
    std::vector<int> columns;
    std::vector<int> sigma;

    bool operator==(const SigmaCovering& o) const {
        return columns == o.columns && sigma == o.sigma;
    }
    // Canonical order: lexicographic by columns, then by value indices.
    bool operator<(const SigmaCovering& o) const {
        if (columns != o.columns) return columns < o.columns;
        return sigma < o.sigma;
    }
};

// Matrix whose rows are elements of a product space.
class CoveringMatrix {
public:
    CoveringMatrix(ProductSpace space, std::vector<Element> rows)
        : space_(std::move(space)), rows_(std::move(rows)) {
        for (const auto& r : rows_) space_.check_element(r);
    }

    const ProductSpace& space() const { return space_; }
    const std::vector<Element>& rows() const { return rows_; }

private:
    ProductSpace space_;
    std::vector<Element> rows_;
};

namespace detail {

// Bitset over matrix rows; universe size fixed at construction.
class RowSet {
public:
    RowSet() : nbits_(0) {}
    explicit RowSet(int nbits, bool fill = false)
        : nbits_(nbits), words_((nbits + 63) / 64, fill ? ~std::uint64_t(0) : 0) {
        if (fill) trim();
    }

    void set(int i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    RowSet& operator&=(const RowSet& o) {
        for (size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }

    RowSet intersect(const RowSet& o) const {
        RowSet out = *this;
        out &= o;
        return out;
    }

    RowSet subtract(const RowSet& o) const {
        RowSet out = *this;
        for (size_t k = 0; k < words_.size(); ++k) out.words_[k] &= ~o.words_[k];
        return out;
    }

    RowSet complement() const {
        RowSet out = *this;
        for (auto& w : out.words_) w = ~w;
        out.trim();
        return out;
    }

    RowSet unite(const RowSet& o) const {
        RowSet out = *this;
        for (size_t k = 0; k < words_.size(); ++k) out.words_[k] |= o.words_[k];
        return out;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    bool intersects(const RowSet& o) const {
        for (size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & o.words_[k]) return true;
        return false;
    }

    int count() const {
        int c = 0;
        for (auto w : words_) c += __builtin_popcountll(w);
        return c;
    }

private:
    void trim() {
        if (nbits_ % 64 && !words_.empty())
            words_.back() &= (std::uint64_t(1) << (nbits_ % 64)) - 1;
    }

    int nbits_;
    std::vector<std::uint64_t> words_;
};

}  // namespace detail

inline void validate_covering(const ProductSpace& sp, const SigmaCovering& c) {
    if (c.columns.size() != c.sigma.size())
        throw DimensionMismatch("covering has mismatched column and value counts");
    int prev = -1;
    for (size_t i = 0; i < c.columns.size(); ++i) {
        const int j = c.columns[i];
        if (j < 0 || j >= sp.arity())
            throw InvalidElement("covering column " + std::to_string(j) + " out of range");
        if (j <= prev)
            throw InvalidElement("covering columns must be strictly increasing");
        prev = j;
        const auto& f = sp.factor(j);
        if (c.sigma[i] < 0 || c.sigma[i] >= f.size())
            throw InvalidElement("covering value out of range for column " +
                                 std::to_string(j));
        if (f.greatest() && *f.greatest() == c.sigma[i])
            throw InvalidElement("covering value may not be the greatest element");
    }
}

// Decides the two defining conditions directly from the definition:
// (1) for every selected column i and every upper cover y of sigma_i, some
//     matrix row beta has beta_i in Q2(sigma_i, y) and beta_t <= sigma_t for
//     every other selected t;
// (2) no matrix row restricted to the selected columns precedes sigma
//     (equality included).
inline bool is_ordered_irredundant_covering(const CoveringMatrix& m,
                                            const SigmaCovering& c) {
    const auto& sp = m.space();
    validate_covering(sp, c);
    const int r = static_cast<int>(c.columns.size());

    for (const auto& row : m.rows()) {
        bool below = true;
        for (int t = 0; t < r && below; ++t)
            if (!sp.factor(c.columns[t]).leq(row[c.columns[t]], c.sigma[t])) below = false;
        if (below) return false;
    }

    for (int i = 0; i < r; ++i) {
        const auto& f = sp.factor(c.columns[i]);
        for (int y : f.upper_covers(c.sigma[i])) {
            bool witnessed = false;
            for (const auto& row : m.rows()) {
                const int b = row[c.columns[i]];
                if (f.leq(b, c.sigma[i]) || !f.leq(b, y)) continue;
                bool others = true;
                for (int t = 0; t < r && others; ++t)
                    if (t != i &&
                        !sp.factor(c.columns[t]).leq(row[c.columns[t]], c.sigma[t]))
                        others = false;
                if (others) {
                    witnessed = true;
                    break;
                }
            }
            if (!witnessed) return false;
        }
    }
    return true;
}

// Chain specialization of condition (1): every factor is a chain, so
// Q1(sigma_i) is at most one element and Q2(sigma_i, y) = {y}; the witness row
// must carry exactly the successor of sigma_i. Cross-check for the general
// checker; requires all factors to be chains.
inline bool is_ordered_irredundant_covering_chain(const CoveringMatrix& m,
                                                  const SigmaCovering& c) {
    const auto& sp = m.space();
    for (const auto& f : sp.factors())
        if (!f.is_chain()) throw Error("chain-specialized checker needs all-chain factors");
    validate_covering(sp, c);
    const int r = static_cast<int>(c.columns.size());

    for (const auto& row : m.rows()) {
        bool below = true;
        for (int t = 0; t < r && below; ++t)
            if (!sp.factor(c.columns[t]).leq(row[c.columns[t]], c.sigma[t])) below = false;
        if (below) return false;
    }

    for (int i = 0; i < r; ++i) {
        const auto& f = sp.factor(c.columns[i]);
        const auto& covers = f.upper_covers(c.sigma[i]);
        if (covers.empty()) continue;
        const int successor = covers.front();
        bool witnessed = false;
        for (const auto& row : m.rows()) {
            if (row[c.columns[i]] != successor) continue;
            bool others = true;
            for (int t = 0; t < r && others; ++t)
                if (t != i && !sp.factor(c.columns[t]).leq(row[c.columns[t]], c.sigma[t]))
                    others = false;
            if (others) {
                witnessed = true;
                break;
            }
        }
        if (!witnessed) return false;
    }
    return true;
}

struct EnumerationOptions {
    std::optional<int> max_rank;  // bound on |H|; unset = unbounded
    int threads = 1;              // > 1 partitions the search tree
    bool sort_output = true;      // canonical order; false keeps discovery order
};

namespace detail {

// Depth-first search over per-column decisions (skip, or select a value).
// State carried down a branch:
//   alive      rows whose restriction to the selected columns precedes sigma
//              so far; condition (2) holds at a leaf iff alive is empty;
//   witnesses  one row set per (selected column, upper cover): rows that can
//              witness condition (1); filtered as later columns are selected;
//              a branch dies the moment any of them empties.
// Rows that stay alive but can no longer be excluded by any remaining column
// are detected through killable_suffix and prune the branch early.
class CoveringSearch {
public:
    CoveringSearch(const CoveringMatrix& m, std::optional<int> max_rank)
        : sp_(m.space()),
          n_(sp_.arity()),
          nrows_(static_cast<int>(m.rows().size())),
          max_rank_(std::max(0, max_rank.value_or(n_))) {
        leq_.resize(n_);
        allowed_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            const auto& f = sp_.factor(j);
            leq_[j].resize(f.size(), RowSet(nrows_));
            for (int v = 0; v < f.size(); ++v)
                for (int r = 0; r < nrows_; ++r)
                    if (f.leq(m.rows()[r][j], v)) leq_[j][v].set(r);
            for (int v = 0; v < f.size(); ++v)
                if (!f.greatest() || *f.greatest() != v) allowed_[j].push_back(v);
        }
        unkillable_suffix_.assign(n_ + 1, RowSet(nrows_, true));
        for (int j = n_ - 1; j >= 0; --j) {
            RowSet killable_here(nrows_);
            for (int v : allowed_[j])
                killable_here = killable_here.unite(leq_[j][v].complement());
            unkillable_suffix_[j] = unkillable_suffix_[j + 1].subtract(killable_here);
        }
    }

    // Runs the search below a fixed decision prefix. prefix[j] = -1 skips
    // column j, otherwise selects that value. Returns false when the sink
    // requested a stop.
    bool run(const std::vector<int>& prefix,
             const std::function<bool(const SigmaCovering&)>& sink) {
        sink_ = &sink;
        stopped_ = false;
        columns_.clear();
        sigma_.clear();
        alive_stack_.assign(1, RowSet(nrows_, true));
        witnesses_.clear();
        witness_stack_.clear();
        bool viable = true;
        int depth = 0;
        for (; depth < static_cast<int>(prefix.size()); ++depth) {
            if (!prune_ok(depth)) {
                viable = false;
                break;
            }
            if (prefix[depth] >= 0 && !try_select(depth, prefix[depth])) {
                viable = false;
                break;
            }
        }
        if (viable) dfs(depth);
        // Unwind selections made while laying down the prefix.
        while (!columns_.empty()) undo_select();
        return !stopped_;
    }

    const std::vector<std::vector<int>>& allowed_values() const { return allowed_; }

private:
    bool prune_ok(int depth) const {
        // A row still alive with no chance of exclusion later violates (2).
        return !alive_stack_.back().intersects(unkillable_suffix_[depth]);
    }

    void dfs(int depth) {
        if (stopped_) return;
        if (!prune_ok(depth)) return;
        if (depth == n_) {
            if (alive_stack_.back().none()) emit();
            return;
        }
        dfs(depth + 1);
        if (stopped_) return;
        if (static_cast<int>(columns_.size()) < max_rank_) {
            for (int v : allowed_[depth]) {
                if (try_select(depth, v)) {
                    dfs(depth + 1);
                    undo_select();
                    if (stopped_) return;
                }
            }
        }
    }

    // Attempts to extend the current branch by selecting value v at column j.
    // On success pushes the new state; on failure (an emptied witness set)
    // leaves the state unchanged.
    bool try_select(int j, int v) {
        const RowSet& prior = alive_stack_.back();
        const RowSet& keep = leq_[j][v];

        std::vector<RowSet> new_witnesses;
        new_witnesses.reserve(witnesses_.size());
        for (const auto& w : witnesses_) {
            RowSet filtered = w.intersect(keep);
            if (filtered.none()) return false;
            new_witnesses.push_back(std::move(filtered));
        }
        for (int y : sp_.factor(j).upper_covers(v)) {
            RowSet w = prior.intersect(leq_[j][y].subtract(leq_[j][v]));
            if (w.none()) return false;
            new_witnesses.push_back(std::move(w));
        }

        witness_stack_.push_back(std::move(witnesses_));
        witnesses_ = std::move(new_witnesses);
        alive_stack_.push_back(prior.intersect(keep));
        columns_.push_back(j);
        sigma_.push_back(v);
        return true;
    }

    void undo_select() {
        alive_stack_.pop_back();
        witnesses_ = std::move(witness_stack_.back());
        witness_stack_.pop_back();
        columns_.pop_back();
        sigma_.pop_back();
    }

    void emit() {
        SigmaCovering c{columns_, sigma_};
        if (!(*sink_)(c)) stopped_ = true;
    }

    const ProductSpace& sp_;
    int n_;
    int nrows_;
    int max_rank_;
    std::vector<std::vector<RowSet>> leq_;      // leq_[j][v]: rows with row_j <= v
    std::vector<std::vector<int>> allowed_;     // non-greatest values per column
    std::vector<RowSet> unkillable_suffix_;     // rows no column >= j can exclude

    std::vector<int> columns_, sigma_;
    std::vector<RowSet> alive_stack_;
    std::vector<RowSet> witnesses_;
    std::vector<std::vector<RowSet>> witness_stack_;
    const std::function<bool(const SigmaCovering&)>* sink_ = nullptr;
    bool stopped_ = false;
};

}  // namespace detail

// Streams every ordered irredundant sigma-covering of m (rank-bounded when
// max_rank is set) in discovery order. The sink returns false to stop early.
inline void enumerate_coverings_stream(
    const CoveringMatrix& m, const std::function<bool(const SigmaCovering&)>& sink,
    std::optional<int> max_rank = {}) {
    detail::CoveringSearch search(m, max_rank);
    search.run({}, sink);
}

namespace detail {

// Decision prefixes at a fixed depth, in the order dfs would reach them.
inline void build_prefixes(const std::vector<std::vector<int>>& allowed, int depth,
                           std::optional<int> max_rank, std::vector<int>& cur,
                           std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == depth) {
        out.push_back(cur);
        return;
    }
    cur.push_back(-1);
    build_prefixes(allowed, depth, max_rank, cur, out);
    cur.pop_back();
    int selected = 0;
    for (int d : cur)
        if (d >= 0) ++selected;
    if (!max_rank || selected < *max_rank) {
        for (int v : allowed[cur.size()]) {
            cur.push_back(v);
            build_prefixes(allowed, depth, max_rank, cur, out);
            cur.pop_back();
        }
    }
}

}  // namespace detail

// Full enumeration. With threads > 1 the tree is split by decision prefixes
// and partitions run concurrently; output is identical to the
// single-threaded run in all modes.
inline std::vector<SigmaCovering> enumerate_coverings(const CoveringMatrix& m,
                                                      EnumerationOptions opts = {}) {
    std::vector<SigmaCovering> out;
    if (opts.threads <= 1) {
        enumerate_coverings_stream(
            m,
            [&](const SigmaCovering& c) {
                out.push_back(c);
                return true;
            },
            opts.max_rank);
    } else {
        const int n = m.space().arity();
        detail::CoveringSearch probe(m, opts.max_rank);
        int depth = 0;
        size_t width = 1;
        while (depth < n && width < static_cast<size_t>(opts.threads) * 4) {
            width *= 1 + probe.allowed_values()[depth].size();
            ++depth;
        }
        std::vector<std::vector<int>> prefixes;
        {
            std::vector<int> cur;
            detail::build_prefixes(probe.allowed_values(), depth, opts.max_rank, cur,
                                   prefixes);
        }
        std::vector<std::vector<SigmaCovering>> results(prefixes.size());
        std::vector<std::thread> workers;
        std::atomic<size_t> next{0};
        for (int t = 0; t < opts.threads; ++t)
            workers.emplace_back([&]() {
                detail::CoveringSearch search(m, opts.max_rank);
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= prefixes.size()) break;
                    search.run(prefixes[i], [&](const SigmaCovering& c) {
                        results[i].push_back(c);
                        return true;
                    });
                }
            });
        for (auto& w : workers) w.join();
        for (auto& part : results)
            for (auto& c : part) out.push_back(std::move(c));
    }
    if (opts.sort_output) std::sort(out.begin(), out.end());
    return out;
}

// Fills non-selected components with their factor's greatest element.
inline Element covering_to_element(const ProductSpace& sp, const SigmaCovering& c) {
    validate_covering(sp, c);
    Element x(sp.arity());
    size_t next = 0;
    for (int j = 0; j < sp.arity(); ++j) {
        if (next < c.columns.size() && c.columns[next] == j) {
            x[j] = c.sigma[next++];
        } else {
            auto g = sp.factor(j).greatest();
            if (!g)
                throw NoGreatestElement("factor " + std::to_string(j) +
                                        " has no greatest element to fill");
            x[j] = *g;
        }
    }
    return x;
}

// Inverse of covering_to_element: selects exactly the non-greatest components.
inline SigmaCovering element_to_covering(const ProductSpace& sp, const Element& x) {
    sp.check_element(x);
    SigmaCovering c;
    for (int j = 0; j < sp.arity(); ++j) {
        auto g = sp.factor(j).greatest();
        if (g && *g == x[j]) continue;
        c.columns.push_back(j);
        c.sigma.push_back(x[j]);
    }
    return c;
}

// Classical irreducible coverings of a 0/1 matrix: column sets hitting a 1 in
// every row, minimal under inclusion. Implemented without any poset
// machinery; serves as the independent cross-check for the Boolean case.
inline std::vector<std::vector<int>> irreducible_boolean_coverings(
    const std::vector<std::vector<int>>& rows) {
    const int ncols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != ncols)
            throw DimensionMismatch("ragged boolean matrix");
        for (int v : r)
            if (v != 0 && v != 1) throw InvalidElement("boolean matrix entry not 0/1");
    }
    std::vector<std::uint32_t> supports;
    supports.reserve(rows.size());
    for (const auto& r : rows) {
        std::uint32_t s = 0;
        for (int j = 0; j < ncols; ++j)
            if (r[j]) s |= std::uint32_t(1) << j;
        supports.push_back(s);
    }
    std::vector<std::vector<int>> out;
    for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << ncols); ++mask) {
        bool covers = true;
        for (auto s : supports)
            if (!(s & mask)) {
                covers = false;
                break;
            }
        if (!covers) continue;
        bool minimal = true;
        for (int j = 0; j < ncols && minimal; ++j) {
            if (!(mask >> j & 1)) continue;
            const std::uint32_t reduced = mask & ~(std::uint32_t(1) << j);
            bool still = true;
            for (auto s : supports)
                if (!(s & reduced)) {
                    still = false;
                    break;
                }
            if (still) minimal = false;
        }
        if (!minimal) continue;
        std::vector<int> cols;
        for (int j = 0; j < ncols; ++j)
            if (mask >> j & 1) cols.push_back(j);
        out.push_back(std::move(cols));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pold
