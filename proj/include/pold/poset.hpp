#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pold/errors.hpp"

namespace pold {

// Finite poset given by its Hasse diagram. Immutable after construction.
// Element identity is the positional index; labels are presentation only.
class Poset {
public:
    // `covers` lists (lower, upper) pairs; each must be an immediate cover.
    // The full order is the reflexive-transitive closure of the edges.
    Poset(std::vector<std::string> labels, std::vector<std::pair<int, int>> covers)
        : labels_(std::move(labels)), covers_(std::move(covers)) {
        const int n = static_cast<int>(labels_.size());
        if (n == 0) throw InvalidElement("poset needs at least one element");
        {
            auto sorted = labels_;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw DuplicateLabel("element labels must be distinct");
        }
        for (auto& [a, b] : covers_) {
            check_index(a);
            check_index(b);
            if (a == b) throw CycleDetected("self-loop on element " + labels_[a]);
        }
        std::sort(covers_.begin(), covers_.end());
        covers_.erase(std::unique(covers_.begin(), covers_.end()), covers_.end());

        up_.assign(n, {});
        std::vector<int> indeg(n, 0);
        for (auto& [a, b] : covers_) {
            up_[a].push_back(b);
            ++indeg[b];
        }
        // Kahn topological sort; leftover vertices mean a directed cycle.
        std::vector<int> order;
        order.reserve(n);
        for (int v = 0; v < n; ++v)
            if (indeg[v] == 0) order.push_back(v);
        for (size_t head = 0; head < order.size(); ++head)
            for (int w : up_[order[head]])
                if (--indeg[w] == 0) order.push_back(w);
        if (static_cast<int>(order.size()) != n)
            throw CycleDetected("cover relation contains a cycle");

        // Closure along reverse topological order: leq_[a] accumulates successors.
        leq_.assign(n, std::vector<char>(n, 0));
        for (int i = n - 1; i >= 0; --i) {
            const int v = order[i];
            leq_[v][v] = 1;
            for (int w : up_[v])
                for (int t = 0; t < n; ++t)
                    if (leq_[w][t]) leq_[v][t] = 1;
        }
        for (auto& [a, b] : covers_)
            for (int c = 0; c < n; ++c)
                if (c != a && c != b && leq_[a][c] && leq_[c][b])
                    throw NonImmediateCover("edge " + labels_[a] + " < " + labels_[b] +
                                            " is implied transitively");
        for (auto& us : up_) std::sort(us.begin(), us.end());

        // A finite poset has a greatest element iff its maximal element is unique.
        int maximal = -1, count = 0;
        for (int v = 0; v < n; ++v)
            if (up_[v].empty()) {
                maximal = v;
                ++count;
            }
        if (count == 1) greatest_ = maximal;
    }

    static Poset chain(std::vector<std::string> labels) {
        std::vector<std::pair<int, int>> covers;
        for (int i = 0; i + 1 < static_cast<int>(labels.size()); ++i)
            covers.emplace_back(i, i + 1);
        return Poset(std::move(labels), std::move(covers));
    }

    static Poset antichain(std::vector<std::string> labels) {
        return Poset(std::move(labels), {});
    }

    int size() const { return static_cast<int>(labels_.size()); }

    const std::string& label(int x) const {
        check_index(x);
        return labels_[x];
    }

    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<int> index_of(const std::string& label) const {
        for (int i = 0; i < size(); ++i)
            if (labels_[i] == label) return i;
        return std::nullopt;
    }

    const std::vector<std::pair<int, int>>& cover_edges() const { return covers_; }

    bool leq(int a, int b) const {
        check_index(a);
        check_index(b);
        return leq_[a][b] != 0;
    }

    bool less(int a, int b) const { return a != b && leq(a, b); }

    // Q1(x): elements immediately following x. Empty iff x is maximal.
    const std::vector<int>& upper_covers(int x) const {
        check_index(x);
        return up_[x];
    }

    // Q2(x, y) = { a : !(a <= x) && a <= y }, defined for y in Q1(x).
    // Always contains y.
    std::vector<int> q2(int x, int y) const {
        check_index(x);
        check_index(y);
        const auto& us = up_[x];
        if (std::find(us.begin(), us.end(), y) == us.end())
            throw NotACover(labels_[y] + " is not an upper cover of " + labels_[x]);
        std::vector<int> out;
        for (int a = 0; a < size(); ++a)
            if (!leq_[a][x] && leq_[a][y]) out.push_back(a);
        return out;
    }

    std::optional<int> greatest() const { return greatest_; }

    Poset reversed() const {
        std::vector<std::pair<int, int>> flipped;
        flipped.reserve(covers_.size());
        for (auto& [a, b] : covers_) flipped.emplace_back(b, a);
        return Poset(labels_, std::move(flipped));
    }

    // Same order plus a new greatest element labeled `top` when none exists.
    Poset extended_with_greatest(const std::string& top) const {
        if (greatest_) return *this;
        auto labels = labels_;
        auto covers = covers_;
        const int t = size();
        labels.push_back(top);
        for (int v = 0; v < t; ++v)
            if (up_[v].empty()) covers.emplace_back(v, t);
        return Poset(std::move(labels), std::move(covers));
    }

    bool is_chain() const {
        for (int a = 0; a < size(); ++a)
            for (int b = a + 1; b < size(); ++b)
                if (!leq_[a][b] && !leq_[b][a]) return false;
        return true;
    }

    bool is_antichain() const { return covers_.empty(); }

    bool operator==(const Poset& o) const {
        return labels_ == o.labels_ && covers_ == o.covers_;
    }

private:
    void check_index(int x) const {
        if (x < 0 || x >= static_cast<int>(labels_.size()))
            throw InvalidElement("element index " + std::to_string(x) + " out of range");
    }

    std::vector<std::string> labels_;
    std::vector<std::pair<int, int>> covers_;
    std::vector<std::vector<int>> up_;
    std::vector<std::vector<char>> leq_;
    std::optional<int> greatest_;
};

}  // namespace pold
