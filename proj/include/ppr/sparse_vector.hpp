#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace ppr {

using VertexId = std::uint32_t;
using Score = double;

// Sparse score vector: entries sorted ascending by vertex id, all stored
// scores strictly positive. Implicit zeros elsewhere.
class SparseVector {
public:
    using Entry = std::pair<VertexId, Score>;

    SparseVector() = default;

    static SparseVector unit(VertexId v) {
        SparseVector r;
        r.entries_.emplace_back(v, 1.0);
        return r;
    }

    // Keys of `m` must be < 2^32; zero and negative values are dropped.
    static SparseVector from_map(const std::map<VertexId, Score>& m) {
        SparseVector r;
        r.entries_.reserve(m.size());
        for (const auto& [v, s] : m)
            if (s > 0.0) r.entries_.emplace_back(v, s);
        return r;
    }

    // Dense array indexed by vertex id; exact zeros are skipped.
    static SparseVector from_dense(const std::vector<Score>& dense) {
        SparseVector r;
        for (VertexId v = 0; v < dense.size(); ++v)
            if (dense[v] > 0.0) r.entries_.emplace_back(v, dense[v]);
        return r;
    }

    // `entries` must already be sorted ascending by id with positive scores.
    static SparseVector from_sorted(std::vector<Entry> entries) {
        SparseVector r;
        r.entries_ = std::move(entries);
        return r;
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    // Score at v, 0 if absent.
    Score at(VertexId v) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                                   [](const Entry& e, VertexId id) { return e.first < id; });
        return (it != entries_.end() && it->first == v) ? it->second : 0.0;
    }

    Score sum() const {
        Score s = 0.0;
        for (const auto& [v, w] : entries_) s += w;
        return s;
    }

    void prune_below(double eps) {
        if (eps <= 0.0) return;
        std::erase_if(entries_, [eps](const Entry& e) { return e.second < eps; });
    }

    friend bool operator==(const SparseVector& a, const SparseVector& b) {
        return a.entries_ == b.entries_;
    }

private:
    std::vector<Entry> entries_;
};

// k highest-scoring entries, descending score, ties broken by ascending id.
// Fewer than k entries are returned when the support is smaller than k.
inline std::vector<SparseVector::Entry> top_k(const SparseVector& v, std::size_t k) {
    std::vector<SparseVector::Entry> out(v.begin(), v.end());
    auto better = [](const SparseVector::Entry& a, const SparseVector::Entry& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    if (k < out.size()) {
        std::partial_sort(out.begin(), out.begin() + k, out.end(), better);
        out.resize(k);
    } else {
        std::sort(out.begin(), out.end(), better);
    }
    return out;
}

inline double max_norm_diff(const SparseVector& a, const SparseVector& b) {
    double m = 0.0;
    for (const auto& [v, s] : a) m = std::max(m, std::abs(s - b.at(v)));
    for (const auto& [v, s] : b) m = std::max(m, std::abs(s - a.at(v)));
    return m;
}

inline double l1_diff(const SparseVector& a, const SparseVector& b) {
    double d = 0.0;
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            d += std::abs(ia->second);
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            d += std::abs(ib->second);
            ++ib;
        } else {
            d += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return d;
}

} // namespace ppr
