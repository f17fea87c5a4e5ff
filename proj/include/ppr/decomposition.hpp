#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "ppr/graph.hpp"
#include "ppr/index.hpp"
#include "ppr/parallel.hpp"
#include "ppr/sparse_vector.hpp"

namespace ppr {

// Result of unfolding the PPR recursion T times from a source: `settled` is
// the mass fixed so far (the source-side partial sum) and `frontier` is the
// mass still riding on the walk, so p_u = settled + sum frontier(v) * p_v.
// With no truncation, sum(settled) + sum(frontier) = 1 and
// sum(frontier) = (1-c)^T.
struct DecompState {
    SparseVector settled;
    SparseVector frontier;
    std::uint32_t iterations = 0;
};

struct QueryBatch {
    std::vector<VertexId> sources;
    std::uint32_t iterations = 0;  // T
    double truncation_epsilon = 0.0;
    double teleport_c = 0.15;
};

// Truncation is free for shallow unfoldings; deeper ones drop dust entries
// to keep the frontier sparse. The mass lost stays below 1e-3 on graphs at
// the scale this library targets.
inline double default_epsilon(std::uint32_t iterations) {
    return iterations <= 3 ? 0.0 : 1e-7;
}

inline void validate_teleport(double c) {
    if (!(c > 0.0) || !(c < 1.0)) throw std::invalid_argument("teleport_c must lie in (0,1)");
}

namespace detail {

// One unfolding step at vertex x holding frontier mass m for source u:
// c*m settles at x and (1-c)*m spreads over x's out-neighbor list, or flows
// back to u when x is dangling. Shared by the single and batch paths so both
// perform bitwise-identical arithmetic.
template <typename Settle, typename Scatter>
void unfold_vertex(const Graph& g, VertexId u, double c, VertexId x, double m, Settle&& settle,
                   Scatter&& scatter) {
    settle(x, c * m);
    auto nbrs = g.out_neighbors(x);
    if (nbrs.empty()) {
        scatter(u, (1.0 - c) * m);
    } else {
        double share = (1.0 - c) * m / static_cast<double>(nbrs.size());
        for (VertexId y : nbrs) scatter(y, share);
    }
}

} // namespace detail

// Unfolds the PPR recursion T times from u using dense accumulators: start
// with all mass on u as frontier, then per iteration settle the teleport
// share of every frontier entry and push the rest one step along the graph
// (dangling vertices push back to u). After each iteration, entries of both
// parts strictly below epsilon are discarded. Deterministic.
inline DecompState decompose(const Graph& g, VertexId u, std::uint32_t iterations,
                             double epsilon = 0.0, double teleport_c = 0.15) {
    g.check_vertex(u);
    validate_teleport(teleport_c);
    std::size_t n = g.num_vertices();
    std::vector<double> settled(n, 0.0), frontier(n, 0.0), next(n, 0.0);
    std::vector<VertexId> active{u}, next_active;
    frontier[u] = 1.0;

    for (std::uint32_t t = 0; t < iterations; ++t) {
        for (VertexId x : active) {
            detail::unfold_vertex(
                g, u, teleport_c, x, frontier[x],
                [&](VertexId y, double m) { settled[y] += m; },
                [&](VertexId y, double m) {
                    if (next[y] == 0.0) next_active.push_back(y);
                    next[y] += m;
                });
            frontier[x] = 0.0;
        }
        std::sort(next_active.begin(), next_active.end());
        active.clear();
        for (VertexId y : next_active) {
            if (next[y] < epsilon)
                next[y] = 0.0;
            else
                active.push_back(y);
        }
        next_active.clear();
        std::swap(frontier, next);
        if (epsilon > 0.0)
            for (double& s : settled)
                if (s > 0.0 && s < epsilon) s = 0.0;
    }

    DecompState state;
    state.iterations = iterations;
    state.settled = SparseVector::from_dense(settled);
    std::vector<std::pair<VertexId, Score>> f_entries;
    f_entries.reserve(active.size());
    for (VertexId y : active) f_entries.emplace_back(y, frontier[y]);
    state.frontier = SparseVector::from_sorted(std::move(f_entries));
    return state;
}

// Per-vertex view of a whole batch mid-decomposition: slot j tracks source
// slots()[j]. frontier_at(x) holds each source's frontier mass sitting at x;
// settled_at(x) the mass each source has settled there. Extracting one slot
// reproduces that source's single-query DecompState bit for bit.
class FrontierState {
public:
    using SlotMass = std::vector<std::pair<std::uint32_t, double>>;

    FrontierState(const Graph& g, const QueryBatch& batch)
        : epsilon_(batch.truncation_epsilon), teleport_c_(batch.teleport_c),
          smap_(g.num_vertices()), fmap_(g.num_vertices()) {
        validate_teleport(teleport_c_);
        for (VertexId s : batch.sources) g.check_vertex(s);
        slots_ = batch.sources;
        std::sort(slots_.begin(), slots_.end());
        slots_.erase(std::unique(slots_.begin(), slots_.end()), slots_.end());
        for (std::uint32_t j = 0; j < slots_.size(); ++j) {
            fmap_[slots_[j]].emplace_back(j, 1.0);
            active_.push_back(slots_[j]);
        }
        std::sort(active_.begin(), active_.end());
        active_.erase(std::unique(active_.begin(), active_.end()), active_.end());
    }

    const std::vector<VertexId>& slots() const { return slots_; }
    std::uint32_t iterations_done() const { return iteration_; }
    const SlotMass& frontier_at(VertexId x) const { return fmap_[x]; }
    const SlotMass& settled_at(VertexId x) const { return smap_[x]; }

    // One bulk-synchronous unfolding step for every source at once. Active
    // vertices are processed in ascending id order, partitioned into
    // fixed-width chunks; messages are merged in chunk order, so the result
    // is identical for any worker count and bitwise equal to running each
    // source alone.
    void step(const Graph& g, unsigned workers = 0) {
        struct Message {
            VertexId target;
            std::uint32_t slot;
            double mass;
        };
        constexpr std::uint64_t kChunk = 512;
        std::uint64_t n_active = active_.size();
        std::vector<std::vector<Message>> out((n_active + kChunk - 1) / kChunk);

        parallel_chunks(n_active, kChunk, workers,
                        [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
                            auto& msgs = out[chunk];
                            for (std::uint64_t i = begin; i < end; ++i) {
                                VertexId x = active_[i];
                                for (const auto& [j, m] : fmap_[x]) {
                                    detail::unfold_vertex(
                                        g, slots_[j], teleport_c_, x, m,
                                        [&](VertexId y, double add) { accumulate(smap_[y], j, add); },
                                        [&](VertexId y, double add) {
                                            msgs.push_back({y, j, add});
                                        });
                                }
                                fmap_[x].clear();
                            }
                        });

        std::vector<VertexId> next_active;
        for (const auto& msgs : out)
            for (const Message& msg : msgs) {
                if (fmap_[msg.target].empty()) next_active.push_back(msg.target);
                accumulate(fmap_[msg.target], msg.slot, msg.mass);
            }
        std::sort(next_active.begin(), next_active.end());
        next_active.erase(std::unique(next_active.begin(), next_active.end()), next_active.end());

        active_.clear();
        for (VertexId y : next_active) {
            prune(fmap_[y]);
            if (!fmap_[y].empty()) active_.push_back(y);
        }
        if (epsilon_ > 0.0)
            for (auto& slot_mass : smap_) prune(slot_mass);
        ++iteration_;
    }

    DecompState extract(std::uint32_t slot) const {
        DecompState state;
        state.iterations = iteration_;
        state.settled = gather(smap_, slot);
        state.frontier = gather(fmap_, slot);
        return state;
    }

    // All slots in one sweep over the per-vertex maps; entry values are the
    // same doubles extract() would return.
    std::vector<DecompState> extract_all() const {
        std::vector<std::vector<std::pair<VertexId, Score>>> s_entries(slots_.size());
        std::vector<std::vector<std::pair<VertexId, Score>>> f_entries(slots_.size());
        auto sweep = [this](const std::vector<SlotMass>& per_vertex,
                            std::vector<std::vector<std::pair<VertexId, Score>>>& into) {
            for (VertexId x = 0; x < per_vertex.size(); ++x)
                for (const auto& [j, m] : per_vertex[x])
                    if (m != 0.0) into[j].emplace_back(x, m);
        };
        sweep(smap_, s_entries);
        sweep(fmap_, f_entries);
        std::vector<DecompState> states(slots_.size());
        for (std::uint32_t j = 0; j < slots_.size(); ++j) {
            states[j].iterations = iteration_;
            states[j].settled = SparseVector::from_sorted(std::move(s_entries[j]));
            states[j].frontier = SparseVector::from_sorted(std::move(f_entries[j]));
        }
        return states;
    }

private:
    // Slot lists stay sorted by slot id; only the lookup is ordered, each
    // (vertex, slot) accumulator still sums its messages in arrival order.
    static void accumulate(SlotMass& slot_mass, std::uint32_t j, double add) {
        auto it = std::lower_bound(
            slot_mass.begin(), slot_mass.end(), j,
            [](const auto& entry, std::uint32_t slot) { return entry.first < slot; });
        if (it != slot_mass.end() && it->first == j) {
            it->second += add;
            return;
        }
        slot_mass.insert(it, {j, add});
    }

    void prune(SlotMass& slot_mass) const {
        std::erase_if(slot_mass, [&](const auto& e) { return e.second < epsilon_; });
    }

    SparseVector gather(const std::vector<SlotMass>& per_vertex, std::uint32_t slot) const {
        std::vector<std::pair<VertexId, Score>> entries;
        for (VertexId x = 0; x < per_vertex.size(); ++x)
            for (const auto& [j, m] : per_vertex[x])
                if (j == slot && m != 0.0) entries.emplace_back(x, m);
        return SparseVector::from_sorted(std::move(entries));
    }

    double epsilon_;
    double teleport_c_;
    std::uint32_t iteration_ = 0;
    std::vector<VertexId> slots_;
    std::vector<VertexId> active_;
    std::vector<SlotMass> smap_;
    std::vector<SlotMass> fmap_;
};

// Decomposes every source in the batch through shared passes over the graph:
// each iteration touches each frontier vertex once for all sources together.
// Per-source results equal decompose() on that source alone.
inline std::map<VertexId, DecompState> decompose_batch(const Graph& g, const QueryBatch& batch,
                                                       unsigned workers = 0) {
    FrontierState state(g, batch);
    for (std::uint32_t t = 0; t < batch.iterations; ++t) state.step(g, workers);
    std::vector<DecompState> states = state.extract_all();
    std::map<VertexId, DecompState> result;
    for (std::uint32_t j = 0; j < state.slots().size(); ++j)
        result.emplace(state.slots()[j], std::move(states[j]));
    return result;
}

// p = settled alone: the index-free mode, which simply leaves the frontier
// mass (1-c)^T unassigned.
inline SparseVector combine(const DecompState& state) { return state.settled; }

// p = settled + sum over frontier entries of mass * fingerprint. An empty
// index degrades to the index-free mode.
inline SparseVector combine(const DecompState& state, const PprIndex& idx) {
    if (idx.empty()) return combine(state);
    std::vector<double> acc(idx.num_vertices(), 0.0);
    for (const auto& [v, m] : state.settled) {
        if (v >= acc.size()) throw std::out_of_range("state does not match index");
        acc[v] += m;
    }
    for (const auto& [v, m] : state.frontier)
        for (const auto& [id, score] : idx.fingerprint(v)) acc[id] += m * score;
    return SparseVector::from_dense(acc);
}

// Reference evaluation of the decomposition identity by direct recursion:
// T = 0 reads the fingerprint, otherwise p_x = c e_x + (1-c)/|O(x)| sum of
//
//   p_nb over the out-neighbor list (the artificial edge of a dangling
// vertex points at the original query source u). Exponential in T; meant for
// cross-checking the iterative path on small graphs.
inline SparseVector decompose_recursive(const Graph& g, const PprIndex& idx, VertexId u,
                                        std::uint32_t iterations) {
    g.check_vertex(u);
    if (idx.num_vertices() != g.num_vertices())
        throw std::invalid_argument("index does not match graph");
    double c = idx.teleport_c;
    validate_teleport(c);
    std::vector<double> acc(g.num_vertices(), 0.0);
    auto rec = [&](auto&& self, VertexId x, std::uint32_t t, double weight) -> void {
        if (t == 0) {
            for (const auto& [id, score] : idx.fingerprint(x)) acc[id] += weight * score;
            return;
        }
        acc[x] += weight * c;
        auto nbrs = g.out_neighbors(x);
        if (nbrs.empty()) {
            self(self, u, t - 1, weight * (1.0 - c));
        } else {
            double share = weight * (1.0 - c) / static_cast<double>(nbrs.size());
            for (VertexId y : nbrs) self(self, y, t - 1, share);
        }
    };
    rec(rec, u, iterations, 1.0);
    return SparseVector::from_dense(acc);
}

} // namespace ppr
