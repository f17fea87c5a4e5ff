#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ppr/graph.hpp"
#include "ppr/rng.hpp"
#include "ppr/sparse_vector.hpp"

namespace ppr {

struct WalkConfig {
    double teleport_c = 0.15;
    std::uint64_t num_walks = 1;  // R
    std::uint64_t seed = 42;

    void validate() const {
        if (!(teleport_c > 0.0) || !(teleport_c < 1.0))
            throw std::invalid_argument("teleport_c must lie in (0,1)");
        if (num_walks < 1) throw std::invalid_argument("num_walks must be >= 1");
    }
};

struct WalkStats {
    std::uint64_t total_visits = 0;  // across all walks, start vertices included
};

namespace detail {

// Random walk with restart from u: before every move the walk stops with
// probability c; otherwise it moves to a uniformly random entry of the
// current vertex's out-neighbor list (parallel edges weight the choice), or
// back to u from a dangling vertex. Walk i draws from the stream keyed by
// (seed, u, i), so walks are independent of execution order. visit(v) fires
// for the start vertex and after every move; returns the terminal vertex.
template <typename Visit>
VertexId run_walk(const Graph& g, VertexId u, double c, Rng& rng, Visit&& visit) {
    VertexId v = u;
    visit(v);
    while (rng.uniform01() >= c) {
        auto nbrs = g.out_neighbors(v);
        v = nbrs.empty() ? u : nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))];
        visit(v);
    }
    return v;
}

inline SparseVector tally_to_sparse(const std::vector<std::uint64_t>& counts,
                                    std::vector<VertexId>& touched, double denom) {
    std::sort(touched.begin(), touched.end());
    std::vector<std::pair<VertexId, Score>> entries;
    entries.reserve(touched.size());
    for (VertexId v : touched)
        entries.emplace_back(v, static_cast<double>(counts[v]) / denom);
    return SparseVector::from_sorted(std::move(entries));
}

} // namespace detail

// Full-path estimate of the PPR vector of u: the fraction of all walk visits
// resident at each vertex. Integer tallies make the result independent of
// walk execution order; the i-th walk uses the (seed, u, i) stream.
inline SparseVector mcfp_estimate(const Graph& g, VertexId u, const WalkConfig& cfg,
                                  WalkStats* stats = nullptr) {
    cfg.validate();
    g.check_vertex(u);
    std::vector<std::uint64_t> counts(g.num_vertices(), 0);
    std::vector<VertexId> touched;
    std::uint64_t visits = 0;
    for (std::uint64_t i = 0; i < cfg.num_walks; ++i) {
        Rng rng(stream_state(cfg.seed, u, i));
        detail::run_walk(g, u, cfg.teleport_c, rng, [&](VertexId v) {
            if (counts[v]++ == 0) touched.push_back(v);
            ++visits;
        });
    }
    if (stats) stats->total_visits = visits;
    return detail::tally_to_sparse(counts, touched, static_cast<double>(visits));
}

// End-point estimate: the fraction of walks terminating at each vertex. Same
// walk dynamics and RNG streams as mcfp_estimate, only the tally differs.
inline SparseVector mcep_estimate(const Graph& g, VertexId u, const WalkConfig& cfg,
                                  WalkStats* stats = nullptr) {
    cfg.validate();
    g.check_vertex(u);
    std::vector<std::uint64_t> counts(g.num_vertices(), 0);
    std::vector<VertexId> touched;
    std::uint64_t visits = 0;
    for (std::uint64_t i = 0; i < cfg.num_walks; ++i) {
        Rng rng(stream_state(cfg.seed, u, i));
        VertexId last = detail::run_walk(g, u, cfg.teleport_c, rng, [&](VertexId) { ++visits; });
        if (counts[last]++ == 0) touched.push_back(last);
    }
    if (stats) stats->total_visits = visits;
    return detail::tally_to_sparse(counts, touched, static_cast<double>(cfg.num_walks));
}

// Tail bound on the probability that a full-path estimate over-estimates its
// target by a relative factor gamma when built from R walks:
// (1/sqrt(c)) * (1 + gamma*c/10) * exp(-gamma^2 * R / 20).
inline double deviation_bound(double gamma, std::uint64_t num_walks, double teleport_c) {
    if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
    if (num_walks < 1) throw std::invalid_argument("num_walks must be >= 1");
    if (!(teleport_c > 0.0) || !(teleport_c < 1.0))
        throw std::invalid_argument("teleport_c must lie in (0,1)");
    double r = static_cast<double>(num_walks);
    return (1.0 / std::sqrt(teleport_c)) * (1.0 + gamma * teleport_c / 10.0) *
           std::exp(-gamma * gamma * r / 20.0);
}

} // namespace ppr
