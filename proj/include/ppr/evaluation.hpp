#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppr/decomposition.hpp"
#include "ppr/graph.hpp"
#include "ppr/index.hpp"
#include "ppr/monte_carlo.hpp"
#include "ppr/parallel.hpp"
#include "ppr/rng.hpp"
#include "ppr/sparse_vector.hpp"

namespace ppr {

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double residual, std::uint32_t iters)
        : std::runtime_error("no convergence after " + std::to_string(iters) +
                             " iterations, residual " + std::to_string(residual)),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Exact PPR by fixed-point iteration of p <- (1-c) pA + c e_u starting from
// e_u, where dangling rows of A route to u. Stops when the L1 step falls to
// tol; unreachable vertices never receive mass and stay exactly zero.
inline SparseVector power_iteration(const Graph& g, VertexId u, double teleport_c = 0.15,
                                    double tol = 1e-12, std::uint32_t max_iters = 10000) {
    g.check_vertex(u);
    validate_teleport(teleport_c);
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    std::size_t n = g.num_vertices();
    std::vector<double> p(n, 0.0), next(n, 0.0);
    p[u] = 1.0;
    double residual = 1.0;
    for (std::uint32_t iter = 0; iter < max_iters; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        double dangling_mass = 0.0;
        for (VertexId x = 0; x < n; ++x) {
            double px = p[x];
            if (px == 0.0) continue;
            auto nbrs = g.out_neighbors(x);
            if (nbrs.empty()) {
                dangling_mass += px;
            } else {
                double share = px / static_cast<double>(nbrs.size());
                for (VertexId y : nbrs) next[y] += share;
            }
        }
        next[u] += dangling_mass;
        for (double& v : next) v *= 1.0 - teleport_c;
        next[u] += teleport_c;
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) residual += std::fabs(next[i] - p[i]);
        std::swap(p, next);
        if (residual <= tol) return SparseVector::from_dense(p);
    }
    throw ConvergenceError(residual, max_iters);
}

// Relative aggregated goodness: the exact mass captured by the approximate
// top-k set over the exact mass of the true top-k set. 1 by convention when
// the exact vector has no mass to capture.
inline double rag(const SparseVector& exact, const SparseVector& approx, std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    double denom = 0.0;
    for (const auto& [v, score] : top_k(exact, k)) denom += score;
    if (denom == 0.0) return 1.0;
    double num = 0.0;
    for (const auto& [v, score] : top_k(approx, k)) num += exact.at(v);
    return num / denom;
}

// Draws up to per_bucket sources uniformly without replacement from every
// non-empty out-degree bucket (degree-0 vertices belong to no bucket).
// Buckets draw from independent seeded streams; output is ascending within
// each bucket, buckets in ascending order.
inline std::vector<VertexId> sample_queries(const Graph& g, std::uint32_t per_bucket,
                                            std::uint32_t num_buckets, std::uint64_t seed) {
    if (per_bucket < 1) throw std::invalid_argument("per_bucket must be >= 1");
    if (num_buckets < 1) throw std::invalid_argument("num_buckets must be >= 1");
    std::vector<std::vector<VertexId>> buckets(num_buckets + 1);
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        if (auto b = degree_bucket(g, v, static_cast<int>(num_buckets))) buckets[*b].push_back(v);

    std::vector<VertexId> out;
    for (std::uint32_t b = 1; b <= num_buckets; ++b) {
        auto& members = buckets[b];
        auto take = static_cast<std::uint32_t>(std::min<std::size_t>(per_bucket, members.size()));
        Rng rng(stream_state(seed, 0x6275636b6574ULL, b));
        for (std::uint32_t i = 0; i < take; ++i) {
            std::uint32_t j = i + rng.below(static_cast<std::uint32_t>(members.size()) - i);
            std::swap(members[i], members[j]);
        }
        std::sort(members.begin(), members.begin() + take);
        out.insert(out.end(), members.begin(), members.begin() + take);
    }
    return out;
}

enum class Method { IndexLookup, FullPath, EndPoint, Decomposition };

struct MethodSpec {
    Method method = Method::IndexLookup;
    std::uint64_t num_walks = 0;   // walk-based methods
    std::uint32_t iterations = 0;  // decomposition depth T
    double epsilon = 0.0;          // decomposition truncation

    std::string name() const {
        switch (method) {
            case Method::IndexLookup: return "index-lookup";
            case Method::FullPath: return "full-path";
            case Method::EndPoint: return "end-point";
            case Method::Decomposition: return "decomposition";
        }
        return "unknown";
    }
};

struct EvalOptions {
    double teleport_c = 0.15;
    std::uint64_t seed = 42;
    double ground_truth_tol = 1e-12;
    std::uint32_t ground_truth_max_iters = 10000;
    std::uint32_t bucket_count = 10;
    unsigned workers = 0;
};

struct EvalRow {
    VertexId source = 0;
    std::optional<int> bucket;
    std::vector<double> rag_at_k;  // parallel to EvalReport::ks
    bool failed = false;
    std::string error;
};

struct EvalReport {
    std::string method;
    double teleport_c = 0.15;
    std::uint64_t num_walks = 0;
    std::uint32_t iterations = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 42;
    double ground_truth_tol = 1e-12;
    std::uint32_t ground_truth_max_iters = 10000;
    std::vector<std::uint32_t> ks;
    std::vector<EvalRow> rows;

    std::size_t k_slot(std::uint32_t k) const {
        for (std::size_t i = 0; i < ks.size(); ++i)
            if (ks[i] == k) return i;
        throw std::invalid_argument("k not evaluated: " + std::to_string(k));
    }

    double mean_rag(std::uint32_t k) const {
        std::size_t slot = k_slot(k);
        double sum = 0.0;
        std::size_t count = 0;
        for (const EvalRow& row : rows)
            if (!row.failed) {
                sum += row.rag_at_k[slot];
                ++count;
            }
        if (count == 0) throw std::runtime_error("no successful sources");
        return sum / static_cast<double>(count);
    }

    std::map<int, double> bucket_mean_rag(std::uint32_t k) const {
        std::size_t slot = k_slot(k);
        std::map<int, std::pair<double, std::size_t>> acc;
        for (const EvalRow& row : rows)
            if (!row.failed && row.bucket) {
                acc[*row.bucket].first += row.rag_at_k[slot];
                acc[*row.bucket].second += 1;
            }
        std::map<int, double> out;
        for (const auto& [b, sum_count] : acc)
            out[b] = sum_count.first / static_cast<double>(sum_count.second);
        return out;
    }

    void write_tsv(std::ostream& out) const {
        write_metadata(out);
        out << "source\tbucket\tk\trag\n";
        for (const EvalRow& row : rows) {
            if (row.failed) {
                out << "# failed\t" << row.source << '\t' << row.error << '\n';
                continue;
            }
            for (std::size_t i = 0; i < ks.size(); ++i) {
                out << row.source << '\t';
                if (row.bucket)
                    out << *row.bucket;
                else
                    out << '-';
                out << '\t' << ks[i] << '\t' << format_score(row.rag_at_k[i]) << '\n';
            }
        }
    }

    void write_summary(std::ostream& out) const {
        write_metadata(out);
        out << "k\tmean_rag\tsources\n";
        std::size_t ok = 0;
        for (const EvalRow& row : rows)
            if (!row.failed) ++ok;
        for (std::uint32_t k : ks)
            out << k << '\t' << format_score(mean_rag(k)) << '\t' << ok << '\n';
        for (std::uint32_t k : ks)
            for (const auto& [b, mean] : bucket_mean_rag(k))
                out << "# bucket " << b << "\tk=" << k << '\t' << format_score(mean) << '\n';
    }

    static std::string format_score(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

private:
    void write_metadata(std::ostream& out) const {
        out << "# method\t" << method << '\n';
        out << "# teleport_c\t" << format_score(teleport_c) << '\n';
        if (method == "full-path" || method == "end-point" || num_walks > 0)
            out << "# walks\t" << num_walks << '\n';
        if (method == "decomposition") {
            out << "# iterations\t" << iterations << '\n';
            out << "# epsilon\t" << format_score(epsilon) << '\n';
        }
        out << "# seed\t" << seed << '\n';
        out << "# ground_truth\tpower iteration, L1 step <= " << format_score(ground_truth_tol)
            << ", max " << ground_truth_max_iters << " iterations\n";
    }
};

// Scores one approximation method against the exact oracle on the given
// sources: per source, rag at every k between the method's vector and the
// power-iteration ground truth. A source whose computation throws is marked
// failed and skipped by the aggregates. Sources evaluate independently, so
// they may run on several workers; output does not depend on the worker
// count.
inline EvalReport evaluate(const Graph& g, const PprIndex* idx, const MethodSpec& method,
                           const std::vector<std::uint32_t>& ks,
                           const std::vector<VertexId>& sources, const EvalOptions& opts = {}) {
    if (sources.empty()) throw std::invalid_argument("no sources to evaluate");
    if (ks.empty()) throw std::invalid_argument("no k values to evaluate");
    for (std::uint32_t k : ks)
        if (k < 1) throw std::invalid_argument("k must be >= 1");
    bool needs_index = method.method == Method::IndexLookup;
    if (needs_index && (idx == nullptr || idx->empty()))
        throw std::invalid_argument("method requires an index");
    bool walk_method = method.method == Method::FullPath || method.method == Method::EndPoint;
    if (walk_method && method.num_walks < 1)
        throw std::invalid_argument("walk-based methods need num_walks >= 1");
    validate_teleport(opts.teleport_c);

    EvalReport report;
    report.method = method.name();
    report.teleport_c = opts.teleport_c;
    report.num_walks = method.num_walks;
    report.iterations = method.iterations;
    report.epsilon = method.epsilon;
    report.seed = opts.seed;
    report.ground_truth_tol = opts.ground_truth_tol;
    report.ground_truth_max_iters = opts.ground_truth_max_iters;
    report.ks = ks;
    report.rows.resize(sources.size());

    WalkConfig walk_cfg{opts.teleport_c, walk_method ? method.num_walks : 1, opts.seed};

    parallel_chunks(sources.size(), 4, opts.workers, [&](std::uint64_t, std::uint64_t begin,
                                                         std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            EvalRow& row = report.rows[i];
            row.source = sources[i];
            try {
                row.bucket = degree_bucket(g, row.source, static_cast<int>(opts.bucket_count));
                SparseVector exact =
                    power_iteration(g, row.source, opts.teleport_c, opts.ground_truth_tol,
                                    opts.ground_truth_max_iters);
                SparseVector approx;
                switch (method.method) {
                    case Method::IndexLookup:
                        approx = idx->fingerprint(row.source);
                        break;
                    case Method::FullPath:
                        approx = mcfp_estimate(g, row.source, walk_cfg);
                        break;
                    case Method::EndPoint:
                        approx = mcep_estimate(g, row.source, walk_cfg);
                        break;
                    case Method::Decomposition: {
                        DecompState state = decompose(g, row.source, method.iterations,
                                                      method.epsilon, opts.teleport_c);
                        approx = (idx != nullptr && !idx->empty()) ? combine(state, *idx)
                                                                   : combine(state);
                        break;
                    }
                }
                row.rag_at_k.reserve(ks.size());
                for (std::uint32_t k : ks) row.rag_at_k.push_back(rag(exact, approx, k));
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
                row.rag_at_k.assign(ks.size(), 0.0);
            }
        }
    });
    return report;
}

} // namespace ppr
