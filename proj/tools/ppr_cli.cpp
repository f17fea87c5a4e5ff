// Command-line front door: build the random-walk index, answer single and
// batch queries by decomposition, print the exact power-iteration vector,
// and run the accuracy evaluation protocol. Primary outputs (index file,
// ranked lines, TSV report) are byte-identical for identical arguments;
// timings go to stderr.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ppr/ppr.hpp"

namespace {

ppr::Graph load_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return ppr::Graph::load_edge_list(in);
}

ppr::PprIndex load_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index file: " + path);
    return ppr::load_index(in);
}

// Batch files hold one source id per line; '#' starts a comment.
std::vector<ppr::VertexId> read_batch_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open batch file: " + path);
    std::vector<ppr::VertexId> sources;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t pos = line.find_first_not_of(" \t");
        if (pos == std::string::npos || line[pos] == '#') continue;
        try {
            std::size_t used = 0;
            unsigned long long id = std::stoull(line.substr(pos), &used);
            std::string rest = line.substr(pos + used);
            if (rest.find_first_not_of(" \t") != std::string::npos)
                throw std::invalid_argument("trailing tokens");
            if (id > std::numeric_limits<ppr::VertexId>::max())
                throw std::out_of_range("id too large");
            sources.push_back(static_cast<ppr::VertexId>(id));
        } catch (const std::exception&) {
            throw ppr::ParseError(lineno, "malformed source id in " + path);
        }
    }
    return sources;
}

std::vector<std::uint32_t> parse_topk(const std::string& text) {
    std::vector<std::uint32_t> ks;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        unsigned long long k = 0;
        try {
            k = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || k < 1)
            throw std::runtime_error("invalid --topk value: '" + item + "'");
        ks.push_back(static_cast<std::uint32_t>(k));
    }
    if (ks.empty()) throw std::runtime_error("empty --topk list");
    return ks;
}

std::string format_score(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void print_ranked(std::ostream& out, const ppr::SparseVector& vec, std::size_t k) {
    auto ranked = ppr::top_k(vec, k);
    for (std::size_t i = 0; i < ranked.size(); ++i)
        out << i + 1 << '\t' << ranked[i].first << '\t' << format_score(ranked[i].second)
            << '\n';
}

// Output sink: --out FILE or stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        if (file_.is_open()) {
            file_.close();
            if (!file_) throw std::runtime_error("error writing output file");
        }
    }

private:
    std::ofstream file_;
};

struct Args {
    std::string graph_path;
    std::string index_path;
    std::string batch_path;
    std::string out_path;
    std::string topk_text;
    std::string method = "full-path";
    std::uint64_t walks = 0;
    std::uint32_t iters = 2;
    double teleport = 0.15;
    double epsilon = -1.0;  // negative: use the depth-dependent default
    std::uint64_t seed = 42;
    unsigned workers = 0;
    bool no_index = false;
    bool teleport_given = false;
};

// The teleport probability is baked into the index; silently combining an
// index built for one value with a decomposition using another would be
// wrong, so an explicit conflicting --teleport is an error.
double pick_teleport(const Args& args, const ppr::PprIndex* idx) {
    if (idx == nullptr || idx->empty()) return args.teleport;
    if (args.teleport_given && args.teleport != idx->teleport_c)
        throw std::runtime_error("--teleport " + format_score(args.teleport) +
                                 " conflicts with index teleport " +
                                 format_score(idx->teleport_c));
    return idx->teleport_c;
}

ppr::VertexId checked_source(const ppr::Graph& g, std::uint64_t id) {
    if (id >= g.num_vertices())
        throw std::runtime_error("unknown source id " + std::to_string(id) + " (graph has " +
                                 std::to_string(g.num_vertices()) + " vertices)");
    return static_cast<ppr::VertexId>(id);
}

std::uint64_t parse_vertex(const std::string& text) {
    try {
        std::size_t used = 0;
        unsigned long long id = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return id;
    } catch (const std::exception&) {
        throw std::runtime_error("invalid source id '" + text + "'");
    }
}

int cmd_build_index(const Args& args) {
    if (args.walks < 1)
        throw std::runtime_error("--walks must be >= 1 to build an index "
                                 "(walk-free querying is the --no-index query mode)");
    ppr::Graph g = load_graph_file(args.graph_path);
    ppr::WalkConfig cfg{args.teleport, args.walks, args.seed};
    auto start = std::chrono::steady_clock::now();
    ppr::PprIndex idx = ppr::build_index(g, cfg, args.workers);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    std::ofstream out(args.index_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open index file for writing: " + args.index_path);
    std::uint64_t bytes = ppr::save_index(idx, out);
    out.close();
    if (!out) throw std::runtime_error("error writing index file: " + args.index_path);

    std::uint64_t entries = 0;
    for (const auto& fp : idx.fingerprints) entries += fp.size();
    std::cout << "vertices\t" << g.num_vertices() << '\n'
              << "edges\t" << g.num_edges() << '\n'
              << "walks_per_vertex\t" << idx.walks_per_vertex << '\n'
              << "index_entries\t" << entries << '\n'
              << "index_bytes\t" << bytes << '\n';
    std::cerr << "built in " << elapsed.count() << " s\n";
    return 0;
}

int cmd_query(const Args& args, const std::vector<std::string>& positional) {
    ppr::Graph g = load_graph_file(args.graph_path);

    std::vector<ppr::VertexId> sources;
    if (!args.batch_path.empty()) {
        if (!positional.empty())
            throw std::runtime_error("give either a source id or --batch, not both");
        sources = read_batch_file(args.batch_path);
        if (sources.empty()) throw std::runtime_error("batch file lists no sources");
    } else if (positional.size() == 1) {
        sources.push_back(checked_source(g, parse_vertex(positional[0])));
    } else {
        throw std::runtime_error("query needs a source id or --batch FILE");
    }
    for (ppr::VertexId u : sources) (void)checked_source(g, u);

    std::optional<ppr::PprIndex> idx;
    if (!args.no_index && !args.index_path.empty()) idx = load_index_file(args.index_path);

    auto ks = parse_topk(args.topk_text.empty() ? "10" : args.topk_text);
    if (ks.size() != 1) throw std::runtime_error("query takes a single --topk value");

    ppr::QueryBatch batch;
    batch.sources = sources;
    batch.iterations = args.iters;
    batch.teleport_c = pick_teleport(args, idx ? &*idx : nullptr);
    batch.truncation_epsilon =
        args.epsilon >= 0.0 ? args.epsilon : ppr::default_epsilon(batch.iterations);

    auto states = ppr::decompose_batch(g, batch, args.workers);

    Sink sink(args.out_path);
    for (ppr::VertexId u : sources) {
        const ppr::DecompState& state = states.at(u);
        ppr::SparseVector vec = idx ? ppr::combine(state, *idx) : ppr::combine(state);
        sink.stream() << "# source\t" << u << '\n';
        print_ranked(sink.stream(), vec, ks[0]);
    }
    sink.finish();
    return 0;
}

int cmd_eval(const Args& args) {
    ppr::Graph g = load_graph_file(args.graph_path);

    std::optional<ppr::PprIndex> idx;
    if (!args.no_index && !args.index_path.empty()) idx = load_index_file(args.index_path);
    const ppr::PprIndex* idx_ptr = idx ? &*idx : nullptr;

    ppr::MethodSpec method;
    if (args.method == "full-path") {
        method.method = ppr::Method::FullPath;
        method.num_walks = args.walks;
    } else if (args.method == "end-point") {
        method.method = ppr::Method::EndPoint;
        method.num_walks = args.walks;
    } else if (args.method == "decompose") {
        method.method = ppr::Method::Decomposition;
        method.iterations = args.iters;
        method.epsilon =
            args.epsilon >= 0.0 ? args.epsilon : ppr::default_epsilon(method.iterations);
    } else if (args.method == "index") {
        method.method = ppr::Method::IndexLookup;
    } else {
        throw std::runtime_error("unknown --method '" + args.method +
                                 "' (full-path, end-point, decompose, index)");
    }

    std::vector<ppr::VertexId> sources;
    if (!args.batch_path.empty()) {
        sources = read_batch_file(args.batch_path);
        if (sources.empty()) throw std::runtime_error("batch file lists no sources");
        for (ppr::VertexId u : sources) (void)checked_source(g, u);
    } else {
        sources = ppr::sample_queries(g, 10, 10, args.seed);
        if (sources.empty()) throw std::runtime_error("graph has no vertices to sample");
    }

    ppr::EvalOptions opts;
    opts.teleport_c = pick_teleport(args, idx_ptr);
    opts.seed = args.seed;
    opts.workers = args.workers;

    auto ks = parse_topk(args.topk_text.empty() ? "200" : args.topk_text);
    ppr::EvalReport report = ppr::evaluate(g, idx_ptr, method, ks, sources, opts);

    if (!args.out_path.empty()) {
        Sink sink(args.out_path);
        report.write_tsv(sink.stream());
        sink.finish();
    }
    report.write_summary(std::cout);
    return 0;
}

int cmd_oracle(const Args& args, const std::vector<std::string>& positional) {
    if (positional.size() != 1) throw std::runtime_error("oracle needs exactly one source id");
    ppr::Graph g = load_graph_file(args.graph_path);
    ppr::VertexId u = checked_source(g, parse_vertex(positional[0]));
    ppr::SparseVector p = ppr::power_iteration(g, u, args.teleport);
    Sink sink(args.out_path);
    std::size_t k = p.size();
    if (!args.topk_text.empty()) {
        auto ks = parse_topk(args.topk_text);
        if (ks.size() != 1) throw std::runtime_error("oracle takes a single --topk value");
        k = ks[0];
    }
    print_ranked(sink.stream(), p, k);
    sink.finish();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personalized PageRank engine: random-walk index, decomposition queries, "
                 "exact oracle, accuracy evaluation"};
    app.require_subcommand(1);
    Args args;
    std::vector<std::string> positional;

    auto add_common = [&](CLI::App* cmd, bool with_workers = true) {
        cmd->add_option("--graph", args.graph_path, "edge-list file ('# comments', 'src dst' lines)")
            ->required();
        cmd->add_option("--teleport", args.teleport, "teleport probability in (0,1)")
            ->check(CLI::Range(1e-9, 1.0 - 1e-9));
        cmd->add_option("--seed", args.seed, "random seed");
        if (with_workers) cmd->add_option("--workers", args.workers, "worker threads (0 = all)");
    };

    CLI::App* build = app.add_subcommand("build-index", "run R walks per vertex, write the index");
    add_common(build);
    build->add_option("--index", args.index_path, "output index file")->required();
    build->add_option("--walks", args.walks, "walks per vertex (R)");

    CLI::App* query = app.add_subcommand("query", "top-k PPR for one source or a batch");
    add_common(query);
    query->add_option("source", positional, "source vertex id");
    query->add_option("--index", args.index_path, "index file to combine with");
    query->add_option("--batch", args.batch_path, "file with one source id per line");
    query->add_option("--iters", args.iters, "decomposition depth T");
    query->add_option("--epsilon", args.epsilon, "truncation threshold (default by depth)");
    query->add_option("--topk", args.topk_text, "number of results (default 10)");
    query->add_option("--out", args.out_path, "write results here instead of stdout");
    query->add_flag("--no-index", args.no_index, "rank by settled mass only");

    CLI::App* eval = app.add_subcommand("eval", "score a method against the exact oracle");
    add_common(eval);
    eval->add_option("--method", args.method,
                     "full-path | end-point | decompose | index (default full-path)");
    eval->add_option("--index", args.index_path, "index file for index/decompose methods");
    eval->add_option("--walks", args.walks, "walks (R) for walk-based methods");
    eval->add_option("--iters", args.iters, "decomposition depth T");
    eval->add_option("--epsilon", args.epsilon, "truncation threshold (default by depth)");
    eval->add_option("--topk", args.topk_text, "comma-separated k list (default 200)");
    eval->add_option("--batch", args.batch_path, "evaluate these sources instead of sampling");
    eval->add_option("--out", args.out_path, "write the per-source TSV report here");
    eval->add_flag("--no-index", args.no_index, "decompose without combining an index");

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "exact PPR vector by power iteration");
    add_common(oracle_cmd, false);
    oracle_cmd->add_option("source", positional, "source vertex id");
    oracle_cmd->add_option("--topk", args.topk_text, "print only the top k entries");
    oracle_cmd->add_option("--out", args.out_path, "write results here instead of stdout");

    CLI11_PARSE(app, argc, argv);
    args.teleport_given = app.get_subcommands()[0]->count("--teleport") > 0;

    try {
        if (build->parsed()) return cmd_build_index(args);
        if (query->parsed()) return cmd_query(args, positional);
        if (eval->parsed()) return cmd_eval(args);
        if (oracle_cmd->parsed()) return cmd_oracle(args, positional);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
