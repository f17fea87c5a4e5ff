#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ppr/index.hpp"
#include "ppr/sparse_vector.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("ppr_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out_path = work_dir() / ("stdout_" + std::to_string(counter));
    fs::path err_path = work_dir() / ("stderr_" + std::to_string(counter));
    ++counter;
    std::string cmd = std::string(PPR_CLI_PATH) + " " + args + " >" + out_path.string() +
                      " 2>" + err_path.string();
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out_path), slurp(err_path)};
}

fs::path fan_graph_file() {
    fs::path p = work_dir() / "fan.txt";
    spit(p, "# fan graph\n0 1\n0 2\n1 3\n1 4\n1 5\n1 6\n2 4\n2 5\n2 6\n2 7\n");
    return p;
}

fs::path two_cycle_file() {
    fs::path p = work_dir() / "cycle.txt";
    spit(p, "0 1\n1 0\n");
    return p;
}

std::string format_score(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// data lines of a query block: "rank<TAB>vertex<TAB>score"
struct RankedLine {
    int rank;
    ppr::VertexId vertex;
    double score;
};

std::vector<RankedLine> parse_ranked(const std::string& text) {
    std::vector<RankedLine> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        RankedLine r{};
        REQUIRE(static_cast<bool>(fields >> r.rank >> r.vertex >> r.score));
        lines.push_back(r);
    }
    return lines;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("build-index writes a loadable file and reports totals") {
    fs::path graph = fan_graph_file();
    fs::path index = work_dir() / "fan.pwix";
    auto r = run_cli("build-index --graph " + graph.string() + " --index " + index.string() +
                     " --walks 100 --seed 42");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("vertices\t8") != std::string::npos);
    CHECK(r.out.find("edges\t10") != std::string::npos);
    CHECK(r.out.find("walks_per_vertex\t100") != std::string::npos);
    CHECK(r.out.find("index_entries\t") != std::string::npos);

    std::ifstream in(index, std::ios::binary);
    ppr::PprIndex idx = ppr::load_index(in);
    CHECK(idx.num_vertices() == 8);
    CHECK(idx.walks_per_vertex == 100);

    // identical arguments produce an identical file
    fs::path again = work_dir() / "fan2.pwix";
    auto r2 = run_cli("build-index --graph " + graph.string() + " --index " + again.string() +
                      " --walks 100 --seed 42");
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(index) == slurp(again));
}

TEST_CASE("build-index input validation") {
    fs::path index = work_dir() / "junk.pwix";
    auto missing = run_cli("build-index --graph /nonexistent/g.txt --index " + index.string() +
                           " --walks 10");
    CHECK(missing.exit_code != 0);
    CHECK(missing.err.find("cannot open graph file") != std::string::npos);

    auto no_walks = run_cli("build-index --graph " + fan_graph_file().string() + " --index " +
                            index.string() + " --walks 0");
    CHECK(no_walks.exit_code != 0);
    CHECK(no_walks.err.find("--walks must be >= 1") != std::string::npos);
}

TEST_CASE("query combines the index and is reproducible") {
    fs::path graph = fan_graph_file();
    fs::path index = work_dir() / "query.pwix";
    REQUIRE(run_cli("build-index --graph " + graph.string() + " --index " + index.string() +
                    " --walks 2000 --seed 7")
                .exit_code == 0);

    // All frontier mass at depth 2 sits on dangling leaves whose fingerprints
    // are exactly e_v, so the combined vector is known in closed form.
    std::string cmd = "query 0 --graph " + graph.string() + " --index " + index.string() +
                      " --iters 2 --topk 8";
    auto r = run_cli(cmd);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out ==
          "# source\t0\n"
          "1\t4\t0.180625\n"
          "2\t5\t0.180625\n"
          "3\t6\t0.180625\n"
          "4\t0\t0.15\n"
          "5\t3\t0.0903125\n"
          "6\t7\t0.0903125\n"
          "7\t1\t0.06375\n"
          "8\t2\t0.06375\n");

    auto again = run_cli(cmd);
    CHECK(r.out == again.out);
}

TEST_CASE("query at depth zero is an index lookup") {
    fs::path graph = fan_graph_file();
    fs::path index = work_dir() / "lookup.pwix";
    REQUIRE(run_cli("build-index --graph " + graph.string() + " --index " + index.string() +
                    " --walks 500 --seed 3")
                .exit_code == 0);
    auto r = run_cli("query 1 --graph " + graph.string() + " --index " + index.string() +
                     " --iters 0 --topk 5");
    REQUIRE(r.exit_code == 0);

    std::ifstream in(index, std::ios::binary);
    ppr::PprIndex idx = ppr::load_index(in);
    std::string expected = "# source\t1\n";
    auto ranked = ppr::top_k(idx.fingerprint(1), 5);
    for (std::size_t i = 0; i < ranked.size(); ++i)
        expected += std::to_string(i + 1) + "\t" + std::to_string(ranked[i].first) + "\t" +
                    format_score(ranked[i].second) + "\n";
    CHECK(r.out == expected);
}

TEST_CASE("batch queries print blocks in input order") {
    fs::path graph = fan_graph_file();
    fs::path batch = work_dir() / "batch.txt";
    spit(batch, "# two sources\n2\n0\n");
    auto r = run_cli("query --graph " + graph.string() + " --batch " + batch.string() +
                     " --iters 1 --topk 3 --no-index");
    REQUIRE(r.exit_code == 0);
    std::size_t first = r.out.find("# source\t2");
    std::size_t second = r.out.find("# source\t0");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    CHECK(first < second);
}

TEST_CASE("index-free deep query leaves frontier mass unassigned") {
    auto r = run_cli("query 0 --graph " + fan_graph_file().string() +
                     " --no-index --iters 7 --topk 100");
    REQUIRE(r.exit_code == 0);
    double sum = 0.0;
    for (const RankedLine& line : parse_ranked(r.out)) sum += line.score;
    CHECK(sum <= 1.0 + 1e-9);
    CHECK(sum > 0.5);
}

TEST_CASE("query error reporting") {
    fs::path graph = fan_graph_file();
    auto unknown = run_cli("query 99 --graph " + graph.string() + " --no-index");
    CHECK(unknown.exit_code != 0);
    CHECK(unknown.err.find("unknown source id 99") != std::string::npos);

    auto neither = run_cli("query --graph " + graph.string());
    CHECK(neither.exit_code != 0);
    CHECK(neither.err.find("source id or --batch") != std::string::npos);

    fs::path bad_graph = work_dir() / "bad.txt";
    spit(bad_graph, "0 1\nbad line\n");
    auto malformed = run_cli("query 0 --graph " + bad_graph.string() + " --no-index");
    CHECK(malformed.exit_code != 0);
    CHECK(malformed.err.find("line 2") != std::string::npos);

    fs::path index = work_dir() / "conflict.pwix";
    REQUIRE(run_cli("build-index --graph " + graph.string() + " --index " + index.string() +
                    " --walks 50")
                .exit_code == 0);
    auto conflict = run_cli("query 0 --graph " + graph.string() + " --index " + index.string() +
                            " --teleport 0.3");
    CHECK(conflict.exit_code != 0);
    CHECK(conflict.err.find("conflicts with index teleport") != std::string::npos);
}

TEST_CASE("oracle prints the exact vector") {
    auto r = run_cli("oracle 0 --graph " + two_cycle_file().string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "1\t0\t0.5405405405\n2\t1\t0.4594594595\n");

    fs::path loop = work_dir() / "loop.txt";
    spit(loop, "0 0\n");
    auto rl = run_cli("oracle 0 --graph " + loop.string());
    REQUIRE(rl.exit_code == 0);
    CHECK(rl.out == "1\t0\t1\n");

    auto heavy = run_cli("oracle 0 --graph " + two_cycle_file().string() + " --teleport 0.99");
    CHECK(heavy.exit_code == 0);

    auto limited = run_cli("oracle 0 --graph " + two_cycle_file().string() + " --topk 1");
    REQUIRE(limited.exit_code == 0);
    CHECK(limited.out == "1\t0\t0.5405405405\n");
}

TEST_CASE("eval writes a report and a summary") {
    fs::path graph = fan_graph_file();
    fs::path batch = work_dir() / "eval_sources.txt";
    spit(batch, "0\n1\n2\n");
    fs::path report = work_dir() / "report.tsv";
    auto r = run_cli("eval --graph " + graph.string() + " --method full-path --walks 500" +
                     " --batch " + batch.string() + " --topk 3,5 --out " + report.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("k\tmean_rag\tsources") != std::string::npos);
    CHECK(r.out.find("# method\tfull-path") != std::string::npos);

    std::string tsv = slurp(report);
    CHECK(tsv.find("source\tbucket\tk\trag") != std::string::npos);
    CHECK(tsv.find("# ground_truth\tpower iteration") != std::string::npos);

    auto again = run_cli("eval --graph " + graph.string() + " --method full-path --walks 500" +
                         " --batch " + batch.string() + " --topk 3,5 --out " + report.string());
    CHECK(again.out == r.out);
    CHECK(slurp(report) == tsv);
}

TEST_CASE("eval input validation") {
    fs::path graph = fan_graph_file();
    auto bogus = run_cli("eval --graph " + graph.string() + " --method alchemy");
    CHECK(bogus.exit_code != 0);
    CHECK(bogus.err.find("unknown --method") != std::string::npos);

    fs::path empty = work_dir() / "empty_batch.txt";
    spit(empty, "# nothing here\n");
    auto no_sources = run_cli("eval --graph " + graph.string() + " --method full-path" +
                              " --walks 10 --batch " + empty.string());
    CHECK(no_sources.exit_code != 0);
    CHECK(no_sources.err.find("lists no sources") != std::string::npos);

    auto no_index = run_cli("eval --graph " + graph.string() + " --method index");
    CHECK(no_index.exit_code != 0);
}

} // TEST_SUITE
