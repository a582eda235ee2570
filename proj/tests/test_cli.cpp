#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "reference_rows.hpp"
#include "wsbayes/cli.hpp"

using namespace wsbayes;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "wsbayes");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("wsbayes_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string survey_text(const std::vector<std::pair<std::string, int>>& split, bool header = true) {
    std::string text = header ? "respondent_id,category\n" : "";
    int id = 1;
    for (const auto& [cat, k] : split)
        for (int i = 0; i < k; ++i) text += "r" + std::to_string(id++) + "," + cat + "\n";
    return text;
}

std::vector<std::int64_t> vec(std::span<const std::int64_t> v) { return {v.begin(), v.end()}; }

bool single_error_line(const std::string& err) {
    return err.starts_with("error: ") && err.find('\n') == err.size() - 1;
}

}  // namespace

TEST_CASE("ingest_survey") {
    std::istringstream a(survey_text({{"distance", 16}, {"speed", 14}, {"availability", 20}}));
    const auto s = cli::ingest_survey(a);
    CHECK(s.categories == std::vector<std::string>{"distance", "speed", "availability"});
    CHECK(vec(s.counts.values()) == std::vector<std::int64_t>{16, 14, 20});

    std::istringstream b(survey_text({{"x", 24}, {"y", 11}, {"z", 12}}, false));
    CHECK(vec(cli::ingest_survey(b).counts.values()) == std::vector<std::int64_t>{24, 11, 12});

    std::istringstream c(survey_text({{"b", 2}, {"a", 3}}));
    const auto ordered = cli::ingest_survey(c, std::vector<std::string>{"a", "b", "c"});
    CHECK(vec(ordered.counts.values()) == std::vector<std::int64_t>{3, 2, 0});

    std::istringstream dup("r1,a\nr2,b\nr1,b\n");
    CHECK_THROWS_AS(cli::ingest_survey(dup), cli::CommandError);
    std::istringstream unknown("r1,a\nr2,q\n");
    CHECK_THROWS_AS(cli::ingest_survey(unknown, std::vector<std::string>{"a", "b"}), cli::CommandError);
    std::istringstream empty("");
    CHECK_THROWS_AS(cli::ingest_survey(empty), cli::CommandError);
}

TEST_CASE("survey ingest command") {
    const auto dir = scratch("ingest");
    std::ofstream(dir / "s.csv") << survey_text({{"d", 16}, {"s", 14}, {"a", 20}});
    const auto r = invoke({"survey", "ingest", (dir / "s.csv").string(), "--json", (dir / "c.json").string()});
    CHECK(r.status == 0);
    CHECK(r.out == "d: 16\ns: 14\na: 20\ntotal: 50\n");
    const auto doc = nlohmann::json::parse(slurp(dir / "c.json"));
    CHECK(doc["counts"] == nlohmann::json::array({16, 14, 20}));

    std::ofstream(dir / "dup.csv") << "r1,a\nr1,b\n";
    const auto bad = invoke({"survey", "ingest", (dir / "dup.csv").string()});
    CHECK(bad.status != 0);
    CHECK(single_error_line(bad.err));
}

TEST_CASE("estimate command") {
    auto r = invoke({"estimate", "--counts", "16,14,20", "--method", "freq"});
    CHECK(r.status == 0);
    CHECK(r.out.find("frequentist weights: 0.32 0.28 0.4\n") != std::string::npos);
    CHECK(r.out.find("bayesian") == std::string::npos);

    r = invoke({"estimate", "--counts", "7,7,7", "--method", "both"});
    CHECK(r.status == 0);
    CHECK(r.out.find("frequentist weights: 0.333333 0.333333 0.333333\n") != std::string::npos);
    CHECK(r.out.find("bayesian weights: 0.333333 0.333333 0.333333\n") != std::string::npos);

    const auto e = cli::estimate(validate_counts({2, 3}), cli::Method::bayes, FitConfig{});
    REQUIRE(e.bayes);
    CHECK(e.bayes->size() == 2);
    CHECK((*e.bayes)[0] + (*e.bayes)[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(e.freq);
}

TEST_CASE("estimate JSON round-trips") {
    const auto dir = scratch("json");
    const auto path = dir / "e.json";
    const auto r = invoke({"estimate", "--counts", "2,3,5", "--json", path.string()});
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(slurp(path));
    const auto e = cli::estimate(validate_counts({2, 3, 5}), cli::Method::both, FitConfig{});
    CHECK(doc == cli::to_json(e));
    CHECK(doc.dump() == nlohmann::json::parse(doc.dump()).dump());
}

TEST_CASE("estimate flag errors") {
    for (auto args : std::vector<std::vector<std::string>>{
             {"estimate", "--counts", "1,x,3"},
             {"estimate", "--counts", "5"},
             {"estimate", "--counts", "-1,2,3"},
             {"estimate", "--counts", "0,0,0"},
             {"estimate"},
             {"estimate", "--counts", "1,2", "--method", "nope"},
             {"estimate", "--counts", "1,2", "--tol", "-1"},
             {"estimate", "--counts", "1,2,3", "--alpha-init", "1,1"},
             {"frobnicate"},
         }) {
        const auto r = invoke(args);
        CHECK(r.status != 0);
        CHECK(single_error_line(r.err));
    }
}

TEST_CASE("compare rows") {
    std::string input = "n1,n2,n3\n";
    for (const auto& row : reference::kRows)
        input += std::to_string(row.counts[0]) + "," + std::to_string(row.counts[1]) + "," +
                 std::to_string(row.counts[2]) + "\n";
    std::istringstream in(input);
    std::ostringstream out, err;
    CHECK(cli::compare_rows(in, out, err, FitConfig{}) == 0);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == report_csv_header(3));
    std::size_t k = 0;
    while (std::getline(lines, line)) {
        REQUIRE(k < reference::kRows.size());
        std::vector<double> cells;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) cells.push_back(std::stod(cell));
        REQUIRE(cells.size() == 20);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::abs(cells[4 + i] - reference::kRows[k].w[i]) <= 5e-5);
            CHECK(std::abs(cells[10 + i] - reference::kRows[k].evd[i]) <= 5e-5);
        }
        ++k;
    }
    CHECK(k == 12);

    std::istringstream none("");
    std::ostringstream header_only;
    cli::compare_rows(none, header_only, err, FitConfig{});
    CHECK(header_only.str() == report_csv_header(3) + "\n");

    std::istringstream one("20,40,20\n1,,2\n5,5,5\n");
    std::ostringstream table, problems;
    CHECK(cli::compare_rows(one, table, problems, FitConfig{}) == 1);
    CHECK(table.str().find("\n80,20,40,20,0.25,0.5,0.25,") != std::string::npos);
    CHECK(problems.str().starts_with("line 2: "));
}

TEST_CASE("simulate output is reproducible") {
    const auto dir = scratch("simulate");
    const auto a = dir / "a.csv", b = dir / "b.csv";
    for (const auto& p : {a, b}) {
        const auto r = invoke({"simulate", "--true-weights", "0.2,0.3,0.5", "--sizes", "10,100", "--reps", "200",
                               "--seed", "42", "--output", p.string()});
        REQUIRE(r.status == 0);
    }
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).starts_with("n,mean_gain,"));

    auto bad = invoke({"simulate", "--true-weights", "0.2,0.3", "--sizes", "10", "--output", (dir / "x").string()});
    CHECK(bad.status != 0);
    CHECK(single_error_line(bad.err));
    bad = invoke({"simulate", "--true-weights", "0.5,0.5", "--sizes", "100,10", "--output", (dir / "x").string()});
    CHECK(bad.status != 0);
    CHECK(single_error_line(bad.err));
}

TEST_CASE("optimize output is reproducible") {
    const auto dir = scratch("optimize");
    for (const char* sub : {"a", "b"}) {
        const auto r = invoke({"optimize", "--counts", "16,14,20", "--weighting", "both", "--seed", "7", "--runs",
                               "5", "--out-dir", (dir / sub).string()});
        REQUIRE(r.status == 0);
        CHECK(r.out.find("methodology mean worst best\n") != std::string::npos);
    }
    for (const char* file : {"generation_trace_slot0.csv", "run_trace_slot0.csv", "summary_slot0.csv"})
        CHECK(slurp(dir / "a" / file) == slurp(dir / "b" / file));
    const auto summary = slurp(dir / "a" / "summary_slot0.csv");
    CHECK(summary.starts_with("methodology,mean,worst,best\nfrequentist,"));

    std::ofstream(dir / "broken.json") << "{\"nodes\": [";
    const auto bad = invoke({"optimize", "--graph", (dir / "broken.json").string(), "--counts", "1,2,3"});
    CHECK(bad.status == 1);
    CHECK(bad.err.starts_with("error: graph_parse: "));
    CHECK(single_error_line(bad.err));

    const auto both_weights = invoke({"optimize", "--weights", "0.2,0.3,0.5", "--weighting", "both"});
    CHECK(both_weights.status != 0);
}

TEST_CASE("executable exit status") {
    const std::string exe = WSBAYES_CLI_PATH;
    CHECK(std::system((exe + " estimate --counts 2,3,5 > /dev/null").c_str()) == 0);
    CHECK(std::system((exe + " estimate --counts 2,x > /dev/null 2>&1").c_str()) != 0);
}
