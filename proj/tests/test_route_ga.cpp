#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "toy_graphs.hpp"
#include "wsbayes/route_ga.hpp"

using namespace wsbayes;
using namespace toy;

namespace {

RouteProblem demo_graph() {
    std::ifstream in(WSBAYES_DATA_DIR "/demo_graph.json");
    std::stringstream text;
    text << in.rdbuf();
    return RouteProblem::from_json(text.str());
}

GaConfig small_config(std::uint64_t seed) {
    GaConfig c;
    c.seed = RngSeed{seed, 0};
    c.runs = 6;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("scalarize") {
    CHECK(scalarize(make_weight_vector({0.29, 0.30, 0.41}), ObjectiveValues({0.5, 0.5, 0.5})) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(scalarize(make_weight_vector({0.32, 0.28, 0.40}), ObjectiveValues({1.0, 0.0, 0.0})) ==
          doctest::Approx(0.32).epsilon(1e-15));
    CHECK(scalarize(make_weight_vector({1.0, 1.0, 1.0}), ObjectiveValues({0.3, 0.6, 0.9})) ==
          doctest::Approx(0.6).epsilon(1e-15));
    CHECK_THROWS_AS(scalarize(make_weight_vector({0.5, 0.5}), ObjectiveValues({0.1, 0.2, 0.3})), LengthMismatch);

    // convex combination stays within the objective range
    const ObjectiveValues f({0.1, 0.7, 0.4});
    for (auto w : {std::vector<double>{1, 2, 3}, {5, 1, 1}, {0.01, 0.01, 10}}) {
        const double s = scalarize(make_weight_vector(w), f);
        CHECK(s >= 0.1);
        CHECK(s <= 0.7);
    }
}

TEST_CASE("triangle objectives") {
    const auto p = triangle();
    CHECK(p.max_path_distance() == doctest::Approx(13.0));
    CHECK(p.max_speed(0) == 60.0);
    CHECK(p.max_speed(1) == 70.0);

    const auto abc = route_objectives(p, {0, 1, 2}, 0);
    CHECK(abc[0] == doctest::Approx(5.0 / 13.0).epsilon(1e-14));
    CHECK(abc[1] == doctest::Approx(0.2).epsilon(1e-14));  // (2*30 + 3*60) / 5 = 48 km/h
    CHECK(abc[2] == doctest::Approx(0.25).epsilon(1e-14));

    const auto ab = route_objectives(p, {0, 1}, 0);
    CHECK(ab[0] == doctest::Approx(2.0 / 13.0).epsilon(1e-14));
    CHECK(ab[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ab[2] == doctest::Approx(0.5).epsilon(1e-14));

    // single edge at the slot's top speed into a fully available lot
    const auto ac = route_objectives(p, {0, 2}, 1);
    CHECK(ac[0] == doctest::Approx(10.0 / 13.0).epsilon(1e-14));
    CHECK(ac[1] == 0.0);
    CHECK(ac[2] == 0.0);
}

TEST_CASE("distance objective does not depend on the slot") {
    const auto p = ladder();
    for (const auto& path : all_paths(p)) {
        const auto a = route_objectives(p, path, 0);
        const auto b = route_objectives(p, path, 1);
        CHECK(a[0] == b[0]);
    }
}

TEST_CASE("invalid paths are rejected") {
    const auto p = triangle();
    CHECK_THROWS_AS(route_objectives(p, {0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(route_objectives(p, {1, 2}, 0), std::invalid_argument);
    CHECK_THROWS_AS(route_objectives(p, {0, 1, 0, 2}, 0), std::invalid_argument);
    CHECK_THROWS_AS(route_objectives(p, {0, 1}, 2), std::invalid_argument);
    const auto l = ladder();
    CHECK_THROWS_AS(route_objectives(l, {0, 5}, 0), std::invalid_argument);
    CHECK_THROWS_AS(route_objectives(l, {0, 1, 2}, 0), std::invalid_argument);
}

TEST_CASE("graph validation") {
    CHECK_THROWS_AS(RouteProblem({"a", "b", "c"}, {Edge{0, 1, 1.0, {10.0}}}, {{2, {1.0}}}, 0, 1), UnreachableLot);
    CHECK_THROWS_AS(RouteProblem({"a", "b"}, {Edge{0, 1, 1.0, {10.0}}}, {{0, {1.0}}}, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RouteProblem({"a", "b"}, {Edge{0, 1, -1.0, {10.0}}}, {{1, {1.0}}}, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RouteProblem({"a", "b"}, {Edge{0, 1, 1.0, {10.0}}}, {{1, {1.5}}}, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RouteProblem({"a", "b"}, {Edge{0, 1, 1.0, {10.0, 5.0}}}, {{1, {1.0}}}, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("graph JSON") {
    const auto p = RouteProblem::from_json(R"({
        "nodes": ["o", "x", "lot"], "origin": "o", "slots": 1,
        "edges": [{"from": "o", "to": "x", "distance_km": 1.5, "speeds": [20]},
                  {"from": "x", "to": "lot", "distance_km": 0.5, "speeds": [40]}],
        "parking_lots": [{"node": "lot", "availability": [0.6]}]})");
    CHECK(p.node_count() == 3);
    CHECK(p.node_name(2) == "lot");
    CHECK(p.max_path_distance() == doctest::Approx(2.0));
    CHECK(route_objectives(p, {0, 1, 2}, 0)[2] == doctest::Approx(0.4));

    const auto numeric = RouteProblem::from_json(R"({"nodes": [1, 2], "origin": 1,
        "edges": [{"from": 1, "to": 2, "distance_km": 1, "speeds": [1,1,1,1,1,1]}],
        "parking_lots": [{"node": 2, "availability": [1,1,1,1,1,1]}]})");
    CHECK(numeric.time_slots() == kDefaultTimeSlots);

    try {
        RouteProblem::from_json("{\"nodes\": [1, 2,, 3]}");
        FAIL("expected a parse error");
    } catch (const GraphParseError& e) {
        CHECK(e.position() == 17);
    }
    CHECK_THROWS_AS(RouteProblem::from_json(R"({"nodes": ["a"]})"), GraphParseError);
    CHECK_THROWS_AS(RouteProblem::from_json(R"({"nodes": ["a", "b"], "origin": "a",
        "edges": [{"from": "a", "to": "zz", "distance_km": 1, "speeds": [1]}], "parking_lots": []})"),
                    GraphParseError);
}

TEST_CASE("demo graph loads") {
    const auto p = demo_graph();
    CHECK(p.node_count() == 12);
    CHECK(p.time_slots() == 6);
    CHECK(p.max_path_distance() > 0.0);
}

TEST_CASE("elitism keeps best fitness non-increasing and within [0,1]") {
    const auto p = demo_graph();
    for (std::size_t slot : {std::size_t{0}, std::size_t{3}}) {
        const auto trace = evolve(p, make_weight_vector({0.32, 0.28, 0.40}), slot, small_config(slot + 1));
        REQUIRE(trace.runs.size() == 6);
        for (const auto& run : trace.runs) {
            REQUIRE(run.best_per_generation.size() == 30);
            for (std::size_t g = 1; g < run.best_per_generation.size(); ++g)
                CHECK(run.best_per_generation[g] <= run.best_per_generation[g - 1]);
            for (double f : run.best_per_generation) {
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
            }
            CHECK(run.best.fitness == run.best_per_generation.back());
            p.check_path(run.best.path);
        }
        CHECK(trace.summary.best <= trace.summary.mean + 1e-15);
        CHECK(trace.summary.mean <= trace.summary.worst + 1e-15);
    }
}

TEST_CASE("GA finds the enumerated optimum on the ladder") {
    const auto p = ladder();
    const auto paths = all_paths(p);
    REQUIRE(paths.size() <= 200);
    for (auto w : {std::vector<double>{0.32, 0.28, 0.40}, {0.6, 0.2, 0.2}, {0.1, 0.1, 0.8}}) {
        const auto weights = make_weight_vector(w);
        for (std::size_t slot : {std::size_t{0}, std::size_t{1}}) {
            const double target = brute_force_minimum(p, weights, slot);
            GaConfig config = small_config(99);
            config.runs = 30;
            const auto trace = evolve(p, weights, slot, config);
            int hits = 0;
            for (const auto& run : trace.runs) {
                CHECK(run.best.fitness >= target - 1e-12);
                hits += std::abs(run.best.fitness - target) <= 1e-12;
            }
            CHECK(hits >= 28);
        }
    }
}

TEST_CASE("evolve is deterministic") {
    const auto p = demo_graph();
    const auto w = make_weight_vector({0.29, 0.30, 0.41});
    auto config = small_config(7);
    const auto a = evolve(p, w, 2, config);
    config.threads = 3;
    const auto b = evolve(p, w, 2, config);
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t r = 0; r < a.runs.size(); ++r) {
        CHECK(a.runs[r].best_per_generation == b.runs[r].best_per_generation);
        CHECK(a.runs[r].best == b.runs[r].best);
    }
}

TEST_CASE("compare_weightings") {
    const auto p = demo_graph();
    const auto w = make_weight_vector({0.32, 0.28, 0.40});
    const auto same = compare_weightings(p, w, w, 0, small_config(5));
    for (std::size_t r = 0; r < same.freq.runs.size(); ++r) {
        CHECK(same.freq.runs[r].best_per_generation == same.bayes.runs[r].best_per_generation);
        CHECK(same.freq.runs[r].best == same.bayes.runs[r].best);
    }

    const auto paired = compare_weightings(p, w, make_weight_vector({0.1, 0.1, 0.8}), 0, small_config(5));
    CHECK(paired.freq.summary.mean != paired.bayes.summary.mean);
    const auto summary = summary_csv(paired);
    CHECK(summary.starts_with("methodology,mean,worst,best\nfrequentist,"));
    CHECK(summary.find("\nbayesian,") != std::string::npos);
    CHECK(generation_trace_csv(paired).starts_with("generation,fitness_freq,fitness_bayes\n1,"));
    CHECK(run_trace_csv(paired).starts_with("run,fitness_freq,fitness_bayes\n1,"));
}

TEST_CASE("GA config validation") {
    const auto p = triangle();
    const auto w = make_weight_vector({1.0, 1.0, 1.0});
    auto bad = [&](auto mutate) {
        GaConfig c;
        mutate(c);
        CHECK_THROWS_AS(evolve(p, w, 0, c), std::invalid_argument);
    };
    bad([](GaConfig& c) { c.population = 0; });
    bad([](GaConfig& c) { c.generations = 0; });
    bad([](GaConfig& c) { c.tournament_size = 1; });
    bad([](GaConfig& c) { c.crossover_rate = 1.5; });
    bad([](GaConfig& c) { c.mutation_rate = -0.1; });
    bad([](GaConfig& c) { c.elitism = 50; });
    bad([](GaConfig& c) { c.runs = 0; });
    CHECK_THROWS_AS(evolve(p, make_weight_vector({0.5, 0.5}), 0, GaConfig{}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(p, w, 5, GaConfig{}), std::invalid_argument);
}
