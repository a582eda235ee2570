/**
 * @file route_ga.hpp
 * @brief Weighted-sum parking-route search on a time-slotted road graph.
 *
 * Three normalized objectives are scalarized with a weight vector and
 * minimized by a variable-length path genetic algorithm:
 *   f1  path distance / D_max
 *   f2  1 - (distance-weighted mean edge speed) / (fastest edge speed in the slot)
 *   f3  1 - availability of the terminal parking lot
 */

#ifndef WSBAYES_ROUTE_GA_HPP
#define WSBAYES_ROUTE_GA_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsbayes/core.hpp"
#include "wsbayes/rng.hpp"

namespace wsbayes {

using NodeId = std::size_t;
using Path = std::vector<NodeId>;

inline constexpr std::size_t kDefaultTimeSlots = 6;

struct Edge {
    NodeId from = 0;
    NodeId to = 0;
    double distance_km = 0.0;
    std::vector<double> speed_kmh;  ///< one entry per time slot
};

struct ParkingLot {
    NodeId node = 0;
    std::vector<double> availability;  ///< one entry per time slot, in [0,1]
};

class GraphParseError : public std::runtime_error {
public:
    GraphParseError(const std::string& what, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class UnreachableLot : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Roads are undirected; every edge is traversable in both directions.
class RouteProblem {
public:
    RouteProblem(std::vector<std::string> node_names, std::vector<Edge> edges,
                 std::vector<ParkingLot> lots, NodeId origin,
                 std::size_t time_slots = kDefaultTimeSlots);

    /// Parses the JSON graph document (`nodes`, `edges`, `parking_lots`, `origin`, `slots`).
    static RouteProblem from_json(std::string_view text);

    std::size_t node_count() const { return names_.size(); }
    const std::string& node_name(NodeId id) const { return names_.at(id); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<ParkingLot>& lots() const { return lots_; }
    NodeId origin() const { return origin_; }
    std::size_t time_slots() const { return slots_; }

    struct Arc {
        NodeId to;
        std::size_t edge;
    };
    const std::vector<Arc>& neighbours(NodeId node) const { return adjacency_.at(node); }
    std::optional<std::size_t> edge_between(NodeId a, NodeId b) const;
    /// Index into lots() when @p node is a parking lot.
    std::optional<std::size_t> lot_at(NodeId node) const;

    /// Distance normalizer: longest simple origin-to-lot path found by the pre-pass.
    double max_path_distance() const { return d_max_; }
    double max_speed(std::size_t slot) const { return v_max_.at(slot); }

    double path_distance(const Path& path) const;

    /// Throws std::invalid_argument unless @p path is a simple origin-to-lot path.
    void check_path(const Path& path) const;

private:
    void compute_normalizers();

    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<ParkingLot> lots_;
    NodeId origin_;
    std::size_t slots_;
    std::vector<std::vector<Arc>> adjacency_;
    std::vector<std::optional<std::size_t>> lot_of_node_;
    double d_max_ = 0.0;
    std::vector<double> v_max_;
};

/// Number of origin-to-lot simple paths inspected exhaustively before the
/// normalization pre-pass falls back to random sampling.
inline constexpr std::size_t kNormalizationPaths = 10'000;

struct Chromosome {
    Path path;
    double fitness = 0.0;

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// sum_i w_i f_i.
double scalarize(const WeightVector& weights, const ObjectiveValues& objectives);

ObjectiveValues route_objectives(const RouteProblem& problem, const Path& path, std::size_t slot);

struct GaConfig {
    int population = 50;
    int generations = 30;
    int tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    int elitism = 1;
    RngSeed seed{};
    int runs = 30;
    /// Worker threads across runs; 0 picks hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

struct RunTrace {
    /// Best fitness of each generation; generation 1 is the initial population.
    std::vector<double> best_per_generation;
    Chromosome best;
};

struct FitnessSummary {
    double mean = 0.0;
    double worst = 0.0;
    double best = 0.0;
};

struct GaTrace {
    std::vector<RunTrace> runs;
    FitnessSummary summary;  ///< over the final best fitness of each run
};

class GaFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

GaTrace evolve(const RouteProblem& problem, const WeightVector& weights, std::size_t slot,
               const GaConfig& config);

struct PairedTrace {
    GaTrace freq;
    GaTrace bayes;
};

/// Runs both weightings with identical per-run seeds (common random numbers).
PairedTrace compare_weightings(const RouteProblem& problem, const WeightVector& freq,
                               const WeightVector& bayes, std::size_t slot, const GaConfig& config);

struct LabelledTrace {
    std::string label;
    const GaTrace* trace;
};

/// `generation,fitness_<label>...` for run @p run.
std::string generation_trace_csv(std::span<const LabelledTrace> traces, std::size_t run = 0);
/// `run,fitness_<label>...` with the final best fitness of every run.
std::string run_trace_csv(std::span<const LabelledTrace> traces);
/// `methodology,mean,worst,best`, one row per trace.
std::string summary_csv(std::span<const LabelledTrace> traces);

/// The paired forms use the labels `freq` / `bayes` (`frequentist` / `bayesian` in the summary).
std::string generation_trace_csv(const PairedTrace& trace, std::size_t run = 0);
std::string run_trace_csv(const PairedTrace& trace);
std::string summary_csv(const PairedTrace& trace);

}  // namespace wsbayes

#endif  // WSBAYES_ROUTE_GA_HPP
