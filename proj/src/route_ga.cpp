#include "wsbayes/route_ga.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "parallel.hpp"
#include "wsbayes/estimators.hpp"

namespace wsbayes {

GraphParseError::GraphParseError(const std::string& what, std::size_t position)
    : std::runtime_error("graph parse error at byte " + std::to_string(position) + ": " + what),
      position_(position) {}

// ---------------------------------------------------------------------------
// RouteProblem

RouteProblem::RouteProblem(std::vector<std::string> node_names, std::vector<Edge> edges,
                           std::vector<ParkingLot> lots, NodeId origin, std::size_t time_slots)
    : names_(std::move(node_names)),
      edges_(std::move(edges)),
      lots_(std::move(lots)),
      origin_(origin),
      slots_(time_slots) {
    const std::size_t n = names_.size();
    if (n == 0) throw std::invalid_argument("graph has no nodes");
    if (slots_ == 0) throw std::invalid_argument("graph needs at least one time slot");
    if (origin_ >= n) throw std::invalid_argument("origin is not a node");
    if (lots_.empty()) throw std::invalid_argument("graph has no parking lots");

    adjacency_.assign(n, {});
    lot_of_node_.assign(n, std::nullopt);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        if (edge.from >= n || edge.to >= n) throw std::invalid_argument("edge endpoint is not a node");
        if (edge.from == edge.to) throw std::invalid_argument("self-loop edge");
        if (!(edge.distance_km > 0.0) || !std::isfinite(edge.distance_km))
            throw std::invalid_argument("edge distance must be positive");
        if (edge.speed_kmh.size() != slots_)
            throw std::invalid_argument("edge speed vector length differs from slot count");
        for (double v : edge.speed_kmh)
            if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("edge speeds must be positive");
        if (edge_between(edge.from, edge.to)) throw std::invalid_argument("duplicate edge");
        adjacency_[edge.from].push_back({edge.to, e});
        adjacency_[edge.to].push_back({edge.from, e});
    }
    for (std::size_t k = 0; k < lots_.size(); ++k) {
        const ParkingLot& lot = lots_[k];
        if (lot.node >= n) throw std::invalid_argument("parking lot is not a node");
        if (lot_of_node_[lot.node]) throw std::invalid_argument("duplicate parking lot");
        if (lot.availability.size() != slots_)
            throw std::invalid_argument("lot availability length differs from slot count");
        for (double a : lot.availability)
            if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("availability outside [0,1]");
        lot_of_node_[lot.node] = k;
    }
    if (lot_of_node_[origin_]) throw std::invalid_argument("origin must not be a parking lot");

    // Speeds are positive in every slot, so reachability does not depend on the slot.
    std::vector<char> seen(n, 0);
    std::deque<NodeId> queue{origin_};
    seen[origin_] = 1;
    bool reaches_lot = false;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        if (lot_of_node_[u]) reaches_lot = true;
        for (const Arc& arc : adjacency_[u]) {
            if (!seen[arc.to]) {
                seen[arc.to] = 1;
                queue.push_back(arc.to);
            }
        }
    }
    if (!reaches_lot) throw UnreachableLot("origin cannot reach any parking lot");

    compute_normalizers();
}

std::optional<std::size_t> RouteProblem::edge_between(NodeId a, NodeId b) const {
    if (a >= adjacency_.size()) return std::nullopt;
    for (const Arc& arc : adjacency_[a])
        if (arc.to == b) return arc.edge;
    return std::nullopt;
}

std::optional<std::size_t> RouteProblem::lot_at(NodeId node) const {
    if (node >= lot_of_node_.size()) return std::nullopt;
    return lot_of_node_[node];
}

double RouteProblem::path_distance(const Path& path) const {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto e = edge_between(path[i - 1], path[i]);
        if (!e) throw std::invalid_argument("consecutive path nodes are not adjacent");
        total += edges_[*e].distance_km;
    }
    return total;
}

void RouteProblem::check_path(const Path& path) const {
    if (path.size() < 2) throw std::invalid_argument("path needs at least one edge");
    if (path.front() != origin_) throw std::invalid_argument("path does not start at the origin");
    if (!lot_at(path.back())) throw std::invalid_argument("path does not end at a parking lot");
    std::vector<char> seen(names_.size(), 0);
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] >= names_.size()) throw std::invalid_argument("path node out of range");
        if (seen[path[i]]) throw std::invalid_argument("path revisits a node");
        seen[path[i]] = 1;
        if (i > 0 && !edge_between(path[i - 1], path[i]))
            throw std::invalid_argument("consecutive path nodes are not adjacent");
    }
}

namespace {

// Depth-first enumeration of simple origin-to-lot paths; stops after `limit`
// paths. Returns true when the enumeration was exhaustive.
bool enumerate_paths(const RouteProblem& problem, std::size_t limit, double& longest,
                     std::size_t& found) {
    std::vector<char> on_path(problem.node_count(), 0);
    struct Frame {
        NodeId node;
        std::size_t next_arc;
        double distance;
    };
    std::vector<Frame> stack{{problem.origin(), 0, 0.0}};
    on_path[problem.origin()] = 1;
    while (!stack.empty()) {
        Frame& top = stack.back();
        const auto& arcs = problem.neighbours(top.node);
        if (top.next_arc == arcs.size()) {
            on_path[top.node] = 0;
            stack.pop_back();
            continue;
        }
        const auto arc = arcs[top.next_arc++];
        if (on_path[arc.to]) continue;
        const double d = top.distance + problem.edges()[arc.edge].distance_km;
        if (problem.lot_at(arc.to)) {
            longest = std::max(longest, d);
            if (++found >= limit) return false;
        }
        on_path[arc.to] = 1;
        stack.push_back({arc.to, 0, d});
    }
    return true;
}

std::vector<double> shortest_distances(const RouteProblem& problem) {
    std::vector<double> dist(problem.node_count(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[problem.origin()] = 0.0;
    heap.push({0.0, problem.origin()});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& arc : problem.neighbours(u)) {
            const double nd = d + problem.edges()[arc.edge].distance_km;
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                heap.push({nd, arc.to});
            }
        }
    }
    return dist;
}

// Random simple walk from the last node of `path` that stops at a parking lot.
// Nodes flagged in `blocked` are never entered. On a lot with unexplored
// neighbours the walk stops with probability 1/2.
bool extend_to_lot(const RouteProblem& problem, Rng& rng, Path& path, std::vector<char>& blocked) {
    std::vector<NodeId> options;
    for (;;) {
        const NodeId u = path.back();
        options.clear();
        for (const auto& arc : problem.neighbours(u))
            if (!blocked[arc.to]) options.push_back(arc.to);
        const bool at_lot = path.size() > 1 && problem.lot_at(u).has_value();
        if (at_lot && (options.empty() || rng.uniform() < 0.5)) return true;
        if (options.empty()) return false;
        const NodeId v = options[rng.below(options.size())];
        blocked[v] = 1;
        path.push_back(v);
    }
}

// Random simple walk from the last node of `path` to `target`.
bool extend_to_target(const RouteProblem& problem, Rng& rng, Path& path, NodeId target,
                      std::vector<char>& blocked) {
    std::vector<NodeId> options;
    while (path.back() != target) {
        options.clear();
        for (const auto& arc : problem.neighbours(path.back())) {
            if (arc.to == target) {
                options.assign(1, target);
                break;
            }
            if (!blocked[arc.to]) options.push_back(arc.to);
        }
        if (options.empty()) return false;
        const NodeId v = options[rng.below(options.size())];
        blocked[v] = 1;
        path.push_back(v);
    }
    return true;
}

}  // namespace

void RouteProblem::compute_normalizers() {
    v_max_.assign(slots_, 0.0);
    for (const Edge& e : edges_)
        for (std::size_t s = 0; s < slots_; ++s) v_max_[s] = std::max(v_max_[s], e.speed_kmh[s]);

    double longest = 0.0;
    std::size_t found = 0;
    const bool exhaustive = enumerate_paths(*this, kNormalizationPaths, longest, found);
    if (!exhaustive) {
        const auto dist = shortest_distances(*this);
        for (const auto& lot : lots_)
            if (std::isfinite(dist[lot.node])) longest = std::max(longest, dist[lot.node]);
        Rng rng(RngSeed{0x5EED0F0D15A7CEULL, 0});
        for (std::size_t k = 0; k < kNormalizationPaths; ++k) {
            Path path{origin_};
            std::vector<char> blocked(names_.size(), 0);
            blocked[origin_] = 1;
            if (extend_to_lot(*this, rng, path, blocked)) longest = std::max(longest, path_distance(path));
        }
    }
    d_max_ = longest;
}

RouteProblem RouteProblem::from_json(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw GraphParseError(e.what(), e.byte);
    }
    auto field = [&](const json& obj, const char* key) -> const json& {
        if (!obj.is_object() || !obj.contains(key))
            throw GraphParseError(std::string("missing field '") + key + "'", 0);
        return obj.at(key);
    };
    auto id_text = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        throw GraphParseError("node ids must be strings or integers", 0);
    };
    try {
        const std::size_t slots = doc.contains("slots") ? doc.at("slots").get<std::size_t>() : kDefaultTimeSlots;
        std::vector<std::string> names;
        std::unordered_map<std::string, NodeId> index;
        for (const auto& node : field(doc, "nodes")) {
            auto name = id_text(node);
            if (!index.emplace(name, names.size()).second)
                throw GraphParseError("duplicate node '" + name + "'", 0);
            names.push_back(std::move(name));
        }
        auto lookup = [&](const json& v) {
            const auto name = id_text(v);
            const auto it = index.find(name);
            if (it == index.end()) throw GraphParseError("unknown node '" + name + "'", 0);
            return it->second;
        };
        std::vector<Edge> edges;
        for (const auto& e : field(doc, "edges")) {
            edges.push_back(Edge{lookup(field(e, "from")), lookup(field(e, "to")),
                                 field(e, "distance_km").get<double>(),
                                 field(e, "speeds").get<std::vector<double>>()});
        }
        std::vector<ParkingLot> lots;
        for (const auto& p : field(doc, "parking_lots")) {
            lots.push_back(ParkingLot{lookup(field(p, "node")),
                                      field(p, "availability").get<std::vector<double>>()});
        }
        return RouteProblem(std::move(names), std::move(edges), std::move(lots),
                            lookup(field(doc, "origin")), slots);
    } catch (const json::exception& e) {
        throw GraphParseError(e.what(), 0);
    }
}

// ---------------------------------------------------------------------------
// Objectives

double scalarize(const WeightVector& weights, const ObjectiveValues& objectives) {
    require_same_length(weights.size(), objectives.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * objectives[i];
    return total;
}

ObjectiveValues route_objectives(const RouteProblem& problem, const Path& path, std::size_t slot) {
    if (slot >= problem.time_slots()) throw std::invalid_argument("time slot out of range");
    problem.check_path(path);

    double distance = 0.0;
    double speed_distance = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Edge& e = problem.edges()[*problem.edge_between(path[i - 1], path[i])];
        distance += e.distance_km;
        speed_distance += e.distance_km * e.speed_kmh[slot];
    }
    const double mean_speed = speed_distance / distance;
    const auto& lot = problem.lots()[*problem.lot_at(path.back())];

    const double d_max = problem.max_path_distance();
    const double f_distance = d_max > 0.0 ? std::clamp(distance / d_max, 0.0, 1.0) : 0.0;
    const double f_speed = std::clamp(1.0 - mean_speed / problem.max_speed(slot), 0.0, 1.0);
    const double f_avail = std::clamp(1.0 - lot.availability[slot], 0.0, 1.0);
    return ObjectiveValues({f_distance, f_speed, f_avail});
}

// ---------------------------------------------------------------------------
// Genetic algorithm

void GaConfig::validate() const {
    if (population < 1) throw std::invalid_argument("population must be positive");
    if (generations < 1) throw std::invalid_argument("generations must be positive");
    if (tournament_size < 2) throw std::invalid_argument("tournament size must be >= 2");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
        throw std::invalid_argument("crossover rate outside [0,1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw std::invalid_argument("mutation rate outside [0,1]");
    if (elitism < 1 || elitism >= population)
        throw std::invalid_argument("elitism must be in [1, population)");
    if (runs < 1) throw std::invalid_argument("runs must be positive");
}

namespace {

constexpr int kInitAttemptsPerSlot = 50;

class GeneticSearch {
public:
    GeneticSearch(const RouteProblem& problem, const WeightVector& weights, std::size_t slot,
                  const GaConfig& config, RngSeed seed)
        : problem_(problem), weights_(weights), slot_(slot), config_(config), rng_(seed) {}

    RunTrace run() {
        RunTrace trace;
        std::vector<Chromosome> population = initial_population();
        for (int g = 0; g < config_.generations; ++g) {
            if (g > 0) population = next_generation(population);
            trace.best_per_generation.push_back(population.front().fitness);
        }
        trace.best = population.front();
        return trace;
    }

private:
    Chromosome make(Path path) const {
        const double f = scalarize(weights_, route_objectives(problem_, path, slot_));
        return Chromosome{std::move(path), f};
    }

    // Orders by fitness; ties keep their previous relative order.
    static void rank(std::vector<Chromosome>& population) {
        std::ranges::stable_sort(population, {}, &Chromosome::fitness);
    }

    std::optional<Path> random_path() {
        Path path{problem_.origin()};
        std::vector<char> blocked(problem_.node_count(), 0);
        blocked[problem_.origin()] = 1;
        if (!extend_to_lot(problem_, rng_, path, blocked)) return std::nullopt;
        return path;
    }

    std::vector<Chromosome> initial_population() {
        std::vector<Chromosome> population;
        const int budget = config_.population * kInitAttemptsPerSlot;
        for (int attempt = 0; attempt < budget && std::cmp_less(population.size(), config_.population);
             ++attempt) {
            if (auto path = random_path()) population.push_back(make(std::move(*path)));
        }
        if (population.empty())
            throw GaFailure("could not generate any origin-to-lot path within the retry budget");
        for (std::size_t i = 0; std::cmp_less(population.size(), config_.population); ++i)
            population.push_back(population[i]);
        rank(population);
        return population;
    }

    const Chromosome& tournament(const std::vector<Chromosome>& population) {
        std::size_t best = rng_.below(population.size());
        for (int k = 1; k < config_.tournament_size; ++k) {
            const std::size_t c = rng_.below(population.size());
            if (population[c].fitness < population[best].fitness ||
                (population[c].fitness == population[best].fitness && c < best))
                best = c;
        }
        return population[best];
    }

    // Splices a's prefix up to a shared node onto b's suffix after it.
    std::optional<Path> crossover(const Path& a, const Path& b) {
        std::vector<std::pair<std::size_t, std::size_t>> cuts;
        for (std::size_t i = 1; i < a.size(); ++i)
            for (std::size_t j = 1; j < b.size(); ++j)
                if (a[i] == b[j]) cuts.emplace_back(i, j);
        if (cuts.empty()) return std::nullopt;
        const auto [i, j] = cuts[rng_.below(cuts.size())];
        Path child(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        child.insert(child.end(), b.begin() + static_cast<std::ptrdiff_t>(j) + 1, b.end());
        std::vector<char> seen(problem_.node_count(), 0);
        for (NodeId v : child) {
            if (seen[v]) return std::nullopt;
            seen[v] = 1;
        }
        return child;
    }

    // Detour mutation: replaces the subpath after a random cut point either
    // with a fresh walk to any lot or with a fresh walk to a later node.
    std::optional<Path> mutate(const Path& parent) {
        const std::size_t i = rng_.below(parent.size() - 1);
        Path child(parent.begin(), parent.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        std::vector<char> blocked(problem_.node_count(), 0);
        for (NodeId v : child) blocked[v] = 1;

        if (rng_.uniform() < 0.5) {
            if (!extend_to_lot(problem_, rng_, child, blocked)) return std::nullopt;
            return child;
        }
        const std::size_t j = i + 1 + rng_.below(parent.size() - i - 1);
        for (std::size_t k = j + 1; k < parent.size(); ++k) blocked[parent[k]] = 1;
        if (!extend_to_target(problem_, rng_, child, parent[j], blocked)) return std::nullopt;
        child.insert(child.end(), parent.begin() + static_cast<std::ptrdiff_t>(j) + 1, parent.end());
        return child;
    }

    std::vector<Chromosome> next_generation(const std::vector<Chromosome>& current) {
        std::vector<Chromosome> next(current.begin(), current.begin() + config_.elitism);
        while (std::cmp_less(next.size(), config_.population)) {
            const Chromosome& p1 = tournament(current);
            const Chromosome& p2 = tournament(current);
            Path child = p1.path;
            if (rng_.uniform() < config_.crossover_rate) {
                if (auto c = crossover(p1.path, p2.path)) child = std::move(*c);
            }
            if (rng_.uniform() < config_.mutation_rate) {
                if (auto m = mutate(child)) child = std::move(*m);
            }
            next.push_back(make(std::move(child)));
        }
        rank(next);
        return next;
    }

    const RouteProblem& problem_;
    const WeightVector& weights_;
    std::size_t slot_;
    const GaConfig& config_;
    Rng rng_;
};

}  // namespace

GaTrace evolve(const RouteProblem& problem, const WeightVector& weights, std::size_t slot,
               const GaConfig& config) {
    config.validate();
    require_same_length(3, weights.size());
    if (slot >= problem.time_slots()) throw std::invalid_argument("time slot out of range");

    GaTrace trace;
    trace.runs.resize(static_cast<std::size_t>(config.runs));
    detail::parallel_for(config.runs, config.threads, [&](int r) {
        GeneticSearch search(problem, weights, slot, config,
                             config.seed.substream({static_cast<std::uint64_t>(r)}));
        trace.runs[static_cast<std::size_t>(r)] = search.run();
    });

    std::vector<double> finals;
    for (const auto& run : trace.runs) finals.push_back(run.best_per_generation.back());
    trace.summary.mean = std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(finals.size());
    trace.summary.worst = *std::ranges::max_element(finals);
    trace.summary.best = *std::ranges::min_element(finals);
    return trace;
}

PairedTrace compare_weightings(const RouteProblem& problem, const WeightVector& freq,
                               const WeightVector& bayes, std::size_t slot, const GaConfig& config) {
    return PairedTrace{evolve(problem, freq, slot, config), evolve(problem, bayes, slot, config)};
}

std::string generation_trace_csv(std::span<const LabelledTrace> traces, std::size_t run) {
    std::ostringstream out;
    out << "generation";
    for (const auto& t : traces) out << ",fitness_" << t.label;
    out << '\n';
    if (traces.empty()) return out.str();
    const std::size_t generations = traces.front().trace->runs.at(run).best_per_generation.size();
    for (std::size_t g = 0; g < generations; ++g) {
        out << g + 1;
        for (const auto& t : traces) out << ',' << format_full(t.trace->runs.at(run).best_per_generation.at(g));
        out << '\n';
    }
    return out.str();
}

std::string run_trace_csv(std::span<const LabelledTrace> traces) {
    std::ostringstream out;
    out << "run";
    for (const auto& t : traces) out << ",fitness_" << t.label;
    out << '\n';
    if (traces.empty()) return out.str();
    for (std::size_t r = 0; r < traces.front().trace->runs.size(); ++r) {
        out << r + 1;
        for (const auto& t : traces) out << ',' << format_full(t.trace->runs.at(r).best_per_generation.back());
        out << '\n';
    }
    return out.str();
}

std::string summary_csv(std::span<const LabelledTrace> traces) {
    std::ostringstream out;
    out << "methodology,mean,worst,best\n";
    for (const auto& t : traces) {
        const FitnessSummary& s = t.trace->summary;
        out << t.label << ',' << format_full(s.mean) << ',' << format_full(s.worst) << ','
            << format_full(s.best) << '\n';
    }
    return out.str();
}

std::string generation_trace_csv(const PairedTrace& trace, std::size_t run) {
    const LabelledTrace both[] = {{"freq", &trace.freq}, {"bayes", &trace.bayes}};
    return generation_trace_csv(both, run);
}

std::string run_trace_csv(const PairedTrace& trace) {
    const LabelledTrace both[] = {{"freq", &trace.freq}, {"bayes", &trace.bayes}};
    return run_trace_csv(both);
}

std::string summary_csv(const PairedTrace& trace) {
    const LabelledTrace both[] = {{"frequentist", &trace.freq}, {"bayesian", &trace.bayes}};
    return summary_csv(both);
}

}  // namespace wsbayes
