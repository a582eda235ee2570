#include "wsbayes/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>

#include "wsbayes/dirichlet.hpp"
#include "wsbayes/route_ga.hpp"
#include "wsbayes/simulation.hpp"

namespace wsbayes::cli {

CommandError::CommandError(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(text);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

/// Six significant figures for console output.
std::string sig6(double v) {
    std::ostringstream out;
    out << std::setprecision(6) << v;
    return out.str();
}

std::string sig6(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += sig6(values[i]);
    }
    return out;
}

std::string join_counts(const PreferenceCounts& counts) {
    std::string out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(counts[i]);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CommandError("io", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandError("io", "cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw CommandError("io", "write failed for '" + path.string() + "'");
}

}  // namespace

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    for (const auto& field : split(text, ',')) {
        std::int64_t v = 0;
        const auto* end = field.data() + field.size();
        const auto res = std::from_chars(field.data(), end, v);
        if (field.empty() || res.ec != std::errc{} || res.ptr != end)
            throw CommandError("parse", "invalid integer '" + field + "' in '" + text + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& field : split(text, ',')) {
        double v = 0.0;
        const auto* end = field.data() + field.size();
        const auto res = std::from_chars(field.data(), end, v);
        if (field.empty() || res.ec != std::errc{} || res.ptr != end)
            throw CommandError("parse", "invalid number '" + field + "' in '" + text + "'");
        out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// survey ingest

Survey ingest_survey(std::istream& in, const std::optional<std::vector<std::string>>& categories) {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::size_t> index;
    if (categories) {
        for (const auto& c : *categories) {
            if (!index.emplace(c, order.size()).second)
                throw CommandError("survey", "category '" + c + "' listed twice");
            order.push_back(c);
        }
    }
    std::vector<std::int64_t> counts(order.size(), 0);
    std::unordered_set<std::string> respondents;

    std::string line;
    int line_no = 0;
    int rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw CommandError("survey", "line " + std::to_string(line_no) +
                                             ": expected 'respondent_id,category'");
        if (rows == 0 && fields[0] == "respondent_id" && fields[1] == "category") continue;
        ++rows;
        if (!respondents.insert(fields[0]).second)
            throw CommandError("survey", "line " + std::to_string(line_no) + ": duplicate respondent '" +
                                             fields[0] + "'");
        auto it = index.find(fields[1]);
        if (it == index.end()) {
            if (categories)
                throw CommandError("survey", "line " + std::to_string(line_no) + ": unknown category '" +
                                                 fields[1] + "'");
            it = index.emplace(fields[1], order.size()).first;
            order.push_back(fields[1]);
            counts.push_back(0);
        }
        ++counts[it->second];
    }
    if (rows == 0) throw CommandError("survey", "survey file has no responses");
    if (order.size() < 2) throw CommandError("survey", "survey needs at least 2 categories");
    return Survey{std::move(order), validate_counts(std::move(counts))};
}

// ---------------------------------------------------------------------------
// estimate

Estimate estimate(const PreferenceCounts& counts, Method method, const FitConfig& config) {
    Estimate e{.counts = counts};
    if (method != Method::bayes) {
        e.freq = frequentist_weights(counts);
        e.freq_variance = frequentist_variance(e.freq->values, counts.total());
    }
    if (method != Method::freq) {
        e.fit = fit_alpha(counts, config);
        e.bayes = bayesian_weights(counts, *e.fit);
        e.bayes_variance_paper = bayesian_variance_paper(*e.bayes, e.fit->alpha_hat, counts.total());
        e.bayes_variance_exact = bayesian_variance_exact(posterior_update(e.fit->alpha_hat, counts));
    }
    return e;
}

nlohmann::json to_json(const Estimate& e) {
    using nlohmann::json;
    json doc;
    doc["counts"] = std::vector<std::int64_t>(e.counts.values().begin(), e.counts.values().end());
    doc["total"] = e.counts.total();
    if (e.freq) {
        doc["frequentist"] = {{"weights", e.freq->values},
                              {"variance", *e.freq_variance},
                              {"has_zero_category", e.freq->has_zero}};
    }
    if (e.fit) {
        const auto& a = e.fit->alpha_hat.alpha();
        const auto& w = e.bayes->values();
        doc["bayesian"] = {{"alpha_hat", std::vector<double>(a.begin(), a.end())},
                           {"weights", std::vector<double>(w.begin(), w.end())},
                           {"variance_paper", *e.bayes_variance_paper},
                           {"variance_exact", *e.bayes_variance_exact},
                           {"log_marginal", e.fit->log_marginal},
                           {"iterations", e.fit->iterations},
                           {"converged", e.fit->converged},
                           {"hit_cap", e.fit->hit_cap}};
    }
    return doc;
}

// ---------------------------------------------------------------------------
// compare

int compare_rows(std::istream& in, std::ostream& out, std::ostream& err, const FitConfig& config) {
    std::string line;
    int line_no = 0;
    int rejected = 0;
    std::optional<std::size_t> width;
    bool header_written = false;
    auto write_header = [&](std::size_t l) {
        out << report_csv_header(l) << '\n';
        header_written = true;
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) continue;
        if (row.front() == 'n') {  // header row n1,n2,...
            const auto cols = split(row, ',');
            if (!width) width = cols.size();
            continue;
        }
        try {
            auto values = parse_int_list(row);
            if (width && values.size() != *width)
                throw CommandError("parse", "expected " + std::to_string(*width) + " columns");
            const PreferenceCounts counts = validate_counts(std::move(values));
            if (!width) width = counts.size();
            if (!header_written) write_header(counts.size());
            out << report_csv_row(build_report(counts, config)) << '\n';
        } catch (const std::exception& e) {
            err << "line " << line_no << ": " << e.what() << '\n';
            ++rejected;
        }
    }
    if (!header_written) write_header(width.value_or(3));
    return rejected;
}

// ---------------------------------------------------------------------------
// command-line front end

namespace {

struct FitFlags {
    std::string alpha_init;
    int max_iterations = 500;
    double tol = 1e-8;
    double alpha0_cap = 1e4;
    std::string optimizer = "fixed_point";

    void attach(CLI::App* app) {
        app->add_option("--alpha-init", alpha_init, "Initial concentration vector (comma separated)");
        app->add_option("--max-iterations", max_iterations, "Optimizer iteration limit")->capture_default_str();
        app->add_option("--tol", tol, "Convergence tolerance on alpha")->capture_default_str();
        app->add_option("--alpha0-cap", alpha0_cap, "Upper bound on the summed concentration")
            ->capture_default_str();
        app->add_option("--optimizer", optimizer, "fixed_point or direct_search")
            ->check(CLI::IsMember({"fixed_point", "direct_search"}))
            ->capture_default_str();
    }

    FitConfig config() const {
        FitConfig c;
        if (!alpha_init.empty()) c.alpha_init = DirichletParams(parse_real_list(alpha_init));
        c.max_iterations = max_iterations;
        c.convergence_tol = tol;
        c.alpha0_cap = alpha0_cap;
        c.optimizer = optimizer == "direct_search" ? Optimizer::direct_search : Optimizer::fixed_point;
        return c;
    }
};

Method parse_method(const std::string& m) {
    if (m == "freq") return Method::freq;
    if (m == "bayes") return Method::bayes;
    return Method::both;
}

PreferenceCounts counts_from(const std::string& inline_counts, const std::string& survey_path) {
    if (!inline_counts.empty() && !survey_path.empty())
        throw CommandError("usage", "give either --counts or --survey, not both");
    if (!survey_path.empty()) {
        std::ifstream in(survey_path);
        if (!in) throw CommandError("io", "cannot open '" + survey_path + "'");
        return ingest_survey(in).counts;
    }
    if (inline_counts.empty()) throw CommandError("usage", "--counts or --survey is required");
    return validate_counts(parse_int_list(inline_counts));
}

WeightVector simplex_weights(const std::string& text) {
    const auto raw = parse_real_list(text);
    double sum = 0.0;
    for (double w : raw) {
        if (!(w > 0.0)) throw CommandError("weights", "weights must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw CommandError("weights", "weights must sum to 1");
    return make_weight_vector(raw);
}

void print_estimate(std::ostream& out, const Estimate& e) {
    out << "counts: " << join_counts(e.counts) << " (n = " << e.counts.total() << ")\n";
    if (e.freq) {
        out << "frequentist weights: " << sig6(e.freq->values) << '\n';
        out << "frequentist variance: " << sig6(*e.freq_variance) << '\n';
        if (e.freq->has_zero) out << "note: a category has zero votes\n";
    }
    if (e.fit) {
        out << "alpha_hat: " << sig6(e.fit->alpha_hat.alpha()) << '\n';
        out << "bayesian weights: " << sig6(e.bayes->values()) << '\n';
        out << "bayesian variance (closed form): " << sig6(*e.bayes_variance_paper) << '\n';
        out << "bayesian variance (posterior): " << sig6(*e.bayes_variance_exact) << '\n';
        out << "fit: iterations=" << e.fit->iterations << " converged=" << std::boolalpha
            << e.fit->converged << " hit_cap=" << e.fit->hit_cap << std::noboolalpha
            << " log_marginal=" << sig6(e.fit->log_marginal) << '\n';
    }
}

std::string one_line(std::string s) {
    std::ranges::replace(s, '\n', ' ');
    return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Survey-driven weight estimation for weighted-sum route optimization", "wsbayes"};
    app.require_subcommand(1);

    // survey ingest
    auto* survey = app.add_subcommand("survey", "Survey file utilities");
    survey->require_subcommand(1);
    auto* ingest = survey->add_subcommand("ingest", "Count votes per category in a survey file");
    std::string survey_file;
    std::string survey_categories;
    std::string survey_json;
    ingest->add_option("file", survey_file, "CSV of respondent_id,category rows")->required();
    ingest->add_option("--categories", survey_categories, "Explicit category order (comma separated)");
    ingest->add_option("--json", survey_json, "Write counts as JSON to this path");

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate objective weights from preference counts");
    std::string est_counts;
    std::string est_survey;
    std::string est_method = "both";
    std::string est_json;
    FitFlags est_fit;
    est->add_option("--counts", est_counts, "Votes per category, e.g. 16,14,20");
    est->add_option("--survey", est_survey, "Survey CSV to ingest instead of --counts");
    est->add_option("--method", est_method, "freq, bayes or both")
        ->check(CLI::IsMember({"freq", "bayes", "both"}))
        ->capture_default_str();
    est->add_option("--json", est_json, "Also write the result as JSON");
    est_fit.attach(est);

    // compare
    auto* cmp = app.add_subcommand("compare", "Frequentist vs Bayesian report for rows of counts");
    std::string cmp_input;
    std::string cmp_output;
    FitFlags cmp_fit;
    cmp->add_option("--input", cmp_input, "CSV with columns n1..nl ('-' for stdin)")->required();
    cmp->add_option("--output", cmp_output, "Output CSV (stdout when omitted)");
    cmp_fit.attach(cmp);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo gain-in-efficiency sweep");
    std::string sim_weights;
    std::string sim_sizes;
    int sim_reps = 1000;
    std::uint64_t sim_seed = 0;
    unsigned sim_threads = 0;
    std::string sim_output = "gain_curve.csv";
    FitFlags sim_fit;
    sim->add_option("--true-weights", sim_weights, "True weights on the simplex")->required();
    sim->add_option("--sizes", sim_sizes, "Ascending sample sizes")->required();
    sim->add_option("--reps", sim_reps, "Replications per size")->capture_default_str();
    sim->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
    sim->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    sim->add_option("--output", sim_output, "Gain curve CSV path")->capture_default_str();
    sim_fit.attach(sim);

    // optimize
    auto* opt = app.add_subcommand("optimize", "Parking-route GA under frequentist and Bayesian weights");
    std::string opt_graph = std::string(WSBAYES_DATA_DIR) + "/demo_graph.json";
    std::size_t opt_slot = 0;
    std::string opt_counts;
    std::string opt_weights;
    std::string opt_weighting = "both";
    std::string opt_out_dir = ".";
    GaConfig ga;
    std::uint64_t opt_seed = 0;
    FitFlags opt_fit;
    opt->add_option("--graph", opt_graph, "Graph JSON document")->capture_default_str();
    opt->add_option("--slot", opt_slot, "Time slot index")->capture_default_str();
    opt->add_option("--counts", opt_counts, "Survey counts (distance,speed,availability)");
    opt->add_option("--weights", opt_weights, "Explicit weight vector instead of --counts");
    opt->add_option("--weighting", opt_weighting, "freq, bayes or both")
        ->check(CLI::IsMember({"freq", "bayes", "both"}))
        ->capture_default_str();
    opt->add_option("--seed", opt_seed, "Master seed")->capture_default_str();
    opt->add_option("--generations", ga.generations)->capture_default_str();
    opt->add_option("--runs", ga.runs)->capture_default_str();
    opt->add_option("--population", ga.population)->capture_default_str();
    opt->add_option("--tournament", ga.tournament_size)->capture_default_str();
    opt->add_option("--crossover", ga.crossover_rate)->capture_default_str();
    opt->add_option("--mutation", ga.mutation_rate)->capture_default_str();
    opt->add_option("--elitism", ga.elitism)->capture_default_str();
    opt->add_option("--threads", ga.threads, "Worker threads (0 = all cores)");
    opt->add_option("--out-dir", opt_out_dir, "Directory for the trace CSVs")->capture_default_str();
    opt_fit.attach(opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (*ingest) {
            std::optional<std::vector<std::string>> cats;
            if (!survey_categories.empty()) cats = split(survey_categories, ',');
            std::ifstream in(survey_file);
            if (!in) throw CommandError("io", "cannot open '" + survey_file + "'");
            const Survey s = ingest_survey(in, cats);
            for (std::size_t i = 0; i < s.categories.size(); ++i)
                out << s.categories[i] << ": " << s.counts[i] << '\n';
            out << "total: " << s.counts.total() << '\n';
            if (!survey_json.empty()) {
                nlohmann::json doc = {{"categories", s.categories},
                                      {"counts", std::vector<std::int64_t>(s.counts.values().begin(),
                                                                           s.counts.values().end())},
                                      {"total", s.counts.total()}};
                write_file(survey_json, doc.dump(2) + "\n");
            }
        } else if (*est) {
            const PreferenceCounts counts = counts_from(est_counts, est_survey);
            const Estimate e = estimate(counts, parse_method(est_method), est_fit.config());
            print_estimate(out, e);
            if (!est_json.empty()) write_file(est_json, to_json(e).dump(2) + "\n");
        } else if (*cmp) {
            const FitConfig config = cmp_fit.config();
            std::ostringstream table;
            int rejected = 0;
            if (cmp_input == "-") {
                rejected = compare_rows(std::cin, table, err, config);
            } else {
                std::ifstream in(cmp_input);
                if (!in) throw CommandError("io", "cannot open '" + cmp_input + "'");
                rejected = compare_rows(in, table, err, config);
            }
            if (cmp_output.empty()) {
                out << table.str();
            } else {
                write_file(cmp_output, table.str());
            }
            if (rejected > 0) err << "warning: " << rejected << " malformed row(s) skipped\n";
        } else if (*sim) {
            const auto sizes = parse_int_list(sim_sizes);
            for (std::size_t i = 1; i < sizes.size(); ++i)
                if (sizes[i] <= sizes[i - 1]) throw CommandError("usage", "--sizes must be strictly ascending");
            SimulationPlan plan{.true_weights = simplex_weights(sim_weights),
                                .sample_sizes = sizes,
                                .replications = sim_reps,
                                .seed = RngSeed{sim_seed, 0},
                                .fit_config = sim_fit.config(),
                                .threads = sim_threads};
            const SimulationResult result = run_simulation(plan);
            write_file(sim_output, gain_curve_csv(result));
            for (const auto& row : result.sizes) {
                out << "n=" << row.sample_size << " mean_gain=" << sig6(row.mean_gain)
                    << " mse_freq=" << sig6(row.mse_freq) << " mse_bayes=" << sig6(row.mse_bayes);
                if (row.skipped) out << " skipped=" << row.skipped;
                out << '\n';
            }
        } else if (*opt) {
            const RouteProblem problem = RouteProblem::from_json(read_file(opt_graph));
            if (opt_slot >= problem.time_slots())
                throw CommandError("usage", "--slot must be below " + std::to_string(problem.time_slots()));
            ga.seed = RngSeed{opt_seed, 0};

            std::optional<WeightVector> freq;
            std::optional<WeightVector> bayes;
            if (!opt_weights.empty()) {
                if (!opt_counts.empty()) throw CommandError("usage", "give either --counts or --weights");
                if (opt_weighting == "both")
                    throw CommandError("usage", "--weighting both needs --counts");
                (opt_weighting == "freq" ? freq : bayes) = simplex_weights(opt_weights);
            } else {
                const PreferenceCounts counts = counts_from(opt_counts, "");
                if (opt_weighting != "bayes") {
                    const Proportions p = frequentist_weights(counts);
                    if (p.has_zero)
                        throw CommandError("weights", "frequentist weights contain a zero category");
                    freq = make_weight_vector(p.values);
                }
                if (opt_weighting != "freq") bayes = bayesian_weights(counts, fit_alpha(counts, opt_fit.config()));
            }

            std::optional<GaTrace> freq_trace;
            std::optional<GaTrace> bayes_trace;
            if (freq && bayes) {
                PairedTrace paired = compare_weightings(problem, *freq, *bayes, opt_slot, ga);
                freq_trace = std::move(paired.freq);
                bayes_trace = std::move(paired.bayes);
            } else if (freq) {
                freq_trace = evolve(problem, *freq, opt_slot, ga);
            } else {
                bayes_trace = evolve(problem, *bayes, opt_slot, ga);
            }

            std::vector<LabelledTrace> columns;
            std::vector<LabelledTrace> rows;
            if (freq_trace) {
                columns.push_back({"freq", &*freq_trace});
                rows.push_back({"frequentist", &*freq_trace});
            }
            if (bayes_trace) {
                columns.push_back({"bayes", &*bayes_trace});
                rows.push_back({"bayesian", &*bayes_trace});
            }
            const std::filesystem::path dir(opt_out_dir);
            std::filesystem::create_directories(dir);
            const std::string suffix = "_slot" + std::to_string(opt_slot) + ".csv";
            write_file(dir / ("generation_trace" + suffix), generation_trace_csv(columns));
            write_file(dir / ("run_trace" + suffix), run_trace_csv(columns));
            write_file(dir / ("summary" + suffix), summary_csv(rows));

            if (freq) out << "frequentist weights: " << sig6(freq->values()) << '\n';
            if (bayes) out << "bayesian weights: " << sig6(bayes->values()) << '\n';
            out << "methodology mean worst best\n";
            for (const auto& r : rows) {
                out << r.label << ' ' << sig6(r.trace->summary.mean) << ' ' << sig6(r.trace->summary.worst)
                    << ' ' << sig6(r.trace->summary.best) << '\n';
            }
        }
    } catch (const CommandError& e) {
        err << "error: " << e.code() << ": " << one_line(e.what()) << '\n';
        return 1;
    } catch (const GraphParseError& e) {
        err << "error: graph_parse: " << one_line(e.what()) << '\n';
        return 1;
    } catch (const UnreachableLot& e) {
        err << "error: unreachable: " << one_line(e.what()) << '\n';
        return 1;
    } catch (const GaFailure& e) {
        err << "error: ga_failure: " << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid_argument: " << one_line(e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}

}  // namespace wsbayes::cli
