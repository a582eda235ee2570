/**
 * @file cli.hpp
 * @brief Command implementations behind the `wsbayes` executable.
 *
 * Every command writes to caller-supplied streams so the whole front end,
 * flag parsing included, can be driven in-process by tests.
 */

#ifndef WSBAYES_CLI_HPP
#define WSBAYES_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsbayes/core.hpp"
#include "wsbayes/empirical_bayes.hpp"
#include "wsbayes/estimators.hpp"

namespace wsbayes::cli {

/// Error surfaced to the user as `error: <code>: <message>`.
class CommandError : public std::runtime_error {
public:
    CommandError(std::string code, const std::string& message);
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct Survey {
    std::vector<std::string> categories;
    PreferenceCounts counts;
};

/// Reads `respondent_id,category` rows (an optional header row is skipped).
/// With @p categories the output follows that order and unknown categories
/// are rejected; otherwise categories are ordered by first appearance.
Survey ingest_survey(std::istream& in, const std::optional<std::vector<std::string>>& categories = {});

enum class Method { freq, bayes, both };

struct Estimate {
    PreferenceCounts counts;
    std::optional<Proportions> freq{};
    std::optional<std::vector<double>> freq_variance{};
    std::optional<FitResult> fit{};
    std::optional<WeightVector> bayes{};
    std::optional<std::vector<double>> bayes_variance_paper{};
    std::optional<std::vector<double>> bayes_variance_exact{};
};

Estimate estimate(const PreferenceCounts& counts, Method method, const FitConfig& config);
nlohmann::json to_json(const Estimate& e);

/// Report CSV: one row per input row of counts. Malformed rows
/// are reported on @p err with their line number and skipped.
/// Returns the number of rejected rows.
int compare_rows(std::istream& in, std::ostream& out, std::ostream& err, const FitConfig& config);

/// Parses `1,2,3` into integers; throws CommandError on bad input.
std::vector<std::int64_t> parse_int_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

/// Full command-line entry point; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wsbayes::cli

#endif  // WSBAYES_CLI_HPP
