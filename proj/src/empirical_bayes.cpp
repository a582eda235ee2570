#include "wsbayes/empirical_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wsbayes/special.hpp"

namespace wsbayes {

using special::digamma;
using special::log_factorial;
using special::log_gamma;

namespace {

constexpr double kAscentSlack = 1e-12;

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double max_abs_change(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Floors each entry and rescales onto the cap when the total exceeds it.
void project(std::vector<double>& alpha, double cap) {
    for (double& a : alpha) a = std::max(a, kAlphaFloor);
    for (int pass = 0; pass < 4; ++pass) {
        if (sum_of(alpha) <= cap) return;
        // Entries sitting on the floor stay there; the rest absorb the rescale.
        double pinned = 0.0;
        double free = 0.0;
        for (double a : alpha) (a <= kAlphaFloor ? pinned : free) += a;
        const double scale = (cap - pinned) / free;
        for (double& a : alpha)
            if (a > kAlphaFloor) a = std::max(a * scale, kAlphaFloor);
    }
}

class Objective {
public:
    explicit Objective(const PreferenceCounts& counts) : counts_(counts) {
        const double n = static_cast<double>(counts.total());
        constant_ = log_factorial(counts.total());
        for (auto c : counts.values()) constant_ -= log_factorial(c);
        n_ = n;
    }

    double operator()(const std::vector<double>& alpha) const {
        double a0 = 0.0;
        double value = constant_;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            a0 += alpha[i];
            value += log_gamma(static_cast<double>(counts_[i]) + alpha[i]) - log_gamma(alpha[i]);
        }
        return value + log_gamma(a0) - log_gamma(a0 + n_);
    }

    double total() const { return n_; }
    const PreferenceCounts& counts() const { return counts_; }

private:
    const PreferenceCounts& counts_;
    double constant_ = 0.0;
    double n_ = 0.0;
};

struct SearchState {
    std::vector<double> alpha;
    double value = 0.0;
    std::vector<double> trajectory;
    int iterations = 0;
    bool converged = false;
};

// Minka's fixed-point step for the Dirichlet-multinomial:
//   alpha_k <- alpha_k * [psi(n_k + alpha_k) - psi(alpha_k)] / [psi(n + alpha0) - psi(alpha0)]
std::vector<double> fixed_point_step(const Objective& f, const std::vector<double>& alpha) {
    const double a0 = sum_of(alpha);
    const double denom = digamma(f.total() + a0) - digamma(a0);
    std::vector<double> next(alpha.size());
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        const double numer = digamma(static_cast<double>(f.counts()[k]) + alpha[k]) - digamma(alpha[k]);
        next[k] = alpha[k] * numer / denom;
    }
    return next;
}

// Scales alpha up while the objective keeps improving; the marginal likelihood
// of a single count vector typically increases along this ray up to the cap.
void extrapolate_precision(const Objective& f, std::vector<double>& alpha, double& value, double cap) {
    for (int doubling = 0; doubling < 64; ++doubling) {
        const double total = sum_of(alpha);
        if (total >= cap * (1.0 - 1e-15)) return;
        const double factor = std::min(2.0, cap / total);
        std::vector<double> trial = alpha;
        for (double& a : trial) a *= factor;
        project(trial, cap);
        const double trial_value = f(trial);
        if (!(trial_value > value)) return;
        alpha = std::move(trial);
        value = trial_value;
    }
}

void run_fixed_point(const Objective& f, const FitConfig& config, SearchState& state) {
    while (state.iterations < config.max_iterations) {
        ++state.iterations;
        std::vector<double> candidate = fixed_point_step(f, state.alpha);
        project(candidate, config.alpha0_cap);
        double candidate_value = f(candidate);

        // The projected step is not guaranteed to ascend; backtrack in log space.
        for (int halving = 0; candidate_value < state.value && halving < 40; ++halving) {
            for (std::size_t k = 0; k < candidate.size(); ++k)
                candidate[k] = std::sqrt(candidate[k] * state.alpha[k]);
            project(candidate, config.alpha0_cap);
            candidate_value = f(candidate);
        }
        if (candidate_value < state.value) {
            // No ascent direction left at working precision.
            state.converged = true;
            return;
        }
        extrapolate_precision(f, candidate, candidate_value, config.alpha0_cap);

        const double change = max_abs_change(candidate, state.alpha);
        state.alpha = std::move(candidate);
        state.value = candidate_value;
        state.trajectory.push_back(state.value);
        if (change < config.convergence_tol) {
            state.converged = true;
            return;
        }
    }
}

// Compass search over log(alpha), with an extra "all coordinates" direction
// that moves along the precision ray.
void run_direct_search(const Objective& f, const FitConfig& config, SearchState& state) {
    const std::size_t l = state.alpha.size();
    double step = 1.0;
    auto try_move = [&](std::size_t coord, double delta) {
        std::vector<double> trial = state.alpha;
        if (coord == l) {
            for (double& a : trial) a *= std::exp(delta);
        } else {
            trial[coord] *= std::exp(delta);
        }
        project(trial, config.alpha0_cap);
        const double value = f(trial);
        if (value > state.value) {
            state.alpha = std::move(trial);
            state.value = value;
            return true;
        }
        return false;
    };

    while (state.iterations < config.max_iterations) {
        ++state.iterations;
        const std::vector<double> before = state.alpha;
        bool improved = false;
        for (std::size_t coord = 0; coord <= l; ++coord) {
            if (try_move(coord, step) || try_move(coord, -step)) improved = true;
        }
        if (improved) {
            step = std::min(step * 2.0, 4.0);
        } else {
            step *= 0.5;
        }
        state.trajectory.push_back(state.value);
        const double change = max_abs_change(before, state.alpha);
        if (!improved && step < config.convergence_tol) {
            state.converged = true;
            return;
        }
        if (improved && change < config.convergence_tol && step < config.convergence_tol) {
            state.converged = true;
            return;
        }
    }
}

}  // namespace

void FitConfig::validate(std::size_t categories) const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
    if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be positive");
    if (!(alpha0_cap >= static_cast<double>(categories)) || !std::isfinite(alpha0_cap))
        throw std::invalid_argument("alpha0_cap must be finite and at least the number of categories");
    if (alpha_init) {
        require_same_length(categories, alpha_init->size());
        if (alpha_init->alpha0() > alpha0_cap * (1.0 + 1e-12))
            throw std::invalid_argument("alpha_init exceeds alpha0_cap");
    }
}

double log_marginal_likelihood(const PreferenceCounts& counts, const DirichletParams& alpha) {
    require_same_length(counts.size(), alpha.size());
    return Objective(counts)(std::vector<double>(alpha.alpha().begin(), alpha.alpha().end()));
}

FitResult fit_alpha(const PreferenceCounts& counts, const FitConfig& config) {
    config.validate(counts.size());
    const Objective f(counts);

    SearchState state;
    const DirichletParams init = config.alpha_init.value_or(DirichletParams::uniform(counts.size()));
    state.alpha.assign(init.alpha().begin(), init.alpha().end());
    project(state.alpha, config.alpha0_cap);
    state.value = f(state.alpha);
    state.trajectory.push_back(state.value);

    switch (config.optimizer) {
        case Optimizer::fixed_point:
            run_fixed_point(f, config, state);
            break;
        case Optimizer::direct_search:
            run_direct_search(f, config, state);
            break;
    }

    DirichletParams alpha_hat(state.alpha);
    const bool hit_cap = std::abs(alpha_hat.alpha0() - config.alpha0_cap) <= 1e-6;
    const double value = log_marginal_likelihood(counts, alpha_hat);
    return FitResult{std::move(alpha_hat), value,       state.iterations,
                     state.converged,      hit_cap,     std::move(state.trajectory)};
}

WeightVector bayesian_weights(const PreferenceCounts& counts, const DirichletParams& alpha_hat) {
    require_same_length(counts.size(), alpha_hat.size());
    std::vector<double> post(counts.size());
    for (std::size_t i = 0; i < post.size(); ++i)
        post[i] = alpha_hat[i] + static_cast<double>(counts[i]);
    return make_weight_vector(post);
}

WeightVector bayesian_weights(const PreferenceCounts& counts, const FitResult& fit) {
    return bayesian_weights(counts, fit.alpha_hat);
}

}  // namespace wsbayes
