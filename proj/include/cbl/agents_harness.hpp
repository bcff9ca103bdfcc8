// agents_harness.hpp
//
// Batched Thompson Sampling (batch size m; m = 1 is vanilla TS, m = 2 the
// two-step variant) and Monte-Carlo estimation of its Bayesian regret.
#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbl/bandit_env.hpp"
#include "cbl/bayes_inference.hpp"
#include "cbl/seed_stream.hpp"

namespace cbl {

struct AgentConfig {
    std::size_t batch_size{2};
    std::uint64_t seed{0};
};

template <class Action>
struct EpisodeResult {
    History<Action> history;
    // Expected regret mu(A*, theta) - mu(A_t, theta) of each round.
    std::vector<double> regret;
    // Number of observations the posterior had seen when round t sampled.
    std::vector<std::size_t> posterior_commits;
};

// Runs T rounds against the realized parameter `theta`. The posterior
// absorbs observations only when t is a multiple of the batch size.
EpisodeResult<Eigen::VectorXd> run_episode(const LinearGaussianSpec& spec, const AgentConfig& config, std::size_t T,
                                           const Eigen::VectorXd& theta, Rng& rng);
EpisodeResult<std::size_t> run_episode(const FiniteBanditSpec& spec, const AgentConfig& config, std::size_t T,
                                       std::size_t theta, Rng& rng);

// Posterior after the committed prefix of a history.
DiscretePosterior committed_posterior(const FiniteBanditSpec& spec, const FiniteHistory& history);

struct RegretCurve {
    std::size_t horizon{0};
    std::size_t trials{0};
    std::vector<double> per_round;
    std::vector<double> cumulative;
    // Standard errors across trials of the per-round and cumulative regret.
    std::vector<double> std_error;
    std::vector<double> std_error_cumulative;

    // Columns t, mean_per_round, mean_cumulative, stderr, stderr_cumulative.
    // Values are printed with 17 significant digits so parsing is exact.
    std::string to_csv() const;
    static RegretCurve from_csv(const std::string& text);
};

// Averages run_episode over `trials` episodes with theta drawn from the
// prior. Trial i uses make_stream(master_seed, i) for everything, so the
// result is bit-identical for any `jobs`.
RegretCurve estimate_bayes_regret(const LinearGaussianSpec& spec, const AgentConfig& config, std::size_t T,
                                  std::size_t trials, std::uint64_t master_seed, unsigned jobs = 1);
RegretCurve estimate_bayes_regret(const FiniteBanditSpec& spec, const AgentConfig& config, std::size_t T,
                                  std::size_t trials, std::uint64_t master_seed, unsigned jobs = 1);

struct ScalingCell {
    int d{1};
    std::size_t T{1};
    double final_regret{0.0};
    double std_error{0.0};
    // final_regret / (d sqrt(T))
    double ratio{0.0};
};

struct LogLogFit {
    std::optional<double> slope_T;
    std::optional<double> slope_d;
    double intercept{0.0};
};

// Least squares of log(regret) on log(T) and log(d); a slope is absent when
// its grid has a single value.
LogLogFit fit_loglog_slopes(const std::vector<ScalingCell>& cells);

struct ScalingTable {
    std::vector<ScalingCell> cells;
    LogLogFit fit;

    std::string to_csv() const;
};

ScalingTable scaling_experiment(const std::function<LinearGaussianSpec(int)>& spec_family, const AgentConfig& config,
                                const std::vector<int>& d_grid, const std::vector<std::size_t>& T_grid,
                                std::size_t trials, std::uint64_t master_seed, unsigned jobs = 1);

}  // namespace cbl
