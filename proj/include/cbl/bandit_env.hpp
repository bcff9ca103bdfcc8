// bandit_env.hpp
//
// Bandit environments: a prior over the parameter, an action set and a
// reward law. Two families are provided, the linear-Gaussian model
// E[R(a, theta)] = <a, theta> and finite tabular bandits used for exact
// enumeration.
#pragma once
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cbl/metric_nets.hpp"
#include "cbl/seed_stream.hpp"

namespace cbl {

// ---------------------------------------------------------------------------
// Linear-Gaussian bandit

struct UnitBall {};
using LinearActionSet = std::variant<UnitBall, PointSet>;

enum class Prior { Gaussian, Sphere };

struct LinearGaussianSpec {
    int d{1};
    LinearActionSet actions{UnitBall{}};
    Prior prior{Prior::Gaussian};
    double noise_sigma{1.0};
    // Finite action sets must lie in the closed unit ball when set.
    bool ball_constrained{true};

    void validate() const;
    bool is_unit_ball() const { return std::holds_alternative<UnitBall>(actions); }
};

struct LinearChoice {
    Eigen::VectorXd action;
    // Index into the finite action set, absent for the continuous ball.
    std::optional<std::size_t> index;
    // theta == 0 on the ball: every action is optimal and the origin is returned.
    bool degenerate{false};
};

Eigen::VectorXd sample_parameter(const LinearGaussianSpec& spec, Rng& rng);
double expected_reward(const LinearGaussianSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& theta);
double draw_reward(const LinearGaussianSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& theta, Rng& rng);
LinearChoice optimal_action(const LinearGaussianSpec& spec, const Eigen::VectorXd& theta);

// ---------------------------------------------------------------------------
// Finite bandit

struct RewardPmf {
    std::vector<double> support;
    std::vector<double> probs;

    double mean() const;
};

// Parameters are referred to by index; their coordinates are kept for
// reporting and for linear-like constructions.
class FiniteBanditSpec {
public:
    FiniteBanditSpec(std::vector<Eigen::VectorXd> thetas, std::vector<double> weights, PointSet actions,
                     std::vector<RewardPmf> pmfs_action_major);

    std::size_t num_parameters() const { return weights_.size(); }
    std::size_t num_actions() const { return actions_.size(); }
    const std::vector<double>& prior_weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& thetas() const { return thetas_; }
    const PointSet& actions() const { return actions_; }
    const RewardPmf& pmf(std::size_t action, std::size_t param) const;
    // Mean reward table, (action, param).
    const Eigen::MatrixXd& means() const { return means_; }

    // Sorted union of all reward support points.
    const std::vector<double>& reward_values() const { return reward_values_; }
    // P(R = reward_values()[v] | action, param).
    double reward_prob(std::size_t action, std::size_t param, std::size_t value_index) const;
    std::optional<std::size_t> reward_index(double r) const;

    FiniteBanditSpec with_prior(std::vector<double> weights) const;

    nlohmann::json to_json() const;
    static FiniteBanditSpec from_json(const nlohmann::json& j);

private:
    std::vector<Eigen::VectorXd> thetas_;
    std::vector<double> weights_;
    PointSet actions_;
    std::vector<RewardPmf> pmfs_;
    Eigen::MatrixXd means_;
    std::vector<double> reward_values_;
    Eigen::MatrixXd value_probs_;  // (action * P + param, value)
};

std::size_t sample_parameter(const FiniteBanditSpec& spec, Rng& rng);
double expected_reward(const FiniteBanditSpec& spec, std::size_t action, std::size_t param);
double draw_reward(const FiniteBanditSpec& spec, std::size_t action, std::size_t param, Rng& rng);
// argmax of the mean reward, ties to the lowest action index.
std::size_t optimal_action(const FiniteBanditSpec& spec, std::size_t param);

// `n_actions` equally spaced points on the unit circle and `n_params`
// parameters equally spaced on the circle of radius `param_radius` (offset by
// half a step), uniform prior, rewards in {-1, +1} with mean <a, theta>.
FiniteBanditSpec circle_spec(std::size_t n_actions, std::size_t n_params, double param_radius = 0.9);

struct RandomSpecShape {
    std::size_t max_actions{8};
    std::size_t max_params{6};
    std::size_t max_support{3};
    int d{2};
};

// Random finite spec: actions in the unit ball, Dirichlet(1) prior and
// reward pmfs on a shared random support.
FiniteBanditSpec random_finite_spec(const RandomSpecShape& shape, Rng& rng);

// ---------------------------------------------------------------------------
// History

template <class Action>
struct Step {
    Action action;
    double reward{0.0};
};

// Observations in the order they were made. Only the first committed_length
// entries are visible to the posterior; commits happen a batch at a time.
template <class Action>
struct History {
    std::vector<Step<Action>> steps;
    std::size_t batch_size{1};
    std::size_t committed_length{0};

    std::size_t length() const { return steps.size(); }
    bool valid() const {
        return batch_size >= 1 && committed_length <= steps.size() && committed_length % batch_size == 0;
    }
};

using LinearHistory = History<Eigen::VectorXd>;
using FiniteHistory = History<std::size_t>;

}  // namespace cbl
