// info_lab.hpp
//
// Exact enumeration of the quantities behind the chaining argument on small
// finite bandits: the two-point reduction, history-conditional mutual
// information, the randomized sampling functions attached to a quantization
// chain, and chain-link information ratios.
//
// Conventions. Everything is conditional on the committed history, through
// the posterior weights w. A_hat is the Thompson action psi*(theta_hat) with
// theta_hat ~ w drawn independently of theta; A_hat' is an independent copy.
// Rewards in different slots are independent draws given (action, theta).
// Mutual information is taken with the played actions observed, so
// I(Z; R(X), R(Y)) = sum_{x,y} P(X=x, Y=y) I(Z; R(x), R(y)). Each sampling
// function is a Markov kernel on the centers of its level, applied with a
// fresh coin every time it appears.
#pragma once
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cbl/bandit_env.hpp"
#include "cbl/joint_pmf.hpp"
#include "cbl/metric_nets.hpp"
#include "cbl/seed_stream.hpp"

namespace cbl {

struct TwoPoint {
    std::size_t a1{0};
    std::size_t a2{0};
    double q{1.0};
};

// Finds (a1, a2, q) with q f(a1) + (1-q) f(a2) <= E_Q f and the same for g.
// A common point of {f <= E_Q f} and {g <= E_Q g} (lowest index) is returned
// with q = 1; otherwise the lexicographically first pair with a nonempty
// feasible q-interval, q at its midpoint. InvariantViolation if none exists.
TwoPoint two_point_reduction(const std::vector<double>& Q, const std::vector<double>& f,
                             const std::vector<double>& g);
// Both inequalities within 1e-12 relative.
bool satisfies_two_point(const std::vector<double>& Q, const std::vector<double>& f, const std::vector<double>& g,
                         const TwoPoint& t);

struct TwoPointInstance {
    std::vector<double> Q;
    std::vector<double> f;
    std::vector<double> g;
};

// Size uniform on 1..max_size, f and g uniform on [0, f_max], Q a normalized
// vector of exponential weights with a random subset zeroed (never all).
TwoPointInstance random_two_point_instance(std::size_t max_size, double f_max, Rng& rng);

// Joint over axes theta, a_star, a1, r1, a2, r2 under the committed posterior
// of `history`: a1 = A_hat and a2 = A_hat' are independent Thompson actions
// and r1, r2 are their rewards (index into spec.reward_values()).
JointPMF thompson_joint(const FiniteBanditSpec& spec, const FiniteHistory& history);
// I(target; observations | given) on thompson_joint. ImpossibleObservation
// when the history has zero probability.
double disintegrated_cmi(const FiniteBanditSpec& spec, const FiniteHistory& history,
                         const std::vector<std::string>& target_axes,
                         const std::vector<std::string>& observation_axes,
                         const std::vector<std::string>& given_axes = {});

struct SamplingCell {
    std::size_t center{0};
    std::size_t a1{0};
    std::size_t a2{0};
    double p{1.0};
};

struct LevelCheck {
    int k{0};
    // I(A*_k; R(f^k(A_hat_k)), R(f^{k-1}(A_hat_{k-1}))) against
    // I(A*_k; R(A_hat), R(f^{k-1}(A_hat_{k-1}))). Zero at the root.
    double link_lhs{0.0};
    double link_rhs{0.0};
    // I(A*_{k+1}; R(f^k(A_hat_k)), R(A_hat')) against I(A*_{k+1}; R(A_hat), R(A_hat')).
    // A* stands in for A*_{k+1} at the finest level.
    double copy_lhs{0.0};
    double copy_rhs{0.0};
    // max over centers c and support points b of f(c): rho(b, c) / alpha^{-k}.
    double max_distance_ratio{0.0};
};

struct SamplingFunctionFamily {
    double alpha{2.0};
    int k0{0};
    int k_max{0};
    // Law of f^{k0}(a0): the posterior law of A*.
    std::vector<double> root_law;
    // levels[k - k0].cells for k > k0, one per level-k center, ascending.
    std::vector<std::vector<SamplingCell>> levels;
    // E_t[R(f^{k0}(A*_{k0})) - R(f^{k0}(A_hat_{k0}))]
    double root_regret_difference{0.0};
    std::vector<LevelCheck> checks;

    // Law of f^k(c) for a level-k center c: (action, probability) pairs.
    std::vector<std::pair<std::size_t, double>> kernel(int k, std::size_t center) const;
    nlohmann::json to_json() const;
};

// Builds f^{k0}, ..., f^{k_max} level by level and checks, before returning,
// the root identity (exactly 0), both information inequalities within 1e-9 nats and
// rho(f^k(c), c) <= alpha^{-k}. The chain must be built on spec.actions()
// itself; a chain whose space had the origin appended is rejected.
SamplingFunctionFamily build_sampling_functions(const FiniteBanditSpec& spec, const QuantizationChain& chain,
                                                const FiniteHistory& history);
// One draw of f^k(center).
std::size_t realize(const SamplingFunctionFamily& family, int k, std::size_t center, Rng& rng);

// E_t[R(f^k(A*_k)) - R(f^k(A_hat_k))]
double level_regret_term(const FiniteBanditSpec& spec, const QuantizationChain& chain,
                         const SamplingFunctionFamily& family, const FiniteHistory& history, int k);
// E_t[R(A*) - R(A_hat)]
double thompson_regret(const FiniteBanditSpec& spec, const FiniteHistory& history);

struct ChainLinkReport {
    int k{0};
    // E_t[link term] and its square.
    double link{0.0};
    double numerator{0.0};
    // Target (f^k(A*_k), f^{k-1}(A*_{k-1})), observations R(f^k(A_hat_k)), R(f^{k-1}(A_hat_{k-1})).
    double denominator_nats{0.0};
    // Same observations with target A*_k.
    double denominator_target_only{0.0};
    std::optional<double> gamma;
    std::optional<double> gamma_target_only;
    // 2 (6 2^{-k})^2 d
    double bound{0.0};

    nlohmann::json to_json() const;
};

ChainLinkReport chain_link_ratio(const FiniteBanditSpec& spec, const QuantizationChain& chain,
                                 const SamplingFunctionFamily& family, const FiniteHistory& history, int k);

// Short batched Thompson rollout on a parameter drawn from the prior; the
// returned history has T steps, all committed when T is a multiple of m.
FiniteHistory rollout_history(const FiniteBanditSpec& spec, std::size_t T, std::size_t batch_size, Rng& rng);

}  // namespace cbl
