// bandit_env.cpp
#include "cbl/bandit_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <regex>

#include "cbl/errors.hpp"

namespace cbl {

namespace {

constexpr double kSimplexTol = 1e-12;

void check_dim(int d, const Eigen::VectorXd& v, const char* what) {
    if (v.size() != d)
        throw InputError(std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                         std::to_string(d));
}

std::size_t draw_index(const std::vector<double>& probs, Rng& rng) {
    std::discrete_distribution<std::size_t> dist(probs.begin(), probs.end());
    return dist(rng);
}

}  // namespace

void LinearGaussianSpec::validate() const {
    if (d < 1) throw InputError("dimension must be at least 1");
    if (!(noise_sigma >= 0.0)) throw InputError("noise_sigma must be nonnegative");
    if (const auto* set = std::get_if<PointSet>(&actions)) {
        if (set->dimension() != d) throw InputError("action set dimension does not match d");
        if (ball_constrained && set->radius() > 1.0 + 1e-12)
            throw InputError("ball-constrained action set has an action of norm > 1");
    }
}

Eigen::VectorXd sample_parameter(const LinearGaussianSpec& spec, Rng& rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd theta(spec.d);
    if (spec.prior == Prior::Gaussian) {
        for (int i = 0; i < spec.d; ++i) theta(i) = normal(rng);
        return theta;
    }
    double norm = 0.0;
    do {
        for (int i = 0; i < spec.d; ++i) theta(i) = normal(rng);
        norm = theta.norm();
    } while (norm == 0.0);
    return theta / norm;
}

double expected_reward(const LinearGaussianSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& theta) {
    check_dim(spec.d, a, "action");
    check_dim(spec.d, theta, "parameter");
    return a.dot(theta);
}

double draw_reward(const LinearGaussianSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& theta,
                   Rng& rng) {
    const double mean = expected_reward(spec, a, theta);
    if (spec.noise_sigma == 0.0) return mean;
    std::normal_distribution<double> normal;
    return mean + spec.noise_sigma * normal(rng);
}

LinearChoice optimal_action(const LinearGaussianSpec& spec, const Eigen::VectorXd& theta) {
    check_dim(spec.d, theta, "parameter");
    if (const auto* set = std::get_if<PointSet>(&spec.actions)) {
        const Eigen::VectorXd scores = set->coords().transpose() * theta;
        std::size_t best = 0;
        for (Eigen::Index i = 1; i < scores.size(); ++i)
            if (scores(i) > scores(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
        return {set->point(best), best, false};
    }
    const double norm = theta.norm();
    if (norm == 0.0) return {Eigen::VectorXd::Zero(spec.d), std::nullopt, true};
    return {theta / norm, std::nullopt, false};
}

double RewardPmf::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * probs[i];
    return m;
}

FiniteBanditSpec::FiniteBanditSpec(std::vector<Eigen::VectorXd> thetas, std::vector<double> weights,
                                   PointSet actions, std::vector<RewardPmf> pmfs)
    : thetas_(std::move(thetas)), weights_(std::move(weights)), actions_(std::move(actions)), pmfs_(std::move(pmfs)) {
    const auto P = weights_.size();
    const auto A = actions_.size();
    if (P == 0) throw InputError("finite spec needs at least one parameter");
    if (thetas_.size() != P) throw InputError("theta list and prior weights differ in length");
    double total = 0.0;
    for (const double w : weights_) {
        if (!(w >= 0.0)) throw InputError("prior weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > kSimplexTol) throw InputError("prior weights must sum to 1");
    if (pmfs_.size() != A * P) throw InputError("reward_pmf must have one entry per (action, parameter)");

    means_.resize(static_cast<Eigen::Index>(A), static_cast<Eigen::Index>(P));
    for (std::size_t i = 0; i < A; ++i) {
        for (std::size_t j = 0; j < P; ++j) {
            const auto& pmf = pmfs_[i * P + j];
            if (pmf.support.empty() || pmf.support.size() != pmf.probs.size())
                throw InputError("reward pmf support and probabilities must be nonempty and equal length");
            double s = 0.0;
            for (std::size_t v = 0; v < pmf.probs.size(); ++v) {
                if (!(pmf.probs[v] >= 0.0)) throw InputError("reward probabilities must be nonnegative");
                if (!std::isfinite(pmf.support[v])) throw InputError("reward support must be finite");
                s += pmf.probs[v];
            }
            if (std::abs(s - 1.0) > kSimplexTol) throw InputError("reward pmf must sum to 1");
            means_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pmf.mean();
            reward_values_.insert(reward_values_.end(), pmf.support.begin(), pmf.support.end());
        }
    }
    std::sort(reward_values_.begin(), reward_values_.end());
    reward_values_.erase(std::unique(reward_values_.begin(), reward_values_.end()), reward_values_.end());

    value_probs_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A * P), static_cast<Eigen::Index>(reward_values_.size()));
    for (std::size_t row = 0; row < A * P; ++row) {
        const auto& pmf = pmfs_[row];
        for (std::size_t v = 0; v < pmf.support.size(); ++v) {
            const auto col = *reward_index(pmf.support[v]);
            value_probs_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += pmf.probs[v];
        }
    }
}

const RewardPmf& FiniteBanditSpec::pmf(std::size_t action, std::size_t param) const {
    if (action >= num_actions() || param >= num_parameters()) throw InputError("action or parameter index out of range");
    return pmfs_[action * num_parameters() + param];
}

double FiniteBanditSpec::reward_prob(std::size_t action, std::size_t param, std::size_t value_index) const {
    return value_probs_(static_cast<Eigen::Index>(action * num_parameters() + param),
                        static_cast<Eigen::Index>(value_index));
}

std::optional<std::size_t> FiniteBanditSpec::reward_index(double r) const {
    const auto it = std::lower_bound(reward_values_.begin(), reward_values_.end(), r);
    if (it == reward_values_.end() || *it != r) return std::nullopt;
    return static_cast<std::size_t>(it - reward_values_.begin());
}

FiniteBanditSpec FiniteBanditSpec::with_prior(std::vector<double> weights) const {
    return FiniteBanditSpec(thetas_, std::move(weights), actions_, pmfs_);
}

nlohmann::json FiniteBanditSpec::to_json() const {
    nlohmann::json j;
    j["parameters"] = nlohmann::json::array();
    for (std::size_t p = 0; p < num_parameters(); ++p) {
        std::vector<double> theta(thetas_[p].data(), thetas_[p].data() + thetas_[p].size());
        j["parameters"].push_back({{"theta", theta}, {"weight", weights_[p]}});
    }
    j["actions"] = actions_.to_rows();
    j["reward_pmf"] = nlohmann::json::object();
    for (std::size_t i = 0; i < num_actions(); ++i)
        for (std::size_t p = 0; p < num_parameters(); ++p) {
            const auto& pmf = this->pmf(i, p);
            j["reward_pmf"]["(" + std::to_string(i) + "," + std::to_string(p) + ")"] = {{"support", pmf.support},
                                                                                        {"probs", pmf.probs}};
        }
    return j;
}

FiniteBanditSpec FiniteBanditSpec::from_json(const nlohmann::json& j) {
    try {
        std::vector<Eigen::VectorXd> thetas;
        std::vector<double> weights;
        for (const auto& p : j.at("parameters")) {
            const auto& t = p.at("theta");
            std::vector<double> coords = t.is_array() ? t.get<std::vector<double>>() : std::vector<double>{t.get<double>()};
            thetas.push_back(Eigen::Map<Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size())));
            weights.push_back(p.at("weight").get<double>());
        }
        auto actions = PointSet::from_rows(j.at("actions").get<std::vector<std::vector<double>>>());
        const auto A = actions.size();
        const auto P = weights.size();
        std::vector<RewardPmf> pmfs(A * P);
        std::vector<bool> seen(A * P, false);
        static const std::regex key_re(R"(\(\s*(\d+)\s*,\s*(\d+)\s*\))");
        for (const auto& [key, value] : j.at("reward_pmf").items()) {
            std::smatch m;
            if (!std::regex_match(key, m, key_re)) throw InputError("reward_pmf key '" + key + "' is not of the form (i,j)");
            const auto i = std::stoul(m[1].str());
            const auto p = std::stoul(m[2].str());
            if (i >= A || p >= P) throw InputError("reward_pmf key '" + key + "' out of range");
            pmfs[i * P + p] = RewardPmf{value.at("support").get<std::vector<double>>(),
                                        value.at("probs").get<std::vector<double>>()};
            seen[i * P + p] = true;
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw InputError("reward_pmf is missing some (action, parameter) entries");
        return FiniteBanditSpec(std::move(thetas), std::move(weights), std::move(actions), std::move(pmfs));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed finite spec JSON: ") + e.what());
    }
}

std::size_t sample_parameter(const FiniteBanditSpec& spec, Rng& rng) {
    return draw_index(spec.prior_weights(), rng);
}

double expected_reward(const FiniteBanditSpec& spec, std::size_t action, std::size_t param) {
    if (action >= spec.num_actions() || param >= spec.num_parameters())
        throw InputError("action or parameter index out of range");
    return spec.means()(static_cast<Eigen::Index>(action), static_cast<Eigen::Index>(param));
}

double draw_reward(const FiniteBanditSpec& spec, std::size_t action, std::size_t param, Rng& rng) {
    const auto& pmf = spec.pmf(action, param);
    return pmf.support[draw_index(pmf.probs, rng)];
}

std::size_t optimal_action(const FiniteBanditSpec& spec, std::size_t param) {
    if (param >= spec.num_parameters()) throw InputError("parameter index out of range");
    const auto col = spec.means().col(static_cast<Eigen::Index>(param));
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < col.size(); ++i)
        if (col(i) > col(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
    return best;
}

FiniteBanditSpec circle_spec(std::size_t n_actions, std::size_t n_params, double param_radius) {
    if (n_actions == 0 || n_params == 0) throw InputError("circle spec needs actions and parameters");
    if (!(param_radius >= 0.0 && param_radius <= 1.0)) throw InputError("parameter radius must lie in [0, 1]");
    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::MatrixXd a(2, static_cast<Eigen::Index>(n_actions));
    for (std::size_t i = 0; i < n_actions; ++i) {
        const double phi = two_pi * static_cast<double>(i) / static_cast<double>(n_actions);
        a.col(static_cast<Eigen::Index>(i)) << std::cos(phi), std::sin(phi);
    }
    std::vector<Eigen::VectorXd> thetas;
    for (std::size_t j = 0; j < n_params; ++j) {
        const double phi = two_pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n_params);
        Eigen::VectorXd t(2);
        t << param_radius * std::cos(phi), param_radius * std::sin(phi);
        thetas.push_back(t);
    }
    std::vector<RewardPmf> pmfs;
    for (std::size_t i = 0; i < n_actions; ++i)
        for (std::size_t j = 0; j < n_params; ++j) {
            const double mean = std::clamp(a.col(static_cast<Eigen::Index>(i)).dot(thetas[j]), -1.0, 1.0);
            const double up = 0.5 * (1.0 + mean);
            pmfs.push_back({{-1.0, 1.0}, {1.0 - up, up}});
        }
    std::vector<double> weights(n_params, 1.0 / static_cast<double>(n_params));
    // Renormalize so the prior sums to 1 exactly in floating point.
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& w : weights) w /= total;
    return FiniteBanditSpec(std::move(thetas), std::move(weights), PointSet(std::move(a)), std::move(pmfs));
}

FiniteBanditSpec random_finite_spec(const RandomSpecShape& shape, Rng& rng) {
    if (shape.max_actions < 2 || shape.max_params < 2 || shape.max_support < 2 || shape.d < 1)
        throw InputError("random spec needs at least 2 actions, 2 parameters and 2 support points");
    std::uniform_int_distribution<std::size_t> n_act(2, shape.max_actions);
    std::uniform_int_distribution<std::size_t> n_par(2, shape.max_params);
    std::uniform_int_distribution<std::size_t> n_sup(2, shape.max_support);
    std::uniform_real_distribution<double> unif;
    std::exponential_distribution<double> expo(1.0);

    const auto A = n_act(rng);
    const auto P = n_par(rng);
    const auto S = n_sup(rng);
    Rng ball_rng(rng());
    PointSet actions = ball_sample(shape.d, A, ball_rng);

    std::vector<Eigen::VectorXd> thetas;
    for (std::size_t j = 0; j < P; ++j) {
        Eigen::VectorXd t(shape.d);
        for (int i = 0; i < shape.d; ++i) t(i) = 2.0 * unif(rng) - 1.0;
        thetas.push_back(t);
    }
    auto dirichlet = [&](std::size_t n) {
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& x : w) total += (x = expo(rng) + 1e-3);
        for (auto& x : w) x /= total;
        return w;
    };
    std::vector<double> support(S);
    for (std::size_t s = 0; s < S; ++s) support[s] = static_cast<double>(s) + unif(rng) * 0.5;
    std::vector<RewardPmf> pmfs;
    for (std::size_t i = 0; i < A * P; ++i) pmfs.push_back({support, dirichlet(S)});
    return FiniteBanditSpec(std::move(thetas), dirichlet(P), std::move(actions), std::move(pmfs));
}

}  // namespace cbl
