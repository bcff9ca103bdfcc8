// agents_harness.cpp
#include "cbl/agents_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "cbl/errors.hpp"

namespace cbl {

namespace {

void check_horizon(std::size_t T, const AgentConfig& config) {
    if (config.batch_size < 1) throw InputError("batch size must be at least 1");
    if (T < 1) throw InputError("horizon T must be at least 1");
    if (T % config.batch_size != 0) throw InputError("T must be a multiple of batch size");
}

// The loop shared by both bandit families. `Model` supplies the posterior
// state, sampling, play and commit steps.
template <class Model>
auto run_batched_ts(Model& model, const AgentConfig& config, std::size_t T, Rng& rng) {
    check_horizon(T, config);
    EpisodeResult<typename Model::Action> out;
    out.history.batch_size = config.batch_size;
    out.history.steps.reserve(T);
    out.regret.reserve(T);
    out.posterior_commits.reserve(T);
    const double best = model.optimal_mean();
    for (std::size_t t = 1; t <= T; ++t) {
        out.posterior_commits.push_back(out.history.committed_length);
        auto action = model.thompson_action(rng);
        out.regret.push_back(best - model.mean(action));
        const double reward = model.reward(action, rng);
        out.history.steps.push_back({std::move(action), reward});
        if (t % config.batch_size == 0) {
            for (std::size_t s = out.history.committed_length; s < t; ++s) model.commit(out.history.steps[s]);
            out.history.committed_length = t;
        }
    }
    return out;
}

struct LinearModel {
    using Action = Eigen::VectorXd;
    const LinearGaussianSpec& spec;
    const Eigen::VectorXd& theta;
    GaussianPosterior post;

    double optimal_mean() const { return expected_reward(spec, optimal_action(spec, theta).action, theta); }
    Action thompson_action(Rng& rng) const { return optimal_action(spec, gaussian_sample(post, rng)).action; }
    double mean(const Action& a) const { return expected_reward(spec, a, theta); }
    double reward(const Action& a, Rng& rng) const { return draw_reward(spec, a, theta, rng); }
    void commit(const Step<Action>& s) { post = gaussian_update(post, s.action, s.reward); }
};

std::vector<double> likelihoods(const FiniteBanditSpec& spec, std::size_t action, double reward) {
    std::vector<double> lik(spec.num_parameters(), 0.0);
    const auto v = spec.reward_index(reward);
    if (!v) return lik;
    for (std::size_t p = 0; p < lik.size(); ++p) lik[p] = spec.reward_prob(action, p, *v);
    return lik;
}

struct FiniteModel {
    using Action = std::size_t;
    const FiniteBanditSpec& spec;
    std::size_t theta;
    DiscretePosterior post;

    double optimal_mean() const { return expected_reward(spec, optimal_action(spec, theta), theta); }
    Action thompson_action(Rng& rng) const {
        std::discrete_distribution<std::size_t> draw(post.weights.begin(), post.weights.end());
        return optimal_action(spec, draw(rng));
    }
    double mean(Action a) const { return expected_reward(spec, a, theta); }
    double reward(Action a, Rng& rng) const { return draw_reward(spec, a, theta, rng); }
    void commit(const Step<Action>& s) { post = discrete_update(post, likelihoods(spec, s.action, s.reward)); }
};

RegretCurve summarize(const std::vector<std::vector<double>>& per_trial, std::size_t T) {
    const std::size_t n = per_trial.size();
    RegretCurve curve;
    curve.horizon = T;
    curve.trials = n;
    curve.per_round.assign(T, 0.0);
    curve.cumulative.assign(T, 0.0);
    curve.std_error.assign(T, 0.0);
    curve.std_error_cumulative.assign(T, 0.0);

    std::vector<std::vector<double>> cum(n, std::vector<double>(T));
    for (std::size_t i = 0; i < n; ++i) {
        double run = 0.0;
        for (std::size_t t = 0; t < T; ++t) cum[i][t] = (run += per_trial[i][t]);
    }
    const auto dn = static_cast<double>(n);
    for (std::size_t t = 0; t < T; ++t) {
        double m = 0.0;
        double mc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m += per_trial[i][t];
            mc += cum[i][t];
        }
        m /= dn;
        mc /= dn;
        double v = 0.0;
        double vc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v += (per_trial[i][t] - m) * (per_trial[i][t] - m);
            vc += (cum[i][t] - mc) * (cum[i][t] - mc);
        }
        curve.per_round[t] = m;
        curve.std_error[t] = n > 1 ? std::sqrt(v / (dn - 1.0) / dn) : 0.0;
        curve.std_error_cumulative[t] = n > 1 ? std::sqrt(vc / (dn - 1.0) / dn) : 0.0;
    }
    double run = 0.0;
    for (std::size_t t = 0; t < T; ++t) curve.cumulative[t] = (run += curve.per_round[t]);
    return curve;
}

template <class Spec>
RegretCurve estimate_impl(const Spec& spec, const AgentConfig& config, std::size_t T, std::size_t trials,
                          std::uint64_t master_seed, unsigned jobs) {
    if (trials < 1) throw InputError("trials must be at least 1");
    check_horizon(T, config);
    std::vector<std::vector<double>> per_trial(trials);
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < trials; i += stride) {
            Rng rng = make_stream(master_seed, i);
            const auto theta = sample_parameter(spec, rng);
            per_trial[i] = run_episode(spec, config, T, theta, rng).regret;
        }
    };
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(trials)));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back([&, j] {
                try {
                    work(j, jobs);
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return summarize(per_trial, T);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

EpisodeResult<Eigen::VectorXd> run_episode(const LinearGaussianSpec& spec, const AgentConfig& config, std::size_t T,
                                           const Eigen::VectorXd& theta, Rng& rng) {
    spec.validate();
    if (spec.prior != Prior::Gaussian)
        throw Unsupported("the conjugate agent needs the Gaussian prior; the sphere prior has no conjugate posterior");
    if (!(spec.noise_sigma > 0.0)) throw Unsupported("the conjugate agent needs noise_sigma > 0");
    if (theta.size() != spec.d) throw InputError("parameter dimension does not match spec");
    LinearModel model{spec, theta, standard_gaussian_prior(spec.d, spec.noise_sigma)};
    return run_batched_ts(model, config, T, rng);
}

EpisodeResult<std::size_t> run_episode(const FiniteBanditSpec& spec, const AgentConfig& config, std::size_t T,
                                       std::size_t theta, Rng& rng) {
    if (theta >= spec.num_parameters()) throw InputError("parameter index out of range");
    FiniteModel model{spec, theta, DiscretePosterior{spec.prior_weights()}};
    return run_batched_ts(model, config, T, rng);
}

DiscretePosterior committed_posterior(const FiniteBanditSpec& spec, const FiniteHistory& history) {
    if (!history.valid()) throw InputError("history violates its batch invariants");
    DiscretePosterior post{spec.prior_weights()};
    for (std::size_t s = 0; s < history.committed_length; ++s) {
        const auto& step = history.steps[s];
        if (step.action >= spec.num_actions()) throw InputError("history action out of range");
        post = discrete_update(post, likelihoods(spec, step.action, step.reward));
    }
    return post;
}

std::string RegretCurve::to_csv() const {
    std::ostringstream out;
    out << "t,mean_per_round,mean_cumulative,stderr,stderr_cumulative\n";
    for (std::size_t t = 0; t < horizon; ++t)
        out << (t + 1) << ',' << format_double(per_round[t]) << ',' << format_double(cumulative[t]) << ','
            << format_double(std_error[t]) << ',' << format_double(std_error_cumulative[t]) << '\n';
    return out.str();
}

RegretCurve RegretCurve::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,mean_per_round,mean_cumulative,stderr", 0) != 0)
        throw InputError("regret CSV header missing");
    RegretCurve curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 5) throw InputError("regret CSV row has " + std::to_string(v.size()) + " columns");
        if (static_cast<std::size_t>(v[0]) != curve.horizon + 1) throw InputError("regret CSV rows out of order");
        ++curve.horizon;
        curve.per_round.push_back(v[1]);
        curve.cumulative.push_back(v[2]);
        curve.std_error.push_back(v[3]);
        curve.std_error_cumulative.push_back(v[4]);
    }
    return curve;
}

RegretCurve estimate_bayes_regret(const LinearGaussianSpec& spec, const AgentConfig& config, std::size_t T,
                                  std::size_t trials, std::uint64_t master_seed, unsigned jobs) {
    return estimate_impl(spec, config, T, trials, master_seed, jobs);
}

RegretCurve estimate_bayes_regret(const FiniteBanditSpec& spec, const AgentConfig& config, std::size_t T,
                                  std::size_t trials, std::uint64_t master_seed, unsigned jobs) {
    return estimate_impl(spec, config, T, trials, master_seed, jobs);
}

LogLogFit fit_loglog_slopes(const std::vector<ScalingCell>& cells) {
    if (cells.empty()) throw InputError("slope fit needs at least one cell");
    auto varies = [&](auto get) {
        return std::any_of(cells.begin(), cells.end(), [&](const ScalingCell& c) { return get(c) != get(cells[0]); });
    };
    const bool fit_T = varies([](const ScalingCell& c) { return static_cast<double>(c.T); });
    const bool fit_d = varies([](const ScalingCell& c) { return static_cast<double>(c.d); });
    const auto cols = 1 + (fit_T ? 1 : 0) + (fit_d ? 1 : 0);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(cells.size()), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        if (!(cells[i].final_regret > 0.0)) throw InputError("log-log fit needs positive regret in every cell");
        Eigen::Index c = 0;
        X(r, c++) = 1.0;
        if (fit_T) X(r, c++) = std::log(static_cast<double>(cells[i].T));
        if (fit_d) X(r, c++) = std::log(static_cast<double>(cells[i].d));
        y(r) = std::log(cells[i].final_regret);
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    LogLogFit fit;
    Eigen::Index c = 0;
    fit.intercept = beta(c++);
    if (fit_T) fit.slope_T = beta(c++);
    if (fit_d) fit.slope_d = beta(c++);
    return fit;
}

std::string ScalingTable::to_csv() const {
    std::ostringstream out;
    out << "d,T,final_cumulative_regret,stderr,ratio\n";
    for (const auto& c : cells)
        out << c.d << ',' << c.T << ',' << format_double(c.final_regret) << ',' << format_double(c.std_error) << ','
            << format_double(c.ratio) << '\n';
    return out.str();
}

ScalingTable scaling_experiment(const std::function<LinearGaussianSpec(int)>& spec_family, const AgentConfig& config,
                                const std::vector<int>& d_grid, const std::vector<std::size_t>& T_grid,
                                std::size_t trials, std::uint64_t master_seed, unsigned jobs) {
    if (d_grid.empty() || T_grid.empty()) throw InputError("scaling grids must be nonempty");
    ScalingTable table;
    std::uint64_t cell_index = 0;
    for (const int d : d_grid) {
        const auto spec = spec_family(d);
        for (const auto T : T_grid) {
            const auto curve =
                estimate_bayes_regret(spec, config, T, trials, derive_stream_seed(master_seed, cell_index++), jobs);
            ScalingCell cell;
            cell.d = d;
            cell.T = T;
            cell.final_regret = curve.cumulative.back();
            cell.std_error = curve.std_error_cumulative.back();
            cell.ratio = cell.final_regret / (d * std::sqrt(static_cast<double>(T)));
            table.cells.push_back(cell);
        }
    }
    table.fit = fit_loglog_slopes(table.cells);
    return table;
}

}  // namespace cbl
