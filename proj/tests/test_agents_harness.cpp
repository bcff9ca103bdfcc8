// test_agents_harness.cpp
#include <doctest.h>

#include <cmath>

#include "cbl/agents_harness.hpp"
#include "cbl/errors.hpp"

using namespace cbl;

namespace {

Eigen::VectorXd scalar(double x) { return Eigen::VectorXd::Constant(1, x); }

// Theta uniform on {-1, +1}, actions {-1, +1}, reward a * theta exactly.
FiniteBanditSpec sign_game() {
    const auto actions = PointSet::from_rows({{-1.0}, {1.0}});
    std::vector<RewardPmf> pmfs{{{1.0}, {1.0}}, {{-1.0}, {1.0}}, {{-1.0}, {1.0}}, {{1.0}, {1.0}}};
    return FiniteBanditSpec({scalar(-1.0), scalar(1.0)}, {0.5, 0.5}, actions, pmfs);
}

LinearGaussianSpec ball(int d) {
    LinearGaussianSpec s;
    s.d = d;
    return s;
}

}  // namespace

TEST_CASE("the posterior only moves at batch boundaries") {
    const auto spec = circle_spec(8, 6);
    Rng rng = make_stream(1, 0);
    for (const std::size_t m : {1u, 2u, 3u}) {
        const auto ep = run_episode(spec, {m, 0}, 12, 2, rng);
        CHECK(ep.history.valid());
        CHECK(ep.history.committed_length == 12);
        for (std::size_t t = 1; t <= 12; ++t) CHECK(ep.posterior_commits[t - 1] == ((t - 1) / m) * m);
    }
    // Two-step: rounds 2j-1 and 2j see the same posterior.
    Rng lin = make_stream(1, 1);
    const auto ep = run_episode(ball(2), {2, 0}, 10, Eigen::Vector2d(0.3, -0.4), lin);
    for (std::size_t j = 0; j < 5; ++j) CHECK(ep.posterior_commits[2 * j] == ep.posterior_commits[2 * j + 1]);
    CHECK(ep.posterior_commits[0] == 0);
    CHECK(ep.posterior_commits[1] == 0);
}

TEST_CASE("degenerate problems have zero regret") {
    auto single = ball(2);
    single.actions = PointSet::from_rows({{0.5, 0.5}});
    Rng rng = make_stream(2, 0);
    const auto ep = run_episode(single, {2, 0}, 20, Eigen::Vector2d(1.0, -3.0), rng);
    for (const double r : ep.regret) CHECK(r == 0.0);

    const auto sure = sign_game().with_prior({0.0, 1.0});
    const auto curve = estimate_bayes_regret(sure, {2, 0}, 10, 20, 3);
    for (const double r : curve.cumulative) CHECK(r == 0.0);
}

TEST_CASE("first-round regret of the sign game is one") {
    // theta_hat is an independent prior draw: right half the time, gap 2 otherwise.
    const auto curve = estimate_bayes_regret(sign_game(), {2, 0}, 2, 20000, 4);
    CHECK(std::abs(curve.per_round[0] - 1.0) <= 4.0 * curve.std_error[0]);
    CHECK(std::abs(curve.per_round[1] - 1.0) <= 4.0 * curve.std_error[1]);
    // After one commit the sign is known.
    const auto longer = estimate_bayes_regret(sign_game(), {2, 0}, 4, 2000, 4);
    CHECK(longer.per_round[2] == 0.0);
    CHECK(longer.per_round[3] == 0.0);
}

TEST_CASE("results do not depend on the number of jobs") {
    const auto a = estimate_bayes_regret(ball(3), {2, 0}, 40, 24, 11, 1);
    const auto b = estimate_bayes_regret(ball(3), {2, 0}, 40, 24, 11, 4);
    CHECK(a.to_csv() == b.to_csv());
    const auto c = estimate_bayes_regret(circle_spec(8, 6), {1, 0}, 30, 17, 5, 1);
    const auto d = estimate_bayes_regret(circle_spec(8, 6), {1, 0}, 30, 17, 5, 3);
    CHECK(c.to_csv() == d.to_csv());
}

TEST_CASE("regret CSV round trip is exact") {
    const auto curve = estimate_bayes_regret(ball(2), {2, 0}, 30, 9, 6);
    const auto back = RegretCurve::from_csv(curve.to_csv());
    CHECK(back.horizon == curve.horizon);
    CHECK(back.per_round == curve.per_round);
    CHECK(back.cumulative == curve.cumulative);
    CHECK(back.std_error == curve.std_error);
    CHECK(back.std_error_cumulative == curve.std_error_cumulative);
    CHECK(back.to_csv() == curve.to_csv());
    CHECK_THROWS_AS(RegretCurve::from_csv("nope\n"), InputError);
}

TEST_CASE("agent preconditions") {
    Rng rng = make_stream(7, 0);
    CHECK_THROWS_WITH_AS(run_episode(ball(2), {3, 0}, 2, Eigen::Vector2d(1.0, 0.0), rng),
                         "T must be a multiple of batch size", InputError);
    CHECK_THROWS_AS(estimate_bayes_regret(ball(2), {2, 0}, 10, 0, 1), InputError);
    auto sphere = ball(2);
    sphere.prior = Prior::Sphere;
    CHECK_THROWS_AS(estimate_bayes_regret(sphere, {2, 0}, 10, 1, 1), Unsupported);

    FiniteHistory broken;
    broken.batch_size = 2;
    broken.steps = {{0, 1.0}};
    broken.committed_length = 1;
    CHECK_THROWS_AS(committed_posterior(sign_game(), broken), InputError);
}

TEST_CASE("committed posterior ignores the pending batch") {
    FiniteHistory h;
    h.batch_size = 2;
    h.steps = {{1, 1.0}, {0, -1.0}, {1, -1.0}};
    h.committed_length = 2;
    const auto post = committed_posterior(sign_game(), h);
    CHECK(post.weights[0] == 0.0);
    CHECK(post.weights[1] == 1.0);
}

TEST_CASE("log-log slopes of exact power laws") {
    std::vector<ScalingCell> cells;
    for (const int d : {2, 4, 8})
        for (const std::size_t T : {250u, 500u, 1000u, 2000u})
            cells.push_back({d, T, 3.0 * d * std::sqrt(double(T)), 0.0, 0.0});
    const auto fit = fit_loglog_slopes(cells);
    REQUIRE(fit.slope_T.has_value());
    REQUIRE(fit.slope_d.has_value());
    CHECK(std::abs(*fit.slope_T - 0.5) < 1e-9);
    CHECK(std::abs(*fit.slope_d - 1.0) < 1e-9);

    const auto one_d = fit_loglog_slopes({{2, 100, 5.0, 0, 0}, {2, 400, 10.0, 0, 0}});
    CHECK_FALSE(one_d.slope_d.has_value());
    CHECK(*one_d.slope_T == doctest::Approx(0.5));
}

TEST_CASE("small scaling experiment") {
    const auto table = scaling_experiment([](int d) { return ball(d); }, {2, 0}, {2, 3}, {20, 40}, 8, 1);
    CHECK(table.cells.size() == 4);
    for (const auto& c : table.cells) {
        CHECK(c.final_regret > 0.0);
        CHECK(c.ratio == doctest::Approx(c.final_regret / (c.d * std::sqrt(double(c.T)))));
    }
    CHECK(table.fit.slope_T.has_value());
    CHECK_THROWS_AS(scaling_experiment([](int d) { return ball(d); }, {2, 0}, {}, {20}, 1, 1), InputError);
}

TEST_CASE("regret curve shape") {
    const auto curve = estimate_bayes_regret(ball(2), {2, 0}, 200, 64, 12);
    double running = 0.0;
    for (std::size_t t = 0; t < curve.horizon; ++t) {
        running += curve.per_round[t];
        CHECK(curve.cumulative[t] == doctest::Approx(running).epsilon(1e-12));
        CHECK(curve.per_round[t] >= -3.0 * curve.std_error[t]);
    }
    const double combined = std::hypot(curve.std_error.front(), curve.std_error.back());
    CHECK(curve.per_round.back() <= curve.per_round.front() + 3.0 * combined);

    // With m = 1 every round sees all earlier observations.
    Rng rng = make_stream(12, 1);
    const auto ep = run_episode(ball(2), {1, 0}, 15, Eigen::Vector2d(0.2, 0.9), rng);
    for (std::size_t t = 0; t < 15; ++t) CHECK(ep.posterior_commits[t] == t);
}
