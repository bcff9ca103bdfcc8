// test_bandit_env.cpp
#include <doctest.h>

#include <cmath>

#include "cbl/bandit_env.hpp"
#include "cbl/errors.hpp"

using namespace cbl;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (const double x : xs) v(i++) = x;
    return v;
}

LinearGaussianSpec ball(int d, double sigma = 1.0) {
    LinearGaussianSpec s;
    s.d = d;
    s.noise_sigma = sigma;
    return s;
}

}  // namespace

TEST_CASE("sphere prior draws unit vectors") {
    auto spec = ball(3);
    spec.prior = Prior::Sphere;
    Rng rng = make_stream(1, 0);
    for (int i = 0; i < 1000; ++i) CHECK(std::abs(sample_parameter(spec, rng).norm() - 1.0) < 1e-12);
}

TEST_CASE("gaussian prior moments") {
    const auto spec = ball(2);
    Rng rng = make_stream(2, 0);
    const int n = 100000;
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd t = sample_parameter(spec, rng);
        sum += t;
        outer += t * t.transpose();
    }
    const Eigen::Vector2d mean = sum / n;
    const Eigen::Matrix2d cov = outer / n - mean * mean.transpose();
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(mean(i)) < 3.0 * std::pow(10.0, -2.5));
        CHECK(std::abs(cov(i, i) - 1.0) < 0.05);
    }
    CHECK(std::abs(cov(0, 1)) < 0.05);
}

TEST_CASE("linear expected reward and optimal action") {
    const auto spec = ball(2);
    CHECK(expected_reward(spec, vec({0.0, 0.0}), vec({0.3, -2.0})) == 0.0);
    CHECK(expected_reward(spec, vec({0.6, 0.8}), vec({1.0, 0.0})) == doctest::Approx(0.6));

    const auto best = optimal_action(spec, vec({3.0, 4.0}));
    CHECK(best.action(0) == doctest::Approx(0.6));
    CHECK(best.action(1) == doctest::Approx(0.8));
    CHECK_FALSE(best.index.has_value());
    CHECK(optimal_action(spec, vec({0.0, 0.0})).degenerate);

    auto finite = ball(2);
    finite.actions = PointSet::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    const auto pick = optimal_action(finite, vec({2.0, 1.0}));
    REQUIRE(pick.index.has_value());
    CHECK(*pick.index == 0);
    CHECK(*optimal_action(finite, vec({1.0, 1.0})).index == 0);
}

TEST_CASE("linear reward noise") {
    const auto a = vec({0.6, 0.8});
    const auto theta = vec({0.5, -0.25});
    const double mu = 0.1;
    auto noiseless = ball(2, 0.0);
    Rng rng = make_stream(3, 0);
    CHECK(draw_reward(noiseless, a, theta, rng) == expected_reward(noiseless, a, theta));

    const auto spec = ball(2, 1.5);
    const int n = 100000;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += draw_reward(spec, a, theta, rng);
    CHECK(std::abs(total / n - mu) <= 4.0 * 1.5 / std::sqrt(double(n)));
}

TEST_CASE("rewards are 1-Lipschitz in the action for bounded theta") {
    const auto spec = ball(3, 0.0);
    Rng rng = make_stream(4, 0);
    const auto pts = ball_sample(3, 30000, rng);
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
        const Eigen::VectorXd theta = pts.point(i + 2);
        const double gap = std::abs(expected_reward(spec, pts.point(i), theta) -
                                    expected_reward(spec, pts.point(i + 1), theta));
        CHECK(gap <= (pts.point(i) - pts.point(i + 1)).norm() + 1e-15);
    }
}

TEST_CASE("linear spec validation") {
    auto bad = ball(2, -1.0);
    CHECK_THROWS_AS(bad.validate(), InputError);
    auto outside = ball(2);
    outside.actions = PointSet::from_rows({{2.0, 0.0}});
    CHECK_THROWS_AS(outside.validate(), InputError);
    auto wrong_dim = ball(3);
    wrong_dim.actions = PointSet::from_rows({{0.5, 0.0}});
    CHECK_THROWS_AS(wrong_dim.validate(), InputError);
}

namespace {

FiniteBanditSpec two_by_two() {
    const auto actions = PointSet::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    std::vector<RewardPmf> pmfs{
        {{-1.0, 1.0}, {0.25, 0.75}}, {{-1.0, 1.0}, {0.5, 0.5}},
        {{-1.0, 1.0}, {0.5, 0.5}},   {{0.0, 2.0}, {0.1, 0.9}},
    };
    return FiniteBanditSpec({vec({1.0, 0.0}), vec({0.0, 1.0})}, {0.3, 0.7}, actions, pmfs);
}

}  // namespace

TEST_CASE("finite spec basics") {
    const auto spec = two_by_two();
    CHECK(expected_reward(spec, 0, 0) == doctest::Approx(0.5));
    CHECK(expected_reward(spec, 1, 1) == doctest::Approx(1.8));
    CHECK(spec.reward_values() == std::vector<double>{-1.0, 0.0, 1.0, 2.0});
    CHECK(spec.reward_prob(1, 1, 1) == doctest::Approx(0.1));
    CHECK(spec.reward_prob(0, 0, 3) == 0.0);
    CHECK(optimal_action(spec, 0) == 0);
    CHECK(optimal_action(spec, 1) == 1);

    const auto back = FiniteBanditSpec::from_json(spec.to_json());
    CHECK(back.to_json() == spec.to_json());
}

TEST_CASE("finite spec sampling frequencies") {
    const auto spec = two_by_two();
    Rng rng = make_stream(5, 0);
    const int n = 1000000;
    int up = 0;
    int first = 0;
    for (int i = 0; i < n; ++i) {
        if (draw_reward(spec, 0, 0, rng) == 1.0) ++up;
        if (sample_parameter(spec, rng) == 0) ++first;
    }
    CHECK(std::abs(up / double(n) - 0.75) < 0.01);
    CHECK(std::abs(first / double(n) - 0.3) < 0.01);

    const auto point_mass = spec.with_prior({0.0, 1.0});
    for (int i = 0; i < 100; ++i) CHECK(sample_parameter(point_mass, rng) == 1);
}

TEST_CASE("finite ties go to the lowest action") {
    const auto actions = PointSet::from_rows({{0.0}, {0.5}, {1.0}});
    std::vector<RewardPmf> pmfs{{{1.0}, {1.0}}, {{2.0}, {1.0}}, {{2.0}, {1.0}}};
    const FiniteBanditSpec spec({vec({0.0})}, {1.0}, actions, pmfs);
    CHECK(optimal_action(spec, 0) == 1);
}

TEST_CASE("finite spec validation") {
    const auto actions = PointSet::from_rows({{0.0}});
    CHECK_THROWS_AS(FiniteBanditSpec({vec({0.0})}, {0.5}, actions, {{{1.0}, {1.0}}}), InputError);
    CHECK_THROWS_AS(FiniteBanditSpec({vec({0.0})}, {1.0}, actions, {{{1.0}, {0.7}}}), InputError);
    CHECK_THROWS_AS(FiniteBanditSpec({vec({0.0})}, {1.0}, actions, {}), InputError);
}

TEST_CASE("circle and random specs") {
    const auto c = circle_spec(8, 6);
    CHECK(c.num_actions() == 8);
    CHECK(c.num_parameters() == 6);
    for (std::size_t a = 0; a < 8; ++a)
        for (std::size_t p = 0; p < 6; ++p)
            CHECK(c.means()(Eigen::Index(a), Eigen::Index(p)) ==
                  doctest::Approx(c.actions().point(a).dot(c.thetas()[p])));

    Rng rng = make_stream(6, 0);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_finite_spec({}, rng);
        CHECK(s.num_actions() <= 8);
        CHECK(s.num_parameters() <= 6);
        CHECK(s.reward_values().size() <= 3);
        CHECK(s.actions().radius() <= 1.0);
    }
}

TEST_CASE("finite optimal actions are argmaxes and scale invariant") {
    Rng rng = make_stream(7, 0);
    std::uniform_int_distribution<std::size_t> count(1, 30);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int i = 0; i < 1000; ++i) {
        auto spec = ball(3);
        spec.actions = ball_sample(3, count(rng), rng);
        const auto& pts = std::get<PointSet>(spec.actions);
        const Eigen::VectorXd theta = sample_parameter(spec, rng);
        const auto pick = optimal_action(spec, theta);
        for (std::size_t a = 0; a < pts.size(); ++a)
            CHECK(expected_reward(spec, pts.point(a), theta) <= expected_reward(spec, pick.action, theta));
        CHECK(*optimal_action(spec, scale(rng) * theta).index == *pick.index);
    }
    const auto b = ball(2);
    const Eigen::VectorXd theta = vec({-0.3, 1.7});
    CHECK((optimal_action(b, 5.0 * theta).action - optimal_action(b, theta).action).norm() < 1e-15);
}
