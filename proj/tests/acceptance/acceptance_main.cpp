// acceptance_main.cpp
//
// One line per acceptance criterion: "ACn PASS|FAIL <detail>". Exits 1 if
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cbl/agents_harness.hpp"
#include "cbl/bandit_env.hpp"
#include "cbl/bayes_inference.hpp"
#include "cbl/bound_calculators.hpp"
#include "cbl/errors.hpp"
#include "cbl/info_lab.hpp"
#include "cbl/metric_nets.hpp"

using namespace cbl;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;
};

Outcome require(bool ok, const std::string& detail) { return {ok, detail}; }

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome ac1() {
    const auto s = alpha_series_constant(20.0);
    const double v = s.upper();
    const bool ok = s.converged && s.partial_sum >= 6.26 && v <= 6.28 && std::ceil(v) == 7.0 &&
                    unit_ball_bound(1, 1.0) == 7.0;
    return require(ok, "alpha=20 constant " + fmt("%.6f", s.partial_sum) + " (tail <= " + fmt("%.1e", s.tail_bound) +
                           "), ceiling " + fmt("%.0f", std::ceil(v)));
}

Outcome ac2() {
    double worst_rel = 0.0, worst_scale = 0.0;
    Rng rng = make_stream(2, 0);
    const auto points = ball_sample(2, 300, rng);
    LinearGaussianSpec ball;
    ball.d = 2;
    const auto chain = build_quantization_chain(points, 2.0, 6, true);
    auto H = empirical_quantized_entropies(chain, ball, 5000, 2);
    H.erase(H.begin());
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    for (const int d : {1, 2, 4})
        for (const double T : {1e2, 1e4}) {
            std::vector<ChainRow> rows;
            for (std::size_t i = 0; i < H.size(); ++i) {
                const int k = chain.k0() + 1 + int(i);
                rows.push_back({k, gamma_bar_linear(k, d), H[i]});
            }
            const auto chained = chained_bound(T, rows);
            const auto smooth = smooth_linear_bound(d, T, chain.k0(), H);
            for (std::size_t i = 0; i < H.size(); ++i)
                worst_rel = std::max(worst_rel, rel(chained.rows[i].term, smooth.rows[i].term));
            worst_rel = std::max(worst_rel, rel(chained.total, smooth.total));

            auto cover = [d](double e) { return unit_ball_log_covering(d, e); };
            const std::vector<std::pair<double, double>> pairs{
                {chained.total, chained_bound(4 * T, rows).total},
                {smooth.total, smooth_linear_bound(d, 4 * T, chain.k0(), H).total},
                {smooth.tail_bound, smooth_linear_bound(d, 4 * T, chain.k0(), H).tail_bound},
                {entropy_integral_bound(d, T, cover, 2.0, {1.0}), entropy_integral_bound(d, 4 * T, cover, 2.0, {1.0})},
                {unit_ball_bound(d, T), unit_ball_bound(d, 4 * T)},
            };
            for (const auto& [a, b] : pairs) worst_scale = std::max(worst_scale, std::abs(b / a - 2.0));
        }
    return require(worst_rel <= 1e-12 && worst_scale <= 1e-12,
                   "chained vs smooth max rel diff " + fmt("%.2e", worst_rel) + ", sqrt(T) scaling max dev " +
                       fmt("%.2e", worst_scale));
}

Outcome ac3() {
    const std::size_t T = 2000, trials = 200;
    const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<ScalingCell> cells;
    bool ok = true;
    std::string detail;
    for (const int d : {2, 4, 8}) {
        LinearGaussianSpec spec;
        spec.d = d;
        spec.noise_sigma = 1.0;
        const auto curve = estimate_bayes_regret(spec, {2, 0}, T, trials, 3000 + std::uint64_t(d), jobs);
        const double mean = curve.cumulative.back();
        const double se = curve.std_error_cumulative.back();
        const double bound = unit_ball_bound(d, double(T));
        ok = ok && mean + 2.0 * se <= bound;
        detail += "d=" + std::to_string(d) + " regret " + fmt("%.1f", mean) + "+2*" + fmt("%.1f", se) + " <= " +
                  fmt("%.0f", bound) + "; ";
        // Horizons along the same curves for the T-slope.
        for (const std::size_t t : {250u, 500u, 1000u, 2000u})
            cells.push_back({d, t, curve.cumulative[t - 1], curve.std_error_cumulative[t - 1], 0.0});
    }
    const auto fit = fit_loglog_slopes(cells);
    const double slope = fit.slope_T.value_or(NAN);
    ok = ok && slope >= 0.35 && slope <= 0.65;
    return require(ok, detail + "T-slope " + fmt("%.3f", slope));
}

Outcome ac4() {
    std::size_t bad = 0, violations = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        Rng rng = make_stream(4, i);
        const auto inst = random_two_point_instance(12, 10.0, rng);
        try {
            if (!satisfies_two_point(inst.Q, inst.f, inst.g, two_point_reduction(inst.Q, inst.f, inst.g))) ++bad;
        } catch (const InvariantViolation&) {
            ++violations;
        }
    }
    return require(bad == 0 && violations == 0, "1000 instances, " + std::to_string(bad) + " inequality failures, " +
                                                    std::to_string(violations) + " invariant violations");
}

Outcome ac5() {
    std::size_t failures = 0;
    double worst_excess = -INFINITY, worst_gap = 0.0, worst_distance = 0.0;
    const std::size_t n = 60;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = make_stream(5, i);
        const auto spec = random_finite_spec({8, 6, 3, 2}, rng);
        const auto history = rollout_history(spec, 2 * (i % 4), 2, rng);
        const auto chain = build_quantization_chain(spec.actions(), 2.0, singleton_level(spec.actions(), 2.0));
        try {
            const auto fam = build_sampling_functions(spec, chain, history);
            bool ok = fam.root_regret_difference == 0.0 &&
                      level_regret_term(spec, chain, fam, history, chain.k0()) == 0.0;
            for (const auto& chk : fam.checks) {
                worst_excess = std::max({worst_excess, chk.link_lhs - chk.link_rhs, chk.copy_lhs - chk.copy_rhs});
                ok = ok && chk.link_lhs <= chk.link_rhs + 1e-9 && chk.copy_lhs <= chk.copy_rhs + 1e-9;
            }
            for (int k = chain.k0(); k <= chain.k_max(); ++k)
                for (const auto c : chain.level(k).net.center_indices)
                    for (const auto& [b, p] : fam.kernel(k, c)) {
                        const double ratio = chain.space().distance(b, c) / std::pow(2.0, -k);
                        worst_distance = std::max(worst_distance, ratio);
                        ok = ok && chain.space().distance(b, c) <= std::pow(2.0, -k);
                    }
            double links = 0.0;
            for (int k = chain.k0() + 1; k <= chain.k_max(); ++k) links += chain_link_ratio(spec, chain, fam, history, k).link;
            const double gap = std::abs(links - thompson_regret(spec, history));
            worst_gap = std::max(worst_gap, gap);
            ok = ok && gap <= 1e-12;
            failures += ok ? 0 : 1;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    return require(failures == 0, std::to_string(n) + " specs, " + std::to_string(failures) +
                                      " failures; max inequality excess " + fmt("%.2e", worst_excess) +
                                      " nats, max distance ratio " + fmt("%.3f", worst_distance) +
                                      ", max telescoping gap " + fmt("%.2e", worst_gap));
}

Outcome ac6() {
    const auto spec = circle_spec(8, 6);
    const auto chain = build_quantization_chain(spec.actions(), 2.0, singleton_level(spec.actions(), 2.0));
    std::size_t checked = 0, undefined = 0, violations = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        Rng rng = make_stream(6, i);
        const auto history = rollout_history(spec, 2 * (i % 4), 2, rng);
        const auto fam = build_sampling_functions(spec, chain, history);
        for (int k = chain.k0() + 1; k <= chain.k_max(); ++k) {
            const auto r = chain_link_ratio(spec, chain, fam, history, k);
            if (!r.gamma) {
                ++undefined;
                continue;
            }
            ++checked;
            worst = std::max(worst, *r.gamma / r.bound);
            if (*r.gamma > r.bound) ++violations;
        }
    }
    return require(violations == 0, std::to_string(checked) + " ratios checked (" + std::to_string(undefined) +
                                         " undefined), max gamma/bound " + fmt("%.4f", worst));
}

Outcome ac7() {
    const std::vector<std::pair<double, double>> obs{{1.0, 2.0}, {0.5, -0.3}, {-0.8, 0.4}, {1.0, 1.1}, {0.2, 0.0}};
    auto post = standard_gaussian_prior(1, 1.0);
    double worst = 0.0;
    for (std::size_t n = 1; n <= obs.size(); ++n) {
        post = gaussian_update(post, Eigen::VectorXd::Constant(1, obs[n - 1].first), obs[n - 1].second);
        std::vector<double> logw;
        double top = -INFINITY;
        for (int i = 0; i <= 12000; ++i) {
            const double t = -6.0 + 1e-3 * i;
            double lw = -0.5 * t * t;
            for (std::size_t j = 0; j < n; ++j) lw -= 0.5 * std::pow(obs[j].second - obs[j].first * t, 2);
            logw.push_back(lw);
            top = std::max(top, lw);
        }
        double z = 0.0, m = 0.0, s = 0.0;
        for (int i = 0; i <= 12000; ++i) {
            const double t = -6.0 + 1e-3 * i, w = std::exp(logw[std::size_t(i)] - top);
            z += w;
            m += w * t;
            s += w * t * t;
        }
        m /= z;
        worst = std::max({worst, std::abs(post.mean(0) - m), std::abs(post.covariance()(0, 0) - (s / z - m * m))});
    }

    double worst_discrete = 0.0;
    Rng rng = make_stream(7, 0);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + std::size_t(trial % 7);
        std::vector<double> prior(n), product(n, 1.0);
        double total = 0.0;
        for (auto& w : prior) total += (w = u(rng));
        for (auto& w : prior) w /= total;
        DiscretePosterior d{prior};
        for (int step = 0; step < 5; ++step) {
            std::vector<double> lik(n);
            for (std::size_t i = 0; i < n; ++i) product[i] *= (lik[i] = u(rng));
            d = discrete_update(d, lik);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += prior[i] * product[i];
        for (std::size_t i = 0; i < n; ++i)
            worst_discrete = std::max(worst_discrete, std::abs(d.weights[i] - prior[i] * product[i] / norm));
    }
    return require(worst <= 1e-5 && worst_discrete <= 1e-12, "gaussian vs grid max diff " + fmt("%.2e", worst) +
                                                                  ", discrete vs one-shot max diff " +
                                                                  fmt("%.2e", worst_discrete));
}

Outcome ac8() {
    std::size_t failures = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng = make_stream(8, seed);
        const int d = 1 + int(seed % 3);
        const auto s = ball_sample(d, 10 + seed % 50, rng);
        const double alpha = seed % 2 ? 3.0 : 2.0;
        const auto chain = build_quantization_chain(s, alpha, compute_k0(s, alpha) + 4);
        const auto again = build_quantization_chain(s, alpha, compute_k0(s, alpha) + 4);
        bool ok = chain.to_json() == again.to_json() && chain.level(chain.k0()).net.size() == 1;
        for (int k = chain.k0(); k <= chain.k_max(); ++k) {
            const double scale = std::pow(alpha, -k);
            for (std::size_t p = 0; p < s.size(); ++p) {
                const auto c = chain.quantize(p, k);
                ok = ok && s.distance(p, c) <= scale;
                if (k < chain.k_max()) ok = ok && chain.parent(k, chain.quantize(p, k + 1)) == c;
            }
            if (k < chain.k_max()) {
                // Coarse centers are drawn from the finer ones, so nets only grow with k.
                const auto& fine = chain.level(k + 1).net.center_indices;
                for (const auto c : chain.level(k).net.center_indices)
                    ok = ok && std::find(fine.begin(), fine.end(), c) != fine.end();
                ok = ok && chain.level(k).net.size() <= fine.size();
            }
        }
        failures += ok ? 0 : 1;
    }
    const auto b = covering_number_bounds(2, 0.5);
    bool covering_ok = b.lower == 4.0 && b.upper == 25.0;
    for (const double eps : {1.0, 1.5, 4.0}) {
        const auto one = covering_number_bounds(3, eps);
        covering_ok = covering_ok && one.lower == 1.0 && one.upper == 1.0;
    }
    return require(failures == 0 && covering_ok, "100 random point sets, " + std::to_string(failures) +
                                               " failures; covering bounds (2, 0.5) = (" + fmt("%g", b.lower) + ", " +
                                               fmt("%g", b.upper) + ")");
}

Outcome ac9() {
    double worst = 0.0;
    for (const int d : {1, 2, 4}) {
        auto cover = [d](double e) { return unit_ball_log_covering(d, e); };
        const double T = 1.0;
        const double value = entropy_integral_bound(d, T, cover, 2.0, {1.0});
        const int n = 1000000;
        const double h = 2.0 / n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::sqrt(cover((i + 0.5) * h));
        const double oracle = 24.0 * std::sqrt(d * T) * s * h;
        worst = std::max(worst, std::abs(value - oracle) / oracle);
    }
    return require(worst <= 1e-4, "max relative diff vs midpoint rule " + fmt("%.2e", worst));
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s %s (%.2fs)\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
