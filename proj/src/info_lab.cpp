// info_lab.cpp
#include "cbl/info_lab.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cbl/agents_harness.hpp"
#include "cbl/bound_calculators.hpp"
#include "cbl/errors.hpp"

namespace cbl {

// ---------------------------------------------------------------------------
// Two-point reduction

TwoPoint two_point_reduction(const std::vector<double>& Q, const std::vector<double>& f,
                             const std::vector<double>& g) {
    const auto n = Q.size();
    if (n == 0 || f.size() != n || g.size() != n) throw InputError("Q, f and g must be nonempty and equally long");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(Q[i] >= 0.0)) throw InputError("Q has a negative entry");
        if (!(f[i] >= 0.0) || !(g[i] >= 0.0)) throw InputError("f and g must be nonnegative");
        total += Q[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("Q does not sum to 1");

    double F = 0.0, G = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        F += Q[i] * f[i];
        G += Q[i] * g[i];
    }
    std::vector<std::size_t> in_f, in_g;
    for (std::size_t i = 0; i < n; ++i) {
        const bool lf = f[i] <= F, lg = g[i] <= G;
        if (lf && lg) return {i, i, 1.0};
        if (lf) in_f.push_back(i);
        if (lg) in_g.push_back(i);
    }
    // Now f(a1) <= F < f(a2) and g(a2) <= G < g(a1).
    for (const auto a1 : in_f)
        for (const auto a2 : in_g) {
            const double lo = (f[a2] - F) / (f[a2] - f[a1]);
            const double hi = (G - g[a2]) / (g[a1] - g[a2]);
            if (lo <= hi) return {a1, a2, std::clamp(0.5 * (lo + hi), 0.0, 1.0)};
            // With two support points the interval is a single q that rounding
            // can make look empty. Splitting the gap in proportion to the slopes
            // keeps both excesses at rounding level; the inequalities decide.
            const double df = f[a2] - f[a1], dg = g[a1] - g[a2];
            const TwoPoint t{a1, a2, std::clamp((lo * df + hi * dg) / (df + dg), 0.0, 1.0)};
            if (satisfies_two_point(Q, f, g, t)) return t;
        }
    throw InvariantViolation("two-point reduction found no feasible pair");
}

bool satisfies_two_point(const std::vector<double>& Q, const std::vector<double>& f, const std::vector<double>& g,
                         const TwoPoint& t) {
    if (t.a1 >= Q.size() || t.a2 >= Q.size() || !(t.q >= 0.0 && t.q <= 1.0)) return false;
    double F = 0.0, G = 0.0;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        F += Q[i] * f[i];
        G += Q[i] * g[i];
    }
    const double lf = t.q * f[t.a1] + (1.0 - t.q) * f[t.a2];
    const double lg = t.q * g[t.a1] + (1.0 - t.q) * g[t.a2];
    return lf <= F + 1e-12 * std::max(1.0, std::abs(F)) && lg <= G + 1e-12 * std::max(1.0, std::abs(G));
}

TwoPointInstance random_two_point_instance(std::size_t max_size, double f_max, Rng& rng) {
    if (max_size < 1 || !(f_max >= 0.0)) throw InputError("instance needs max_size >= 1 and f_max >= 0");
    std::uniform_int_distribution<std::size_t> size(1, max_size);
    std::uniform_real_distribution<double> unif(0.0, f_max);
    std::exponential_distribution<double> expo(1.0);
    std::bernoulli_distribution drop(0.25);
    TwoPointInstance inst;
    const auto n = size(rng);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        inst.f.push_back(unif(rng));
        inst.g.push_back(unif(rng));
        const double q = drop(rng) ? 0.0 : expo(rng);
        inst.Q.push_back(q);
        total += q;
    }
    if (total == 0.0) {
        inst.Q[0] = 1.0;
        total = 1.0;
    }
    for (auto& q : inst.Q) q /= total;
    return inst;
}

// ---------------------------------------------------------------------------
// Posterior context

namespace {

using Kernel = std::vector<std::pair<std::size_t, double>>;
using Table = std::vector<std::vector<double>>;

struct Context {
    const FiniteBanditSpec& spec;
    std::vector<double> w;
    std::vector<std::size_t> star;  // theta -> optimal action
    std::vector<double> that;       // law of A_hat
    std::size_t n{0}, P{0}, V{0};
};

Context make_context(const FiniteBanditSpec& spec, const FiniteHistory& history) {
    Context c{spec, committed_posterior(spec, history).weights, {}, {}, spec.num_actions(), spec.num_parameters(),
              spec.reward_values().size()};
    c.that.assign(c.n, 0.0);
    for (std::size_t t = 0; t < c.P; ++t) {
        c.star.push_back(optimal_action(spec, t));
        c.that[c.star.back()] += c.w[t];
    }
    return c;
}

// I(Z; R(x), R(y)) for a target Z given theta by zcond[theta][z].
double pair_information(const Context& c, const Table& zcond, std::size_t x, std::size_t y) {
    const auto nz = zcond.front().size();
    JointPMF joint({{"z", nz}, {"r1", c.V}, {"r2", c.V}});
    auto& p = joint.data();
    for (std::size_t t = 0; t < c.P; ++t) {
        if (c.w[t] == 0.0) continue;
        for (std::size_t z = 0; z < nz; ++z) {
            const double pz = c.w[t] * zcond[t][z];
            if (pz == 0.0) continue;
            for (std::size_t r1 = 0; r1 < c.V; ++r1) {
                const double p1 = pz * c.spec.reward_prob(x, t, r1);
                if (p1 == 0.0) continue;
                for (std::size_t r2 = 0; r2 < c.V; ++r2) p[(z * c.V + r1) * c.V + r2] += p1 * c.spec.reward_prob(y, t, r2);
            }
        }
    }
    return mutual_information(joint, {"z"}, {"r1", "r2"});
}

// I(Z; R(x), R(y)) for every pair with weight[x][y] > 0 (all pairs when
// weight is empty).
Table information_table(const Context& c, const Table& zcond, const Table& weight = {}) {
    Table m(c.n, std::vector<double>(c.n, 0.0));
    for (std::size_t x = 0; x < c.n; ++x)
        for (std::size_t y = 0; y < c.n; ++y)
            if (weight.empty() || weight[x][y] > 0.0) m[x][y] = pair_information(c, zcond, x, y);
    return m;
}

// A*_k as a target; k beyond the chain means A* itself.
Table star_target(const Context& c, const QuantizationChain& chain, int k) {
    Table z(c.P, std::vector<double>(c.n, 0.0));
    for (std::size_t t = 0; t < c.P; ++t) z[t][k > chain.k_max() ? c.star[t] : chain.quantize(c.star[t], k)] = 1.0;
    return z;
}

// E over independent theta, theta_hat of m(pi_k A*(theta), theta) - m(pi_k A*(theta_hat), theta)
// with m(c, theta) the mean reward of f^k(c). At k0 both arguments are the
// root, so every summand is x - x.
double level_term(const Context& c, const QuantizationChain& chain, const SamplingFunctionFamily& family, int k) {
    std::vector<Kernel> kern(c.n);
    auto kernel_mean = [&](std::size_t center, std::size_t theta) {
        if (kern[center].empty()) kern[center] = family.kernel(k, center);
        double m = 0.0;
        for (const auto& [b, p] : kern[center]) m += p * c.spec.means()(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(theta));
        return m;
    };
    double total = 0.0;
    for (std::size_t t = 0; t < c.P; ++t) {
        if (c.w[t] == 0.0) continue;
        const double own = kernel_mean(chain.quantize(c.star[t], k), t);
        double inner = 0.0;
        for (std::size_t s = 0; s < c.P; ++s)
            if (c.w[s] != 0.0) inner += c.w[s] * (own - kernel_mean(chain.quantize(c.star[s], k), t));
        total += c.w[t] * inner;
    }
    return total;
}

void check_chain(const FiniteBanditSpec& spec, const QuantizationChain& chain) {
    if (chain.space().size() != spec.num_actions() || chain.space().coords() != spec.actions().coords())
        throw InputError("the chain must be built on the bandit's action set (no appended origin)");
}

// P(f^k(A_hat_k) = x, f^{k-1}(A_hat_{k-1}) = y), independent coins.
Table observation_law(const Context& c, const QuantizationChain& chain, const SamplingFunctionFamily& family, int k) {
    Table law(c.n, std::vector<double>(c.n, 0.0));
    for (std::size_t a = 0; a < c.n; ++a) {
        if (c.that[a] == 0.0) continue;
        const auto kx = family.kernel(k, chain.quantize(a, k));
        const auto ky = family.kernel(k - 1, chain.quantize(a, k - 1));
        for (const auto& [x, px] : kx)
            for (const auto& [y, py] : ky) law[x][y] += c.that[a] * px * py;
    }
    return law;
}

double weighted_sum(const Table& law, const Table& info) {
    double s = 0.0;
    for (std::size_t x = 0; x < law.size(); ++x)
        for (std::size_t y = 0; y < law[x].size(); ++y)
            if (law[x][y] > 0.0) s += law[x][y] * info[x][y];
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Disintegrated mutual information

JointPMF thompson_joint(const FiniteBanditSpec& spec, const FiniteHistory& history) {
    const auto c = make_context(spec, history);
    JointPMF joint({{"theta", c.P}, {"a_star", c.n}, {"a1", c.n}, {"r1", c.V}, {"a2", c.n}, {"r2", c.V}});
    for (std::size_t t = 0; t < c.P; ++t) {
        if (c.w[t] == 0.0) continue;
        for (std::size_t a1 = 0; a1 < c.n; ++a1)
            for (std::size_t r1 = 0; r1 < c.V; ++r1)
                for (std::size_t a2 = 0; a2 < c.n; ++a2)
                    for (std::size_t r2 = 0; r2 < c.V; ++r2)
                        joint.at({t, c.star[t], a1, r1, a2, r2}) = c.w[t] * c.that[a1] * spec.reward_prob(a1, t, r1) *
                                                                   c.that[a2] * spec.reward_prob(a2, t, r2);
    }
    return joint;
}

double disintegrated_cmi(const FiniteBanditSpec& spec, const FiniteHistory& history,
                         const std::vector<std::string>& target_axes,
                         const std::vector<std::string>& observation_axes,
                         const std::vector<std::string>& given_axes) {
    return mutual_information(thompson_joint(spec, history), target_axes, observation_axes, given_axes);
}

// ---------------------------------------------------------------------------
// Sampling functions

Kernel SamplingFunctionFamily::kernel(int k, std::size_t center) const {
    if (k < k0 || k > k_max) throw InputError("level " + std::to_string(k) + " outside the family");
    Kernel out;
    if (k == k0) {
        for (std::size_t b = 0; b < root_law.size(); ++b)
            if (root_law[b] > 0.0) out.emplace_back(b, root_law[b]);
        return out;
    }
    const auto& cells = levels[static_cast<std::size_t>(k - k0)];
    const auto it = std::find_if(cells.begin(), cells.end(), [&](const SamplingCell& s) { return s.center == center; });
    if (it == cells.end()) throw InputError("point " + std::to_string(center) + " is not a level-" + std::to_string(k) + " center");
    if (it->a1 == it->a2 || it->p >= 1.0) {
        out.emplace_back(it->a1, 1.0);
    } else if (it->p <= 0.0) {
        out.emplace_back(it->a2, 1.0);
    } else {
        out.emplace_back(it->a1, it->p);
        out.emplace_back(it->a2, 1.0 - it->p);
    }
    return out;
}

nlohmann::json SamplingFunctionFamily::to_json() const {
    nlohmann::json j;
    j["alpha"] = alpha;
    j["k0"] = k0;
    j["k_max"] = k_max;
    j["root_law"] = root_law;
    j["root_regret_difference"] = root_regret_difference;
    j["levels"] = nlohmann::json::array();
    for (std::size_t i = 1; i < levels.size(); ++i) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& s : levels[i]) cells.push_back({{"center", s.center}, {"a1", s.a1}, {"a2", s.a2}, {"p", s.p}});
        j["levels"].push_back({{"k", k0 + static_cast<int>(i)}, {"cells", cells}});
    }
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"k", c.k},
                               {"link_lhs", c.link_lhs},
                               {"link_rhs", c.link_rhs},
                               {"copy_lhs", c.copy_lhs},
                               {"copy_rhs", c.copy_rhs},
                               {"max_distance_ratio", c.max_distance_ratio}});
    return j;
}

SamplingFunctionFamily build_sampling_functions(const FiniteBanditSpec& spec, const QuantizationChain& chain,
                                                const FiniteHistory& history) {
    check_chain(spec, chain);
    const auto c = make_context(spec, history);
    const std::size_t configs = c.P * c.n * c.n * c.V * c.V;
    if (configs > JointPMF::max_configurations) throw InputError("spec too large for exact enumeration");

    SamplingFunctionFamily fam;
    fam.alpha = chain.alpha();
    fam.k0 = chain.k0();
    fam.k_max = chain.k_max();
    fam.root_law = c.that;
    fam.levels.resize(static_cast<std::size_t>(fam.k_max - fam.k0 + 1));
    if (chain.level(fam.k0).net.size() != 1) throw InvariantViolation("root level is not a single center");

    auto distance_ratio = [&](int k) {
        const double scale = std::pow(chain.alpha(), -k);
        double worst = 0.0;
        for (const auto center : chain.level(k).net.center_indices)
            for (const auto& [b, p] : fam.kernel(k, center)) {
                const double dist = chain.space().distance(b, center);
                if (!(dist <= scale))
                    throw InvariantViolation("sampling function moves level-" + std::to_string(k) + " center " +
                                             std::to_string(center) + " farther than alpha^-k");
                worst = std::max(worst, dist / scale);
            }
        return worst;
    };
    auto require = [](double lhs, double rhs, const char* which, int k) {
        if (!(lhs <= rhs + 1e-9))
            throw InvariantViolation(std::string("information inequality ") + which + " fails at level " + std::to_string(k));
    };
    // sum_a P(a) sum_x kernel(a)(x) sum_a' P(a') info[x][a']
    auto against_copy = [&](const Table& info, auto kernel_of) {
        double s = 0.0;
        for (std::size_t a = 0; a < c.n; ++a) {
            if (c.that[a] == 0.0) continue;
            for (const auto& [x, px] : kernel_of(a))
                for (std::size_t b = 0; b < c.n; ++b) s += c.that[a] * px * c.that[b] * info[x][b];
        }
        return s;
    };
    auto identity = [](std::size_t a) { return Kernel{{a, 1.0}}; };

    fam.root_regret_difference = level_term(c, chain, fam, fam.k0);
    if (fam.root_regret_difference != 0.0) throw InvariantViolation("root regret difference is not exactly 0");
    {
        LevelCheck chk;
        chk.k = fam.k0;
        const auto M2 = information_table(c, star_target(c, chain, fam.k0 + 1));
        const auto root = fam.kernel(fam.k0, chain.level(fam.k0).net.center_indices[0]);
        chk.copy_lhs = against_copy(M2, [&](std::size_t) { return root; });
        chk.copy_rhs = against_copy(M2, identity);
        require(chk.copy_lhs, chk.copy_rhs, "against the independent copy", fam.k0);
        chk.max_distance_ratio = distance_ratio(fam.k0);
        fam.checks.push_back(chk);
    }

    for (int K = fam.k0 + 1; K <= fam.k_max; ++K) {
        const auto M1 = information_table(c, star_target(c, chain, K));
        const auto M2 = information_table(c, star_target(c, chain, K + 1));
        auto& cells = fam.levels[static_cast<std::size_t>(K - fam.k0)];
        for (const auto center : chain.level(K).net.center_indices) {
            const auto members = chain.cell(K, center);
            double mass = 0.0;
            for (const auto a : members) mass += c.that[a];
            if (mass == 0.0 || members.size() == 1) {
                cells.push_back({center, center, center, 1.0});
                continue;
            }
            const auto parent_kernel = fam.kernel(K - 1, chain.quantize(center, K - 1));
            std::vector<double> Q, F, G;
            for (const auto a : members) {
                Q.push_back(c.that[a] / mass);
                double fa = 0.0, ga = 0.0;
                for (const auto& [b, p] : parent_kernel) fa += p * M1[a][b];
                for (std::size_t b = 0; b < c.n; ++b) ga += c.that[b] * M2[a][b];
                F.push_back(fa);
                G.push_back(ga);
            }
            // Q sums to 1 only up to rounding after normalization.
            double qs = 0.0;
            for (const double q : Q) qs += q;
            for (auto& q : Q) q /= qs;
            const auto tp = two_point_reduction(Q, F, G);
            cells.push_back({center, members[tp.a1], members[tp.a2], tp.q});
        }

        LevelCheck chk;
        chk.k = K;
        for (std::size_t a = 0; a < c.n; ++a) {
            if (c.that[a] == 0.0) continue;
            const auto kx = fam.kernel(K, chain.quantize(a, K));
            const auto ky = fam.kernel(K - 1, chain.quantize(a, K - 1));
            for (const auto& [y, py] : ky) {
                chk.link_rhs += c.that[a] * py * M1[a][y];
                for (const auto& [x, px] : kx) chk.link_lhs += c.that[a] * px * py * M1[x][y];
            }
        }
        chk.copy_lhs = against_copy(M2, [&](std::size_t a) { return fam.kernel(K, chain.quantize(a, K)); });
        chk.copy_rhs = against_copy(M2, identity);
        require(chk.link_lhs, chk.link_rhs, "against the previous level", K);
        require(chk.copy_lhs, chk.copy_rhs, "against the independent copy", K);
        chk.max_distance_ratio = distance_ratio(K);
        fam.checks.push_back(chk);
    }
    return fam;
}

std::size_t realize(const SamplingFunctionFamily& family, int k, std::size_t center, Rng& rng) {
    const auto kern = family.kernel(k, center);
    std::vector<double> p;
    for (const auto& e : kern) p.push_back(e.second);
    std::discrete_distribution<std::size_t> draw(p.begin(), p.end());
    return kern[draw(rng)].first;
}

double level_regret_term(const FiniteBanditSpec& spec, const QuantizationChain& chain,
                         const SamplingFunctionFamily& family, const FiniteHistory& history, int k) {
    check_chain(spec, chain);
    return level_term(make_context(spec, history), chain, family, k);
}

double thompson_regret(const FiniteBanditSpec& spec, const FiniteHistory& history) {
    const auto c = make_context(spec, history);
    const auto& mu = spec.means();
    auto m = [&](std::size_t a, std::size_t t) { return mu(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)); };
    double total = 0.0;
    for (std::size_t t = 0; t < c.P; ++t) {
        if (c.w[t] == 0.0) continue;
        double inner = 0.0;
        for (std::size_t s = 0; s < c.P; ++s)
            if (c.w[s] != 0.0) inner += c.w[s] * (m(c.star[t], t) - m(c.star[s], t));
        total += c.w[t] * inner;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Chain-link ratio

nlohmann::json ChainLinkReport::to_json() const {
    nlohmann::json j{{"k", k},
                     {"numerator", numerator},
                     {"denominator_nats", denominator_nats},
                     {"gamma", nullptr},
                     {"bound", bound},
                     {"link", link},
                     {"denominator_target_only", denominator_target_only},
                     {"gamma_target_only", nullptr}};
    if (gamma) j["gamma"] = *gamma;
    if (gamma_target_only) j["gamma_target_only"] = *gamma_target_only;
    return j;
}

ChainLinkReport chain_link_ratio(const FiniteBanditSpec& spec, const QuantizationChain& chain,
                                 const SamplingFunctionFamily& family, const FiniteHistory& history, int k) {
    check_chain(spec, chain);
    if (k <= chain.k0() || k > chain.k_max() || family.k0 != chain.k0() || family.k_max != chain.k_max())
        throw InputError("chain-link ratio needs k0 < k <= k_max on a matching family");
    const auto c = make_context(spec, history);

    ChainLinkReport r;
    r.k = k;
    r.link = level_term(c, chain, family, k) - level_term(c, chain, family, k - 1);
    r.numerator = r.link * r.link;
    r.bound = gamma_bar_linear(k, spec.actions().dimension());

    const auto law = observation_law(c, chain, family, k);
    Table pair_target(c.P, std::vector<double>(c.n * c.n, 0.0));
    for (std::size_t t = 0; t < c.P; ++t)
        for (const auto& [z1, p1] : family.kernel(k, chain.quantize(c.star[t], k)))
            for (const auto& [z2, p2] : family.kernel(k - 1, chain.quantize(c.star[t], k - 1)))
                pair_target[t][z1 * c.n + z2] += p1 * p2;
    r.denominator_nats = weighted_sum(law, information_table(c, pair_target, law));
    r.denominator_target_only = weighted_sum(law, information_table(c, star_target(c, chain, k), law));
    if (r.denominator_nats > 1e-12) r.gamma = r.numerator / r.denominator_nats;
    if (r.denominator_target_only > 1e-12) r.gamma_target_only = r.numerator / r.denominator_target_only;
    return r;
}

FiniteHistory rollout_history(const FiniteBanditSpec& spec, std::size_t T, std::size_t batch_size, Rng& rng) {
    if (T == 0) {
        FiniteHistory h;
        h.batch_size = batch_size;
        return h;
    }
    const auto theta = sample_parameter(spec, rng);
    return run_episode(spec, AgentConfig{batch_size, 0}, T, theta, rng).history;
}

}  // namespace cbl
