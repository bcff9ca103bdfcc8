// bound_calculators.cpp
#include "cbl/bound_calculators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cbl/errors.hpp"

namespace cbl {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_T(double T) {
    if (!(T >= 1.0)) throw InputError("horizon T must be at least 1");
}

}  // namespace

std::string BoundReport::to_csv() const {
    std::ostringstream out;
    out << "k,gamma_bar,H_k_nats,term\n";
    for (const auto& r : rows) out << r.k << ',' << fmt(r.gamma_bar) << ',' << fmt(r.entropy) << ',' << fmt(r.term) << '\n';
    out << "TOTAL,,," << fmt(total) << '\n';
    return out.str();
}

double gamma_bar_linear(int k, int d) {
    if (d < 1) throw InputError("dimension must be at least 1");
    const double r = 6.0 * std::ldexp(1.0, -k);
    return 2.0 * r * r * d;
}

double gamma_bar_from_radius(double rho_k, int d) {
    if (d < 1) throw InputError("dimension must be at least 1");
    if (!(rho_k >= 0.0)) throw InputError("link radius must be nonnegative");
    return 2.0 * rho_k * rho_k * d;
}

double link_radius(int k, double alpha) {
    if (!(alpha > 1.0)) throw InputError("alpha must exceed 1");
    return 2.0 * std::pow(alpha, -k) + 2.0 * std::pow(alpha, -(k - 1));
}

BoundReport chained_bound(double T, const std::vector<ChainRow>& rows) {
    check_T(T);
    BoundReport report;
    report.formula_id = "chained";
    for (const auto& r : rows) {
        if (!(r.gamma_bar >= 0.0) || !(r.entropy >= 0.0))
            throw InputError("chained bound rows need nonnegative gamma_bar and entropy");
        const double term = std::sqrt(2.0 * r.gamma_bar * T * r.entropy);
        report.rows.push_back({r.k, r.gamma_bar, r.entropy, term});
        report.total += term;
    }
    return report;
}

BoundReport smooth_linear_bound(int d, double T, int k0, const std::vector<double>& entropies,
                                LinkConvention convention) {
    check_T(T);
    if (d < 1) throw InputError("dimension must be at least 1");
    BoundReport report;
    report.formula_id = convention == LinkConvention::Generic ? "smooth_linear" : "smooth_linear_ball_root";
    int k = k0;
    for (const double H : entropies) {
        ++k;
        if (!(H >= 0.0)) throw InputError("entropies must be nonnegative");
        BoundRow row{k, gamma_bar_linear(k, d), H, 0.0};
        if (convention == LinkConvention::BallRoot && k == k0 + 1) {
            row.gamma_bar = gamma_bar_from_radius(1.0, d);
            row.term = 2.0 * std::sqrt(d * T * H);
        } else {
            row.term = 12.0 * std::ldexp(1.0, -k) * std::sqrt(d * T * H);
        }
        report.rows.push_back(row);
        report.total += row.term;
    }

    // For k >= 1: H_k <= d log(1 + 2^{k+1}) <= d (k + 2) log 2, so the k-th
    // term is at most c 2^{-k} sqrt(k + 2) with c = 12 d sqrt(T log 2). The
    // ratio of consecutive envelopes is at most (1/2) sqrt((s + 3)/(s + 2)).
    const int start = std::max(k + 1, 1);
    const double c = 12.0 * d * std::sqrt(T * std::numbers::ln2);
    const double first = c * std::ldexp(1.0, -start) * std::sqrt(start + 2.0);
    const double ratio = 0.5 * std::sqrt((start + 3.0) / (start + 2.0));
    report.tail_bound = first / (1.0 - ratio);
    return report;
}

double unit_ball_log_covering(int d, double epsilon) {
    if (d < 1) throw InputError("dimension must be at least 1");
    if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
    if (epsilon >= 1.0) return 0.0;
    // log(1 + 2/eps) written to stay finite for denormal eps.
    return d * (std::log(epsilon + 2.0) - std::log(epsilon));
}

double entropy_integral(const std::function<double(double)>& log_covering, double diam,
                        const std::vector<double>& breakpoints) {
    if (!(diam > 0.0)) throw InputError("diameter must be positive");
    std::vector<double> cuts{0.0};
    for (const double b : breakpoints)
        if (b > 0.0 && b < diam) cuts.push_back(b);
    cuts.push_back(diam);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double eps) {
        const double v = log_covering(eps);
        if (!(v >= 0.0)) {
            if (v < 0.0) throw InputError("log covering number must be nonnegative");
            throw NumericalError("log covering number is not finite at eps = " + fmt(eps));
        }
        return std::sqrt(v);
    };

    boost::math::quadrature::tanh_sinh<double> integrator;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        double l1 = 0.0;
        total += integrator.integrate(integrand, cuts[i], cuts[i + 1], 1e-9, &err, &l1);
        total_err += err;
    }
    if (!std::isfinite(total) || total_err > 1e-6 * std::max(std::abs(total), 1e-300))
        throw NumericalError("entropy integral did not converge (estimated error " + fmt(total_err) + ")");
    return total;
}

double entropy_integral_bound(int d, double T, const std::function<double(double)>& log_covering, double diam,
                              const std::vector<double>& breakpoints) {
    check_T(T);
    if (d < 1) throw InputError("dimension must be at least 1");
    return 24.0 * std::sqrt(d * T) * entropy_integral(log_covering, diam, breakpoints);
}

double unit_ball_bound(int d, double T) {
    check_T(T);
    if (d < 1) throw InputError("dimension must be at least 1");
    return 7.0 * d * std::sqrt(T);
}

SeriesValue alpha_series_constant(double alpha, int tail_terms) {
    if (!(alpha > 1.0)) throw InputError("alpha must exceed 1 (the series diverges otherwise)");
    if (tail_terms < 1) throw InputError("tail_terms must be at least 1");
    const double la = std::log(alpha);
    // log(2 alpha^k + 1) without forming alpha^k.
    auto log_cover = [&](int k) { return k * la + std::log(2.0 + std::pow(alpha, -k)); };

    SeriesValue out;
    double sum = std::sqrt(2.0 * log_cover(1));
    for (int k = 2; k <= tail_terms; ++k)
        sum += (2.0 * std::pow(alpha, -k) + 2.0 * std::pow(alpha, -(k - 1))) * std::sqrt(2.0 * log_cover(k));
    out.partial_sum = 2.0 * sum;

    // For k >= 2 the summand is 2 (1 + alpha) alpha^{-k} sqrt(2 log(2 alpha^k + 1))
    // <= 2 (1 + alpha) alpha^{-k} sqrt(2 (log 3 + k log alpha)) =: e_k, and
    // e_{k+1}/e_k decreases in k.
    const int s = std::max(tail_terms + 1, 2);
    auto envelope = [&](int k) { return 2.0 * (1.0 + alpha) * std::pow(alpha, -k) * std::sqrt(2.0 * (std::log(3.0) + k * la)); };
    const double ratio = std::sqrt((std::log(3.0) + (s + 1) * la) / (std::log(3.0) + s * la)) / alpha;
    out.tail_bound = ratio < 1.0 ? 2.0 * envelope(s) / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    out.converged = out.tail_bound < 1e-6;
    return out;
}

double plugin_entropy(const std::vector<std::size_t>& counts) {
    std::size_t n = 0;
    for (const auto c : counts) n += c;
    if (n == 0) return 0.0;
    double h = 0.0;
    for (const auto c : counts)
        if (c > 0) {
            const double p = static_cast<double>(c) / static_cast<double>(n);
            h -= p * std::log(p);
        }
    return h;
}

namespace {

template <class DrawStar>
std::vector<double> entropies_by_level(const QuantizationChain& chain, int k_lo, int k_hi, std::size_t samples,
                                       std::uint64_t master_seed, DrawStar draw_star) {
    if (samples < 1) throw InputError("samples must be at least 1");
    if (k_lo < chain.k0() || k_hi > chain.k_max()) throw InputError("level outside the chain");
    const auto n = chain.space().size();
    std::vector<std::vector<std::size_t>> counts(static_cast<std::size_t>(k_hi - k_lo + 1),
                                                 std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng = make_stream(master_seed, i);
        const std::size_t point = chain.space().nearest(draw_star(rng));
        for (int k = k_lo; k <= k_hi; ++k) ++counts[static_cast<std::size_t>(k - k_lo)][chain.quantize(point, k)];
    }
    std::vector<double> h;
    for (const auto& c : counts) h.push_back(plugin_entropy(c));
    return h;
}

auto linear_star(const QuantizationChain& chain, const LinearGaussianSpec& spec) {
    spec.validate();
    if (chain.space().dimension() != spec.d) throw InputError("chain dimension does not match spec");
    return [&spec](Rng& rng) { return optimal_action(spec, sample_parameter(spec, rng)).action; };
}

}  // namespace

double empirical_quantized_entropy(const QuantizationChain& chain, const LinearGaussianSpec& spec, int k,
                                   std::size_t samples, std::uint64_t master_seed) {
    return entropies_by_level(chain, k, k, samples, master_seed, linear_star(chain, spec)).front();
}

double empirical_quantized_entropy(const QuantizationChain& chain, const FiniteBanditSpec& spec, int k,
                                   std::size_t samples, std::uint64_t master_seed) {
    if (chain.space().dimension() != spec.actions().dimension())
        throw InputError("chain dimension does not match spec");
    auto star = [&spec](Rng& rng) { return spec.actions().point(optimal_action(spec, sample_parameter(spec, rng))); };
    return entropies_by_level(chain, k, k, samples, master_seed, star).front();
}

std::vector<double> empirical_quantized_entropies(const QuantizationChain& chain, const LinearGaussianSpec& spec,
                                                  std::size_t samples, std::uint64_t master_seed) {
    return entropies_by_level(chain, chain.k0(), chain.k_max(), samples, master_seed, linear_star(chain, spec));
}

}  // namespace cbl
