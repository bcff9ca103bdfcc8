// bound_calculators.hpp
//
// Closed-form and semi-empirical regret bounds for batched Thompson Sampling
// on metric action spaces. Entropies are in nats.
#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cbl/bandit_env.hpp"
#include "cbl/metric_nets.hpp"

namespace cbl {

struct BoundRow {
    int k{0};
    double gamma_bar{0.0};
    double entropy{0.0};
    double term{0.0};
};

struct BoundReport {
    std::string formula_id;
    std::vector<BoundRow> rows;
    double total{0.0};
    // Certified upper bound on everything beyond the listed rows (0 when the
    // formula is finite).
    double tail_bound{0.0};

    // Columns k, gamma_bar, H_k_nats, term; final row TOTAL.
    std::string to_csv() const;
};

// Chain-link information ratio bound for d-dimensional linear bandits,
// 2 (6 2^{-k})^2 d.
double gamma_bar_linear(int k, int d);
// Generalized form 2 rho_k^2 d for a caller-supplied link radius rho_k.
double gamma_bar_from_radius(double rho_k, int d);
// rho_k = 2 alpha^{-k} + 2 alpha^{-(k-1)}
double link_radius(int k, double alpha);

struct ChainRow {
    int k{0};
    double gamma_bar{0.0};
    double entropy{0.0};
};

// sum_k sqrt(2 gamma_bar_k T H_k)
BoundReport chained_bound(double T, const std::vector<ChainRow>& rows);

// Which link radius the first level uses: the generic 6 2^{-k}, or radius 1
// when the root is the center of the unit ball (k0 = 0).
enum class LinkConvention { Generic, BallRoot };

// 12 sum_{k=k0+1}^{K} 2^{-k} sqrt(d T H_k), H_k listed for k = k0+1, ..., K.
// The tail bound replaces H_k for k > K by d log(1 + 2^{k+1}), the covering
// bound of the unit ball at scale 2^{-k}. Under BallRoot the k0+1 row uses
// gamma_bar = 2 d, i.e. term sqrt(4 d T H).
BoundReport smooth_linear_bound(int d, double T, int k0, const std::vector<double>& entropies,
                                LinkConvention convention = LinkConvention::Generic);

// 24 sqrt(d T) int_0^diam sqrt(log N(eps)) d eps by tanh-sinh quadrature
// on each segment, relative accuracy 1e-6 or NumericalError. `breakpoints` in (0, diam) split the
// range where log N jumps.
double entropy_integral_bound(int d, double T, const std::function<double(double)>& log_covering, double diam,
                              const std::vector<double>& breakpoints = {});
// int_0^diam sqrt(log N(eps)) d eps alone.
double entropy_integral(const std::function<double(double)>& log_covering, double diam,
                        const std::vector<double>& breakpoints = {});
// d log(1 + 2/eps) for eps < 1, 0 beyond.
double unit_ball_log_covering(int d, double epsilon);

// 7 d sqrt(T)
double unit_ball_bound(int d, double T);

struct SeriesValue {
    double partial_sum{0.0};
    double tail_bound{0.0};
    bool converged{false};

    double upper() const { return partial_sum + tail_bound; }
};

// 2 (sqrt(2 log(2 alpha + 1)) + sum_{k>=2} (2 alpha^{-k} + 2 alpha^{-(k-1)}) sqrt(2 log(2 alpha^k + 1)))
// summed over the first `tail_terms` series terms, plus a geometric-envelope
// bound on the rest. converged when that bound is below 1e-6.
SeriesValue alpha_series_constant(double alpha, int tail_terms = 40);

// Plug-in Shannon entropy (nats) of pi_k(A*) with theta drawn from the
// prior; sample i uses make_stream(master_seed, i). A* off the chain's point
// set (the continuous ball) is snapped to its nearest point first.
double empirical_quantized_entropy(const QuantizationChain& chain, const LinearGaussianSpec& spec, int k,
                                   std::size_t samples, std::uint64_t master_seed);
double empirical_quantized_entropy(const QuantizationChain& chain, const FiniteBanditSpec& spec, int k,
                                   std::size_t samples, std::uint64_t master_seed);
// All levels k0..k_max from one shared sample; index k - k0.
std::vector<double> empirical_quantized_entropies(const QuantizationChain& chain, const LinearGaussianSpec& spec,
                                                  std::size_t samples, std::uint64_t master_seed);

// Plug-in entropy of a histogram, nats.
double plugin_entropy(const std::vector<std::size_t>& counts);

}  // namespace cbl
