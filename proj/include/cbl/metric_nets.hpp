// metric_nets.hpp
//
// Epsilon-nets and nested quantization chains over finite Euclidean point
// sets. Continuous action sets (the unit ball) are handled through dense
// finite discretizations; see ball_sample().
#pragma once
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cbl/seed_stream.hpp"

namespace cbl {

// Finite set of points in R^d with the Euclidean metric. Stored column-wise.
class PointSet {
public:
    explicit PointSet(Eigen::MatrixXd columns);
    static PointSet from_rows(const std::vector<std::vector<double>>& rows);

    int dimension() const { return static_cast<int>(coords_.rows()); }
    std::size_t size() const { return static_cast<std::size_t>(coords_.cols()); }
    const Eigen::MatrixXd& coords() const { return coords_; }
    Eigen::VectorXd point(std::size_t i) const { return coords_.col(static_cast<Eigen::Index>(i)); }

    double distance(std::size_t i, std::size_t j) const;
    double distance_to(std::size_t i, const Eigen::VectorXd& x) const;
    double diameter() const;
    // Largest distance from the origin.
    double radius() const;

    // Index of a point with exactly these coordinates, if any.
    std::optional<std::size_t> find(const Eigen::VectorXd& x) const;
    // Nearest point, ties to the lowest index.
    std::size_t nearest(const Eigen::VectorXd& x) const;

    PointSet with_point(const Eigen::VectorXd& x) const;
    std::vector<std::vector<double>> to_rows() const;

private:
    Eigen::MatrixXd coords_;
};

// `n` points drawn uniformly from the closed unit ball in R^d.
PointSet ball_sample(int d, std::size_t n, Rng& rng);
// Regular grid of `points_per_axis` values on [lo, hi]^d.
PointSet grid(int d, std::size_t points_per_axis, double lo, double hi);

struct EpsilonNet {
    double epsilon{0.0};
    // Ascending point indices.
    std::vector<std::size_t> center_indices;
    // point index -> point index of its center.
    std::vector<std::size_t> assignment;

    std::size_t size() const { return center_indices.size(); }
    double covering_radius(const PointSet& space) const;
};

// Farthest-point greedy net. The first center is the lowest index; each
// further center is the point farthest from the current centers (ties to
// the lowest index) until every point is within epsilon. Points are then
// assigned to their nearest center, ties to the lowest center index.
EpsilonNet greedy_epsilon_net(const PointSet& space, double epsilon);

// Same construction restricted to `candidates` (ascending, nonempty). The
// returned assignment has size space.size(); entries for non-candidates are
// left equal to their own index and must not be relied on.
EpsilonNet greedy_epsilon_net(const PointSet& space, std::span<const std::size_t> candidates,
                              double epsilon);

// Largest integer k with alpha^{-k} >= diam(space), or >= radius(space) when
// unit_ball is set (root at the origin).
int compute_k0(const PointSet& space, double alpha, bool unit_ball = false);

struct ChainLevel {
    int k{0};
    EpsilonNet net;
};

// Nested alpha^{-k}-nets for k = k0..k_max with pi_k = pi'_k o pi_{k+1}.
class QuantizationChain {
public:
    double alpha() const { return alpha_; }
    int k0() const { return k0_; }
    int k_max() const { return k_max_; }
    bool unit_ball() const { return unit_ball_; }
    const PointSet& space() const { return space_; }

    const ChainLevel& level(int k) const;
    const std::vector<ChainLevel>& levels() const { return levels_; }

    // pi_k of a point of the space, as a point index.
    std::size_t quantize(std::size_t point, int k) const;
    // pi'_k: level-(k+1) center -> level-k center, k0 <= k < k_max.
    std::size_t parent(int k, std::size_t fine_center) const;
    // Points whose level-k center is `center`, ascending.
    std::vector<std::size_t> cell(int k, std::size_t center) const;

    nlohmann::json to_json() const;
    static QuantizationChain from_json(const nlohmann::json& j);

    friend QuantizationChain build_quantization_chain(const PointSet&, double, int, bool);

private:
    QuantizationChain(PointSet space) : space_(std::move(space)) {}
    void check_level(int k) const;

    PointSet space_;
    double alpha_{2.0};
    int k0_{0};
    int k_max_{0};
    bool unit_ball_{false};
    std::vector<ChainLevel> levels_;                     // index k - k0
    std::vector<std::vector<std::size_t>> parent_maps_;  // index k - k0; point-indexed
};

// Builds the finest net greedily at alpha^{-k_max}, then each coarser level
// from the centers of the level below it. A coarse level is an
// (alpha^{-k} - alpha^{-(k+1)})-net of the finer centers, so the composed
// projection stays within alpha^{-k} of every point. In unit-ball mode the
// origin is appended to the space when absent and is the root center.
QuantizationChain build_quantization_chain(const PointSet& space, double alpha, int k_max,
                                           bool unit_ball = false);

// pi_k(a) for a point a of the chain's space.
Eigen::VectorXd quantize(const QuantizationChain& chain, const Eigen::VectorXd& a, int k);

// Smallest level k whose net makes every cell a singleton (alpha^{-k} below
// the minimum pairwise distance).
int singleton_level(const PointSet& space, double alpha);

struct CoveringBounds {
    double lower{1.0};
    double upper{1.0};
};

// Covering number bounds for the closed unit ball of R^d:
// (1/eps)^d <= N <= (1 + 2/eps)^d for eps < 1, and N = 1 for eps >= 1.
CoveringBounds covering_number_bounds(int d, double epsilon);

}  // namespace cbl
