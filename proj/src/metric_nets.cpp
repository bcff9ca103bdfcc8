// metric_nets.cpp
#include "cbl/metric_nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cbl/errors.hpp"

namespace cbl {

PointSet::PointSet(Eigen::MatrixXd columns) : coords_(std::move(columns)) {
    if (coords_.cols() == 0) throw InputError("point set must be nonempty");
    if (coords_.rows() == 0) throw InputError("point set dimension must be positive");
    if (!coords_.allFinite()) throw InputError("point coordinates must be finite");
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InputError("point set must be nonempty");
    const auto d = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != d)
            throw InputError("point " + std::to_string(j) + " has " + std::to_string(rows[j].size()) +
                             " coordinates, expected " + std::to_string(d));
        for (std::size_t i = 0; i < d; ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    }
    return PointSet(std::move(m));
}

double PointSet::distance(std::size_t i, std::size_t j) const {
    return (coords_.col(static_cast<Eigen::Index>(i)) - coords_.col(static_cast<Eigen::Index>(j))).norm();
}

double PointSet::distance_to(std::size_t i, const Eigen::VectorXd& x) const {
    return (coords_.col(static_cast<Eigen::Index>(i)) - x).norm();
}

double PointSet::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j) best = std::max(best, distance(i, j));
    return best;
}

double PointSet::radius() const { return coords_.colwise().norm().maxCoeff(); }

std::optional<std::size_t> PointSet::find(const Eigen::VectorXd& x) const {
    if (x.size() != coords_.rows()) return std::nullopt;
    for (std::size_t i = 0; i < size(); ++i)
        if (coords_.col(static_cast<Eigen::Index>(i)) == x) return i;
    return std::nullopt;
}

std::size_t PointSet::nearest(const Eigen::VectorXd& x) const {
    if (x.size() != coords_.rows()) throw InputError("dimension mismatch in nearest-point query");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
        const double dist = (coords_.col(static_cast<Eigen::Index>(i)) - x).squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best = i;
        }
    }
    return best;
}

PointSet PointSet::with_point(const Eigen::VectorXd& x) const {
    if (x.size() != coords_.rows()) throw InputError("dimension mismatch when appending point");
    Eigen::MatrixXd m(coords_.rows(), coords_.cols() + 1);
    m << coords_, x;
    return PointSet(std::move(m));
}

std::vector<std::vector<double>> PointSet::to_rows() const {
    std::vector<std::vector<double>> rows(size());
    for (std::size_t j = 0; j < size(); ++j) {
        const auto c = coords_.col(static_cast<Eigen::Index>(j));
        rows[j].assign(c.data(), c.data() + c.size());
    }
    return rows;
}

PointSet ball_sample(int d, std::size_t n, Rng& rng) {
    if (d < 1 || n == 0) throw InputError("ball_sample needs d >= 1 and n >= 1");
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Eigen::MatrixXd m(d, static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::VectorXd g(d);
        double norm = 0.0;
        do {
            for (int i = 0; i < d; ++i) g(i) = normal(rng);
            norm = g.norm();
        } while (norm == 0.0);
        m.col(j) = g / norm * std::pow(unif(rng), 1.0 / d);
    }
    return PointSet(std::move(m));
}

PointSet grid(int d, std::size_t points_per_axis, double lo, double hi) {
    if (d < 1 || points_per_axis == 0) throw InputError("grid needs d >= 1 and at least one point per axis");
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= points_per_axis;
    Eigen::MatrixXd m(d, static_cast<Eigen::Index>(total));
    const double step = points_per_axis > 1 ? (hi - lo) / static_cast<double>(points_per_axis - 1) : 0.0;
    for (std::size_t j = 0; j < total; ++j) {
        std::size_t rem = j;
        for (int i = 0; i < d; ++i) {
            m(i, static_cast<Eigen::Index>(j)) = lo + step * static_cast<double>(rem % points_per_axis);
            rem /= points_per_axis;
        }
    }
    return PointSet(std::move(m));
}

double EpsilonNet::covering_radius(const PointSet& space) const {
    double r = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) r = std::max(r, space.distance(i, assignment[i]));
    return r;
}

EpsilonNet greedy_epsilon_net(const PointSet& space, std::span<const std::size_t> candidates,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
    if (candidates.empty()) throw InputError("net construction needs at least one candidate point");

    EpsilonNet net;
    net.epsilon = epsilon;
    const std::size_t n = candidates.size();
    std::vector<double> gap(n);
    std::vector<std::size_t> chosen{candidates[0]};
    for (std::size_t i = 0; i < n; ++i) gap[i] = space.distance(candidates[i], candidates[0]);

    for (;;) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (gap[i] > gap[far]) far = i;
        if (gap[far] <= epsilon) break;
        chosen.push_back(candidates[far]);
        for (std::size_t i = 0; i < n; ++i)
            gap[i] = std::min(gap[i], space.distance(candidates[i], candidates[far]));
    }
    std::sort(chosen.begin(), chosen.end());
    net.center_indices = std::move(chosen);

    net.assignment.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) net.assignment[i] = i;
    for (const auto p : candidates) {
        std::size_t best = net.center_indices.front();
        double best_d = space.distance(p, best);
        for (const auto c : net.center_indices) {
            const double dist = space.distance(p, c);
            if (dist < best_d) {
                best_d = dist;
                best = c;
            }
        }
        net.assignment[p] = best;
    }
    return net;
}

EpsilonNet greedy_epsilon_net(const PointSet& space, double epsilon) {
    std::vector<std::size_t> all(space.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return greedy_epsilon_net(space, all, epsilon);
}

int compute_k0(const PointSet& space, double alpha, bool unit_ball) {
    if (!(alpha > 1.0)) throw InputError("alpha must exceed 1");
    const double extent = unit_ball ? space.radius() : space.diameter();
    if (!(extent > 0.0))
        throw InputError(unit_ball ? "unit-ball chain over the origin alone is degenerate"
                                   : "point set has zero diameter; k0 is unbounded");
    auto k = static_cast<int>(std::floor(-std::log(extent) / std::log(alpha)));
    while (std::pow(alpha, -(k + 1)) >= extent) ++k;
    while (std::pow(alpha, -k) < extent) --k;
    return k;
}

int singleton_level(const PointSet& space, double alpha) {
    if (!(alpha > 1.0)) throw InputError("alpha must exceed 1");
    if (space.size() < 2) throw InputError("singleton level needs at least two points");
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < space.size(); ++i)
        for (std::size_t j = i + 1; j < space.size(); ++j) gap = std::min(gap, space.distance(i, j));
    if (!(gap > 0.0)) throw InputError("point set contains duplicate points");
    auto k = static_cast<int>(std::floor(-std::log(gap) / std::log(alpha)));
    while (std::pow(alpha, -k) >= gap) ++k;
    while (std::pow(alpha, -(k - 1)) < gap) --k;
    return k;
}

const ChainLevel& QuantizationChain::level(int k) const {
    check_level(k);
    return levels_[static_cast<std::size_t>(k - k0_)];
}

void QuantizationChain::check_level(int k) const {
    if (k < k0_ || k > k_max_)
        throw InputError("level " + std::to_string(k) + " outside [" + std::to_string(k0_) + ", " +
                         std::to_string(k_max_) + "]");
}

std::size_t QuantizationChain::quantize(std::size_t point, int k) const {
    if (point >= space_.size()) throw InputError("point index out of range");
    return level(k).net.assignment[point];
}

std::size_t QuantizationChain::parent(int k, std::size_t fine_center) const {
    if (k < k0_ || k >= k_max_) throw InputError("parent map defined for k0 <= k < k_max only");
    return parent_maps_[static_cast<std::size_t>(k - k0_)].at(fine_center);
}

std::vector<std::size_t> QuantizationChain::cell(int k, std::size_t center) const {
    const auto& a = level(k).net.assignment;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == center) members.push_back(i);
    return members;
}

QuantizationChain build_quantization_chain(const PointSet& input, double alpha, int k_max, bool unit_ball) {
    PointSet space = input;
    std::size_t origin = 0;
    if (unit_ball) {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(input.dimension());
        if (auto found = input.find(zero)) {
            origin = *found;
        } else {
            space = input.with_point(zero);
            origin = space.size() - 1;
        }
    }
    const int k0 = compute_k0(space, alpha, unit_ball);
    if (k_max <= k0)
        throw InputError("k_max = " + std::to_string(k_max) + " must exceed k0 = " + std::to_string(k0));

    QuantizationChain chain(space);
    chain.alpha_ = alpha;
    chain.k0_ = k0;
    chain.k_max_ = k_max;
    chain.unit_ball_ = unit_ball;
    const auto n_levels = static_cast<std::size_t>(k_max - k0 + 1);
    chain.levels_.resize(n_levels);
    chain.parent_maps_.resize(n_levels - 1);

    auto& finest = chain.levels_.back();
    finest.k = k_max;
    finest.net = greedy_epsilon_net(space, std::pow(alpha, -k_max));

    for (int k = k_max - 1; k >= k0; --k) {
        const auto idx = static_cast<std::size_t>(k - k0);
        const auto& fine = chain.levels_[idx + 1].net;
        EpsilonNet coarse;
        if (k == k0) {
            coarse.center_indices = {unit_ball ? origin : fine.center_indices.front()};
            coarse.assignment.assign(space.size(), coarse.center_indices.front());
        } else {
            const double link = std::pow(alpha, -k) - std::pow(alpha, -(k + 1));
            coarse = greedy_epsilon_net(space, fine.center_indices, link);
        }
        coarse.epsilon = std::pow(alpha, -k);

        auto& parents = chain.parent_maps_[idx];
        parents.assign(space.size(), space.size());
        for (const auto c : fine.center_indices) parents[c] = coarse.assignment[c];
        for (std::size_t p = 0; p < space.size(); ++p) coarse.assignment[p] = parents[fine.assignment[p]];

        chain.levels_[idx] = ChainLevel{k, std::move(coarse)};
    }
    return chain;
}

Eigen::VectorXd quantize(const QuantizationChain& chain, const Eigen::VectorXd& a, int k) {
    const auto idx = chain.space().find(a);
    if (!idx) throw InputError("point is not a member of the chain's space");
    return chain.space().point(chain.quantize(*idx, k));
}

nlohmann::json QuantizationChain::to_json() const {
    nlohmann::json j;
    j["alpha"] = alpha_;
    j["k0"] = k0_;
    j["k_max"] = k_max_;
    j["unit_ball"] = unit_ball_;
    j["points"] = space_.to_rows();
    j["levels"] = nlohmann::json::array();
    for (const auto& lv : levels_) {
        j["levels"].push_back({{"k", lv.k},
                               {"epsilon", lv.net.epsilon},
                               {"center_indices", lv.net.center_indices},
                               {"assignment", lv.net.assignment}});
    }
    j["parent_maps"] = nlohmann::json::array();
    for (std::size_t i = 0; i < parent_maps_.size(); ++i) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto c : levels_[i + 1].net.center_indices) pairs.push_back({c, parent_maps_[i][c]});
        j["parent_maps"].push_back({{"k", levels_[i].k}, {"pairs", pairs}});
    }
    return j;
}

QuantizationChain QuantizationChain::from_json(const nlohmann::json& j) {
    try {
        QuantizationChain chain(PointSet::from_rows(j.at("points").get<std::vector<std::vector<double>>>()));
        chain.alpha_ = j.at("alpha").get<double>();
        chain.k0_ = j.at("k0").get<int>();
        chain.k_max_ = j.at("k_max").get<int>();
        chain.unit_ball_ = j.at("unit_ball").get<bool>();
        const auto n = chain.space_.size();
        for (const auto& lv : j.at("levels")) {
            ChainLevel level;
            level.k = lv.at("k").get<int>();
            level.net.epsilon = lv.at("epsilon").get<double>();
            level.net.center_indices = lv.at("center_indices").get<std::vector<std::size_t>>();
            level.net.assignment = lv.at("assignment").get<std::vector<std::size_t>>();
            if (level.net.assignment.size() != n) throw InputError("assignment length mismatch");
            chain.levels_.push_back(std::move(level));
        }
        if (chain.levels_.size() != static_cast<std::size_t>(chain.k_max_ - chain.k0_ + 1))
            throw InputError("level count does not match [k0, k_max]");
        for (const auto& pm : j.at("parent_maps")) {
            std::vector<std::size_t> parents(n, n);
            for (const auto& pair : pm.at("pairs")) parents.at(pair.at(0).get<std::size_t>()) = pair.at(1).get<std::size_t>();
            chain.parent_maps_.push_back(std::move(parents));
        }
        if (chain.parent_maps_.size() + 1 != chain.levels_.size())
            throw InputError("parent map count does not match level count");
        return chain;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed chain JSON: ") + e.what());
    }
}

CoveringBounds covering_number_bounds(int d, double epsilon) {
    if (d < 1) throw InputError("dimension must be at least 1");
    if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
    if (epsilon >= 1.0) return {1.0, 1.0};
    return {std::pow(1.0 / epsilon, d), std::pow(1.0 + 2.0 / epsilon, d)};
}

}  // namespace cbl
