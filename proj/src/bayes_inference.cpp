// bayes_inference.cpp
#include "cbl/bayes_inference.hpp"

#include <cmath>
#include <sstream>

#include "cbl/errors.hpp"

namespace cbl {

Eigen::MatrixXd GaussianPosterior::covariance() const {
    return precision.llt().solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
}

GaussianPosterior standard_gaussian_prior(int d, double noise_sigma) {
    if (d < 1) throw InputError("dimension must be at least 1");
    return {Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), noise_sigma};
}

void check_posterior(const GaussianPosterior& post) {
    const auto& L = post.precision;
    if (L.rows() != L.cols() || L.rows() != post.mean.size()) throw InputError("posterior shape mismatch");
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw InputError("precision matrix is not symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(L).info() != Eigen::Success)
        throw InputError("precision matrix is not positive definite");
}

GaussianPosterior gaussian_update(const GaussianPosterior& post, const Eigen::VectorXd& a, double r) {
    if (!(post.noise_sigma > 0.0))
        throw Unsupported("conjugate update needs noise_sigma > 0 (noiseless likelihood is degenerate)");
    if (a.size() != post.mean.size()) throw InputError("action dimension does not match posterior");
    const double inv_var = 1.0 / (post.noise_sigma * post.noise_sigma);
    GaussianPosterior next = post;
    next.precision.noalias() += inv_var * a * a.transpose();
    const Eigen::VectorXd info = post.precision * post.mean + a * (r * inv_var);
    Eigen::LLT<Eigen::MatrixXd> llt(next.precision);
    if (llt.info() != Eigen::Success) throw NumericalError("precision lost positive definiteness during update");
    next.mean = llt.solve(info);
    return next;
}

Eigen::VectorXd gaussian_sample(const GaussianPosterior& post, Rng& rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(post.precision);
    if (llt.info() != Eigen::Success) {
        const Eigen::VectorXd diag = post.precision.diagonal();
        std::ostringstream msg;
        msg << "Cholesky factorization of the precision failed (diagonal range " << diag.minCoeff() << " .. "
            << diag.maxCoeff() << ", ratio " << diag.maxCoeff() / diag.minCoeff() << ")";
        throw NumericalError(msg.str());
    }
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(post.mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    // L^T x = z  =>  x = L^{-T} z, with covariance (L L^T)^{-1}.
    return post.mean + llt.matrixU().solve(z);
}

DiscretePosterior discrete_update(const DiscretePosterior& post, const std::vector<double>& likelihoods) {
    if (likelihoods.size() != post.weights.size()) throw InputError("likelihood vector length mismatch");
    DiscretePosterior next;
    next.weights.resize(post.weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < likelihoods.size(); ++i) {
        if (!(likelihoods[i] >= 0.0)) throw InputError("likelihoods must be nonnegative");
        next.weights[i] = post.weights[i] * likelihoods[i];
        total += next.weights[i];
    }
    if (!(total > 0.0)) throw ImpossibleObservation("observation has zero probability under the posterior");
    for (auto& w : next.weights) w /= total;
    return next;
}

}  // namespace cbl
