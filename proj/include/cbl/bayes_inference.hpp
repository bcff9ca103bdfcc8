// bayes_inference.hpp
//
// Posterior beliefs used by the Thompson agents: conjugate Gaussian in
// precision form for the linear model, exact weights for finite bandits.
// Updates return new values; posteriors are never mutated in place.
#pragma once
#include <vector>

#include <Eigen/Dense>

#include "cbl/seed_stream.hpp"

namespace cbl {

struct GaussianPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd precision;
    double noise_sigma{1.0};

    int dimension() const { return static_cast<int>(mean.size()); }
    Eigen::MatrixXd covariance() const;
};

// N(0, I_d) prior with observation noise sigma.
GaussianPosterior standard_gaussian_prior(int d, double noise_sigma);

// Lambda' = Lambda + a a^T / sigma^2,  mu' = Lambda'^{-1} (Lambda mu + a r / sigma^2).
GaussianPosterior gaussian_update(const GaussianPosterior& post, const Eigen::VectorXd& a, double r);

// theta = mu + L^{-T} z with Lambda = L L^T and z standard normal.
Eigen::VectorXd gaussian_sample(const GaussianPosterior& post, Rng& rng);

// Throws InputError when the precision is not symmetric within 1e-10 or not
// positive definite.
void check_posterior(const GaussianPosterior& post);

struct DiscretePosterior {
    std::vector<double> weights;
};

// weights' proportional to weights * likelihoods. ImpossibleObservation when
// every parameter with prior mass has zero likelihood.
DiscretePosterior discrete_update(const DiscretePosterior& post, const std::vector<double>& likelihoods);

}  // namespace cbl
