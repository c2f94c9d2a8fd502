#pragma once

// Conjugate Normal-Inverse-Wishart baseline for the bivariate return vector
// (x_t, h_t) with unknown mean and covariance. Draws are exact, so the chain
// needs no burn-in; K0 is honoured only to keep the Chain layout uniform.

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "quanto/inference.hpp"
#include "quanto/model.hpp"

namespace quanto {

struct NiwHyperparameters {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    double kappa = 1.0;
    double dof = 4.0;
    Eigen::Matrix2d scale = 1e-4 * Eigen::Matrix2d::Identity();

    /// Throws std::invalid_argument for kappa <= 0, dof <= 1 or a scale matrix
    /// that is not symmetric positive definite.
    void validate() const;
};

/// Updated NIW parameters after observing the sample summarized by `stats`.
/// `stats.n == 0` returns the prior unchanged.
NiwHyperparameters niw_posterior(const NiwHyperparameters& prior, const SufficientStats& stats);

/// Analytic first two moments of the covariance under an inverse-Wishart(dof, scale).
struct InverseWishartMoments {
    Eigen::Matrix2d mean;
    Eigen::Matrix2d variance;  // element-wise Var(Sigma_ij); infinite when dof <= p + 3
};

InverseWishartMoments inverse_wishart_moments(double dof, const Eigen::Matrix2d& scale);

struct NiwDraw {
    Eigen::Vector2d mean;
    Eigen::Matrix2d covariance;
};

/// One exact draw: Sigma ~ IW(dof, scale) via the Bartlett decomposition,
/// mean | Sigma ~ N(m, Sigma / kappa).
NiwDraw draw_niw(const NiwHyperparameters& params, RandomStream& stream);

Chain conjugate_sample(const SufficientStats& stats, const NiwHyperparameters& prior,
                       std::size_t draws, std::size_t burn_in, std::uint64_t seed);

Chain conjugate_sample(const ReturnPanel& panel, const NiwHyperparameters& prior,
                       std::size_t draws, std::size_t burn_in, std::uint64_t seed);

} // namespace quanto
