#include "quanto/conjugate.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace quanto {

void NiwHyperparameters::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("NIW kappa must be positive");
    }
    if (!(dof > 1.0) || !std::isfinite(dof)) {
        throw std::invalid_argument("NIW degrees of freedom must exceed p - 1 = 1");
    }
    if (!scale.allFinite() || !mean.allFinite()) {
        throw std::invalid_argument("NIW parameters must be finite");
    }
    if ((scale - scale.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale.cwiseAbs().maxCoeff()) {
        throw std::invalid_argument("NIW scale matrix must be symmetric");
    }
    Eigen::LLT<Eigen::Matrix2d> llt(scale);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("NIW scale matrix must be positive definite");
    }
}

NiwHyperparameters niw_posterior(const NiwHyperparameters& prior, const SufficientStats& stats) {
    prior.validate();
    if (stats.n == 0) {
        return prior;
    }
    const double n = static_cast<double>(stats.n);
    const Eigen::Vector2d xbar(stats.mean_x, stats.mean_h);
    Eigen::Matrix2d scatter;
    scatter << stats.sxx, stats.sxh, stats.sxh, stats.shh;

    NiwHyperparameters post;
    post.kappa = prior.kappa + n;
    post.dof = prior.dof + n;
    post.mean = (prior.kappa * prior.mean + n * xbar) / post.kappa;
    const Eigen::Vector2d diff = xbar - prior.mean;
    post.scale = prior.scale + scatter + (prior.kappa * n / post.kappa) * diff * diff.transpose();
    return post;
}

InverseWishartMoments inverse_wishart_moments(double dof, const Eigen::Matrix2d& scale) {
    constexpr double p = 2.0;
    InverseWishartMoments m;
    const double inf = std::numeric_limits<double>::infinity();
    m.mean = dof > p + 1.0 ? Eigen::Matrix2d(scale / (dof - p - 1.0))
                           : Eigen::Matrix2d::Constant(inf);
    if (!(dof > p + 3.0)) {
        m.variance = Eigen::Matrix2d::Constant(inf);
        return m;
    }
    const double denom = (dof - p) * (dof - p - 1.0) * (dof - p - 1.0) * (dof - p - 3.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            m.variance(i, j) = ((dof - p + 1.0) * scale(i, j) * scale(i, j) +
                                (dof - p - 1.0) * scale(i, i) * scale(j, j)) /
                               denom;
        }
    }
    return m;
}

NiwDraw draw_niw(const NiwHyperparameters& params, RandomStream& stream) {
    // W ~ Wishart(dof, scale^-1) = L A A' L' with L = chol(scale^-1); Sigma = W^-1.
    const Eigen::Matrix2d precision_scale = params.scale.inverse();
    const Eigen::Matrix2d chol = precision_scale.llt().matrixL();

    std::chi_squared_distribution<double> chi1(params.dof);
    std::chi_squared_distribution<double> chi2(params.dof - 1.0);
    Eigen::Matrix2d bartlett = Eigen::Matrix2d::Zero();
    bartlett(0, 0) = std::sqrt(chi1(stream.engine()));
    bartlett(1, 1) = std::sqrt(chi2(stream.engine()));
    bartlett(1, 0) = stream.normal();

    const Eigen::Matrix2d factor = chol * bartlett;
    const Eigen::Matrix2d wishart = factor * factor.transpose();

    NiwDraw draw;
    draw.covariance = wishart.inverse();
    draw.covariance(0, 1) = draw.covariance(1, 0);

    const Eigen::Matrix2d cov_chol = (draw.covariance / params.kappa).llt().matrixL();
    const Eigen::Vector2d z(stream.normal(), stream.normal());
    draw.mean = params.mean + cov_chol * z;
    return draw;
}

Chain conjugate_sample(const SufficientStats& stats, const NiwHyperparameters& prior,
                       std::size_t draws, std::size_t burn_in, std::uint64_t seed) {
    if (!(draws > burn_in)) {
        throw std::invalid_argument("number of draws K must exceed burn-in K0");
    }
    const auto post = niw_posterior(prior, stats);
    RandomStream stream(seed);
    std::vector<Theta> out;
    out.reserve(draws);
    for (std::size_t k = 0; k < draws; ++k) {
        const auto d = draw_niw(post, stream);
        const double sx = std::sqrt(d.covariance(0, 0));
        const double sh = std::sqrt(d.covariance(1, 1));
        out.emplace_back(sx, sh, d.covariance(0, 1) / (sx * sh));
    }
    const std::size_t kept = draws - burn_in;
    return Chain(std::move(out), burn_in, {kept, kept, kept}, seed);
}

Chain conjugate_sample(const ReturnPanel& panel, const NiwHyperparameters& prior,
                       std::size_t draws, std::size_t burn_in, std::uint64_t seed) {
    return conjugate_sample(panel.stats(), prior, draws, burn_in, seed);
}

} // namespace quanto
