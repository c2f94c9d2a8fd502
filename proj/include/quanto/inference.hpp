#pragma once

// Posterior kernels for (sigma_x, sigma_h, rho) with the drifts integrated out,
// the Metropolis-within-Gibbs sampler, and the MLE baseline.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quanto/model.hpp"
#include "quanto/proposals.hpp"
#include "quanto/random.hpp"

namespace quanto {

enum class Param : std::size_t { SigmaX = 0, SigmaH = 1, Rho = 2 };

constexpr std::array<Param, 3> kAllParams{Param::SigmaX, Param::SigmaH, Param::Rho};

std::string to_string(Param param);

/// Raw coordinates (sigma_x, sigma_h, rho); may sit outside the support while
/// a candidate is being evaluated.
using ParamVector = std::array<double, 3>;

/// Log full-conditional of one coordinate, up to a constant in that coordinate.
/// Out-of-support states must evaluate to -inf rather than throw.
class ConditionalTarget {
public:
    virtual ~ConditionalTarget() = default;
    virtual double log_conditional(Param param, const ParamVector& state) const = 0;
};

/// Unnormalized log posterior of theta given the sufficient statistics of the
/// return sample.
class PosteriorKernel final : public ConditionalTarget {
public:
    explicit PosteriorKernel(const SufficientStats& stats);
    explicit PosteriorKernel(const ReturnPanel& panel);

    double log_joint(double sigma_x, double sigma_h, double rho) const noexcept;
    double log_joint(const Theta& theta) const noexcept;

    double log_cond_sigma_x(double sigma_x, double sigma_h, double rho) const noexcept;
    double log_cond_sigma_h(double sigma_h, double sigma_x, double rho) const noexcept;
    /// Carries rho^2 on the sum (h_t - hbar)^2 term; differs from the joint
    /// kernel by a quantity constant in rho.
    double log_cond_rho(double rho, double sigma_x, double sigma_h) const noexcept;

    double log_conditional(Param param, const ParamVector& state) const override;

    const SufficientStats& stats() const noexcept { return stats_; }

private:
    SufficientStats stats_;
};

double log_cond_sigma_x(double sigma_x, double sigma_h, double rho, const ReturnPanel& panel);
double log_cond_sigma_h(double sigma_h, double sigma_x, double rho, const ReturnPanel& panel);
double log_cond_rho(double rho, double sigma_x, double sigma_h, const ReturnPanel& panel);
double log_joint_posterior(const Theta& theta, const ReturnPanel& panel);

/// Metropolis-Hastings acceptance probability from log target and log
/// proposal values: min(1, p(cand) q(curr | cand) / (p(curr) q(cand | curr))).
double acceptance_probability(double log_target_candidate, double log_target_current,
                              double log_q_current_given_candidate,
                              double log_q_candidate_given_current) noexcept;

/// Ordered draws of theta. Draw k (0-based) is the state after sweep k + 1.
class Chain {
public:
    Chain(std::vector<Theta> draws, std::size_t burn_in, std::array<std::size_t, 3> accepted,
          std::uint64_t seed, std::vector<std::string> warnings = {});

    const std::vector<Theta>& draws() const noexcept { return draws_; }
    std::size_t size() const noexcept { return draws_.size(); }
    std::size_t burn_in() const noexcept { return burn_in_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    std::span<const Theta> post_burn_in() const noexcept;
    std::vector<double> post_burn_in_values(Param param) const;

    /// Accepted moves after burn-in.
    std::size_t accepted(Param param) const noexcept;
    double acceptance_rate(Param param) const noexcept;

    /// Chain of a single fixed theta (plug-in pricing, tests).
    static Chain point(const Theta& theta);

private:
    std::vector<Theta> draws_;
    std::size_t burn_in_;
    std::array<std::size_t, 3> accepted_;
    std::uint64_t seed_;
    std::vector<std::string> warnings_;
};

struct GibbsRun {
    std::vector<ParamVector> draws;
    std::array<std::size_t, 3> accepted_after_burn_in{};
};

/// One sweep over sigma_x, sigma_h, rho in that order. Each coordinate draws
/// a candidate, then one uniform, and accepts iff u < alpha.
std::array<bool, 3> mwg_sweep(const ConditionalTarget& target, const ProposalTriple& proposals,
                              ParamVector& state, RandomStream& stream);

/// Runs K sweeps against any conditional target.
GibbsRun run_metropolis_within_gibbs(const ConditionalTarget& target,
                                     const ProposalTriple& proposals, std::size_t sweeps,
                                     std::size_t burn_in, const ParamVector& init,
                                     std::uint64_t seed);

/// Metropolis-within-Gibbs on the posterior of the panel. Requires K > K0.
Chain mwg_sample(const ReturnPanel& panel, const ProposalTriple& proposals, std::size_t sweeps,
                 std::size_t burn_in, const Theta& init, std::uint64_t seed);

struct MleEstimate {
    Theta theta_hat;
    Drift drift_hat;
};

/// Closed-form MLE of the bivariate normal return model (divisor T).
/// Throws DegenerateDataError on zero variance or |rho_hat| = 1.
MleEstimate mle_estimate(const ReturnPanel& panel);
MleEstimate mle_estimate(const SufficientStats& stats);

/// Candidate-density triples for (sigma_x, sigma_h, rho).
enum class CandidateSet { TTN, TNN, IGN };

std::string to_string(CandidateSet set);

struct ProposalTuning {
    double vol_scale_multiplier = 2.0;  // TN/TT scale = multiplier * sigma_hat / sqrt(T)
    double tt_dof = 5.0;
    double ig_shape = 5.0;
    double rho_step = 0.1;
};

/// Independence proposals anchored at the per-coordinate MLE volatilities and
/// a Normal random walk for rho.
ProposalTriple default_proposals(CandidateSet set, const SufficientStats& stats,
                                 const ProposalTuning& tuning = {});

/// Starting point at the MLE, with rho clamped into (-0.99, 0.99).
Theta default_initial_theta(const SufficientStats& stats);

} // namespace quanto
