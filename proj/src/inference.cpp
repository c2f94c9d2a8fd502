#include "quanto/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "quanto/errors.hpp"

namespace quanto {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

} // namespace

std::string to_string(Param param) {
    switch (param) {
    case Param::SigmaX: return "sigma_x";
    case Param::SigmaH: return "sigma_h";
    case Param::Rho: return "rho";
    }
    return "?";
}

std::string to_string(CandidateSet set) {
    switch (set) {
    case CandidateSet::TTN: return "ttn";
    case CandidateSet::TNN: return "tnn";
    case CandidateSet::IGN: return "ign";
    }
    return "?";
}

// ---------------------------------------------------------------------------
//     Posterior kernels
// ---------------------------------------------------------------------------

PosteriorKernel::PosteriorKernel(const SufficientStats& stats) : stats_(stats) {
    if (stats_.n < 2) {
        throw InsufficientDataError("posterior kernel needs at least 2 observations");
    }
}

PosteriorKernel::PosteriorKernel(const ReturnPanel& panel) : PosteriorKernel(panel.stats()) {}

double PosteriorKernel::log_joint(double sigma_x, double sigma_h, double rho) const noexcept {
    if (!Theta::in_support(sigma_x, sigma_h, rho)) {
        return kNegInf;
    }
    const double t = static_cast<double>(stats_.n);
    const double one_minus = 1.0 - rho * rho;
    return -0.5 * t * std::log(one_minus) - t * std::log(sigma_x) -
           (t - 1.0) * std::log(sigma_h) -
           stats_.sxx / (2.0 * sigma_x * sigma_x * one_minus) -
           stats_.shh / (2.0 * sigma_h * sigma_h * one_minus) -
           rho * stats_.cross_term() / (sigma_x * sigma_h * one_minus);
}

double PosteriorKernel::log_joint(const Theta& theta) const noexcept {
    return log_joint(theta.sigma_x(), theta.sigma_h(), theta.rho());
}

double PosteriorKernel::log_cond_sigma_x(double sigma_x, double sigma_h,
                                         double rho) const noexcept {
    if (!Theta::in_support(sigma_x, sigma_h, rho)) {
        return kNegInf;
    }
    const double t = static_cast<double>(stats_.n);
    const double one_minus = 1.0 - rho * rho;
    return -t * std::log(sigma_x) - stats_.sxx / (2.0 * sigma_x * sigma_x * one_minus) -
           rho * stats_.cross_term() / (sigma_x * sigma_h * one_minus);
}

double PosteriorKernel::log_cond_sigma_h(double sigma_h, double sigma_x,
                                         double rho) const noexcept {
    if (!Theta::in_support(sigma_x, sigma_h, rho)) {
        return kNegInf;
    }
    const double t = static_cast<double>(stats_.n);
    const double one_minus = 1.0 - rho * rho;
    return -(t - 1.0) * std::log(sigma_h) - stats_.shh / (2.0 * sigma_h * sigma_h * one_minus) -
           rho * stats_.cross_term() / (sigma_x * sigma_h * one_minus);
}

double PosteriorKernel::log_cond_rho(double rho, double sigma_x, double sigma_h) const noexcept {
    if (!Theta::in_support(sigma_x, sigma_h, rho)) {
        return kNegInf;
    }
    const double t = static_cast<double>(stats_.n);
    const double one_minus = 1.0 - rho * rho;
    return -0.5 * t * std::log(one_minus) - stats_.sxx / (2.0 * sigma_x * sigma_x * one_minus) -
           rho * rho * stats_.shh / (2.0 * sigma_h * sigma_h * one_minus) -
           rho * stats_.cross_term() / (sigma_x * sigma_h * one_minus);
}

double PosteriorKernel::log_conditional(Param param, const ParamVector& s) const {
    switch (param) {
    case Param::SigmaX: return log_cond_sigma_x(s[0], s[1], s[2]);
    case Param::SigmaH: return log_cond_sigma_h(s[1], s[0], s[2]);
    case Param::Rho: return log_cond_rho(s[2], s[0], s[1]);
    }
    return kNegInf;
}

double log_cond_sigma_x(double sigma_x, double sigma_h, double rho, const ReturnPanel& panel) {
    return PosteriorKernel(panel).log_cond_sigma_x(sigma_x, sigma_h, rho);
}

double log_cond_sigma_h(double sigma_h, double sigma_x, double rho, const ReturnPanel& panel) {
    return PosteriorKernel(panel).log_cond_sigma_h(sigma_h, sigma_x, rho);
}

double log_cond_rho(double rho, double sigma_x, double sigma_h, const ReturnPanel& panel) {
    return PosteriorKernel(panel).log_cond_rho(rho, sigma_x, sigma_h);
}

double log_joint_posterior(const Theta& theta, const ReturnPanel& panel) {
    return PosteriorKernel(panel).log_joint(theta);
}

// ---------------------------------------------------------------------------
//     Metropolis-within-Gibbs
// ---------------------------------------------------------------------------

double acceptance_probability(double log_target_candidate, double log_target_current,
                              double log_q_current_given_candidate,
                              double log_q_candidate_given_current) noexcept {
    if (log_target_candidate == kNegInf || std::isnan(log_target_candidate)) {
        return 0.0;
    }
    if (log_target_current == kNegInf) {
        return 1.0;
    }
    const double log_ratio = (log_target_candidate - log_target_current) +
                             (log_q_current_given_candidate - log_q_candidate_given_current);
    if (std::isnan(log_ratio)) {
        return 0.0;
    }
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

Chain::Chain(std::vector<Theta> draws, std::size_t burn_in, std::array<std::size_t, 3> accepted,
             std::uint64_t seed, std::vector<std::string> warnings)
    : draws_(std::move(draws)),
      burn_in_(burn_in),
      accepted_(accepted),
      seed_(seed),
      warnings_(std::move(warnings)) {
    if (burn_in_ >= draws_.size()) {
        throw std::invalid_argument("chain burn-in must be shorter than the chain");
    }
    for (auto count : accepted_) {
        if (count > draws_.size() - burn_in_) {
            throw std::invalid_argument("acceptance count exceeds post-burn-in length");
        }
    }
}

std::span<const Theta> Chain::post_burn_in() const noexcept {
    return std::span<const Theta>(draws_).subspan(burn_in_);
}

std::vector<double> Chain::post_burn_in_values(Param param) const {
    std::vector<double> out;
    out.reserve(draws_.size() - burn_in_);
    for (const auto& theta : post_burn_in()) {
        switch (param) {
        case Param::SigmaX: out.push_back(theta.sigma_x()); break;
        case Param::SigmaH: out.push_back(theta.sigma_h()); break;
        case Param::Rho: out.push_back(theta.rho()); break;
        }
    }
    return out;
}

std::size_t Chain::accepted(Param param) const noexcept {
    return accepted_[static_cast<std::size_t>(param)];
}

double Chain::acceptance_rate(Param param) const noexcept {
    return static_cast<double>(accepted(param)) / static_cast<double>(draws_.size() - burn_in_);
}

Chain Chain::point(const Theta& theta) {
    return Chain({theta}, 0, {1, 1, 1}, 0);
}

std::array<bool, 3> mwg_sweep(const ConditionalTarget& target, const ProposalTriple& proposals,
                              ParamVector& state, RandomStream& stream) {
    std::array<bool, 3> accepted{};
    for (auto param : kAllParams) {
        const auto i = static_cast<std::size_t>(param);
        const auto& spec = proposals[i];
        const double current = state[i];
        const double candidate = spec.draw(current, stream);

        ParamVector trial = state;
        trial[i] = candidate;
        const double alpha = acceptance_probability(
            target.log_conditional(param, trial), target.log_conditional(param, state),
            spec.log_density(current, candidate), spec.log_density(candidate, current));

        const double u = stream.uniform();
        if (u < alpha) {
            state[i] = candidate;
            accepted[i] = true;
        }
    }
    return accepted;
}

GibbsRun run_metropolis_within_gibbs(const ConditionalTarget& target,
                                     const ProposalTriple& proposals, std::size_t sweeps,
                                     std::size_t burn_in, const ParamVector& init,
                                     std::uint64_t seed) {
    if (!(sweeps > burn_in)) {
        throw std::invalid_argument("number of sweeps K must exceed burn-in K0");
    }
    RandomStream stream(seed);
    GibbsRun run;
    run.draws.reserve(sweeps);
    ParamVector state = init;
    for (std::size_t k = 0; k < sweeps; ++k) {
        const auto moved = mwg_sweep(target, proposals, state, stream);
        if (k >= burn_in) {
            for (std::size_t i = 0; i < 3; ++i) {
                run.accepted_after_burn_in[i] += moved[i] ? 1 : 0;
            }
        }
        run.draws.push_back(state);
    }
    return run;
}

Chain mwg_sample(const ReturnPanel& panel, const ProposalTriple& proposals, std::size_t sweeps,
                 std::size_t burn_in, const Theta& init, std::uint64_t seed) {
    PosteriorKernel kernel(panel);
    auto run = run_metropolis_within_gibbs(kernel, proposals, sweeps, burn_in,
                                           {init.sigma_x(), init.sigma_h(), init.rho()}, seed);
    std::vector<Theta> draws;
    draws.reserve(run.draws.size());
    for (const auto& s : run.draws) {
        draws.emplace_back(s[0], s[1], s[2]);
    }
    std::vector<std::string> warnings;
    for (auto param : kAllParams) {
        if (run.accepted_after_burn_in[static_cast<std::size_t>(param)] == 0) {
            warnings.push_back("no accepted moves after burn-in for " + to_string(param));
        }
    }
    return Chain(std::move(draws), burn_in, run.accepted_after_burn_in, seed, std::move(warnings));
}

// ---------------------------------------------------------------------------
//     MLE and proposal anchoring
// ---------------------------------------------------------------------------

MleEstimate mle_estimate(const SufficientStats& stats) {
    if (stats.n < 2) {
        throw InsufficientDataError("MLE needs at least 2 observations");
    }
    if (!(stats.sxx > 0.0) || !(stats.shh > 0.0)) {
        throw DegenerateDataError("zero sample variance in return panel");
    }
    const double t = static_cast<double>(stats.n);
    const double var_x = stats.sxx / t;
    const double var_h = stats.shh / t;
    const double rho = stats.sxh / std::sqrt(stats.sxx * stats.shh);
    if (!(std::abs(rho) < 1.0 - 1e-12)) {
        throw DegenerateDataError("sample correlation is +/-1; no interior MLE");
    }
    return MleEstimate{Theta(std::sqrt(var_x), std::sqrt(var_h), rho),
                       Drift(stats.mean_x + 0.5 * var_x, stats.mean_h + 0.5 * var_h)};
}

MleEstimate mle_estimate(const ReturnPanel& panel) { return mle_estimate(panel.stats()); }

ProposalTriple default_proposals(CandidateSet set, const SufficientStats& stats,
                                 const ProposalTuning& tuning) {
    if (stats.n < 2) {
        throw InsufficientDataError("proposal anchoring needs at least 2 observations");
    }
    if (!(stats.sxx > 0.0) || !(stats.shh > 0.0)) {
        throw DegenerateDataError("zero sample variance; cannot anchor proposals");
    }
    const double t = static_cast<double>(stats.n);
    const double sx = std::sqrt(stats.sxx / t);
    const double sh = std::sqrt(stats.shh / t);
    const double spread = tuning.vol_scale_multiplier / std::sqrt(t);
    const auto rho = ProposalSpec::normal_random_walk(tuning.rho_step);

    switch (set) {
    case CandidateSet::TTN:
        return {ProposalSpec::truncated_student_t(sx, spread * sx, tuning.tt_dof),
                ProposalSpec::truncated_student_t(sh, spread * sh, tuning.tt_dof), rho};
    case CandidateSet::TNN:
        return {ProposalSpec::truncated_normal(sx, spread * sx),
                ProposalSpec::truncated_normal(sh, spread * sh), rho};
    case CandidateSet::IGN:
        // Mode of IG(a, b) on sigma^2 is b / (a + 1).
        return {ProposalSpec::inverse_gamma(tuning.ig_shape, (tuning.ig_shape + 1.0) * sx * sx),
                ProposalSpec::inverse_gamma(tuning.ig_shape, (tuning.ig_shape + 1.0) * sh * sh),
                rho};
    }
    throw std::invalid_argument("unknown candidate set");
}

Theta default_initial_theta(const SufficientStats& stats) {
    if (stats.n < 2 || !(stats.sxx > 0.0) || !(stats.shh > 0.0)) {
        throw DegenerateDataError("cannot initialise sampler from degenerate data");
    }
    const double t = static_cast<double>(stats.n);
    const double rho = std::clamp(stats.sxh / std::sqrt(stats.sxx * stats.shh), -0.99, 0.99);
    return Theta(std::sqrt(stats.sxx / t), std::sqrt(stats.shh / t), rho);
}

} // namespace quanto
