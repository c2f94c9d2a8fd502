#pragma once

#include <array>
#include <string>

#include "quanto/random.hpp"

namespace quanto {

enum class ProposalFamily { InverseGamma, TruncatedNormal, TruncatedStudentT, Normal };

std::string to_string(ProposalFamily family);

/// Candidate density for one Metropolis-Hastings coordinate update.
///
/// InverseGamma, TruncatedNormal and TruncatedStudentT are independence
/// proposals on (0, inf). InverseGamma is placed on the squared value
/// (sigma^2) and its log density includes the Jacobian back to sigma.
/// Normal is a random walk centred on the current value with no support
/// restriction; out-of-support candidates are left to the target to reject.
class ProposalSpec {
public:
    static ProposalSpec inverse_gamma(double shape, double scale);
    static ProposalSpec truncated_normal(double location, double scale);
    static ProposalSpec truncated_student_t(double location, double scale, double dof);
    static ProposalSpec normal_random_walk(double step);

    ProposalFamily family() const noexcept { return family_; }
    bool is_random_walk() const noexcept { return family_ == ProposalFamily::Normal; }

    double location() const noexcept { return location_; }
    double scale() const noexcept { return scale_; }
    /// IG shape or TT degrees of freedom; unused otherwise.
    double shape() const noexcept { return shape_; }

    double draw(double current, RandomStream& stream) const;

    /// Normalized log density of `value` given the chain's `current` value
    /// (ignored for independence proposals).
    double log_density(double value, double current) const;

    std::string describe() const;

private:
    ProposalSpec(ProposalFamily family, double location, double scale, double shape);

    double draw_truncated_normal(RandomStream& stream) const;
    double draw_truncated_student_t(RandomStream& stream) const;

    ProposalFamily family_;
    double location_ = 0.0;
    double scale_ = 1.0;
    double shape_ = 0.0;
    double log_norm_ = 0.0;          // precomputed normalizing constant
    double positive_mass_ = 1.0;     // mass of the untruncated density on (0, inf)
};

/// Free-function spelling of the proposal operations.
inline double propose(const ProposalSpec& spec, double current, RandomStream& stream) {
    return spec.draw(current, stream);
}

inline double proposal_logpdf(const ProposalSpec& spec, double value, double current = 0.0) {
    return spec.log_density(value, current);
}

/// One proposal per coordinate, in the update order sigma_x, sigma_h, rho.
using ProposalTriple = std::array<ProposalSpec, 3>;

} // namespace quanto
