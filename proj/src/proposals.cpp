#include "quanto/proposals.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace quanto {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Below this probability of landing in (0, inf), naive rejection is replaced
// by a tail sampler.
constexpr double kRejectionThreshold = 0.2;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

} // namespace

std::string to_string(ProposalFamily family) {
    switch (family) {
    case ProposalFamily::InverseGamma: return "IG";
    case ProposalFamily::TruncatedNormal: return "TN";
    case ProposalFamily::TruncatedStudentT: return "TT";
    case ProposalFamily::Normal: return "N";
    }
    return "?";
}

ProposalSpec::ProposalSpec(ProposalFamily family, double location, double scale, double shape)
    : family_(family), location_(location), scale_(scale), shape_(shape) {
    if (!std::isfinite(location) || !std::isfinite(scale) || !(scale > 0.0)) {
        throw std::invalid_argument("proposal scale must be positive and parameters finite");
    }
    switch (family_) {
    case ProposalFamily::InverseGamma:
        if (!(shape > 2.0)) {
            throw std::invalid_argument("inverse-gamma proposal shape must exceed 2");
        }
        log_norm_ = shape * std::log(scale) - std::lgamma(shape) + std::numbers::ln2;
        break;
    case ProposalFamily::TruncatedNormal:
        positive_mass_ = std_normal_cdf(location / scale);
        if (!(positive_mass_ > 0.0)) {
            throw std::invalid_argument("truncated normal has no mass on (0, inf)");
        }
        log_norm_ = -std::log(scale) - 0.5 * std::log(2.0 * std::numbers::pi) -
                    std::log(positive_mass_);
        break;
    case ProposalFamily::TruncatedStudentT: {
        if (!(shape > 2.0) || !std::isfinite(shape)) {
            throw std::invalid_argument("truncated Student-t degrees of freedom must exceed 2");
        }
        boost::math::students_t_distribution<double> t(shape);
        positive_mass_ = boost::math::cdf(t, location / scale);
        if (!(positive_mass_ > 0.0)) {
            throw std::invalid_argument("truncated Student-t has no mass on (0, inf)");
        }
        log_norm_ = std::lgamma(0.5 * (shape + 1.0)) - std::lgamma(0.5 * shape) -
                    0.5 * std::log(shape * std::numbers::pi) - std::log(scale) -
                    std::log(positive_mass_);
        break;
    }
    case ProposalFamily::Normal:
        log_norm_ = -std::log(scale) - 0.5 * std::log(2.0 * std::numbers::pi);
        break;
    }
}

ProposalSpec ProposalSpec::inverse_gamma(double shape, double scale) {
    return ProposalSpec(ProposalFamily::InverseGamma, 0.0, scale, shape);
}

ProposalSpec ProposalSpec::truncated_normal(double location, double scale) {
    return ProposalSpec(ProposalFamily::TruncatedNormal, location, scale, 0.0);
}

ProposalSpec ProposalSpec::truncated_student_t(double location, double scale, double dof) {
    return ProposalSpec(ProposalFamily::TruncatedStudentT, location, scale, dof);
}

ProposalSpec ProposalSpec::normal_random_walk(double step) {
    return ProposalSpec(ProposalFamily::Normal, 0.0, step, 0.0);
}

double ProposalSpec::draw(double current, RandomStream& stream) const {
    switch (family_) {
    case ProposalFamily::InverseGamma: {
        std::gamma_distribution<double> gamma(shape_, 1.0);
        const double variance = scale_ / gamma(stream.engine());
        return std::sqrt(variance);
    }
    case ProposalFamily::TruncatedNormal: return draw_truncated_normal(stream);
    case ProposalFamily::TruncatedStudentT: return draw_truncated_student_t(stream);
    case ProposalFamily::Normal: return current + scale_ * stream.normal();
    }
    return current;
}

double ProposalSpec::draw_truncated_normal(RandomStream& stream) const {
    if (positive_mass_ >= kRejectionThreshold) {
        for (;;) {
            const double v = location_ + scale_ * stream.normal();
            if (v > 0.0) {
                return v;
            }
        }
    }
    // Exponential rejection sampler for the standardized tail z > lower.
    const double lower = -location_ / scale_;
    const double lambda = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
    for (;;) {
        const double u1 = stream.uniform();
        const double z = lower - std::log1p(-u1) / lambda;
        const double u2 = stream.uniform();
        if (u2 < std::exp(-0.5 * (z - lambda) * (z - lambda)) && z > lower) {
            return location_ + scale_ * z;
        }
    }
}

double ProposalSpec::draw_truncated_student_t(RandomStream& stream) const {
    if (positive_mass_ >= kRejectionThreshold) {
        std::student_t_distribution<double> t(shape_);
        for (;;) {
            const double v = location_ + scale_ * t(stream.engine());
            if (v > 0.0) {
                return v;
            }
        }
    }
    boost::math::students_t_distribution<double> t(shape_);
    const double lower_cdf = 1.0 - positive_mass_;
    for (;;) {
        const double u = lower_cdf + positive_mass_ * stream.uniform();
        if (u <= lower_cdf || u >= 1.0) {
            continue;
        }
        const double v = location_ + scale_ * boost::math::quantile(t, u);
        if (v > 0.0) {
            return v;
        }
    }
}

double ProposalSpec::log_density(double value, double current) const {
    switch (family_) {
    case ProposalFamily::InverseGamma: {
        if (!(value > 0.0)) {
            return kNegInf;
        }
        const double variance = value * value;
        if (variance == 0.0) {
            return kNegInf;  // the density vanishes faster than any power
        }
        return log_norm_ - (shape_ + 1.0) * std::log(variance) - scale_ / variance +
               std::log(value);
    }
    case ProposalFamily::TruncatedNormal: {
        if (!(value > 0.0)) {
            return kNegInf;
        }
        const double z = (value - location_) / scale_;
        return log_norm_ - 0.5 * z * z;
    }
    case ProposalFamily::TruncatedStudentT: {
        if (!(value > 0.0)) {
            return kNegInf;
        }
        const double z = (value - location_) / scale_;
        return log_norm_ - 0.5 * (shape_ + 1.0) * std::log1p(z * z / shape_);
    }
    case ProposalFamily::Normal: {
        const double z = (value - current) / scale_;
        return log_norm_ - 0.5 * z * z;
    }
    }
    return kNegInf;
}

std::string ProposalSpec::describe() const {
    std::ostringstream os;
    os.precision(10);
    switch (family_) {
    case ProposalFamily::InverseGamma:
        os << "IG(shape=" << shape_ << ",scale=" << scale_ << ")";
        break;
    case ProposalFamily::TruncatedNormal:
        os << "TN(loc=" << location_ << ",scale=" << scale_ << ")";
        break;
    case ProposalFamily::TruncatedStudentT:
        os << "TT(loc=" << location_ << ",scale=" << scale_ << ",dof=" << shape_ << ")";
        break;
    case ProposalFamily::Normal:
        os << "N-RW(step=" << scale_ << ")";
        break;
    }
    return os.str();
}

} // namespace quanto
