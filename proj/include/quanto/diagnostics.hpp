#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "quanto/inference.hpp"

namespace quanto {

struct Interval {
    double lo;
    double hi;

    double width() const noexcept { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Spectral density at frequency zero, in long-run-variance units (equals the
/// variance for i.i.d. data): the mean of the periodogram ordinates I(w_j),
/// j = 1..m, where the Daniell window spans ceil(0.04 n) ordinates centred on
/// zero, i.e. m = max(1, ceil(0.04 n) / 2).
double spectral_density_at_zero(std::span<const double> samples);

/// Numerical standard error sqrt(S(0) / n). Requires n >= 100.
double nse(std::span<const double> samples);

/// Geweke convergence diagnostic comparing the first 10% against the last 50%.
/// nullopt when both segments have zero spectral variance. Requires n >= 100.
std::optional<double> geweke_cd(std::span<const double> samples);

/// Shortest window of sorted samples containing ceil(level * n) draws; ties
/// go to the smallest lower bound. Requires 0 < level < 1 and n >= 10.
Interval hpdi(std::span<const double> samples, double level);

struct ChainSummary {
    double mean;
    double std_dev;
    double nse;
    std::optional<double> cd;
    Interval hpdi_95;
    Interval hpdi_99;
    double acceptance_rate;
};

/// Post-burn-in summary of one parameter. Chains shorter than 100 post-burn-in
/// draws get nse from the i.i.d. formula and no CD.
ChainSummary summarize(const Chain& chain, Param param);

/// Same summary for a bare sample; acceptance rate is supplied by the caller.
ChainSummary summarize_samples(std::span<const double> samples, double acceptance_rate);

} // namespace quanto
