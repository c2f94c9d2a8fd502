#include "quanto/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace quanto {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

double periodogram_low_frequency_mean(std::span<const double> samples, double mean) {
    const std::size_t n = samples.size();
    const std::size_t bandwidth = static_cast<std::size_t>(std::ceil(0.04 * static_cast<double>(n)));
    std::size_t m = std::max<std::size_t>(1, bandwidth / 2);
    m = std::min(m, (n - 1) / 2);

    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
    if (!in || !out) {
        throw std::bad_alloc();
    }
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    for (std::size_t t = 0; t < n; ++t) {
        in.get()[t] = samples[t] - mean;
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    double acc = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        const double re = out.get()[j][0];
        const double im = out.get()[j][1];
        acc += re * re + im * im;
    }
    return acc / (static_cast<double>(m) * static_cast<double>(n));
}

double arithmetic_mean(std::span<const double> s) {
    double sum = 0.0;
    for (double v : s) {
        sum += v;
    }
    return sum / static_cast<double>(s.size());
}

double sample_std_dev(std::span<const double> s, double mean) {
    if (s.size() < 2) {
        return 0.0;
    }
    double acc = 0.0;
    for (double v : s) {
        acc += (v - mean) * (v - mean);
    }
    return std::sqrt(acc / static_cast<double>(s.size() - 1));
}

bool is_constant(std::span<const double> s) {
    auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    return *lo == *hi;
}

void require_length(std::span<const double> samples, std::size_t minimum, const char* what) {
    if (samples.size() < minimum) {
        throw std::invalid_argument(std::string(what) + " needs at least " +
                                    std::to_string(minimum) + " samples");
    }
}

} // namespace

double spectral_density_at_zero(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2 || is_constant(samples)) {
        return 0.0;
    }
    const double mean = arithmetic_mean(samples);
    if (n < 3) {
        const double sd = sample_std_dev(samples, mean);
        return sd * sd;
    }
    return periodogram_low_frequency_mean(samples, mean);
}

double nse(std::span<const double> samples) {
    require_length(samples, 100, "nse");
    return std::sqrt(spectral_density_at_zero(samples) / static_cast<double>(samples.size()));
}

std::optional<double> geweke_cd(std::span<const double> samples) {
    require_length(samples, 100, "geweke_cd");
    const std::size_t n = samples.size();
    const std::size_t n_first = n / 10;
    const std::size_t n_last = n / 2;
    const auto first = samples.first(n_first);
    const auto last = samples.last(n_last);

    const double var = spectral_density_at_zero(first) / static_cast<double>(n_first) +
                       spectral_density_at_zero(last) / static_cast<double>(n_last);
    if (!(var > 0.0)) {
        return std::nullopt;
    }
    return (arithmetic_mean(first) - arithmetic_mean(last)) / std::sqrt(var);
}

Interval hpdi(std::span<const double> samples, double level) {
    if (!(level > 0.0) || !(level < 1.0)) {
        throw std::invalid_argument("hpdi level must lie in (0, 1)");
    }
    require_length(samples, 10, "hpdi");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    // Guard against level * n landing a rounding error above an integer.
    auto count = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9));
    count = std::clamp<std::size_t>(count, 1, n);

    std::size_t best = 0;
    double best_width = sorted[count - 1] - sorted[0];
    for (std::size_t i = 1; i + count <= n; ++i) {
        const double width = sorted[i + count - 1] - sorted[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    return {sorted[best], sorted[best + count - 1]};
}

ChainSummary summarize_samples(std::span<const double> samples, double acceptance_rate) {
    if (samples.empty()) {
        throw std::invalid_argument("cannot summarize an empty post-burn-in segment");
    }
    ChainSummary s{};
    s.mean = arithmetic_mean(samples);
    s.std_dev = sample_std_dev(samples, s.mean);
    s.acceptance_rate = acceptance_rate;
    if (samples.size() >= 100) {
        s.nse = nse(samples);
        s.cd = geweke_cd(samples);
    } else {
        s.nse = s.std_dev / std::sqrt(static_cast<double>(samples.size()));
        s.cd = std::nullopt;
    }
    if (samples.size() >= 10) {
        s.hpdi_95 = hpdi(samples, 0.95);
        s.hpdi_99 = hpdi(samples, 0.99);
    } else {
        auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
        s.hpdi_95 = s.hpdi_99 = Interval{*lo, *hi};
    }
    return s;
}

ChainSummary summarize(const Chain& chain, Param param) {
    const auto values = chain.post_burn_in_values(param);
    return summarize_samples(values, chain.acceptance_rate(param));
}

} // namespace quanto
