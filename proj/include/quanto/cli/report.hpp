#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quanto/inference.hpp"

namespace quanto::cli {

/// Marker written in place of any unavailable or non-finite number.
inline constexpr const char* kMissing = "NA";

/// Shortest round-trip decimal; kMissing for NaN and infinities.
std::string fmt(double value);
std::string fmt(std::optional<double> value);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> row);
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the last bin is closed.
Histogram make_histogram(std::span<const double> values, std::size_t bins);

/// Post-burn-in draws as sigma_x,sigma_h,rho rows.
std::string draws_csv(const Chain& chain);

/// Reads a draws file back as a chain with no burn-in. Acceptance counts are
/// reconstructed from how often consecutive draws differ.
Chain read_draws(const std::filesystem::path& path);

} // namespace quanto::cli
