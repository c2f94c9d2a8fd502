#pragma once

// CSV ingestion for price series and option chains, calendar alignment, the
// European-bound option filter and synthetic quanto quotes.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quanto/model.hpp"

namespace quanto {

/// Splits one CSV line on commas and trims blanks and a trailing '\r'. No quoting.
std::vector<std::string> split_csv_line(std::string_view line);

/// Whole-field decimal parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_decimal(std::string_view text);

struct ColumnSpec {
    std::string date_column = "date";
    std::string price_column = "price";
};

/// Rows may arrive in any date order; the result is sorted ascending.
/// Throws DataError naming the row for bad dates, non-numeric or non-positive
/// prices, and naming the date for duplicates.
PriceSeries load_price_series(const std::filesystem::path& path, const ColumnSpec& columns = {});

/// Restricts both series to their common dates. Throws DataError when the
/// intersection is empty.
std::pair<PriceSeries, PriceSeries> align_series(const PriceSeries& a, const PriceSeries& b);

struct OptionQuote {
    Date quote_date;
    double strike = 0.0;
    int maturity_days = 1;
    double market_price = 0.0;
    double underlying_spot = 0.0;

    void validate() const;
};

struct QuantoQuote {
    OptionQuote quote;  // market_price already converted
    double h_fix = 1.0;
    double discount = 1.0;  // e^{-r_d maturity}
};

/// A row that did not make it into the working set.
struct Rejection {
    std::size_t row = 0;  // 1-based file line; 0 when not from a file
    std::string reason;   // short machine-readable code
    std::string detail;
};

struct OptionChain {
    std::vector<OptionQuote> quotes;
    std::vector<Rejection> rejected;
};

/// Columns quote_date,strike,maturity_days,price,spot. Malformed rows are
/// rejected with a reason code rather than aborting the load; a missing file
/// or header throws DataError.
OptionChain load_option_chain(const std::filesystem::path& path);

struct FilterResult {
    std::vector<OptionQuote> retained;
    std::vector<std::pair<OptionQuote, Rejection>> dropped;
};

/// Keeps quotes with max(S - K e^{-r_d m}, 0) <= price <= S. S is the quote's
/// own underlying spot unless `spot` is given.
FilterResult filter_options(std::span<const OptionQuote> quotes, const MarketConfig& market,
                            std::optional<double> spot = std::nullopt);

/// QC = e^{-r_d m} H_fix C.
QuantoQuote construct_quanto(const OptionQuote& call, const MarketConfig& market, double h_fix);

enum class Moneyness { ITM, ATM, OTM };

std::string to_string(Moneyness bucket);

/// K/X < 0.98 ITM, K/X > 1.02 OTM, ATM otherwise (boundaries included).
Moneyness moneyness_bucket(double strike, double spot);

/// row,reason,detail sidecar file.
void write_rejection_report(const std::filesystem::path& path,
                            std::span<const Rejection> rejections);

} // namespace quanto
