#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace quanto {

/// Parses YYYY-MM-DD. Returns nullopt for anything else, including impossible dates.
std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view text);

std::string to_iso_string(const std::chrono::year_month_day& date);

} // namespace quanto
