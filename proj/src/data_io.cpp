#include "quanto/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "quanto/date.hpp"
#include "quanto/errors.hpp"

namespace quanto {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return in;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::filesystem::path& path) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw DataError(path.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::string row_label(const std::filesystem::path& path, std::size_t row) {
    return path.string() + " row " + std::to_string(row);
}

} // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto field = line.substr(start, comma == std::string_view::npos ? line.npos
                                                                               : comma - start);
        out.emplace_back(trim(field));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_decimal(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value,
                                     std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

PriceSeries load_price_series(const std::filesystem::path& path, const ColumnSpec& columns) {
    auto in = open_or_throw(path);
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++row;
        if (!blank(line)) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) {
        throw DataError(path.string() + ": empty file");
    }
    const auto di = column_index(header, columns.date_column, path);
    const auto pi = column_index(header, columns.price_column, path);

    std::map<Date, double> by_date;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() <= std::max(di, pi)) {
            throw DataError(row_label(path, row) + ": too few fields");
        }
        const auto date = parse_iso_date(fields[di]);
        if (!date) {
            throw DataError(row_label(path, row) + ": bad date '" + fields[di] + "'");
        }
        const auto price = parse_decimal(fields[pi]);
        if (!price) {
            throw DataError(row_label(path, row) + ": non-numeric price '" + fields[pi] + "'");
        }
        if (!(*price > 0.0)) {
            throw DataError(row_label(path, row) + ": non-positive price on " +
                            to_iso_string(*date));
        }
        if (!by_date.emplace(*date, *price).second) {
            throw DataError(row_label(path, row) + ": duplicate date " + to_iso_string(*date));
        }
    }
    std::vector<Date> dates;
    std::vector<double> prices;
    dates.reserve(by_date.size());
    prices.reserve(by_date.size());
    for (const auto& [d, p] : by_date) {
        dates.push_back(d);
        prices.push_back(p);
    }
    return PriceSeries(std::move(dates), std::move(prices));
}

std::pair<PriceSeries, PriceSeries> align_series(const PriceSeries& a, const PriceSeries& b) {
    if (a.size() == 0 || b.size() == 0) {
        throw DataError("cannot align an empty series");
    }
    std::vector<Date> dates;
    std::vector<double> pa;
    std::vector<double> pb;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.dates()[i] < b.dates()[j]) {
            ++i;
        } else if (b.dates()[j] < a.dates()[i]) {
            ++j;
        } else {
            dates.push_back(a.dates()[i]);
            pa.push_back(a.prices()[i]);
            pb.push_back(b.prices()[j]);
            ++i;
            ++j;
        }
    }
    if (dates.empty()) {
        throw DataError("series share no dates");
    }
    auto dates_b = dates;
    return {PriceSeries(std::move(dates), std::move(pa)),
            PriceSeries(std::move(dates_b), std::move(pb))};
}

void OptionQuote::validate() const {
    if (!(strike > 0.0) || !std::isfinite(strike)) {
        throw std::invalid_argument("option strike must be positive");
    }
    if (maturity_days < 1) {
        throw std::invalid_argument("option maturity must be at least one day");
    }
    if (!(market_price >= 0.0) || !std::isfinite(market_price)) {
        throw std::invalid_argument("option price must be non-negative");
    }
    if (!(underlying_spot > 0.0) || !std::isfinite(underlying_spot)) {
        throw std::invalid_argument("underlying spot must be positive");
    }
}

OptionChain load_option_chain(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++row;
        if (!blank(line)) {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty()) {
        throw DataError(path.string() + ": empty file");
    }
    const auto c_date = column_index(header, "quote_date", path);
    const auto c_strike = column_index(header, "strike", path);
    const auto c_mat = column_index(header, "maturity_days", path);
    const auto c_price = column_index(header, "price", path);
    const auto c_spot = column_index(header, "spot", path);
    const auto needed = std::max({c_date, c_strike, c_mat, c_price, c_spot});

    OptionChain chain;
    while (std::getline(in, line)) {
        ++row;
        if (blank(line)) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() <= needed) {
            chain.rejected.push_back({row, "parse_error", "too few fields"});
            continue;
        }
        const auto date = parse_iso_date(f[c_date]);
        const auto strike = parse_decimal(f[c_strike]);
        const auto price = parse_decimal(f[c_price]);
        const auto spot = parse_decimal(f[c_spot]);
        int maturity = 0;
        const auto& m = f[c_mat];
        auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), maturity);
        if (!date || !strike || !price || !spot || ec != std::errc{} ||
            ptr != m.data() + m.size()) {
            chain.rejected.push_back({row, "parse_error", "unparseable field"});
            continue;
        }
        OptionQuote q{*date, *strike, maturity, *price, *spot};
        try {
            q.validate();
        } catch (const std::invalid_argument& e) {
            chain.rejected.push_back({row, "invalid_field", e.what()});
            continue;
        }
        chain.quotes.push_back(q);
    }
    return chain;
}

FilterResult filter_options(std::span<const OptionQuote> quotes, const MarketConfig& market,
                            std::optional<double> spot) {
    FilterResult out;
    for (const auto& q : quotes) {
        const double s = spot.value_or(q.underlying_spot);
        const double lower =
            std::max(s - q.strike * std::exp(-market.r_d * q.maturity_days), 0.0);
        if (q.market_price < lower) {
            out.dropped.push_back({q, {0, "below_lower_bound",
                                       "price under max(S - K e^{-r m}, 0)"}});
        } else if (q.market_price > s) {
            out.dropped.push_back({q, {0, "above_spot", "price above the underlying"}});
        } else {
            out.retained.push_back(q);
        }
    }
    return out;
}

QuantoQuote construct_quanto(const OptionQuote& call, const MarketConfig& market, double h_fix) {
    if (!(h_fix > 0.0)) {
        throw std::invalid_argument("h_fix must be positive");
    }
    QuantoQuote q;
    q.quote = call;
    q.h_fix = h_fix;
    q.discount = std::exp(-market.r_d * call.maturity_days);
    q.quote.market_price = q.discount * call.market_price * h_fix;
    return q;
}

std::string to_string(Moneyness bucket) {
    switch (bucket) {
    case Moneyness::ITM: return "ITM";
    case Moneyness::ATM: return "ATM";
    case Moneyness::OTM: return "OTM";
    }
    return "?";
}

Moneyness moneyness_bucket(double strike, double spot) {
    if (!(strike > 0.0) || !(spot > 0.0)) {
        throw std::invalid_argument("moneyness needs positive strike and spot");
    }
    const double ratio = strike / spot;
    if (ratio < 0.98) {
        return Moneyness::ITM;
    }
    if (ratio > 1.02) {
        return Moneyness::OTM;
    }
    return Moneyness::ATM;
}

void write_rejection_report(const std::filesystem::path& path,
                            std::span<const Rejection> rejections) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << "row,reason,detail\n";
    for (const auto& r : rejections) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        out << r.row << ',' << r.reason << ',' << detail << '\n';
    }
}

} // namespace quanto
