#include "quanto/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "quanto/data_io.hpp"
#include "quanto/errors.hpp"

namespace quanto::cli {

std::string fmt(double value) {
    if (!std::isfinite(value)) {
        return kMissing;
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string fmt(std::optional<double> value) { return value ? fmt(*value) : kMissing; }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
        throw std::logic_error("csv row width does not match header");
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) {
        emit(r);
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        if (!out.flush()) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0) {
        throw std::invalid_argument("histogram needs at least one bin");
    }
    Histogram h;
    if (values.empty()) {
        return h;
    }
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) {
        h.edges = {lo, hi};
        h.counts = {values.size()};
        return h;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = lo + width * static_cast<double>(i);
    }
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - lo) / width);
        h.counts[std::min(idx, bins - 1)] += 1;
    }
    return h;
}

std::string draws_csv(const Chain& chain) {
    std::string out = "sigma_x,sigma_h,rho\n";
    for (const auto& t : chain.post_burn_in()) {
        out += fmt(t.sigma_x()) + ',' + fmt(t.sigma_h()) + ',' + fmt(t.rho()) + '\n';
    }
    return out;
}

Chain read_draws(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open draws file " + path.string());
    }
    std::string line;
    std::size_t row = 1;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{
                                                              "sigma_x", "sigma_h", "rho"}) {
        throw DataError(path.string() + ": expected header sigma_x,sigma_h,rho");
    }
    std::vector<Theta> draws;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto f = split_csv_line(line);
        std::optional<double> v[3];
        if (f.size() == 3) {
            for (int i = 0; i < 3; ++i) {
                v[i] = parse_decimal(f[static_cast<std::size_t>(i)]);
            }
        }
        if (!v[0] || !v[1] || !v[2] || !Theta::in_support(*v[0], *v[1], *v[2])) {
            throw DataError(path.string() + " row " + std::to_string(row) + ": invalid draw");
        }
        draws.emplace_back(*v[0], *v[1], *v[2]);
    }
    if (draws.empty()) {
        throw DataError(path.string() + ": no draws");
    }
    std::array<std::size_t, 3> moved{};
    for (std::size_t k = 1; k < draws.size(); ++k) {
        moved[0] += draws[k].sigma_x() != draws[k - 1].sigma_x();
        moved[1] += draws[k].sigma_h() != draws[k - 1].sigma_h();
        moved[2] += draws[k].rho() != draws[k - 1].rho();
    }
    return Chain(std::move(draws), 0, moved, 0);
}

} // namespace quanto::cli
