#include "hedgesym/io.hpp"

#include "hedgesym/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hedgesym::io {

std::string format_double(double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_csv(std::ostream& os, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        os << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
}

void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParamError("cannot open '" + path.string() + "' for writing");
    write_csv(os, header, rows);
}

namespace {

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::vector<std::vector<double>> read_csv(std::istream& is,
                                          std::span<const std::string> expected_header) {
    std::string line;
    if (!std::getline(is, line)) throw ParamError("empty CSV input");
    const auto header = split(trim(line));
    if (header.size() != expected_header.size() ||
        !std::equal(header.begin(), header.end(), expected_header.begin())) {
        std::string want;
        for (std::size_t i = 0; i < expected_header.size(); ++i) {
            if (i) want += ',';
            want += expected_header[i];
        }
        throw ParamError("CSV header must be '" + want + "', got '" + trim(line) + "'");
    }

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != expected_header.size()) {
            throw ParamError("CSV line " + std::to_string(lineno) + ": expected " +
                             std::to_string(expected_header.size()) + " columns");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || ptr != c.data() + c.size()) {
                throw ParamError("CSV line " + std::to_string(lineno) + ": bad number '" + c + "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::span<const std::string> expected_header) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParamError("cannot open '" + path.string() + "'");
    return read_csv(is, expected_header);
}

}  // namespace hedgesym::io
