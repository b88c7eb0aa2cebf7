#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hedgesym::io {

/// Decimal with 17 significant digits (round-trip safe), dot separator.
std::string format_double(double v);

/// Writes a header line and rows; `\n` line endings.
void write_csv(std::ostream& os, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows);

void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows);

/// Reads numeric rows; the header must match `expected_header` exactly.
/// Throws ParamError on I/O failure, header mismatch or non-numeric cells.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::span<const std::string> expected_header);

std::vector<std::vector<double>> read_csv(std::istream& is,
                                          std::span<const std::string> expected_header);

}  // namespace hedgesym::io
