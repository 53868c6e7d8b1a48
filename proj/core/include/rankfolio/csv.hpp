#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rankfolio::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Parses RFC 4180 style CSV (quoted fields, CRLF tolerated). The first
/// record is the header; every row must have the header's width.
/// Throws MalformedFile on ragged rows, Io when the file cannot be read.
Table parse(std::string_view text, std::string_view source_name);
Table read_file(const std::filesystem::path& path);

std::string escape(std::string_view field);

/// Writes one record terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Parses a finite real, rejecting trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

}  // namespace rankfolio::csv
