#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace valuecast::csv {

// One logical record. `line` is the 1-based physical line where it starts,
// so quoted fields with embedded newlines still report a useful position.
struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Record> rows;

  // Index of a header name, or -1.
  int column(std::string_view name) const;
};

// Comma separated, UTF-8, RFC 4180 quoting. The first record is the header.
// Blank lines are skipped. Throws Error(kParse) on an unterminated quote and
// Error(kIo) if the file cannot be read.
Table parse(std::string_view content);
Table read_file(const std::filesystem::path& path);

std::string quote(std::string_view field);
void write_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace valuecast::csv
