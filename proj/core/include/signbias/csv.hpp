#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace signbias {

// Minimal RFC-4180-style CSV: comma separator, double-quote quoting, one
// header row. Lines starting with '#' before the header are provenance
// comments (config hash, seed) and are skipped on read.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;

  // Index of a named column; throws SchemaError naming the column.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;
  void require_columns(const std::vector<std::string_view>& names) const;
};

CsvTable parse_csv(std::string_view text, std::string_view source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

class CsvWriter {
 public:
  // Opens (truncates) the file; throws IoError on failure. The optional
  // comment is written as a single "# ..." line ahead of the header.
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header,
            std::string_view comment = {});

  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string csv_escape(std::string_view field);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);
std::string format_optional(const std::optional<int>& value);

// Field parsers. `context` names the column/row for error messages.
double parse_double(std::string_view text, std::string_view context);
std::int64_t parse_int(std::string_view text, std::string_view context);
std::optional<double> parse_optional_double(std::string_view text,
                                            std::string_view context);
std::optional<int> parse_optional_int(std::string_view text,
                                      std::string_view context);
bool parse_bool(std::string_view text, std::string_view context);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace signbias
