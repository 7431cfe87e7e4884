#include "signbias/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "signbias/errors.hpp"

namespace signbias {

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::size_t CsvTable::column(std::string_view name) const {
  if (auto idx = find_column(name)) return *idx;
  throw SchemaError("missing column '" + std::string(name) + "'");
}

void CsvTable::require_columns(const std::vector<std::string_view>& names) const {
  for (auto name : names) (void)column(name);
}

namespace {

std::vector<std::string> split_record(std::string_view line, std::string_view source,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) {
    throw SchemaError(std::string(source) + ":" + std::to_string(line_no) +
                      ": unterminated quoted field");
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

CsvTable parse_csv(std::string_view text, std::string_view source) {
  CsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (!have_header) {
      if (line.front() == '#') {
        table.comments.emplace_back(line.substr(1));
        continue;
      }
      if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
        line.remove_prefix(3);
      }
      table.header = split_record(line, source, line_no);
      have_header = true;
      continue;
    }
    auto fields = split_record(line, source, line_no);
    if (fields.size() != table.header.size()) {
      throw SchemaError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw SchemaError(std::string(source) + ": missing header row");
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path), path.string());
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header, std::string_view comment)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  if (!comment.empty()) out_ << "# " << comment << '\n';
  write_row(header);
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
  if (!out_) throw IoError("write failed for '" + path_.string() + "'");
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("close failed for '" + path_.string() + "'");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

std::string format_optional(const std::optional<int>& value) {
  return value ? std::to_string(*value) : std::string();
}

namespace {
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}
}  // namespace

double parse_double(std::string_view text, std::string_view context) {
  text = trim(text);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw SchemaError(std::string(context) + ": expected a number, got '" +
                      std::string(text) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view text, std::string_view context) {
  text = trim(text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw SchemaError(std::string(context) + ": expected an integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

std::optional<double> parse_optional_double(std::string_view text,
                                            std::string_view context) {
  if (trim(text).empty()) return std::nullopt;
  return parse_double(text, context);
}

std::optional<int> parse_optional_int(std::string_view text, std::string_view context) {
  if (trim(text).empty()) return std::nullopt;
  return static_cast<int>(parse_int(text, context));
}

bool parse_bool(std::string_view text, std::string_view context) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "True" || text == "TRUE") return true;
  if (text == "0" || text == "false" || text == "False" || text == "FALSE" || text.empty())
    return false;
  throw SchemaError(std::string(context) + ": expected a boolean, got '" +
                    std::string(text) + "'");
}

}  // namespace signbias
