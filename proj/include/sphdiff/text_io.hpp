// Delimited-text tables shared by every file format of the project.
//
// A table file is UTF-8 text: optional `# key=value` comment lines, one
// header line of comma-separated column names, then one row per line.
// Numbers are written in the shortest form that parses back to the same
// double, so a write/read cycle is bit-exact.

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sphdiff {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest decimal representation that round-trips to the same double.
std::string format_real(double v);

/// Parses a whole field (surrounding blanks and a leading '+' allowed).
/// Returns false on trailing garbage or an empty field.
bool parse_real(std::string_view text, double& out);

struct NumericTable {
  std::vector<std::pair<std::string, std::string>> comments;  // `# key=value`
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row, filled by reads

  std::size_t column(std::string_view name) const;  // throws ValidationError when absent
};

std::string render_table(const NumericTable& table);

/// Parses table text. When `expected_columns` is non-empty the header must
/// match it exactly. `source` only labels error messages.
NumericTable parse_table(std::string_view text, const std::vector<std::string>& expected_columns,
                         const std::string& source);

NumericTable read_table(const std::filesystem::path& path,
                        const std::vector<std::string>& expected_columns = {});

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void write_table(const std::filesystem::path& path, const NumericTable& table);

/// Two-column table helper for curves y(x).
NumericTable make_curve(std::string x_name, std::string y_name, const std::vector<double>& x,
                        const std::vector<double>& y);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace sphdiff
