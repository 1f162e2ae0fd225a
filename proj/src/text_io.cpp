#include "sphdiff/text_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace sphdiff {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ',';
    s += parts[i];
  }
  return s;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

bool parse_real(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::size_t NumericTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ValidationError("table has no column '" + std::string(name) + "'");
}

std::string render_table(const NumericTable& table) {
  std::string out;
  for (const auto& [k, v] : table.comments) out += "# " + k + "=" + v + "\n";
  out += join(table.columns) + "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_real(row[i]);
    }
    out += '\n';
  }
  return out;
}

NumericTable parse_table(std::string_view text, const std::vector<std::string>& expected_columns,
                         const std::string& source) {
  NumericTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        table.comments.emplace_back(std::string(trim(body.substr(0, eq))),
                                    std::string(trim(body.substr(eq + 1))));
      }
      continue;
    }
    const auto fields = split_commas(line);
    if (!have_header) {
      for (auto f : fields) table.columns.emplace_back(f);
      if (!expected_columns.empty() && table.columns != expected_columns) {
        throw ParseError(source, line_no,
                         "expected header '" + join(expected_columns) + "', found '" +
                             std::string(line) + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(table.columns.size()) + " fields, found " +
                           std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_real(fields[i], row[i])) {
        throw ParseError(source, line_no, "malformed number '" + std::string(fields[i]) + "'");
      }
    }
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError(source, line_no, "missing header line");
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NumericTable read_table(const std::filesystem::path& path,
                        const std::vector<std::string>& expected_columns) {
  return parse_table(read_text_file(path), expected_columns, path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

void write_table(const std::filesystem::path& path, const NumericTable& table) {
  write_file_atomic(path, render_table(table));
}

NumericTable make_curve(std::string x_name, std::string y_name, const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("curve abscissa and ordinate differ in length");
  NumericTable t;
  t.columns = {std::move(x_name), std::move(y_name)};
  t.rows.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) t.rows.push_back({x[i], y[i]});
  return t;
}

}  // namespace sphdiff
