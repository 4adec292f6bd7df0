#include "manyiv/csv.hpp"

#include <fstream>
#include <sstream>

#include "manyiv/errors.hpp"

namespace manyiv::csv {

Row parse_line(const std::string& line) {
  Row out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::vector<Row> read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path.string());
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(parse_line(line));
  }
  return rows;
}

static bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string format_row(const Row& row) {
  std::ostringstream os;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    if (needs_quoting(row[i])) {
      os << '"';
      for (char c : row[i]) {
        if (c == '"') os << "\"\"";
        else os << c;
      }
      os << '"';
    } else {
      os << row[i];
    }
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw data_error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void write_file(const std::filesystem::path& path,
                const std::vector<Row>& rows) {
  std::ostringstream os;
  for (const auto& row : rows) os << format_row(row) << "\n";
  write_text(path, os.str());
}

}  // namespace manyiv::csv
