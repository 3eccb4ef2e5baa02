#include "phaseret/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace phaseret {

namespace {

// Full-precision round trip for doubles ("%.17g"); parsed values are bitwise
// identical to the written ones.
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvReader {
  std::ifstream in;
  std::string path;
  std::string line;
  long line_no = 0;

  explicit CsvReader(const std::filesystem::path& p) : in(p), path(p.string()) {
    if (!in) {
      throw ConfigError(path + ": cannot open file");
    }
  }

  bool next() {
    ++line_no;
    return static_cast<bool>(std::getline(in, line));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(path + ":" + std::to_string(line_no) + ": " + what);
  }
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_double(const CsvReader& r, const std::string& field, const char* name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    r.fail(std::string("bad ") + name + " value '" + field + "'");
  }
}

long parse_index(const CsvReader& r, const std::string& field, const char* name) {
  try {
    std::size_t used = 0;
    const long v = std::stol(field, &used);
    if (used != field.size() || v < 0) {
      throw std::invalid_argument("not a nonnegative integer");
    }
    return v;
  } catch (const std::exception&) {
    r.fail(std::string("bad ") + name + " value '" + field + "'");
  }
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& M) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError(path.string() + ": cannot open for writing");
  }
  out << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      out << i << ',' << j << ',' << fmt_double(M(i, j).real()) << ','
          << fmt_double(M(i, j).imag()) << '\n';
    }
  }
}

ComplexMatrix read_matrix_csv(const std::filesystem::path& path) {
  CsvReader r(path);
  if (!r.next() || split_csv(r.line) != std::vector<std::string>{"row", "col", "re", "im"}) {
    r.fail("expected header 'row,col,re,im'");
  }
  struct Entry {
    long row, col;
    Complex value;
  };
  std::vector<Entry> entries;
  long max_row = -1;
  long max_col = -1;
  while (r.next()) {
    if (r.line.empty()) {
      continue;
    }
    const auto f = split_csv(r.line);
    if (f.size() != 4) {
      r.fail("expected 4 fields, got " + std::to_string(f.size()));
    }
    Entry e;
    e.row = parse_index(r, f[0], "row");
    e.col = parse_index(r, f[1], "col");
    e.value = Complex(parse_double(r, f[2], "re"), parse_double(r, f[3], "im"));
    max_row = std::max(max_row, e.row);
    max_col = std::max(max_col, e.col);
    entries.push_back(e);
  }
  if (entries.empty()) {
    throw ConfigError(path.string() + ": matrix file has no entries");
  }
  ComplexMatrix M = ComplexMatrix::Zero(max_row + 1, max_col + 1);
  for (const auto& e : entries) {
    M(e.row, e.col) = e.value;
  }
  if (!is_finite(M)) {
    throw ConfigError(path.string() + ": non-finite matrix entries");
  }
  return M;
}

void write_vector_csv(const std::filesystem::path& path, const ComplexVector& v) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError(path.string() + ": cannot open for writing");
  }
  out << "index,re,im\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << i << ',' << fmt_double(v[i].real()) << ',' << fmt_double(v[i].imag()) << '\n';
  }
}

ComplexVector read_vector_csv(const std::filesystem::path& path) {
  CsvReader r(path);
  if (!r.next() || split_csv(r.line) != std::vector<std::string>{"index", "re", "im"}) {
    r.fail("expected header 'index,re,im'");
  }
  std::vector<Complex> values;
  long max_index = -1;
  std::vector<std::pair<long, Complex>> entries;
  while (r.next()) {
    if (r.line.empty()) {
      continue;
    }
    const auto f = split_csv(r.line);
    if (f.size() != 3) {
      r.fail("expected 3 fields, got " + std::to_string(f.size()));
    }
    const long idx = parse_index(r, f[0], "index");
    entries.emplace_back(idx,
                         Complex(parse_double(r, f[1], "re"), parse_double(r, f[2], "im")));
    max_index = std::max(max_index, idx);
  }
  if (entries.empty()) {
    throw ConfigError(path.string() + ": vector file has no entries");
  }
  ComplexVector v = ComplexVector::Zero(max_index + 1);
  std::vector<char> seen(static_cast<std::size_t>(max_index + 1), 0);
  for (const auto& [idx, val] : entries) {
    v[idx] = val;
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  for (long i = 0; i <= max_index; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) {
      throw ConfigError(path.string() + ": missing vector index " + std::to_string(i));
    }
  }
  if (!is_finite(v)) {
    throw ConfigError(path.string() + ": non-finite vector entries");
  }
  return v;
}

void write_coherence_json(const std::filesystem::path& path, const CoherenceStructure& s) {
  nlohmann::json j;
  j["groups"] = s.groups;
  std::ofstream out(path);
  if (!out) {
    throw ConfigError(path.string() + ": cannot open for writing");
  }
  out << j.dump(2) << '\n';
}

CoherenceStructure read_coherence_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open file");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.contains("groups") || !j["groups"].is_array()) {
    throw ConfigError(path.string() + ": expected a 'groups' array");
  }
  try {
    return CoherenceStructure::from_groups(j["groups"].get<std::vector<std::vector<int>>>());
  } catch (const std::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace phaseret
