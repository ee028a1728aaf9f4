#include "cholband/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cholband {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& tok, long line) {
  const char* s = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  while (end && *end == ' ') ++end;
  if (end == s || (end && *end != '\0')) throw CsvError("invalid number '" + tok + "'", line);
  if (!std::isfinite(v)) throw CsvError("non-finite value '" + tok + "'", line);
  return v;
}

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path.string() + "'", 0);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && skip_header) continue;
    if (line.empty()) continue;
    const auto toks = split_line(line);
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& t : toks) row.push_back(parse_double(t, lineno));
    if (rows.empty())
      width = row.size();
    else if (row.size() != width)
      throw CsvError("row length mismatch: expected " + std::to_string(width) + ", got " +
                         std::to_string(row.size()),
                     lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("empty input '" + path.string() + "'", lineno);
  return rows;
}

}  // namespace

SampleMatrix read_sample_csv(const std::filesystem::path& path, bool skip_header) {
  const auto rows = read_rows(path, skip_header);
  const int n = int(rows.size()), p = int(rows.front().size());
  SampleMatrix X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rows[std::size_t(i)][std::size_t(j)];
  return X;
}

LabeledData read_labeled_csv(const std::filesystem::path& path, bool skip_header) {
  const auto rows = read_rows(path, skip_header);
  const int n = int(rows.size());
  const int w = int(rows.front().size());
  if (w < 2) throw CsvError("labeled data needs at least one feature column plus a label", 1);
  LabeledData out{SampleMatrix(n, w - 1), std::vector<int>(std::size_t(n))};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < w; ++j) out.X(i, j) = rows[std::size_t(i)][std::size_t(j)];
    const double lab = rows[std::size_t(i)].back();
    const int li = int(std::lround(lab));
    if (std::abs(lab - li) > 1e-9) throw CsvError("non-integer class label", i + 1);
    out.labels[std::size_t(i)] = li;
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const double* data, int rows, int cols) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out << ',';
      out << format_double(data[std::size_t(i) * cols + j]);
    }
    out << '\n';
  }
}

void write_sample_csv(const std::filesystem::path& path, const SampleMatrix& X) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (int i = 0; i < X.rows(); ++i) {
    auto row = X.row(i);
    for (int j = 0; j < X.cols(); ++j) {
      if (j) out << ',';
      out << format_double(row[std::size_t(j)]);
    }
    out << '\n';
  }
}

void write_lower_triangular_csv(const std::filesystem::path& path, const LowerTriangular& L) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  const int p = L.dim();
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) {
      if (c) out << ',';
      out << format_double(L(r, c));
    }
    out << '\n';
  }
}

void write_sym_csv(const std::filesystem::path& path, const SymMatrix& A) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  const int p = A.dim();
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) {
      if (c) out << ',';
      out << format_double(A(r, c));
    }
    out << '\n';
  }
}

}  // namespace cholband
