#pragma once

#include <filesystem>
#include <string>

#include "cholband/types.hpp"

namespace cholband {

/// Malformed input: carries the 1-based line number for diagnostics.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& msg, long line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// 17-significant-digit decimal, enough for exact double round trips.
std::string format_double(double v);

struct LabeledData {
  SampleMatrix X{1, 1};
  std::vector<int> labels;
};

SampleMatrix read_sample_csv(const std::filesystem::path& path, bool skip_header = false);

/// Last column is an integer class label.
LabeledData read_labeled_csv(const std::filesystem::path& path, bool skip_header = false);

void write_matrix_csv(const std::filesystem::path& path, const double* data, int rows, int cols);
void write_sample_csv(const std::filesystem::path& path, const SampleMatrix& X);
void write_lower_triangular_csv(const std::filesystem::path& path, const LowerTriangular& L);
void write_sym_csv(const std::filesystem::path& path, const SymMatrix& A);

}  // namespace cholband
