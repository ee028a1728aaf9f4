#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cholband {

using Vector = std::vector<double>;

/// Lower-triangular p x p matrix with strictly positive diagonal,
/// stored as packed row-major rows: row r holds entries (r, 0..r).
class LowerTriangular {
 public:
  explicit LowerTriangular(int p) : p_(check_dim(p)), data_(std::size_t(p) * (p + 1) / 2, 0.0) {
    for (int r = 0; r < p_; ++r) data_[offset(r) + r] = 1.0;
  }

  LowerTriangular(int p, Vector packed) : p_(check_dim(p)), data_(std::move(packed)) {
    if (data_.size() != std::size_t(p_) * (p_ + 1) / 2)
      throw std::invalid_argument("LowerTriangular: packed size mismatch");
    validate();
  }

  static LowerTriangular identity(int p) { return LowerTriangular(p); }

  int dim() const { return p_; }

  double operator()(int r, int c) const {
    return c > r ? 0.0 : data_[offset(r) + c];
  }

  std::span<double> row(int r) { return {data_.data() + offset(r), std::size_t(r) + 1}; }
  std::span<const double> row(int r) const { return {data_.data() + offset(r), std::size_t(r) + 1}; }

  const Vector& packed() const { return data_; }

  void validate() const {
    for (int r = 0; r < p_; ++r) {
      for (int c = 0; c <= r; ++c)
        if (!std::isfinite(data_[offset(r) + c]))
          throw std::invalid_argument("LowerTriangular: non-finite entry in row " + std::to_string(r + 1));
      if (!(data_[offset(r) + r] > 0.0))
        throw std::invalid_argument("LowerTriangular: non-positive diagonal at row " + std::to_string(r + 1));
    }
  }

 private:
  static int check_dim(int p) {
    if (p < 1) throw std::invalid_argument("LowerTriangular: dimension must be positive");
    return p;
  }
  std::size_t offset(int r) const { return std::size_t(r) * (r + 1) / 2; }

  int p_;
  Vector data_;
};

/// Dense symmetric matrix; set() mirrors so symmetry is exact by storage.
class SymMatrix {
 public:
  explicit SymMatrix(int p) : p_(p), a_(std::size_t(p) * p, 0.0) {
    if (p < 1) throw std::invalid_argument("SymMatrix: dimension must be positive");
  }

  int dim() const { return p_; }

  double operator()(int i, int j) const { return a_[std::size_t(i) * p_ + j]; }

  void set(int i, int j, double v) {
    a_[std::size_t(i) * p_ + j] = v;
    a_[std::size_t(j) * p_ + i] = v;
  }

  const double* row_ptr(int i) const { return a_.data() + std::size_t(i) * p_; }

 private:
  int p_;
  Vector a_;
};

/// Dense n x p sample matrix (rows are observations), row-major.
class SampleMatrix {
 public:
  SampleMatrix(int n, int p) : n_(n), p_(p), a_(std::size_t(n) * p, 0.0) {
    if (n < 1 || p < 1) throw std::invalid_argument("SampleMatrix: dimensions must be positive");
  }

  SampleMatrix(int n, int p, Vector data) : n_(n), p_(p), a_(std::move(data)) {
    if (n < 1 || p < 1) throw std::invalid_argument("SampleMatrix: dimensions must be positive");
    if (a_.size() != std::size_t(n) * p) throw std::invalid_argument("SampleMatrix: data size mismatch");
    for (double v : a_)
      if (!std::isfinite(v)) throw std::invalid_argument("SampleMatrix: non-finite entry");
  }

  int rows() const { return n_; }
  int cols() const { return p_; }

  double operator()(int i, int j) const { return a_[std::size_t(i) * p_ + j]; }
  double& operator()(int i, int j) { return a_[std::size_t(i) * p_ + j]; }

  std::span<const double> row(int i) const { return {a_.data() + std::size_t(i) * p_, std::size_t(p_)}; }
  std::span<double> row(int i) { return {a_.data() + std::size_t(i) * p_, std::size_t(p_)}; }

 private:
  int n_, p_;
  Vector a_;
};

}  // namespace cholband
