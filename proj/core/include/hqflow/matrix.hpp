#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hqflow {

/// Dense square matrix, row-major. Used for eigenvector bases.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  static Matrix identity(int n);

  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] double operator()(int i, int j) const noexcept { return a_[idx(i, j)]; }
  [[nodiscard]] double& operator()(int i, int j) noexcept { return a_[idx(i, j)]; }

  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] Matrix operator*(const Matrix& rhs) const;
  /// max_i sum_j |a_ij|
  [[nodiscard]] double norm_inf() const noexcept;

 private:
  [[nodiscard]] std::size_t idx(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  int n_ = 0;
  std::vector<double> a_;
};

/// Real symmetric n x n matrix. Writes through set() keep a_ij == a_ji
/// exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);
  /// Throws ArgumentError if rows are ragged or not exactly symmetric.
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static SymMatrix from_dense(const Matrix& m);

  [[nodiscard]] int dim() const noexcept { return n_; }
  [[nodiscard]] double operator()(int i, int j) const noexcept { return a_[idx(i, j)]; }
  void set(int i, int j, double v) noexcept {
    a_[idx(i, j)] = v;
    a_[idx(j, i)] = v;
  }
  void add(int i, int j, double v) noexcept {
    a_[idx(i, j)] += v;
    if (i != j) a_[idx(j, i)] += v;
  }

  [[nodiscard]] SymMatrix operator+(const SymMatrix& rhs) const;
  [[nodiscard]] SymMatrix operator-(const SymMatrix& rhs) const;
  [[nodiscard]] SymMatrix operator*(double s) const;
  [[nodiscard]] double norm_inf() const noexcept;
  [[nodiscard]] double norm_frobenius() const noexcept;
  [[nodiscard]] double trace() const noexcept;
  [[nodiscard]] bool all_finite() const noexcept;
  [[nodiscard]] Matrix dense() const;

 private:
  [[nodiscard]] std::size_t idx(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  int n_ = 0;
  std::vector<double> a_;
};

}  // namespace hqflow
