#include "fedhgn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fedhgn/error.hpp"

namespace fedhgn {

namespace {

void require(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(op) + " on " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " and " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::DimensionMismatch, "matrix value count " + std::to_string(data_.size()) +
                                                  " != " + std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul", a, b);
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    auto a_row = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a_row[k];
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix matmul_transpose_a(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_transpose_a", a, b);
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto a_row = a.row(k);
    auto b_row = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a_row[i];
      if (aki == 0.0) continue;
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
    }
  }
  return out;
}

Matrix matmul_transpose_b(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_transpose_b", a, b);
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto a_row = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto b_row = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a_row[k] * b_row[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "hadamard", a, b);
  Matrix out = a;
  auto ov = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= bv[i];
  return out;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m.rows()) {
      throw Error(ErrorKind::DimensionMismatch, "gather_rows index " + std::to_string(rows[i]) +
                                                    " out of range " + std::to_string(m.rows()));
    }
    std::copy_n(m.row(rows[i]).begin(), m.cols(), out.row(i).begin());
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) worst = std::max(worst, std::abs(av[i] - bv[i]));
  return worst;
}

}  // namespace fedhgn
