#pragma once

#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <utility>
#include <vector>

#include "cuspidal/rational.hpp"

namespace cuspidal {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an inverse is requested from a singular matrix; carries the
/// dimension of the nullspace of the offending matrix.
struct SingularMatrixError : std::runtime_error {
  std::size_t nullity;
  explicit SingularMatrixError(std::size_t k)
      : std::runtime_error("singular matrix (nullity " + std::to_string(k) + ")"),
        nullity(k) {}
};

struct SingleEigenvalueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonInvertibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense matrix over exact rationals. Values are immutable in spirit: every
/// operation returns a fresh matrix, and shared read access is safe.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<Scalar>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_)
        throw DimensionError("ragged row list in matrix literal");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  /// Single-entry elementary matrix E_{ij}.
  static Matrix unit(std::size_t rows, std::size_t cols, std::size_t i,
                     std::size_t j) {
    Matrix m(rows, cols);
    m(i, j) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Scalar& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  const Scalar& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  bool is_square() const { return rows_ == cols_; }

  bool is_zero() const {
    for (const auto& e : entries_)
      if (e != 0) return false;
    return true;
  }

  /// True iff the matrix is lambda*I for some scalar lambda.
  bool is_scalar_multiple_of_identity() const {
    if (!is_square() || rows_ == 0) return false;
    const Scalar& lambda = (*this)(0, 0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != (i == j ? lambda : Scalar(0))) return false;
    return true;
  }

  Matrix operator+(const Matrix& o) const {
    require_same_shape(o);
    Matrix r(rows_, cols_);
    for (std::size_t k = 0; k < entries_.size(); ++k)
      r.entries_[k] = entries_[k] + o.entries_[k];
    return r;
  }

  Matrix operator-(const Matrix& o) const {
    require_same_shape(o);
    Matrix r(rows_, cols_);
    for (std::size_t k = 0; k < entries_.size(); ++k)
      r.entries_[k] = entries_[k] - o.entries_[k];
    return r;
  }

  Matrix operator-() const {
    Matrix r(rows_, cols_);
    for (std::size_t k = 0; k < entries_.size(); ++k)
      r.entries_[k] = -entries_[k];
    return r;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_)
      throw DimensionError("matrix product shape mismatch: " + shape_string() +
                           " * " + o.shape_string());
    Matrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Scalar& aik = (*this)(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) {
          const Scalar& bkj = o(k, j);
          if (bkj != 0) r(i, j) += aik * bkj;
        }
      }
    return r;
  }

  Matrix operator*(const Scalar& c) const {
    Matrix r(rows_, cols_);
    for (std::size_t k = 0; k < entries_.size(); ++k)
      r.entries_[k] = entries_[k] * c;
    return r;
  }

  friend Matrix operator*(const Scalar& c, const Matrix& m) { return m * c; }

  /// this + c*I.
  Matrix shifted(const Scalar& c) const {
    require_square();
    Matrix r(*this);
    for (std::size_t i = 0; i < rows_; ++i) r(i, i) += c;
    return r;
  }

  Matrix pow(std::size_t k) const {
    require_square();
    Matrix acc = identity(rows_);
    for (std::size_t i = 0; i < k; ++i) acc = acc * (*this);
    return acc;
  }

  Scalar trace() const {
    require_square();
    Scalar t = 0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  Matrix transpose() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  /// Row-reduced echelon form; returns the pivot columns.
  std::vector<std::size_t> rref_in_place() {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
      std::size_t p = row;
      while (p < rows_ && (*this)(p, col) == 0) ++p;
      if (p == rows_) continue;
      swap_rows(p, row);
      const Scalar inv = Scalar(1) / (*this)(row, col);
      for (std::size_t j = col; j < cols_; ++j) (*this)(row, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == row) continue;
        const Scalar f = (*this)(i, col);
        if (f == 0) continue;
        for (std::size_t j = col; j < cols_; ++j)
          (*this)(i, j) -= f * (*this)(row, j);
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  std::size_t rank() const {
    Matrix tmp(*this);
    return tmp.rref_in_place().size();
  }

  bool is_invertible() const { return is_square() && rank() == rows_; }

  Matrix inverse() const {
    require_square();
    const std::size_t n = rows_;
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) aug(i, j) = (*this)(i, j);
      aug(i, n + i) = 1;
    }
    auto pivots = aug.rref_in_place();
    std::size_t r = 0;
    for (auto p : pivots)
      if (p < n) ++r;
    if (r < n) throw SingularMatrixError(n - r);
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
  }

  /// Exact basis of the kernel, one basis vector per column. A matrix with
  /// zero columns means the kernel is trivial.
  Matrix nullspace() const {
    Matrix red(*this);
    auto pivots = red.rref_in_place();
    std::vector<bool> is_pivot(cols_, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < cols_; ++j)
      if (!is_pivot[j]) free_cols.push_back(j);
    Matrix basis(cols_, free_cols.size());
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      const std::size_t fc = free_cols[k];
      basis(fc, k) = 1;
      for (std::size_t pi = 0; pi < pivots.size(); ++pi)
        basis(pivots[pi], k) = -red(pi, fc);
    }
    return basis;
  }

  /// Monic characteristic polynomial, coefficients from constant term up
  /// (Faddeev-LeVerrier; exact over the rationals).
  std::vector<Scalar> charpoly() const {
    require_square();
    const std::size_t n = rows_;
    std::vector<Scalar> coeff(n + 1);
    coeff[n] = 1;
    Matrix m = identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
      m = (*this) * m;
      const Scalar c = -m.trace() / Scalar(static_cast<long>(k));
      coeff[n - k] = c;
      m = m.shifted(c);
    }
    return coeff;
  }

  /// Evaluates sum coeff[k] * this^k.
  Matrix eval_poly(const std::vector<Scalar>& coeff) const {
    require_square();
    Matrix acc(rows_, cols_);
    Matrix power = identity(rows_);
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      if (coeff[k] != 0) acc = acc + power * coeff[k];
      if (k + 1 < coeff.size()) power = power * (*this);
    }
    return acc;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      out << (i ? "; " : "");
      for (std::size_t j = 0; j < cols_; ++j)
        out << (j ? " " : "") << to_string((*this)(i, j));
    }
    out << "]";
    return out.str();
  }

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  void require_square() const {
    if (!is_square()) throw DimensionError("expected square matrix, got " + shape_string());
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError("shape mismatch: " + shape_string() + " vs " +
                           o.shape_string());
  }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < cols_; ++k)
      std::swap((*this)(i, k), (*this)(j, k));
  }

  std::size_t rows_, cols_;
  std::vector<Scalar> entries_;
};

inline Matrix mat_mul(const Matrix& a, const Matrix& b) { return a * b; }

inline bool is_nilpotent(const Matrix& a) {
  a.require_square();
  return a.pow(a.rows()).is_zero();
}

/// True iff mu is the only eigenvalue of a, i.e. (a - mu*I)^dim = 0.
inline bool has_single_eigenvalue(const Matrix& a, const Scalar& mu) {
  a.require_square();
  return is_nilpotent(a.shifted(-mu));
}

/// Square root of a matrix whose only eigenvalue is mu_root^2, with the
/// branch fixed so the result has single eigenvalue mu_root. The root is a
/// polynomial in the input: writing a = mu_root^2 (I + N) with N nilpotent,
/// the binomial series for sqrt(I + N) terminates.
inline Matrix sqrt_single_eigenvalue(const Matrix& a, const Scalar& mu_root) {
  a.require_square();
  if (mu_root == 0)
    throw NonInvertibleError("square root through eigenvalue zero");
  const Scalar mu2 = mu_root * mu_root;
  if (!has_single_eigenvalue(a, mu2))
    throw SingleEigenvalueError("matrix does not have single eigenvalue " +
                                to_string(mu2));
  const std::size_t n = a.rows();
  const Matrix nil = (a * (Scalar(1) / mu2)).shifted(-1);
  Matrix sum = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  Scalar binom = 1;  // binomial(1/2, k)
  for (std::size_t k = 1; k < n; ++k) {
    binom *= (frac(1, 2) - Scalar(static_cast<long>(k) - 1)) /
             Scalar(static_cast<long>(k));
    power = power * nil;
    if (power.is_zero()) break;
    sum = sum + power * binom;
  }
  return sum * mu_root;
}

}  // namespace cuspidal
