#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nsac/rational.hpp"

namespace nsac {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void append_row(const std::vector<Rational>& row) {
    if (rows_ == 0 && cols_ == 0) cols_ = row.size();
    if (row.size() != cols_) throw std::invalid_argument("row length mismatch");
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
  }

  RationalMatrix transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

// Rank by fraction-free (Bareiss) elimination on the integer-scaled rows.
inline std::size_t matrix_rank(const RationalMatrix& m) {
  const std::size_t R = m.rows(), C = m.cols();
  std::vector<std::vector<mpz_class>> a(R, std::vector<mpz_class>(C));
  for (std::size_t r = 0; r < R; ++r) {
    mpz_class l = 1;
    for (std::size_t c = 0; c < C; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).raw().get_den_mpz_t());
    for (std::size_t c = 0; c < C; ++c) a[r][c] = m(r, c).raw().get_num() * (l / m(r, c).raw().get_den());
  }
  std::size_t rank = 0;
  mpz_class prev = 1;
  for (std::size_t col = 0; col < C && rank < R; ++col) {
    std::size_t piv = rank;
    while (piv < R && a[piv][col] == 0) ++piv;
    if (piv == R) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = rank + 1; r < R; ++r) {
      for (std::size_t c = col + 1; c < C; ++c) {
        a[r][c] = a[rank][col] * a[r][c] - a[r][col] * a[rank][c];
        mpz_divexact(a[r][c].get_mpz_t(), a[r][c].get_mpz_t(), prev.get_mpz_t());
      }
      a[r][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

// Solves the square system A x = b; empty when A is singular.
inline std::optional<std::vector<Rational>> solve_square(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_square needs a square system");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a(piv, col).is_zero()) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
      std::swap(b[piv], b[col]);
    }
    Rational inv = Rational(1) / a(col, col);
    for (std::size_t c = col; c < n; ++c) a(col, c) *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      Rational f = a(r, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  return b;
}

// Row-echelon basis grown one row at a time; reports whether a row was new.
class IncrementalEchelon {
 public:
  explicit IncrementalEchelon(std::size_t cols) : cols_(cols) {}

  std::size_t rank() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }

  bool insert(std::vector<Rational> row) {
    if (row.size() != cols_) throw std::invalid_argument("row length mismatch");
    reduce(row);
    std::size_t lead = 0;
    while (lead < cols_ && row[lead].is_zero()) ++lead;
    if (lead == cols_) return false;
    Rational inv = Rational(1) / row[lead];
    for (auto& x : row) x *= inv;
    rows_.push_back(std::move(row));
    leads_.push_back(lead);
    return true;
  }

  bool contains(std::vector<Rational> row) const {
    reduce(row);
    for (const auto& x : row)
      if (!x.is_zero()) return false;
    return true;
  }

 private:
  void reduce(std::vector<Rational>& row) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Rational f = row[leads_[k]];
      if (f.is_zero()) continue;
      for (std::size_t c = leads_[k]; c < cols_; ++c)
        if (!rows_[k][c].is_zero()) row[c] -= f * rows_[k][c];
    }
  }

  std::size_t cols_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<std::size_t> leads_;
};

}  // namespace nsac
