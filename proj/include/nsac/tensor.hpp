#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsac/polynomial.hpp"

namespace nsac {

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Polynomial> {
  static Polynomial zero(std::size_t dim) { return Polynomial(dim); }
  static Polynomial constant(std::size_t dim, const Rational& c) {
    return Polynomial::constant(dim, c);
  }
};

template <>
struct scalar_traits<Rational> {
  static Rational zero(std::size_t) { return Rational(0); }
  static Rational constant(std::size_t, const Rational& c) { return c; }
};

// Anything that behaves like a ring of smooth functions on coordinates.
template <class S>
concept FieldScalar = requires(const S& a, const S& b, const Rational& c, std::size_t k) {
  { a + b } -> std::convertible_to<S>;
  { a - b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { a * c } -> std::convertible_to<S>;
  { -a } -> std::convertible_to<S>;
  { partial(a, k) } -> std::convertible_to<S>;
  { is_zero(a) } -> std::convertible_to<bool>;
  { scalar_traits<S>::zero(k) } -> std::convertible_to<S>;
};

namespace detail {
// Unqualified call so argument-dependent lookup sees overloads declared later.
template <class S>
bool element_is_zero(const S& s) {
  return is_zero(s);
}
}  // namespace detail

struct Valence {
  std::size_t upper = 0;
  std::size_t lower = 0;
  std::size_t rank() const { return upper + lower; }
  friend bool operator==(const Valence&, const Valence&) = default;
};

// Dense tensor of valence (upper, lower) over an N-dimensional index range.
// Components are addressed with the upper indices first, then the lower ones.
template <FieldScalar S>
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t dim, Valence v)
      : dim_(dim), valence_(v), entries_(count(dim, v.rank()), scalar_traits<S>::zero(dim)) {
    if (dim == 0) throw std::invalid_argument("tensor dimension must be positive");
  }

  std::size_t dimension() const { return dim_; }
  Valence valence() const { return valence_; }
  std::size_t size() const { return entries_.size(); }

  S& operator[](std::size_t flat) { return entries_[flat]; }
  const S& operator[](std::size_t flat) const { return entries_[flat]; }

  template <std::integral... I>
  S& operator()(I... idx) {
    return entries_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <std::integral... I>
  const S& operator()(I... idx) const {
    return entries_[offset({static_cast<std::size_t>(idx)...})];
  }
  S& at(std::span<const std::size_t> idx) { return entries_[offset(idx)]; }
  const S& at(std::span<const std::size_t> idx) const { return entries_[offset(idx)]; }

  std::size_t offset(std::initializer_list<std::size_t> idx) const {
    return offset(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  std::size_t offset(std::span<const std::size_t> idx) const {
    if (idx.size() != valence_.rank()) throw std::invalid_argument("wrong number of indices");
    std::size_t off = 0;
    for (std::size_t k : idx) {
      if (k >= dim_) throw std::out_of_range("tensor index out of range");
      off = off * dim_ + k;
    }
    return off;
  }
  // Inverse of offset().
  std::vector<std::size_t> indices(std::size_t flat) const {
    std::vector<std::size_t> idx(valence_.rank());
    for (std::size_t p = idx.size(); p-- > 0;) {
      idx[p] = flat % dim_;
      flat /= dim_;
    }
    return idx;
  }

  bool is_zero() const {
    for (const auto& e : entries_)
      if (!detail::element_is_zero(e)) return false;
    return true;
  }

  template <class F>
  auto map(F&& f) const {
    using R = std::decay_t<decltype(f(entries_[0]))>;
    Tensor<R> out(dim_, valence_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out[i] = f(entries_[i]);
    return out;
  }

  Tensor& operator+=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = entries_[i] + o.entries_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] = entries_[i] - o.entries_[i];
    return *this;
  }
  Tensor& operator*=(const Rational& c) {
    for (auto& e : entries_) e = e * c;
    return *this;
  }
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, const Rational& c) { return a *= c; }
  friend Tensor operator*(const Rational& c, Tensor a) { return a *= c; }
  friend Tensor operator-(Tensor a) {
    for (auto& e : a.entries_) e = -e;
    return a;
  }
  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dim_ == b.dim_ && a.valence_ == b.valence_ && a.entries_ == b.entries_;
  }

 private:
  static std::size_t count(std::size_t dim, std::size_t rank) {
    std::size_t n = 1;
    for (std::size_t r = 0; r < rank; ++r) n *= dim;
    return n;
  }
  void check_same(const Tensor& o) const {
    if (dim_ != o.dim_ || !(valence_ == o.valence_))
      throw std::invalid_argument("tensor shape mismatch");
  }

  std::size_t dim_ = 0;
  Valence valence_{};
  std::vector<S> entries_;
};

using TensorField = Tensor<Polynomial>;

// Sums scaled products of scalars; the polynomial case defers normalization.
template <FieldScalar S>
class Accumulator {
 public:
  explicit Accumulator(std::size_t dim) : sum_(scalar_traits<S>::zero(dim)) {}
  void add(const S& a, const Rational& scale = Rational(1)) { sum_ = sum_ + a * scale; }
  void add_product(const S& a, const S& b, const Rational& scale = Rational(1)) {
    if (is_zero(a) || is_zero(b)) return;
    sum_ = sum_ + a * b * scale;
  }
  S finish() { return std::move(sum_); }

 private:
  S sum_;
};

template <>
class Accumulator<Polynomial> {
 public:
  explicit Accumulator(std::size_t dim) : acc_(dim) {}
  void add(const Polynomial& a, const Rational& scale = Rational(1)) { acc_.add(a, scale); }
  void add_product(const Polynomial& a, const Polynomial& b, const Rational& scale = Rational(1)) {
    acc_.add_product(a, b, scale);
  }
  Polynomial finish() { return acc_.finish(); }

 private:
  PolynomialAccumulator acc_;
};

// Calls f(indices) for every multi-index of the given rank, in storage order.
inline void for_each_index(std::size_t dim, std::size_t rank,
                           const std::function<void(std::span<const std::size_t>)>& f) {
  std::vector<std::size_t> idx(rank, 0);
  while (true) {
    f(idx);
    std::size_t p = rank;
    while (p > 0) {
      if (++idx[p - 1] < dim) break;
      idx[p - 1] = 0;
      --p;
    }
    if (p == 0) return;
  }
}

// Appends a lower index k holding the partial derivative along coordinate k.
template <FieldScalar S>
Tensor<S> gradient(const Tensor<S>& t) {
  const std::size_t n = t.dimension();
  Tensor<S> out(n, {t.valence().upper, t.valence().lower + 1});
  for (std::size_t f = 0; f < t.size(); ++f)
    for (std::size_t k = 0; k < n; ++k) out[f * n + k] = partial(t[f], k);
  return out;
}

// Contracts upper slot `up` with lower slot `low` (positions within each group).
template <FieldScalar S>
Tensor<S> contract(const Tensor<S>& t, std::size_t up, std::size_t low) {
  const Valence v = t.valence();
  if (up >= v.upper || low >= v.lower) throw std::out_of_range("contraction slot out of range");
  const std::size_t n = t.dimension();
  Tensor<S> out(n, {v.upper - 1, v.lower - 1});
  std::vector<std::size_t> full(v.rank());
  const std::size_t lo_pos = v.upper + low;
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto idx = out.indices(f);
    for (std::size_t p = 0, q = 0; p < full.size(); ++p) {
      if (p == up || p == lo_pos) continue;
      full[p] = idx[q++];
    }
    S sum = scalar_traits<S>::zero(n);
    for (std::size_t a = 0; a < n; ++a) {
      full[up] = a;
      full[lo_pos] = a;
      sum = sum + t.at(full);
    }
    out[f] = std::move(sum);
  }
  return out;
}

// Tensor product; result indices are (a upper, b upper, a lower, b lower).
template <FieldScalar S>
Tensor<S> outer(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("tensor dimension mismatch");
  const Valence va = a.valence(), vb = b.valence();
  const std::size_t n = a.dimension();
  Tensor<S> out(n, {va.upper + vb.upper, va.lower + vb.lower});
  std::vector<std::size_t> ia(va.rank()), ib(vb.rank());
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto idx = out.indices(f);
    std::size_t p = 0;
    for (std::size_t k = 0; k < va.upper; ++k) ia[k] = idx[p++];
    for (std::size_t k = 0; k < vb.upper; ++k) ib[k] = idx[p++];
    for (std::size_t k = 0; k < va.lower; ++k) ia[va.upper + k] = idx[p++];
    for (std::size_t k = 0; k < vb.lower; ++k) ib[vb.upper + k] = idx[p++];
    out[f] = a.at(ia) * b.at(ib);
  }
  return out;
}

// Exchanges two lower slots.
template <FieldScalar S>
Tensor<S> swap_lower(const Tensor<S>& t, std::size_t p, std::size_t q) {
  const Valence v = t.valence();
  if (p >= v.lower || q >= v.lower) throw std::out_of_range("lower slot out of range");
  Tensor<S> out(t.dimension(), v);
  for (std::size_t f = 0; f < t.size(); ++f) {
    auto idx = t.indices(f);
    std::swap(idx[v.upper + p], idx[v.upper + q]);
    out.at(idx) = t[f];
  }
  return out;
}

inline Tensor<Rational> evaluate(const TensorField& t, std::span<const Rational> point) {
  return t.map([&](const Polynomial& p) { return p.evaluate(point); });
}

inline TensorField to_constant_field(const Tensor<Rational>& t) {
  const std::size_t n = t.dimension();
  return t.map([n](const Rational& r) { return Polynomial::constant(n, r); });
}

// Largest absolute coefficient over all entries; zero iff the tensor vanishes.
inline double max_abs_coefficient(const TensorField& t) {
  double m = 0;
  for (std::size_t f = 0; f < t.size(); ++f) m = std::max(m, t[f].max_abs_coefficient());
  return m;
}

}  // namespace nsac
