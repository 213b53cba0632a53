#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nsac/rational.hpp"

namespace nsac {

inline constexpr std::size_t kMaxDimension = 6;

// Exponent vector packed into one word, 8 bits per variable. Variable 0 occupies
// the most significant used byte, so integer order on the key is lexicographic.
class Monomial {
 public:
  constexpr Monomial() = default;
  constexpr explicit Monomial(std::uint64_t key) : key_(key) {}

  static constexpr unsigned shift(std::size_t var) {
    return static_cast<unsigned>(8 * (kMaxDimension - 1 - var));
  }
  static Monomial unit(std::size_t var) { return Monomial(std::uint64_t{1} << shift(var)); }

  unsigned exponent(std::size_t var) const { return (key_ >> shift(var)) & 0xffu; }
  unsigned degree() const {
    unsigned d = 0;
    for (std::size_t v = 0; v < kMaxDimension; ++v) d += exponent(v);
    return d;
  }
  std::uint64_t key() const { return key_; }

  friend Monomial operator*(Monomial a, Monomial b) { return Monomial(a.key_ + b.key_); }
  friend auto operator<=>(Monomial, Monomial) = default;

 private:
  std::uint64_t key_ = 0;
};

struct Term {
  Monomial mono;
  Rational coeff;
};

// Multivariate polynomial over Q in a fixed number of coordinates x0..x{N-1}.
// Terms are sorted by monomial and never carry zero coefficients, so two
// polynomials are equal exactly when their term lists are equal.
class Polynomial {
 public:
  explicit Polynomial(std::size_t dim = 1) : dim_(dim) { check_dim(dim); }

  static Polynomial constant(std::size_t dim, const Rational& c) {
    Polynomial p(dim);
    if (!c.is_zero()) p.terms_.push_back({Monomial{}, c});
    return p;
  }
  static Polynomial variable(std::size_t dim, std::size_t var) {
    if (var >= dim) throw std::out_of_range("variable index out of range");
    Polynomial p(dim);
    p.terms_.push_back({Monomial::unit(var), Rational(1)});
    return p;
  }
  // Builds from arbitrary (possibly repeated, unsorted) terms.
  static Polynomial from_terms(std::size_t dim, std::vector<Term> terms) {
    Polynomial p(dim);
    p.terms_ = std::move(terms);
    p.normalize();
    // Product buffers collapse a lot when like terms merge; don't keep their capacity.
    if (p.terms_.capacity() > 2 * p.terms_.size() + 8) p.terms_.shrink_to_fit();
    return p;
  }

  std::size_t dimension() const { return dim_; }
  std::span<const Term> terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, t.mono.degree());
    return d;
  }

  Rational coefficient(Monomial m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, Monomial k) { return t.mono < k; });
    return (it != terms_.end() && it->mono == m) ? it->coeff : Rational(0);
  }

  Rational evaluate(std::span<const Rational> point) const {
    if (point.size() != dim_) throw std::invalid_argument("evaluation point has wrong dimension");
    Rational sum;
    for (const auto& t : terms_) {
      Rational v = t.coeff;
      for (std::size_t k = 0; k < dim_; ++k)
        for (unsigned e = t.mono.exponent(k); e > 0; --e) v *= point[k];
      sum += v;
    }
    return sum;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Highest monomial first reads more naturally.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      Rational c = it->coeff;
      bool neg = c.sign() < 0;
      if (neg) c = -c;
      if (first) {
        if (neg) os << "-";
      } else {
        os << (neg ? " - " : " + ");
      }
      first = false;
      bool unit = (c == Rational(1));
      bool constant = it->mono.degree() == 0;
      if (!unit || constant) os << c.to_string();
      bool need_star = !unit || constant;
      for (std::size_t k = 0; k < dim_; ++k) {
        unsigned e = it->mono.exponent(k);
        if (e == 0) continue;
        if (need_star) os << "*";
        os << "x" << k;
        if (e > 1) os << "^" << e;
        need_star = true;
      }
    }
    return os.str();
  }

  Polynomial& operator+=(const Polynomial& o) { return *this = merge(*this, o, false); }
  Polynomial& operator-=(const Polynomial& o) { return *this = merge(*this, o, true); }
  Polynomial& operator*=(const Rational& c) {
    if (c.is_zero()) {
      terms_.clear();
    } else {
      for (auto& t : terms_) t.coeff *= c;
    }
    return *this;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) { return merge(a, b, false); }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return merge(a, b, true); }
  friend Polynomial operator-(Polynomial a) {
    for (auto& t : a.terms_) t.coeff = -t.coeff;
    return a;
  }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    same_dim(a, b);
    if (a.is_zero() || b.is_zero()) return Polynomial(a.dim_);
    check_product_degree(a, b);
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) out.push_back({x.mono * y.mono, x.coeff * y.coeff});
    return from_terms(a.dim_, std::move(out));
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.dim_ != b.dim_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coeff != b.terms_[i].coeff)
        return false;
    return true;
  }

  // Largest absolute coefficient, used when reporting a nonzero residual.
  double max_abs_coefficient() const {
    double m = 0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff.to_double()));
    return m;
  }

  static void check_product_degree(const Polynomial& a, const Polynomial& b) {
    if (a.degree() + b.degree() > 255)
      throw std::overflow_error("polynomial degree exceeds 255 in product");
  }

 private:
  friend class PolynomialAccumulator;

  static void check_dim(std::size_t dim) {
    if (dim == 0 || dim > kMaxDimension)
      throw std::invalid_argument("polynomial dimension must be in 1.." +
                                  std::to_string(kMaxDimension));
  }
  static void same_dim(const Polynomial& a, const Polynomial& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("polynomial dimension mismatch");
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.mono < y.mono; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < terms_.size();) {
      Monomial m = terms_[r].mono;
      Rational c = std::move(terms_[r].coeff);
      for (++r; r < terms_.size() && terms_[r].mono == m; ++r) c += terms_[r].coeff;
      if (!c.is_zero()) terms_[w++] = {m, std::move(c)};
    }
    terms_.resize(w);
  }

  static Polynomial merge(const Polynomial& a, const Polynomial& b, bool subtract) {
    same_dim(a, b);
    Polynomial out(a.dim_);
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].mono < b.terms_[j].mono)) {
        out.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[j].mono < a.terms_[i].mono) {
        const Term& t = b.terms_[j++];
        out.terms_.push_back({t.mono, subtract ? -t.coeff : t.coeff});
      } else {
        Rational c = subtract ? a.terms_[i].coeff - b.terms_[j].coeff
                              : a.terms_[i].coeff + b.terms_[j].coeff;
        if (!c.is_zero()) out.terms_.push_back({a.terms_[i].mono, std::move(c)});
        ++i;
        ++j;
      }
    }
    return out;
  }

  std::size_t dim_;
  std::vector<Term> terms_;
};

inline bool is_zero(const Polynomial& p) { return p.is_zero(); }

inline Polynomial partial(const Polynomial& p, std::size_t var) {
  if (var >= p.dimension()) throw std::out_of_range("derivative variable out of range");
  std::vector<Term> out;
  Monomial step = Monomial::unit(var);
  for (const auto& t : p.terms()) {
    unsigned e = t.mono.exponent(var);
    if (e == 0) continue;
    out.push_back({Monomial(t.mono.key() - step.key()), t.coeff * Rational(static_cast<long>(e))});
  }
  // Lowering the same exponent keeps the order, but from_terms is cheap enough.
  return Polynomial::from_terms(p.dimension(), std::move(out));
}

// Sums many scaled products without normalizing after every step.
class PolynomialAccumulator {
 public:
  explicit PolynomialAccumulator(std::size_t dim) : dim_(dim) {}

  void add(const Polynomial& p, const Rational& scale = Rational(1)) {
    if (scale.is_zero()) return;
    for (const auto& t : p.terms()) buf_.push_back({t.mono, t.coeff * scale});
  }
  void add_product(const Polynomial& a, const Polynomial& b, const Rational& scale = Rational(1)) {
    if (a.is_zero() || b.is_zero() || scale.is_zero()) return;
    Polynomial::check_product_degree(a, b);
    for (const auto& x : a.terms()) {
      Rational xs = x.coeff * scale;
      for (const auto& y : b.terms()) buf_.push_back({x.mono * y.mono, xs * y.coeff});
    }
  }
  Polynomial finish() {
    Polynomial p = Polynomial::from_terms(dim_, std::move(buf_));
    buf_.clear();
    return p;
  }

 private:
  std::size_t dim_;
  std::vector<Term> buf_;
};

}  // namespace nsac
