#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nsac/rational.hpp"
#include "nsac/tensor.hpp"

namespace nsac {

// Dense polynomial in one variable t, coefficients in ascending powers.
class UPoly {
 public:
  UPoly() = default;
  UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }  // NOLINT
  static UPoly constant(const Rational& r) { return UPoly(std::vector<Rational>{r}); }
  static UPoly t() { return UPoly(std::vector<Rational>{Rational(0), Rational(1)}); }

  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Rational& lead() const { return c_.back(); }

  Rational evaluate(const Rational& x) const {
    Rational v;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
    return v;
  }
  double evaluate(double x) const {
    double v = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + it->to_double();
    return v;
  }

  UPoly derivative() const {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * Rational(static_cast<long>(k)));
    return UPoly(std::move(d));
  }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < a.c_.size(); ++k) r[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) r[k] += b.c_[k];
    return UPoly(std::move(r));
  }
  friend UPoly operator-(const UPoly& a) {
    std::vector<Rational> r = a.c_;
    for (auto& x : r) x = -x;
    return UPoly(std::move(r));
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(r));
  }
  friend UPoly operator*(const UPoly& a, const Rational& s) {
    std::vector<Rational> r = a.c_;
    for (auto& x : r) x *= s;
    return UPoly(std::move(r));
  }
  friend bool operator==(const UPoly&, const UPoly&) = default;

  // Quotient and remainder of a / b.
  static std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> rem = a.c_, quo(a.c_.size() >= b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 0);
    for (std::size_t k = quo.size(); k-- > 0;) {
      Rational f = rem[k + b.c_.size() - 1] / b.lead();
      quo[k] = f;
      for (std::size_t j = 0; j < b.c_.size(); ++j) rem[k + j] -= f * b.c_[j];
    }
    return {UPoly(std::move(quo)), UPoly(std::move(rem))};
  }

  UPoly monic() const {
    if (is_zero()) return *this;
    return *this * (Rational(1) / lead());
  }

  static UPoly gcd(UPoly a, UPoly b) {
    while (!b.is_zero()) {
      UPoly r = divmod(a, b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

  std::string to_string(const std::string& var = "t") const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = c_.size(); k-- > 0;) {
      if (c_[k].is_zero()) continue;
      Rational c = c_[k];
      bool neg = c.sign() < 0;
      if (neg) c = -c;
      os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
      first = false;
      bool unit = c == Rational(1);
      if (!unit || k == 0) os << c.to_string();
      if (k > 0) {
        if (!unit) os << "*";
        os << var;
        if (k > 1) os << "^" << k;
      }
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Rational> c_;
};

// Rational function of t in lowest terms with a monic denominator. As a field
// scalar it depends only on coordinate 0, so derivatives along others vanish.
class TimeFunction {
 public:
  TimeFunction() : den_(UPoly::constant(Rational(1))) {}
  TimeFunction(UPoly num) : num_(std::move(num)), den_(UPoly::constant(Rational(1))) {}  // NOLINT
  TimeFunction(const Rational& c) : TimeFunction(UPoly::constant(c)) {}                 // NOLINT
  TimeFunction(UPoly num, UPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
    normalize();
  }

  const UPoly& numerator() const { return num_; }
  const UPoly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  Rational evaluate(const Rational& t) const {
    Rational d = den_.evaluate(t);
    if (d.is_zero()) throw std::domain_error("rational function pole at t = " + t.to_string());
    return num_.evaluate(t) / d;
  }

  TimeFunction derivative() const {
    return {num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_};
  }

  std::string to_string() const {
    if (den_ == UPoly::constant(Rational(1))) return num_.to_string();
    return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
  }

  friend TimeFunction operator+(const TimeFunction& a, const TimeFunction& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend TimeFunction operator-(const TimeFunction& a) { return {-a.num_, a.den_}; }
  friend TimeFunction operator-(const TimeFunction& a, const TimeFunction& b) { return a + (-b); }
  friend TimeFunction operator*(const TimeFunction& a, const TimeFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend TimeFunction operator*(const TimeFunction& a, const Rational& s) {
    return {a.num_ * s, a.den_};
  }
  friend TimeFunction operator/(const TimeFunction& a, const TimeFunction& b) {
    if (b.is_zero()) throw std::domain_error("division by zero rational function");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  friend bool operator==(const TimeFunction&, const TimeFunction&) = default;

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = UPoly::constant(Rational(1));
      return;
    }
    UPoly g = UPoly::gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = UPoly::divmod(num_, g).first;
      den_ = UPoly::divmod(den_, g).first;
    }
    Rational l = den_.lead();
    if (l != Rational(1)) {
      Rational inv = Rational(1) / l;
      num_ = num_ * inv;
      den_ = den_ * inv;
    }
  }

  UPoly num_;
  UPoly den_;
};

inline bool is_zero(const TimeFunction& f) { return f.is_zero(); }
inline TimeFunction partial(const TimeFunction& f, std::size_t k) {
  return k == 0 ? f.derivative() : TimeFunction();
}

template <>
struct scalar_traits<TimeFunction> {
  static TimeFunction zero(std::size_t) { return {}; }
  static TimeFunction constant(std::size_t, const Rational& c) { return TimeFunction(c); }
};

}  // namespace nsac
