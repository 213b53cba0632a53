#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nsac {

namespace detail {
__extension__ using int128 = __int128;
__extension__ using uint128 = unsigned __int128;
}  // namespace detail

// Exact rational number, always kept in lowest terms with a positive denominator.
// Values whose numerator and denominator fit comfortably in 62 bits live in
// machine words; anything larger is promoted to a GMP rational.
class Rational {
 public:
  Rational() = default;
  Rational(long v) {  // NOLINT(google-explicit-constructor)
    if (fits(v)) {
      n_ = v;
    } else {
      big_ = mpq_class(v);
    }
  }
  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    assign(static_cast<detail::int128>(num), static_cast<detail::int128>(den));
  }
  explicit Rational(mpq_class q) {
    q.canonicalize();
    set_big(std::move(q));
  }

  // Accepts "p", "-p" or "p/q" with decimal integers.
  static Rational parse(std::string_view text) {
    std::string s(text);
    auto valid = [](const std::string& part, bool allow_sign) {
      if (part.empty()) return false;
      std::size_t i = 0;
      if (allow_sign && (part[0] == '-' || part[0] == '+')) i = 1;
      if (i == part.size()) return false;
      for (; i < part.size(); ++i)
        if (part[i] < '0' || part[i] > '9') return false;
      return true;
    };
    auto slash = s.find('/');
    std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid(num, true) || !valid(den, false))
      throw std::invalid_argument("malformed rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class n(num, 10), d(den, 10);
    if (d == 0) throw std::domain_error("rational with zero denominator: '" + s + "'");
    return Rational(mpq_class(n, d));
  }

  mpq_class raw() const {
    if (big_) return *big_;
    mpq_class q(static_cast<long>(n_), static_cast<unsigned long>(d_));
    return q;
  }
  mpz_class numerator() const { return big_ ? mpz_class(big_->get_num()) : mpz_class(static_cast<long>(n_)); }
  mpz_class denominator() const { return big_ ? mpz_class(big_->get_den()) : mpz_class(static_cast<long>(d_)); }

  bool is_zero() const { return big_ ? sgn(*big_) == 0 : n_ == 0; }
  bool is_integer() const { return big_ ? big_->get_den() == 1 : d_ == 1; }
  int sign() const {
    if (big_) return sgn(*big_);
    return (n_ > 0) - (n_ < 0);
  }
  double to_double() const {
    return big_ ? big_->get_d() : static_cast<double>(n_) / static_cast<double>(d_);
  }
  std::string to_string() const {
    if (big_) return big_->get_str();
    return d_ == 1 ? std::to_string(n_) : std::to_string(n_) + "/" + std::to_string(d_);
  }

  Rational& operator+=(const Rational& o) { return add(o, false); }
  Rational& operator-=(const Rational& o) { return add(o, true); }
  Rational& operator*=(const Rational& o) {
    if (!big_ && !o.big_) {
      if (d_ == 1 && o.d_ == 1) {
        std::int64_t r;
        if (!__builtin_mul_overflow(n_, o.n_, &r) && fits(r)) {
          n_ = r;
          return *this;
        }
      }
      // Cross-cancel first so the products stay small.
      std::int64_t g1 = std::gcd(n_, o.d_), g2 = std::gcd(o.n_, d_);
      if (g1 == 0) g1 = 1;
      if (g2 == 0) g2 = 1;
      detail::int128 num = static_cast<detail::int128>(n_ / g1) * (o.n_ / g2);
      detail::int128 den = static_cast<detail::int128>(d_ / g2) * (o.d_ / g1);
      store_reduced(num, den);
      return *this;
    }
    set_big(raw() * o.raw());
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero rational");
    if (!big_ && !o.big_) {
      std::int64_t on = o.n_, od = o.d_;
      if (on < 0) {
        on = -on;
        od = -od;
      }
      Rational inv;
      inv.n_ = od;
      inv.d_ = on;
      return *this *= inv;
    }
    set_big(raw() / o.raw());
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(Rational a) {
    if (a.big_) {
      *a.big_ = -*a.big_;
    } else {
      a.n_ = -a.n_;
    }
    return a;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    // Both forms are canonical and big values never fit the small range.
    if (!a.big_ && !b.big_) return a.n_ == b.n_ && a.d_ == b.d_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c;
    if (!a.big_ && !b.big_) {
      detail::int128 l = static_cast<detail::int128>(a.n_) * b.d_, r = static_cast<detail::int128>(b.n_) * a.d_;
      c = (l > r) - (l < r);
    } else {
      c = cmp(a.raw(), b.raw());
    }
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  static constexpr std::int64_t kLimit = std::int64_t{1} << 62;
  static bool fits(detail::int128 v) { return v < kLimit && v > -kLimit; }

  static detail::int128 gcd128(detail::int128 a, detail::int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      detail::int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void assign(detail::int128 num, detail::int128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    detail::int128 g = gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    store_reduced(num, den);
  }

  // num/den must already be in lowest terms with den > 0.
  void store_reduced(detail::int128 num, detail::int128 den) {
    if (fits(num) && fits(den)) {
      big_.reset();
      n_ = static_cast<std::int64_t>(num);
      d_ = static_cast<std::int64_t>(den);
      return;
    }
    auto to_mpz = [](detail::int128 v) {
      bool neg = v < 0;
      detail::uint128 u = neg ? static_cast<detail::uint128>(-v) : static_cast<detail::uint128>(v);
      mpz_class hi(static_cast<unsigned long>(u >> 64)), lo(static_cast<unsigned long>(u));
      mpz_class r = (hi << 64) + lo;
      return neg ? mpz_class(-r) : r;
    };
    set_big(mpq_class(to_mpz(num), to_mpz(den)));
  }

  // Takes a canonical GMP value and demotes it to the small form when possible.
  void set_big(mpq_class q) {
    if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
      long num = q.get_num().get_si(), den = q.get_den().get_si();
      if (fits(num) && fits(den)) {
        big_.reset();
        n_ = num;
        d_ = den;
        return;
      }
    }
    big_ = std::move(q);
  }

  Rational& add(const Rational& o, bool subtract) {
    if (!big_ && !o.big_) {
      std::int64_t on = subtract ? -o.n_ : o.n_;
      if (d_ == 1 && o.d_ == 1) {
        n_ += on;  // both below 2^62, so no overflow
        if (!fits(n_)) set_big(mpq_class(static_cast<long>(n_)));
        return *this;
      }
      if (d_ == o.d_) {
        assign(static_cast<detail::int128>(n_) + on, d_);
        return *this;
      }
      assign(static_cast<detail::int128>(n_) * o.d_ + static_cast<detail::int128>(on) * d_,
             static_cast<detail::int128>(d_) * o.d_);
      return *this;
    }
    set_big(subtract ? mpq_class(raw() - o.raw()) : mpq_class(raw() + o.raw()));
    return *this;
  }

  std::int64_t n_ = 0;
  std::int64_t d_ = 1;
  std::optional<mpq_class> big_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

// Scalar-concept hooks so Rational can serve as a pointwise field value.
inline bool is_zero(const Rational& r) { return r.is_zero(); }
inline Rational partial(const Rational&, std::size_t) { return Rational(0); }

}  // namespace nsac
