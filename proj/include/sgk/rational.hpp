#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sgk {

/// Arbitrary-precision rational scalar.
///
/// Thin value wrapper around GMP's mpq_class with eager (non-expression)
/// operators, so it can be used as an Eigen matrix scalar. Always kept in
/// canonical form. Serializes as "num/den" ("num" when the denominator is 1).
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}                 // NOLINT: implicit by design
  Rational(long n) : v_(n) {}
  Rational(long long n) : v_(static_cast<long>(n)) {
    static_assert(sizeof(long) == sizeof(long long), "LP64 assumed");
  }
  Rational(long num, long den) : v_(num, den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }
  explicit Rational(const mpz_class& z) : v_(z) {}

  /// Parses "3/5", "-7", "0". Throws std::invalid_argument on malformed input.
  static Rational from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("Rational: empty string");
    mpq_class q;
    if (q.set_str(s, 10) != 0)
      throw std::invalid_argument("Rational: cannot parse '" + s + "'");
    q.canonicalize();
    return Rational(q);
  }

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  double to_double() const { return v_.get_d(); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend Rational abs(const Rational& a) { return Rational(mpq_class(abs(a.v_))); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& a);

  std::size_t hash() const {
    std::size_t h1 = mpz_fdiv_ui(v_.get_num().get_mpz_t(), 0x7fffffffu);
    std::size_t h2 = mpz_fdiv_ui(v_.get_den().get_mpz_t(), 0x7fffffffu);
    std::size_t h = h1 * 1000003u ^ h2;
    if (sgn(v_) < 0) h = ~h;
    return h;
  }

 private:
  mpq_class v_;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& a) {
  return os << a.str();
}

inline Rational pow(Rational base, long e) {
  if (e < 0) return Rational(1) / pow(base, -e);
  Rational acc(1);
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

}  // namespace sgk

template <>
struct std::hash<sgk::Rational> {
  std::size_t operator()(const sgk::Rational& r) const { return r.hash(); }
};

namespace Eigen {

template <>
struct NumTraits<sgk::Rational> : GenericNumTraits<sgk::Rational> {
  typedef sgk::Rational Real;
  typedef sgk::Rational NonInteger;
  typedef sgk::Rational Nested;
  typedef sgk::Rational Literal;

  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 60,
    MulCost = 40,
  };
};

}  // namespace Eigen
