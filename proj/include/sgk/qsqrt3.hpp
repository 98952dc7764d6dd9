#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "sgk/rational.hpp"

namespace sgk {

/// Element of the ring Q[sqrt(3)]: value a + b*sqrt(3) with a, b rational.
/// Closed under +, -, *; enough for gasket geometry and for assembling
/// transfer-operator representations exactly.
struct QSqrt3 {
  Rational a;  // rational part
  Rational b;  // coefficient of sqrt(3)

  QSqrt3() = default;
  QSqrt3(Rational ra) : a(std::move(ra)), b(0) {}  // NOLINT: implicit by design
  QSqrt3(Rational ra, Rational rb) : a(std::move(ra)), b(std::move(rb)) {}

  bool is_zero() const { return a.is_zero() && b.is_zero(); }
  bool is_rational() const { return b.is_zero(); }
  double to_double() const { return a.to_double() + b.to_double() * std::sqrt(3.0); }

  QSqrt3& operator+=(const QSqrt3& o) { a += o.a; b += o.b; return *this; }
  QSqrt3& operator-=(const QSqrt3& o) { a -= o.a; b -= o.b; return *this; }
  QSqrt3& operator*=(const QSqrt3& o) {
    Rational na = a * o.a + Rational(3) * b * o.b;
    Rational nb = a * o.b + b * o.a;
    a = std::move(na);
    b = std::move(nb);
    return *this;
  }

  friend QSqrt3 operator+(QSqrt3 x, const QSqrt3& y) { return x += y; }
  friend QSqrt3 operator-(QSqrt3 x, const QSqrt3& y) { return x -= y; }
  friend QSqrt3 operator*(QSqrt3 x, const QSqrt3& y) { return x *= y; }
  friend QSqrt3 operator-(const QSqrt3& x) { return QSqrt3(-x.a, -x.b); }

  friend bool operator==(const QSqrt3& x, const QSqrt3& y) {
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const QSqrt3& x, const QSqrt3& y) { return !(x == y); }
};

/// Point in the plane with x rational and y a rational multiple of sqrt(3).
/// Every vertex of every level graph of every SG_k has this form, which makes
/// exact deduplication by coordinates possible at any depth.
struct Point {
  Rational x;   // abscissa
  Rational y3;  // ordinate divided by sqrt(3): y = y3 * sqrt(3)

  Point() = default;
  Point(Rational px, Rational py3) : x(std::move(px)), y3(std::move(py3)) {}

  double xd() const { return x.to_double(); }
  double yd() const { return y3.to_double() * std::sqrt(3.0); }

  friend Point operator+(const Point& p, const Point& q) {
    return Point(p.x + q.x, p.y3 + q.y3);
  }
  friend Point operator-(const Point& p, const Point& q) {
    return Point(p.x - q.x, p.y3 - q.y3);
  }
  friend Point operator*(const Rational& c, const Point& p) {
    return Point(c * p.x, c * p.y3);
  }
  friend bool operator==(const Point& p, const Point& q) {
    return p.x == q.x && p.y3 == q.y3;
  }
  friend bool operator!=(const Point& p, const Point& q) { return !(p == q); }
};

struct PointHash {
  std::size_t operator()(const Point& p) const {
    return p.x.hash() * 0x9e3779b97f4a7c15ull ^ p.y3.hash();
  }
};

/// Counterclockwise rotation by 2*pi/3 about the centroid of the unit
/// triangle; permutes the boundary corners q0 -> q1 -> q2 -> q0.
inline Point rotate_ccw(const Point& p) {
  // Centroid (1/2, sqrt(3)/6). In (x, y3) form the linear part of the
  // rotation is (x, y3) -> (-x/2 - 3 y3 / 2, x/2 - y3/2).
  static const Point c(Rational(1, 2), Rational(1, 6));
  Point q = p - c;
  Point r(Rational(-1, 2) * q.x + Rational(-3, 2) * q.y3,
          Rational(1, 2) * q.x + Rational(-1, 2) * q.y3);
  return r + c;
}

/// Reflection fixing q0 and swapping q1 with q2 (axis through q0 and the
/// midpoint of the opposite side).
inline Point reflect_q0(const Point& p) {
  // (x, y) -> ((x + sqrt(3) y)/2, (sqrt(3) x - y)/2), i.e. in (x, y3) form
  // (x, y3) -> (x/2 + 3 y3/2, x/2 - y3/2).
  return Point(Rational(1, 2) * p.x + Rational(3, 2) * p.y3,
               Rational(1, 2) * p.x + Rational(-1, 2) * p.y3);
}

}  // namespace sgk
