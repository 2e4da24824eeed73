#pragma once

// Hyper-dual numbers a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.
// Seeding b and c with unit directions i and j yields f, df/du_i, df/du_j and
// d2f/du_i du_j in a single evaluation, exact to rounding.

#include <cmath>
#include <ostream>

#include <Eigen/Core>

namespace vfgeom {

struct HyperDual {
  double a = 0.0;  // value
  double b = 0.0;  // e1 part
  double c = 0.0;  // e2 part
  double d = 0.0;  // e1e2 part

  constexpr HyperDual() = default;
  constexpr HyperDual(double value) : a(value) {}  // NOLINT(google-explicit-constructor)
  constexpr HyperDual(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

  HyperDual& operator+=(const HyperDual& o) {
    a += o.a; b += o.b; c += o.c; d += o.d;
    return *this;
  }
  HyperDual& operator-=(const HyperDual& o) {
    a -= o.a; b -= o.b; c -= o.c; d -= o.d;
    return *this;
  }
  HyperDual& operator*=(const HyperDual& o) {
    *this = HyperDual(a * o.a, a * o.b + b * o.a, a * o.c + c * o.a,
                      a * o.d + b * o.c + c * o.b + d * o.a);
    return *this;
  }
  HyperDual& operator/=(const HyperDual& o);
};

// Chain rule for a scalar function with value f0 and derivatives f1, f2 at x.a.
inline HyperDual lift(const HyperDual& x, double f0, double f1, double f2) {
  return {f0, f1 * x.b, f1 * x.c, f1 * x.d + f2 * x.b * x.c};
}

inline HyperDual operator-(const HyperDual& x) { return {-x.a, -x.b, -x.c, -x.d}; }
inline HyperDual operator+(const HyperDual& x) { return x; }

inline HyperDual operator+(HyperDual x, const HyperDual& y) { return x += y; }
inline HyperDual operator-(HyperDual x, const HyperDual& y) { return x -= y; }
inline HyperDual operator*(HyperDual x, const HyperDual& y) { return x *= y; }

inline HyperDual inverse(const HyperDual& x) {
  const double inv = 1.0 / x.a;
  return lift(x, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline HyperDual& HyperDual::operator/=(const HyperDual& o) { return *this *= inverse(o); }
inline HyperDual operator/(HyperDual x, const HyperDual& y) { return x /= y; }

inline HyperDual operator+(HyperDual x, double y) { x.a += y; return x; }
inline HyperDual operator+(double y, HyperDual x) { x.a += y; return x; }
inline HyperDual operator-(HyperDual x, double y) { x.a -= y; return x; }
inline HyperDual operator-(double y, const HyperDual& x) { return {y - x.a, -x.b, -x.c, -x.d}; }
inline HyperDual operator*(const HyperDual& x, double y) { return {x.a * y, x.b * y, x.c * y, x.d * y}; }
inline HyperDual operator*(double y, const HyperDual& x) { return x * y; }
inline HyperDual operator/(const HyperDual& x, double y) { return x * (1.0 / y); }
inline HyperDual operator/(double y, const HyperDual& x) { return y * inverse(x); }

inline bool operator<(const HyperDual& x, const HyperDual& y) { return x.a < y.a; }
inline bool operator>(const HyperDual& x, const HyperDual& y) { return x.a > y.a; }
inline bool operator<=(const HyperDual& x, const HyperDual& y) { return x.a <= y.a; }
inline bool operator>=(const HyperDual& x, const HyperDual& y) { return x.a >= y.a; }
inline bool operator==(const HyperDual& x, const HyperDual& y) { return x.a == y.a; }
inline bool operator!=(const HyperDual& x, const HyperDual& y) { return x.a != y.a; }

inline std::ostream& operator<<(std::ostream& os, const HyperDual& x) {
  return os << '(' << x.a << ", " << x.b << ", " << x.c << ", " << x.d << ')';
}

// Scalar functions. The double overloads live here too so generic code can call
// them unqualified inside this namespace.
inline double value_of(double x) { return x; }
inline double value_of(const HyperDual& x) { return x.a; }

inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double atan(double x) { return std::atan(x); }
inline double sinh(double x) { return std::sinh(x); }
inline double cosh(double x) { return std::cosh(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double abs(double x) { return std::abs(x); }

inline HyperDual sin(const HyperDual& x) {
  const double s = std::sin(x.a), c = std::cos(x.a);
  return lift(x, s, c, -s);
}
inline HyperDual cos(const HyperDual& x) {
  const double s = std::sin(x.a), c = std::cos(x.a);
  return lift(x, c, -s, -c);
}
inline HyperDual tan(const HyperDual& x) {
  const double t = std::tan(x.a);
  const double sec2 = 1.0 + t * t;
  return lift(x, t, sec2, 2.0 * t * sec2);
}
inline HyperDual exp(const HyperDual& x) {
  const double e = std::exp(x.a);
  return lift(x, e, e, e);
}
inline HyperDual log(const HyperDual& x) {
  return lift(x, std::log(x.a), 1.0 / x.a, -1.0 / (x.a * x.a));
}
inline HyperDual sqrt(const HyperDual& x) {
  const double r = std::sqrt(x.a);
  return lift(x, r, 0.5 / r, -0.25 / (r * x.a));
}
inline HyperDual atan(const HyperDual& x) {
  const double q = 1.0 / (1.0 + x.a * x.a);
  return lift(x, std::atan(x.a), q, -2.0 * x.a * q * q);
}
inline HyperDual sinh(const HyperDual& x) {
  const double s = std::sinh(x.a), c = std::cosh(x.a);
  return lift(x, s, c, s);
}
inline HyperDual cosh(const HyperDual& x) {
  const double s = std::sinh(x.a), c = std::cosh(x.a);
  return lift(x, c, s, c);
}
inline HyperDual tanh(const HyperDual& x) {
  const double t = std::tanh(x.a);
  const double sech2 = 1.0 - t * t;
  return lift(x, t, sech2, -2.0 * t * sech2);
}
inline HyperDual abs(const HyperDual& x) { return x.a < 0.0 ? -x : x; }

template <class T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

}  // namespace vfgeom

namespace Eigen {

template <>
struct NumTraits<vfgeom::HyperDual> : GenericNumTraits<double> {
  using Real = vfgeom::HyperDual;
  using NonInteger = vfgeom::HyperDual;
  using Nested = vfgeom::HyperDual;
  using Literal = vfgeom::HyperDual;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 4,
    MulCost = 10
  };
  static inline double epsilon() { return std::numeric_limits<double>::epsilon(); }
  static inline double dummy_precision() { return 1e-12; }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<vfgeom::HyperDual, double, BinaryOp> {
  using ReturnType = vfgeom::HyperDual;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, vfgeom::HyperDual, BinaryOp> {
  using ReturnType = vfgeom::HyperDual;
};

}  // namespace Eigen
