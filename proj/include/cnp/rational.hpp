#pragma once

// Exact scalar arithmetic for the verification library.
//
// All structural data (inner products, multiplication unitaries, defect
// operators) is kept in Gaussian rationals so that identity checks are
// bit-exact.  Floating point enters only through norm computations.

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cnp {

struct ArithmeticOverflow : std::runtime_error {
  ArithmeticOverflow() : std::runtime_error("rational arithmetic overflow") {}
};

// Rational with invariant: den > 0, gcd(|num|, den) == 1.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  static long long checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw ArithmeticOverflow();
    return static_cast<long long>(v);
  }

  static Rat make128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    Rat r;
    r.num = checked(n);
    r.den = checked(d);
    return r;
  }

  friend Rat operator+(const Rat& x, const Rat& y) {
    return make128((__int128)x.num * y.den + (__int128)y.num * x.den,
                   (__int128)x.den * y.den);
  }
  friend Rat operator-(const Rat& x, const Rat& y) {
    return make128((__int128)x.num * y.den - (__int128)y.num * x.den,
                   (__int128)x.den * y.den);
  }
  friend Rat operator*(const Rat& x, const Rat& y) {
    return make128((__int128)x.num * y.num, (__int128)x.den * y.den);
  }
  friend Rat operator/(const Rat& x, const Rat& y) {
    if (y.num == 0) throw std::domain_error("rational division by zero");
    return make128((__int128)x.num * y.den, (__int128)x.den * y.num);
  }
  Rat operator-() const { Rat r(*this); r.num = -r.num; return r; }
  Rat& operator+=(const Rat& y) { *this = *this + y; return *this; }
  Rat& operator-=(const Rat& y) { *this = *this - y; return *this; }
  Rat& operator*=(const Rat& y) { *this = *this * y; return *this; }

  friend bool operator==(const Rat& x, const Rat& y) {
    return x.num == y.num && x.den == y.den;
  }
  friend bool operator!=(const Rat& x, const Rat& y) { return !(x == y); }
  friend bool operator<(const Rat& x, const Rat& y) {
    return (__int128)x.num * y.den < (__int128)y.num * x.den;
  }

  bool is_zero() const { return num == 0; }
  double to_double() const { return double(num) / double(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  // Exact conversion: every finite double is dyadic.
  static Rat from_double(double v);
};

// Complex number with Gaussian-rational coordinates.
struct GRat {
  Rat re, im;

  GRat() = default;
  GRat(long long n) : re(n) {}
  GRat(Rat r) : re(r) {}
  GRat(Rat r, Rat i) : re(r), im(i) {}

  friend GRat operator+(const GRat& x, const GRat& y) { return {x.re + y.re, x.im + y.im}; }
  friend GRat operator-(const GRat& x, const GRat& y) { return {x.re - y.re, x.im - y.im}; }
  friend GRat operator*(const GRat& x, const GRat& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  friend GRat operator/(const GRat& x, const GRat& y) {
    Rat n = y.re * y.re + y.im * y.im;
    if (n.is_zero()) throw std::domain_error("complex division by zero");
    GRat c = x * GRat{y.re, -y.im};
    return {c.re / n, c.im / n};
  }
  GRat operator-() const { return {-re, -im}; }
  GRat& operator+=(const GRat& y) { *this = *this + y; return *this; }
  GRat& operator-=(const GRat& y) { *this = *this - y; return *this; }
  GRat& operator*=(const GRat& y) { *this = *this * y; return *this; }

  friend bool operator==(const GRat& x, const GRat& y) { return x.re == y.re && x.im == y.im; }
  friend bool operator!=(const GRat& x, const GRat& y) { return !(x == y); }

  GRat conj() const { return {re, -im}; }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  Rat abs2() const { return re * re + im * im; }
  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

  std::string str() const {
    if (im.is_zero()) return re.str();
    if (re.is_zero()) return im.str() + "i";
    return re.str() + (im.num < 0 ? "" : "+") + im.str() + "i";
  }

  static GRat i() { return {Rat(0), Rat(1)}; }
};

inline Rat Rat::from_double(double v) {
  if (v == 0.0) return Rat(0);
  bool neg = v < 0;
  if (neg) v = -v;
  // v = m * 2^e with m in [0.5, 1); scale mantissa to an integer.
  int e = 0;
  double m = std::frexp(v, &e);
  long long mi = 0;
  for (int k = 0; k < 64 && m != 0.0; ++k) {
    m *= 2;
    e -= 1;
    long long bit = (long long)m;
    m -= double(bit);
    if (mi > (INT64_MAX >> 1)) throw ArithmeticOverflow();
    mi = mi * 2 + bit;
  }
  Rat r(neg ? -mi : mi);
  while (e > 0) { r = r * Rat(2); --e; }
  while (e < 0) { r = r / Rat(2); ++e; }
  return r;
}

}  // namespace cnp
