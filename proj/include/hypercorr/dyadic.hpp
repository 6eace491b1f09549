#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace hypercorr {

/// Library-wide error with a coarse kind so callers (notably the CLI) can
/// map failures to distinct exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { Input, Class, Limit };
  Error(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void throw_input(const std::string& msg) {
  throw Error(Error::Kind::Input, msg);
}
[[noreturn]] inline void throw_class(const std::string& msg) {
  throw Error(Error::Kind::Class, msg);
}
[[noreturn]] inline void throw_limit(const std::string& msg) {
  throw Error(Error::Kind::Limit, msg);
}

/// Exact dyadic rational num / 2^exp with arbitrary-precision numerator.
///
/// Invariant: the fraction is in lowest terms (numerator odd whenever
/// exp > 0) and zero is stored as 0 / 2^0. Closed under +, -, *; equality
/// and ordering are exact.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long v) : num_(v) {}  // NOLINT: implicit on purpose, ints are dyadics
  Dyadic(mpz_class num, unsigned exp) : num_(std::move(num)), exp_(exp) { normalize(); }

  /// count / 2^exp, the form every cube statistic starts out in.
  static Dyadic scaled(long count, unsigned exp) { return Dyadic(mpz_class(count), exp); }

  const mpz_class& numerator() const { return num_; }
  unsigned exponent() const { return exp_; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return sgn(num_); }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    unsigned e = std::max(a.exp_, b.exp_);
    mpz_class na = a.num_ << (e - a.exp_);
    mpz_class nb = b.num_ << (e - b.exp_);
    return Dyadic(na + nb, e);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
    unsigned e = std::max(a.exp_, b.exp_);
    mpz_class na = a.num_ << (e - a.exp_);
    mpz_class nb = b.num_ << (e - b.exp_);
    return Dyadic(na - nb, e);
  }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_);
  }
  Dyadic operator-() const {
    Dyadic r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  Dyadic square() const { return Dyadic(num_ * num_, 2 * exp_); }

  /// Exact comparison: sign of a - b without materializing the difference.
  static int cmp(const Dyadic& a, const Dyadic& b) {
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    unsigned e = std::max(a.exp_, b.exp_);
    mpz_class na = a.num_ << (e - a.exp_);
    mpz_class nb = b.num_ << (e - b.exp_);
    return ::cmp(na, nb) < 0 ? -1 : (na == nb ? 0 : 1);
  }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }

  /// One-pass exact sum; cheaper than folding operator+ because the common
  /// exponent is aligned once per element.
  static Dyadic sum(std::span<const Dyadic> xs) {
    unsigned e = 0;
    for (const Dyadic& x : xs) e = std::max(e, x.exp_);
    mpz_class acc = 0;
    mpz_class tmp;
    for (const Dyadic& x : xs) {
      tmp = x.num_ << (e - x.exp_);
      acc += tmp;
    }
    return Dyadic(std::move(acc), e);
  }

  double to_double() const { return std::ldexp(mpz_get_d(num_.get_mpz_t()), -(int)exp_); }

  std::string to_string() const {
    if (exp_ == 0) return num_.get_str();
    return num_.get_str() + "/2^" + std::to_string(exp_);
  }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    if (exp_ == 0) return;
    unsigned long tz = mpz_scan1(num_.get_mpz_t(), 0);
    unsigned long k = std::min<unsigned long>(tz, exp_);
    if (k) {
      num_ >>= k;  // low k bits are zero, shift is exact
      exp_ -= (unsigned)k;
    }
  }

  mpz_class num_{0};
  unsigned exp_ = 0;
};

/// Exact rational on top of mpq. Dyadics embed losslessly; this type carries
/// the handful of quantities whose denominators pick up factors other
/// than two (1/|S| spectral weights, 1/(4n), ensemble averages, LP output).
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(long v) : q_(v) {}  // NOLINT
  Rational(long num, long den) : q_(num, den) { q_.canonicalize(); }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }
  Rational(const mpz_class& num, const mpz_class& den) : q_(num, den) { q_.canonicalize(); }
  Rational(const Dyadic& d) {  // NOLINT: lossless embedding
    mpz_class den = 1;
    den <<= d.exponent();
    q_ = mpq_class(d.numerator(), den);
    q_.canonicalize();
  }

  const mpq_class& value() const { return q_; }
  bool is_zero() const { return q_ == 0; }
  int sign() const { return sgn(q_); }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ + b.q_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ - b.q_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ * b.q_)); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.q_ == 0) throw_input("Rational: division by zero");
    return Rational(mpq_class(a.q_ / b.q_));
  }
  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

  /// True when the denominator is a power of two (serializes in num/den_pow2 form).
  bool is_dyadic() const { return mpz_popcount(q_.get_den().get_mpz_t()) == 1; }
  unsigned den_pow2() const { return (unsigned)mpz_scan1(q_.get_den().get_mpz_t(), 0); }

  std::string num_string() const { return q_.get_num().get_str(); }
  std::string den_string() const { return q_.get_den().get_str(); }
  std::string to_string() const { return q_.get_str(); }
  double to_double() const { return q_.get_d(); }

 private:
  mpq_class q_;
};

}  // namespace hypercorr
