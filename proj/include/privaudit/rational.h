//
// Copyright 2026 The privaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PRIVAUDIT_RATIONAL_H_
#define PRIVAUDIT_RATIONAL_H_

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace privaudit {

// Exact rational number with 64-bit numerator and denominator, kept
// normalized: den > 0 and gcd(|num|, den) == 1. Intermediate products are
// evaluated in 128-bit arithmetic; a result that does not fit back into
// 64 bits throws std::overflow_error rather than silently wrapping.
//
// All probabilities computed from integer record counts stay exact in this
// type: counts fit comfortably in 64 bits and every derived quantity is a
// ratio of such counts.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT

  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Assign(num, den);
  }

  static Rational FromCounts(std::uint64_t num, std::uint64_t den) {
    if (num > kMaxI64 || den > kMaxI64)
      throw std::overflow_error("count does not fit in 64-bit rational");
    return Rational(static_cast<std::int64_t>(num),
                    static_cast<std::int64_t>(den));
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return static_cast<double>(static_cast<long double>(num_) /
                               static_cast<long double>(den_));
  }

  // "p/q", or just "p" when the value is an integer.
  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Parses the format produced by to_string(). Throws std::invalid_argument
  // on malformed input.
  static Rational Parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) {
        return Rational(ParseI64(text));
      }
      return Rational(ParseI64(text.substr(0, slash)),
                      ParseI64(text.substr(slash + 1)));
    } catch (const std::domain_error&) {
      throw std::invalid_argument("malformed rational: " + text);
    }
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const I128 n = static_cast<I128>(a.num_) * b.den_ +
                   static_cast<I128>(b.num_) * a.den_;
    const I128 d = static_cast<I128>(a.den_) * b.den_;
    return FromI128(n, d);
  }

  friend Rational operator-(const Rational& a, const Rational& b) {
    const I128 n = static_cast<I128>(a.num_) * b.den_ -
                   static_cast<I128>(b.num_) * a.den_;
    const I128 d = static_cast<I128>(a.den_) * b.den_;
    return FromI128(n, d);
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    const I128 n = static_cast<I128>(a.num_) * b.num_;
    const I128 d = static_cast<I128>(a.den_) * b.den_;
    return FromI128(n, d);
  }

  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    const I128 n = static_cast<I128>(a.num_) * b.den_;
    const I128 d = static_cast<I128>(a.den_) * b.num_;
    return FromI128(n, d);
  }

  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;  // both normalized
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<I128>(a.num_) * b.den_ <
           static_cast<I128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

 private:
  using I128 = __int128;
  using U128 = unsigned __int128;
  static constexpr std::uint64_t kMaxI64 =
      static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());

  static U128 Gcd128(U128 a, U128 b) {
    while (b != 0) {
      const U128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational FromI128(I128 num, I128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    if (num == 0) return Rational();
    const U128 abs_num = num < 0 ? static_cast<U128>(-num)
                                 : static_cast<U128>(num);
    const U128 g = Gcd128(abs_num, static_cast<U128>(den));
    const U128 rn = abs_num / g;
    const U128 rd = static_cast<U128>(den) / g;
    if (rn > kMaxI64 || rd > kMaxI64)
      throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = num < 0 ? -static_cast<std::int64_t>(rn)
                     : static_cast<std::int64_t>(rn);
    r.den_ = static_cast<std::int64_t>(rd);
    return r;
  }

  void Assign(std::int64_t num, std::int64_t den) {
    *this = FromI128(static_cast<I128>(num), static_cast<I128>(den));
  }

  static std::int64_t ParseI64(const std::string& s) {
    if (s.empty()) throw std::domain_error("empty number");
    std::size_t pos = 0;
    long long v;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw std::domain_error("bad number");
    }
    if (pos != s.size()) throw std::domain_error("trailing characters");
    return static_cast<std::int64_t>(v);
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace privaudit

#endif  // PRIVAUDIT_RATIONAL_H_
