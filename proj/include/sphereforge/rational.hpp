#ifndef SPHEREFORGE_RATIONAL_HPP
#define SPHEREFORGE_RATIONAL_HPP

#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace sphereforge {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline int sign(const Rational& q) { return q.sign(); }

/// Parses "7", "-3/4", "0.125", "-2.5e-3". Throws std::invalid_argument.
inline Rational parse_rational(std::string_view text)
{
  auto fail = [&] {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  std::string s(text);
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty()) fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }

  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  BigInt mantissa = 0;
  long exponent = 0;
  bool digits = false;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    char ch = s[pos];
    if (ch >= '0' && ch <= '9') {
      mantissa = mantissa * 10 + (ch - '0');
      if (seen_point) --exponent;
      digits = true;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!digits) fail();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') fail();
    std::string tail = s.substr(pos + 1);
    if (tail.empty()) fail();
    char* end = nullptr;
    long e = std::strtol(tail.c_str(), &end, 10);
    if (*end != '\0') fail();
    exponent += e;
  }
  Rational value(mantissa);
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
  if (exponent >= 0)
    value *= scale;
  else
    value /= scale;
  return negative ? Rational(-value) : value;
}

inline std::string to_string(const Rational& q)
{
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

/// Exact complex number with rational parts.
struct ComplexRational {
  Rational re{0};
  Rational im{0};

  ComplexRational() = default;
  ComplexRational(Rational r) : re(std::move(r)) {}
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  ComplexRational(int r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  Rational norm() const { return re * re + im * im; }
  ComplexRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  friend ComplexRational operator+(const ComplexRational& a, const ComplexRational& b)
  {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexRational operator-(const ComplexRational& a, const ComplexRational& b)
  {
    return {a.re - b.re, a.im - b.im};
  }
  friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
  friend ComplexRational operator*(const ComplexRational& a, const ComplexRational& b)
  {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexRational operator/(const ComplexRational& a, const ComplexRational& b)
  {
    Rational n = b.norm();
    if (n == 0) throw std::domain_error("complex division by zero");
    ComplexRational p = a * b.conj();
    return {p.re / n, p.im / n};
  }
  ComplexRational& operator+=(const ComplexRational& o) { return *this = *this + o; }
  ComplexRational& operator-=(const ComplexRational& o) { return *this = *this - o; }
  ComplexRational& operator*=(const ComplexRational& o) { return *this = *this * o; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b)
  {
    return a.re == b.re && a.im == b.im;
  }
};

inline const ComplexRational kImaginaryUnit{Rational(0), Rational(1)};

}  // namespace sphereforge

#endif  // SPHEREFORGE_RATIONAL_HPP
