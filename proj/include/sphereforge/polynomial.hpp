#ifndef SPHEREFORGE_POLYNOMIAL_HPP
#define SPHEREFORGE_POLYNOMIAL_HPP

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sphereforge/rational.hpp"

namespace sphereforge {

/// Univariate polynomial with rational coefficients; coeffs[k] multiplies x^k.
class RealPoly {
 public:
  RealPoly() = default;
  RealPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
  static RealPoly constant(const Rational& c) { return RealPoly({c}); }
  static RealPoly monomial(int k, const Rational& c = 1)
  {
    std::vector<Rational> v(static_cast<std::size_t>(k) + 1, Rational(0));
    v.back() = c;
    return RealPoly(std::move(v));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(int k) const
  {
    return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(k)] : Rational(0);
  }
  const Rational& leading() const { return coeffs_.back(); }

  Rational operator()(const Rational& x) const
  {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  double operator()(double x) const
  {
    double acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
    return acc;
  }

  RealPoly derivative() const
  {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<long>(k));
    return RealPoly(std::move(d));
  }

  friend RealPoly operator+(const RealPoly& a, const RealPoly& b)
  {
    std::vector<Rational> v(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
    return RealPoly(std::move(v));
  }
  friend RealPoly operator-(const RealPoly& a) { return a * RealPoly::constant(-1); }
  friend RealPoly operator-(const RealPoly& a, const RealPoly& b) { return a + (-b); }
  friend RealPoly operator*(const RealPoly& a, const RealPoly& b)
  {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> v(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return RealPoly(std::move(v));
  }
  friend bool operator==(const RealPoly& a, const RealPoly& b) { return a.coeffs_ == b.coeffs_; }

  /// Euclidean division; returns (quotient, remainder).
  std::pair<RealPoly, RealPoly> divmod(const RealPoly& d) const
  {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> rem = coeffs_;
    int dd = d.degree();
    int qd = degree() - dd;
    if (qd < 0) return {RealPoly(), *this};
    std::vector<Rational> quo(static_cast<std::size_t>(qd) + 1, Rational(0));
    for (int k = qd; k >= 0; --k) {
      Rational t = rem[static_cast<std::size_t>(k + dd)] / d.leading();
      quo[static_cast<std::size_t>(k)] = t;
      for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= t * d.coeffs_[static_cast<std::size_t>(j)];
    }
    rem.resize(static_cast<std::size_t>(dd));
    return {RealPoly(std::move(quo)), RealPoly(std::move(rem))};
  }

  RealPoly monic() const
  {
    if (is_zero()) return *this;
    std::vector<Rational> v = coeffs_;
    Rational l = leading();
    for (auto& c : v) c /= l;
    return RealPoly(std::move(v));
  }

  /// Value of the k-th derivative at x, divided by nothing (true derivative).
  Rational derivative_at(int k, const Rational& x) const
  {
    RealPoly p = *this;
    for (int i = 0; i < k; ++i) p = p.derivative();
    return p(x);
  }

 private:
  void trim()
  {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  std::vector<Rational> coeffs_;
};

inline RealPoly gcd(RealPoly a, RealPoly b)
{
  while (!b.is_zero()) {
    RealPoly r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Yun's square-free decomposition: result[m-1] holds the product of the
/// distinct monic factors of multiplicity exactly m.
inline std::vector<RealPoly> square_free_decomposition(const RealPoly& p)
{
  std::vector<RealPoly> parts;
  if (p.degree() <= 0) return parts;
  RealPoly a = p.monic();
  RealPoly b = a.derivative();
  RealPoly c = gcd(a, b);
  RealPoly w = a.divmod(c).first;
  RealPoly y = b.divmod(c).first;
  RealPoly z = y - w.derivative();
  while (w.degree() > 0) {
    RealPoly g = gcd(w, z);
    parts.push_back(g);
    w = w.divmod(g).first;
    y = z.divmod(g).first;
    z = y - w.derivative();
  }
  while (!parts.empty() && parts.back().degree() == 0) parts.pop_back();
  return parts;
}

/// Sturm sequence of p.
inline std::vector<RealPoly> sturm_sequence(const RealPoly& p)
{
  std::vector<RealPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero()) {
    RealPoly r = seq[seq.size() - 2].divmod(seq.back()).second;
    if (r.is_zero()) break;
    seq.push_back(-r);
  }
  return seq;
}

inline int sign_changes_at(const std::vector<RealPoly>& seq, const Rational& x)
{
  int changes = 0;
  int last = 0;
  for (const auto& q : seq) {
    int s = sign(q(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// Number of distinct real roots of a square-free-or-not p in the half-open interval (lo, hi].
inline int count_real_roots(const RealPoly& p, const Rational& lo, const Rational& hi)
{
  if (p.is_zero()) throw std::invalid_argument("root count of the zero polynomial");
  if (p.degree() == 0) return 0;
  auto seq = sturm_sequence(p);
  return sign_changes_at(seq, lo) - sign_changes_at(seq, hi);
}

struct RootInterval {
  Rational lo;
  Rational hi;
  double approx() const { return to_double((lo + hi) / 2); }
  bool exact() const { return lo == hi; }
};

/// Isolates the distinct real roots of p in (lo, hi] into disjoint intervals of width <= width.
inline std::vector<RootInterval> isolate_real_roots(const RealPoly& p, const Rational& lo, const Rational& hi,
                                                    const Rational& width)
{
  std::vector<RootInterval> out;
  if (p.degree() <= 0) return out;
  auto seq = sturm_sequence(p);
  struct Job {
    Rational a, b;
    int count;
  };
  std::vector<Job> stack{{lo, hi, sign_changes_at(seq, lo) - sign_changes_at(seq, hi)}};
  while (!stack.empty()) {
    Job job = stack.back();
    stack.pop_back();
    if (job.count == 0) continue;
    if (p(job.b) == 0 && job.count == 1) {
      out.push_back({job.b, job.b});
      continue;
    }
    if (job.count == 1 && job.b - job.a <= width) {
      out.push_back({job.a, job.b});
      continue;
    }
    Rational mid = (job.a + job.b) / 2;
    int left = sign_changes_at(seq, job.a) - sign_changes_at(seq, mid);
    stack.push_back({mid, job.b, job.count - left});
    stack.push_back({job.a, mid, left});
  }
  std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo; });
  return out;
}

/// Holomorphic polynomial with exact complex-rational coefficients.
class HoloPoly {
 public:
  HoloPoly() = default;
  HoloPoly(std::vector<ComplexRational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
  static HoloPoly from_real(const RealPoly& p)
  {
    std::vector<ComplexRational> v;
    for (const auto& c : p.coeffs()) v.emplace_back(c);
    return HoloPoly(std::move(v));
  }
  static HoloPoly constant(const ComplexRational& c) { return HoloPoly({c}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<ComplexRational>& coeffs() const { return coeffs_; }
  ComplexRational coeff(int k) const
  {
    return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(k)] : ComplexRational();
  }
  bool has_real_coefficients() const
  {
    for (const auto& c : coeffs_)
      if (c.im != 0) return false;
    return true;
  }
  RealPoly real_poly() const
  {
    if (!has_real_coefficients()) throw std::invalid_argument("polynomial has non-real coefficients");
    std::vector<Rational> v;
    for (const auto& c : coeffs_) v.push_back(c.re);
    return RealPoly(std::move(v));
  }

  ComplexRational operator()(const ComplexRational& z) const
  {
    ComplexRational acc;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  HoloPoly derivative() const
  {
    std::vector<ComplexRational> d;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * ComplexRational(Rational(static_cast<long>(k))));
    return HoloPoly(std::move(d));
  }

  friend HoloPoly operator+(const HoloPoly& a, const HoloPoly& b)
  {
    std::vector<ComplexRational> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
    return HoloPoly(std::move(v));
  }
  friend HoloPoly operator*(const ComplexRational& s, const HoloPoly& p)
  {
    std::vector<ComplexRational> v;
    for (const auto& c : p.coeffs_) v.push_back(s * c);
    return HoloPoly(std::move(v));
  }
  friend HoloPoly operator*(const HoloPoly& a, const HoloPoly& b)
  {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<ComplexRational> v(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return HoloPoly(std::move(v));
  }
  friend bool operator==(const HoloPoly& a, const HoloPoly& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim()
  {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  }
  std::vector<ComplexRational> coeffs_;
};

/// Floating-point image of a HoloPoly for hot loops.
class NumericPoly {
 public:
  NumericPoly() = default;
  explicit NumericPoly(const HoloPoly& p)
  {
    for (const auto& c : p.coeffs()) coeffs_.push_back(c.to_complex());
  }
  bool is_zero() const { return coeffs_.empty(); }
  std::complex<double> operator()(std::complex<double> z) const
  {
    std::complex<double> acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

 private:
  std::vector<std::complex<double>> coeffs_;
};

}  // namespace sphereforge

#endif  // SPHEREFORGE_POLYNOMIAL_HPP
