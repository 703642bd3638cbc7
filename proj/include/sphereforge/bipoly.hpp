#ifndef SPHEREFORGE_BIPOLY_HPP
#define SPHEREFORGE_BIPOLY_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "sphereforge/rational.hpp"

namespace sphereforge {

/// Sparse polynomial in (x, y); key (i, j) is the monomial x^i y^j.
template <typename T>
class BiPoly {
 public:
  using Key = std::pair<int, int>;

  BiPoly() = default;
  static BiPoly constant(const T& c)
  {
    BiPoly p;
    p.add(0, 0, c);
    return p;
  }
  static BiPoly monomial(int i, int j, const T& c = T(1))
  {
    BiPoly p;
    p.add(i, j, c);
    return p;
  }
  static BiPoly x() { return monomial(1, 0); }
  static BiPoly y() { return monomial(0, 1); }

  void add(int i, int j, const T& c)
  {
    if (c == T(0)) return;
    auto [it, fresh] = terms_.try_emplace({i, j}, c);
    if (!fresh) {
      it->second += c;
      if (it->second == T(0)) terms_.erase(it);
    }
  }
  T coeff(int i, int j) const
  {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? T(0) : it->second;
  }
  const std::map<Key, T>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const
  {
    int d = -1;
    for (auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
    return d;
  }
  /// Lowest total degree present; -1 for the zero polynomial.
  int order() const
  {
    int d = -1;
    for (auto& [k, c] : terms_)
      if (d < 0 || k.first + k.second < d) d = k.first + k.second;
    return d;
  }
  BiPoly homogeneous(int k) const
  {
    BiPoly p;
    for (auto& [key, c] : terms_)
      if (key.first + key.second == k) p.terms_.emplace(key, c);
    return p;
  }
  BiPoly truncated(int k) const
  {
    BiPoly p;
    for (auto& [key, c] : terms_)
      if (key.first + key.second <= k) p.terms_.emplace(key, c);
    return p;
  }

  BiPoly operator+(const BiPoly& o) const
  {
    BiPoly p = *this;
    for (auto& [k, c] : o.terms_) p.add(k.first, k.second, c);
    return p;
  }
  BiPoly operator-() const
  {
    BiPoly p;
    for (auto& [k, c] : terms_) p.terms_.emplace(k, T(0) - c);
    return p;
  }
  BiPoly operator-(const BiPoly& o) const { return *this + (-o); }
  BiPoly operator*(const BiPoly& o) const
  {
    BiPoly p;
    for (auto& [a, ca] : terms_)
      for (auto& [b, cb] : o.terms_) p.add(a.first + b.first, a.second + b.second, ca * cb);
    return p;
  }
  BiPoly scaled(const T& s) const
  {
    BiPoly p;
    for (auto& [k, c] : terms_) p.add(k.first, k.second, c * s);
    return p;
  }
  BiPoly& operator+=(const BiPoly& o) { return *this = *this + o; }
  bool operator==(const BiPoly& o) const { return terms_ == o.terms_; }

  BiPoly pow(int n) const
  {
    BiPoly r = constant(T(1));
    for (int k = 0; k < n; ++k) r = r * *this;
    return r;
  }
  BiPoly dx() const
  {
    BiPoly p;
    for (auto& [k, c] : terms_)
      if (k.first > 0) p.add(k.first - 1, k.second, c * T(k.first));
    return p;
  }
  BiPoly dy() const
  {
    BiPoly p;
    for (auto& [k, c] : terms_)
      if (k.second > 0) p.add(k.first, k.second - 1, c * T(k.second));
    return p;
  }

  /// p(u(x,y), v(x,y)), optionally truncated above total degree `trunc`.
  BiPoly compose(const BiPoly& u, const BiPoly& v, int trunc = -1) const
  {
    std::map<int, BiPoly> upow{{0, constant(T(1))}}, vpow{{0, constant(T(1))}};
    auto power = [&](std::map<int, BiPoly>& cache, const BiPoly& base, int n) -> const BiPoly& {
      for (int k = static_cast<int>(cache.size()); k <= n; ++k) {
        cache[k] = cache[k - 1] * base;
        if (trunc >= 0) cache[k] = cache[k].truncated(trunc);
      }
      return cache[n];
    };
    BiPoly out;
    for (auto& [k, c] : terms_) {
      BiPoly t = power(upow, u, k.first) * power(vpow, v, k.second);
      if (trunc >= 0) t = t.truncated(trunc);
      out += t.scaled(c);
    }
    return out;
  }

  T operator()(const T& x0, const T& y0) const
  {
    T acc(0);
    for (auto& [k, c] : terms_) {
      T m = c;
      for (int a = 0; a < k.first; ++a) m = m * x0;
      for (int b = 0; b < k.second; ++b) m = m * y0;
      acc += m;
    }
    return acc;
  }

 private:
  std::map<Key, T> terms_;
};

using RationalBiPoly = BiPoly<Rational>;

inline double eval_double(const RationalBiPoly& p, double x, double y)
{
  double acc = 0;
  for (auto& [k, c] : p.terms()) acc += to_double(c) * std::pow(x, k.first) * std::pow(y, k.second);
  return acc;
}

inline std::string to_string(const RationalBiPoly& p)
{
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [k, c] : p.terms()) {
    Rational a = c;
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    first = false;
    Rational mag = a < 0 ? Rational(-a) : a;
    bool unit = mag == 1 && (k.first + k.second) > 0;
    if (!unit) os << to_string(mag);
    auto var = [&](const char* name, int e, bool lead) {
      if (e == 0) return;
      if (!lead) os << "*";
      os << name;
      if (e > 1) os << "^" << e;
    };
    var("x", k.first, unit);
    var("y", k.second, unit && k.first == 0);
  }
  return os.str();
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_BIPOLY_HPP
