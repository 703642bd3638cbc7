#ifndef SPHEREFORGE_LOOP_HPP
#define SPHEREFORGE_LOOP_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sphereforge {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

enum class Parity { Twisted, Untwisted };

inline bool is_special(const Mat2& m, double tol_det) { return std::abs(m.determinant() - 1.0) <= tol_det; }

/// Truncated matrix Laurent series sum_{n=-d}^{d} C_n lambda^n.
class LaurentLoop {
 public:
  LaurentLoop() : LaurentLoop(0) {}
  explicit LaurentLoop(int degree, Parity parity = Parity::Twisted)
      : degree_(degree), parity_(parity), coeffs_(static_cast<std::size_t>(2 * degree + 1), Mat2::Zero())
  {
    if (degree < 0) throw std::invalid_argument("negative loop degree");
  }

  static LaurentLoop identity(int degree = 0)
  {
    LaurentLoop l(degree);
    l[0] = Mat2::Identity();
    return l;
  }
  static LaurentLoop constant(const Mat2& m, int degree = 0, Parity parity = Parity::Untwisted)
  {
    LaurentLoop l(degree, parity);
    l[0] = m;
    return l;
  }

  int degree() const { return degree_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  Mat2& operator[](int n) { return coeffs_[static_cast<std::size_t>(n + degree_)]; }
  const Mat2& operator[](int n) const { return coeffs_[static_cast<std::size_t>(n + degree_)]; }
  Mat2 coeff(int n) const { return std::abs(n) <= degree_ ? (*this)[n] : Mat2::Zero(); }

  bool has_negative_part() const
  {
    for (int n = -degree_; n < 0; ++n)
      if ((*this)[n].cwiseAbs().maxCoeff() > 0) return true;
    return false;
  }

  /// True when every coefficient obeys the twisted grading up to tol.
  bool respects_twist(double tol = 0) const
  {
    for (int n = -degree_; n <= degree_; ++n) {
      const Mat2& c = (*this)[n];
      double bad = (n % 2 == 0) ? std::max(std::abs(c(0, 1)), std::abs(c(1, 0)))
                                : std::max(std::abs(c(0, 0)), std::abs(c(1, 1)));
      if (bad > tol) return false;
    }
    return true;
  }

  LaurentLoop resized(int degree) const
  {
    LaurentLoop out(degree, parity_);
    for (int n = -std::min(degree, degree_); n <= std::min(degree, degree_); ++n) out[n] = (*this)[n];
    return out;
  }

  friend LaurentLoop operator+(const LaurentLoop& a, const LaurentLoop& b)
  {
    LaurentLoop out(std::max(a.degree_, b.degree_),
                    a.parity_ == Parity::Twisted && b.parity_ == Parity::Twisted ? Parity::Twisted
                                                                                 : Parity::Untwisted);
    for (int n = -out.degree_; n <= out.degree_; ++n) out[n] = a.coeff(n) + b.coeff(n);
    return out;
  }

 private:
  int degree_;
  Parity parity_;
  std::vector<Mat2> coeffs_;
};

/// Cauchy product truncated to out_degree (default: the larger input degree).
inline LaurentLoop loop_mul(const LaurentLoop& a, const LaurentLoop& b, int out_degree = -1)
{
  if (out_degree < 0) out_degree = std::max(a.degree(), b.degree());
  Parity parity =
      a.parity() == Parity::Twisted && b.parity() == Parity::Twisted ? Parity::Twisted : Parity::Untwisted;
  LaurentLoop out(out_degree, parity);
  for (int i = -a.degree(); i <= a.degree(); ++i) {
    const Mat2& ai = a[i];
    if (ai.isZero(0)) continue;
    int lo = std::max(-b.degree(), -out_degree - i);
    int hi = std::min(b.degree(), out_degree - i);
    for (int j = lo; j <= hi; ++j) out[i + j].noalias() += ai * b[j];
  }
  return out;
}

inline Mat2 loop_eval(const LaurentLoop& x, cplx lambda)
{
  if (lambda == cplx(0)) {
    if (x.has_negative_part()) throw std::domain_error("loop with negative powers evaluated at lambda = 0");
    return x[0];
  }
  // Horner in lambda for the plus part, in 1/lambda for the minus part.
  Mat2 plus = Mat2::Zero();
  for (int n = x.degree(); n >= 0; --n) plus = plus * lambda + x[n];
  Mat2 minus = Mat2::Zero();
  cplx inv = 1.0 / lambda;
  for (int n = -x.degree(); n <= -1; ++n) minus = (minus + x[n]) * inv;
  return plus + minus;
}

/// Unit-circle sample lambda_k = exp(2 pi i k / m).
inline cplx circle_sample(int k, int m)
{
  double t = 2.0 * std::numbers::pi * k / m;
  return {std::cos(t), std::sin(t)};
}

inline int default_sample_count(int degree) { return 4 * degree + 4; }

/// Spectral norm of a 2x2 matrix.
inline double norm2(const Mat2& m)
{
  Eigen::JacobiSVD<Mat2> svd(m);
  return svd.singularValues()(0);
}

/// max_k || X(lambda_k)^* X(lambda_k) - I ||_2 over `samples` circle points.
inline double unitarity_error(const LaurentLoop& x, int samples)
{
  if (samples < 4 * x.degree() + 1) throw std::invalid_argument("too few circle samples for loop degree");
  double err = 0;
  for (int k = 0; k < samples; ++k) {
    Mat2 v = loop_eval(x, circle_sample(k, samples));
    err = std::max(err, norm2(v.adjoint() * v - Mat2::Identity()));
  }
  return err;
}

/// max_k || a(lambda_k) - b(lambda_k) ||_2.
inline double circle_distance(const LaurentLoop& a, const LaurentLoop& b, int samples)
{
  double err = 0;
  for (int k = 0; k < samples; ++k) {
    cplx l = circle_sample(k, samples);
    err = std::max(err, norm2(loop_eval(a, l) - loop_eval(b, l)));
  }
  return err;
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_LOOP_HPP
