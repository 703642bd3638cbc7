#ifndef SPHEREFORGE_IWASAWA_HPP
#define SPHEREFORGE_IWASAWA_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "sphereforge/loop.hpp"

namespace sphereforge {

class IwasawaError : public std::runtime_error {
 public:
  IwasawaError(const std::string& what, double condition)
      : std::runtime_error(what + " (condition estimate " + std::to_string(condition) + ")"), condition_(condition)
  {
  }
  double condition() const { return condition_; }

 private:
  double condition_;
};

struct IwasawaFactors {
  LaurentLoop unitary_part;
  LaurentLoop plus_part;
  double rho = 1;
  // |B_0(0,1)|: zero in exact arithmetic for twisted input.
  double b0_offdiag = 0;
};

struct IwasawaOptions {
  double tol_det = 1e-8;
  // Block size of the finite Toeplitz section; 0 picks 2d+2.
  int section = 0;
  bool check_det = true;
};

namespace detail {

inline double toeplitz_condition(const Eigen::MatrixXcd& t)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double lo = ev.minCoeff();
  double hi = ev.maxCoeff();
  return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

inline void project_twist(LaurentLoop& l)
{
  for (int n = -l.degree(); n <= l.degree(); ++n) {
    Mat2& c = l[n];
    if (n % 2 == 0) {
      c(0, 1) = 0;
      c(1, 0) = 0;
    } else {
      c(0, 0) = 0;
      c(1, 1) = 0;
    }
  }
}

}  // namespace detail

/// Phi = F B with F unitary on |lambda| = 1 and B holomorphic in the disc,
/// B_0 upper triangular with positive diagonal.
///
/// The circle symbol G = Phi^* Phi = B^* B is factored through its block
/// Toeplitz matrix: with C = B^{-1}, T [C_0 .. C_n]^T C_0^* = e_0.
inline IwasawaFactors iwasawa_factor(const LaurentLoop& phi, const IwasawaOptions& opt = {})
{
  const int d = phi.degree();
  const int samples = default_sample_count(d);
  if (opt.check_det) {
    for (int k = 0; k < samples; ++k) {
      Mat2 v = loop_eval(phi, circle_sample(k, samples));
      if (!is_special(v, opt.tol_det)) throw IwasawaError("loop is not special on the circle", std::abs(v.determinant()));
    }
  }

  const int nb = opt.section > 0 ? opt.section : 2 * d + 2;
  // G_k = sum_m Phi_m^* Phi_{m+k}, |k| <= 2d.
  std::vector<Mat2> g(static_cast<std::size_t>(4 * d + 1), Mat2::Zero());
  for (int k = -2 * d; k <= 2 * d; ++k) {
    Mat2 acc = Mat2::Zero();
    for (int m = std::max(-d, -d - k); m <= std::min(d, d - k); ++m) acc.noalias() += phi[m].adjoint() * phi[m + k];
    g[static_cast<std::size_t>(k + 2 * d)] = acc;
  }
  auto gk = [&](int k) -> Mat2 { return std::abs(k) <= 2 * d ? g[static_cast<std::size_t>(k + 2 * d)] : Mat2::Zero(); };

  Eigen::MatrixXcd t(2 * nb, 2 * nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) t.block<2, 2>(2 * i, 2 * j) = gk(i - j);

  Eigen::LLT<Eigen::MatrixXcd> llt(t);
  if (llt.info() != Eigen::Success) throw IwasawaError("Gram symbol is not positive definite", detail::toeplitz_condition(t));
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(2 * nb, 2);
  rhs.topRows<2>().setIdentity();
  Eigen::MatrixXcd x = llt.solve(rhs);

  // X_0 = C_0 C_0^* with C_0 upper triangular, positive diagonal.
  Mat2 x0 = x.topRows<2>();
  double p = x0(0, 0).real();
  cplx q = x0(0, 1);
  double r = x0(1, 1).real();
  if (!(r > 0)) throw IwasawaError("degenerate Toeplitz solution", detail::toeplitz_condition(t));
  double gamma = std::sqrt(r);
  cplx beta = q / gamma;
  double a2 = p - std::norm(beta);
  if (!(a2 > 0)) throw IwasawaError("degenerate Toeplitz solution", detail::toeplitz_condition(t));
  Mat2 c0;
  c0 << std::sqrt(a2), beta, 0, gamma;
  Mat2 c0_adj_inv = c0.adjoint().inverse();

  const int cd = std::min(nb - 1, d);
  LaurentLoop c(d, phi.parity());
  for (int k = 0; k <= cd; ++k) c[k] = x.block<2, 2>(2 * k, 0) * c0_adj_inv;
  c[0] = c0;

  IwasawaFactors out;
  out.b0_offdiag = std::abs(c0(0, 1)) / (c0(0, 0).real() * c0(1, 1).real());

  // B = C^{-1} as a power series.
  LaurentLoop b(d, phi.parity());
  Mat2 c0_inv = c0.inverse();
  b[0] = c0_inv;
  for (int k = 1; k <= d; ++k) {
    Mat2 acc = Mat2::Zero();
    for (int j = 1; j <= k; ++j) acc.noalias() += c[j] * b[k - j];
    b[k] = -c0_inv * acc;
  }

  // The plus part of the full product Phi C is needed only up to degree d.
  LaurentLoop f = loop_mul(phi, c, d);
  if (phi.parity() == Parity::Twisted) {
    detail::project_twist(f);
    detail::project_twist(b);
  }
  out.unitary_part = std::move(f);
  out.plus_part = std::move(b);
  out.rho = out.plus_part[0](0, 0).real();
  return out;
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_IWASAWA_HPP
