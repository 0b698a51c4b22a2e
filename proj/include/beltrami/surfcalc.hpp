#pragma once
/// @file surfcalc.hpp
/// Per-mode calculus on a surface of revolution. A modal scalar holds the
/// grid samples of r(phi) for the field r(phi) e^{i m theta}; a modal
/// tangent field holds physical components along theta_hat (a) and
/// phi_hat (b).

#include "beltrami/geometry.hpp"
#include "beltrami/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace beltrami {

struct ModalScalar {
  int m = 0;
  Eigen::VectorXcd values;
};

struct ModalTangentField {
  int m = 0;
  Eigen::VectorXcd a;  ///< theta_hat component
  Eigen::VectorXcd b;  ///< phi_hat component

  static ModalTangentField zero(int m, int n) {
    return {m, Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n)};
  }
};

/// Weighted mean with areal weights rho * sigma.
inline cplx areal_mean(const BoundaryGrid& g, const Eigen::VectorXcd& v) {
  const Eigen::VectorXd w = g.areal_weights();
  return w.cast<cplx>().dot(v) / w.sum();
}

/// Weighted inner product <f, g> = sum h rho sigma conj(f) g.
inline cplx areal_inner(const BoundaryGrid& g, const Eigen::VectorXcd& f, const Eigen::VectorXcd& v) {
  return (g.areal_weights().cast<cplx>().array() * f.conjugate().array() * v.array()).sum();
}

/// Matrices (G_theta, G_phi) with grad(r e^{i m theta}) = (G_theta r, G_phi r).
struct GradientMatrices {
  Eigen::MatrixXcd theta;
  Eigen::MatrixXcd phi;
};

inline GradientMatrices surface_gradient_matrices(const BoundaryGrid& g, int m) {
  const Eigen::VectorXd rho = g.rho();
  const Eigen::VectorXd sigma = g.sigma();
  GradientMatrices G;
  G.theta = (kI * static_cast<double>(m) * rho.cwiseInverse().cast<cplx>()).asDiagonal();
  G.phi = (sigma.cwiseInverse().asDiagonal() * fourier_diff_matrix(g.n)).cast<cplx>();
  return G;
}

inline ModalTangentField surface_gradient(const BoundaryGrid& g, const ModalScalar& r) {
  const auto G = surface_gradient_matrices(g, r.m);
  return {r.m, G.theta * r.values, G.phi * r.values};
}

inline ModalTangentField surface_gradient(const SurfaceOfRevolution& s, const ModalScalar& r) {
  return surface_gradient(make_grid(s, static_cast<int>(r.values.size())), r);
}

/// n_hat x v: (a, b) -> (-b, a).
inline ModalTangentField rotate90(const ModalTangentField& v) { return {v.m, -v.b, v.a}; }

inline ModalTangentField rotate90(const SurfaceOfRevolution&, const ModalTangentField& v) { return rotate90(v); }

/// Surface divergence of (a theta_hat + b phi_hat) e^{i m theta}.
inline Eigen::VectorXcd surface_divergence(const BoundaryGrid& g, const ModalTangentField& v) {
  const Eigen::VectorXd rho = g.rho();
  const Eigen::VectorXd sigma = g.sigma();
  const Eigen::VectorXcd rb = rho.cast<cplx>().cwiseProduct(v.b);
  const Eigen::VectorXcd d = fourier_diff_matrix(g.n).cast<cplx>() * rb;
  return (kI * static_cast<double>(v.m) * v.a.cwiseQuotient(rho.cast<cplx>())) +
         d.cwiseQuotient((rho.cwiseProduct(sigma)).cast<cplx>());
}

/// Delta_m r = (rho sigma)^{-1} d/dphi((rho / sigma) dr/dphi) - m^2 r / rho^2,
/// collocated in the expanded form (rho / sigma) D2 + (rho / sigma)' D. The
/// product D diag(.) D would also annihilate the Nyquist mode (-1)^j.
inline Eigen::MatrixXcd laplace_beltrami_matrix(const BoundaryGrid& g, int m) {
  const Eigen::VectorXd rho = g.rho();
  const Eigen::VectorXd sigma = g.sigma();
  const Eigen::MatrixXd D = fourier_diff_matrix(g.n);
  const Eigen::VectorXd coef = rho.cwiseQuotient(sigma);
  Eigen::VectorXd coef_d(g.n);
  for (int i = 0; i < g.n; ++i) {
    const CurvePoint& c = g.nodes[static_cast<std::size_t>(i)];
    const double sig = c.sigma();
    const double sig_d = (c.rho_d * c.rho_dd + c.z_d * c.z_dd) / sig;
    coef_d(i) = (c.rho_d * sig - c.rho * sig_d) / (sig * sig);
  }
  Eigen::MatrixXd L = coef.asDiagonal() * fourier_diff2_matrix(g.n) + coef_d.asDiagonal() * D;
  L = rho.cwiseProduct(sigma).cwiseInverse().asDiagonal() * L;
  L.diagonal() -= static_cast<double>(m * m) * rho.cwiseAbs2().cwiseInverse();
  return L.cast<cplx>();
}

inline Eigen::MatrixXcd laplace_beltrami_matrix(const SurfaceOfRevolution& s, int m, int n) {
  return laplace_beltrami_matrix(make_grid(s, n), m);
}

/// Matrix of the partial inverse R0. For m = 0 the bordered system
/// [Delta_0, 1; w^T, 0] is solved: the output has zero areal mean and the
/// multiplier absorbs the mean of the input.
inline Eigen::MatrixXcd r0_matrix(const BoundaryGrid& g, int m) {
  const int n = g.n;
  const Eigen::MatrixXcd L = laplace_beltrami_matrix(g, m);
  if (m != 0) return L.partialPivLu().inverse();
  const Eigen::VectorXd w = g.areal_weights();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = L;
  B.topRightCorner(n, 1).setOnes();
  B.bottomLeftCorner(1, n) = w.transpose().cast<cplx>();
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n + 1, n);
  rhs.topRows(n).setIdentity();
  const Eigen::MatrixXcd sol = B.partialPivLu().solve(rhs);
  return sol.topRows(n);
}

/// Applies R0. Mode 0 requires areal mean zero (relative tolerance 1e-10).
inline ModalScalar R0_apply(const BoundaryGrid& g, const ModalScalar& r) {
  if (r.m == 0) {
    const double scale = std::max(1.0, r.values.cwiseAbs().maxCoeff());
    if (std::abs(areal_mean(g, r.values)) > 1e-10 * scale) {
      throw std::invalid_argument("R0_apply: mode-0 input must have zero areal mean");
    }
  }
  return {r.m, r0_matrix(g, r.m) * r.values};
}

inline ModalScalar R0_apply(const SurfaceOfRevolution& s, const ModalScalar& r) {
  return R0_apply(make_grid(s, static_cast<int>(r.values.size())), r);
}

}  // namespace beltrami
