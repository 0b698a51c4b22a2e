#pragma once
/// @file kernels.hpp
/// Helmholtz kernel and its azimuthal Fourier modes on surfaces of revolution.
///
/// Every modal kernel used by the solver is one component of a "ring
/// integral": a source ring at (rho_s, z_s) carrying density e^{i m theta}
/// seen from a target at azimuth 0. All sixteen components are produced in
/// one theta sweep.

#include "beltrami/geometry.hpp"
#include "beltrami/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace beltrami {

inline cplx helmholtz_g(const Vec3& x, const Vec3& y, cplx k) {
  const double r = (x - y).norm();
  if (r == 0.0) throw std::invalid_argument("helmholtz_g: coincident points");
  return std::exp(kI * k * r) / (4.0 * kPi * r);
}

/// Gradient of g_k(x, y) with respect to x.
inline CVec3 helmholtz_grad_x(const Vec3& x, const Vec3& y, cplx k) {
  const Vec3 d = x - y;
  const double r = d.norm();
  if (r == 0.0) throw std::invalid_argument("helmholtz_grad_x: coincident points");
  const cplx g = std::exp(kI * k * r) / (4.0 * kPi * r);
  const cplx g1 = g * (kI * k - 1.0 / r) / r;
  return g1 * d.cast<cplx>();
}

/// Source ring description (a generating-curve sample).
struct RingSource {
  double rho = 0.0;
  double z = 0.0;
  double rho_d = 0.0;
  double z_d = 0.0;
  double sigma = 1.0;

  static RingSource from(const CurvePoint& c) { return {c.rho, c.z, c.rho_d, c.z_d, c.sigma()}; }
};

/// theta-integrals of the kernel family against e^{i m theta}, target at
/// (rho_t, 0, z_t). Vectors are Cartesian at the target. Per unit dtheta of
/// source; multiply by rho_s * sigma_s * dphi for the area element.
struct RingIntegrals {
  cplx single{0.0};  ///< int g
  CVec3 grad = CVec3::Zero();     ///< int grad_x g
  CVec3 v_theta = CVec3::Zero();  ///< int g theta_hat_s
  CVec3 v_phi = CVec3::Zero();    ///< int g phi_hat_s
  CVec3 c_theta = CVec3::Zero();  ///< int grad_x g x theta_hat_s
  CVec3 c_phi = CVec3::Zero();    ///< int grad_x g x phi_hat_s

  using Packed = Eigen::Matrix<cplx, 16, 1>;

  Packed pack() const {
    Packed p;
    p << single, grad, v_theta, v_phi, c_theta, c_phi;
    return p;
  }
  static RingIntegrals unpack(const Packed& p) {
    RingIntegrals r;
    r.single = p(0);
    r.grad = p.segment<3>(1);
    r.v_theta = p.segment<3>(4);
    r.v_phi = p.segment<3>(7);
    r.c_theta = p.segment<3>(10);
    r.c_phi = p.segment<3>(13);
    return r;
  }
};

namespace detail {

struct RingGeometry {
  double rho_t, z_t;
  RingSource src;
  double drho, dz, delta;
};

inline RingGeometry ring_geometry(double rho_t, double z_t, const RingSource& src) {
  RingGeometry g{rho_t, z_t, src, rho_t - src.rho, z_t - src.z, 0.0};
  g.delta = std::hypot(g.drho, g.dz);
  return g;
}

/// Adds the contribution of the theta node pair (+theta, -theta).
inline void accumulate_pair(RingIntegrals& acc, const RingGeometry& geo, cplx k, int m,
                            double theta, double weight) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double sh = std::sin(0.5 * theta);
  const double one_minus_c = 2.0 * sh * sh;
  const RingSource& src = geo.src;
  const double r2 = geo.delta * geo.delta + 2.0 * geo.rho_t * src.rho * one_minus_c;
  const double r = std::sqrt(r2);
  const cplx g = std::exp(kI * k * r) / (4.0 * kPi * r);
  const cplx g1 = g * (kI * k - 1.0 / r) / r;
  const double cm = std::cos(m * theta);
  const double sm = std::sin(m * theta);
  const double dx = geo.drho + src.rho * one_minus_c;
  const double dz = geo.dz;
  for (int side = -1; side <= 1; side += 2) {
    const double ss = side * s;
    const cplx e(cm, side * sm);
    const cplx a = weight * e * g;
    const cplx b = weight * e * g1;
    const double dy = -src.rho * ss;
    const double tx = -ss, ty = c;  // theta_hat_s (tz = 0)
    const double px = src.rho_d * c / src.sigma;
    const double py = src.rho_d * ss / src.sigma;
    const double pz = src.z_d / src.sigma;
    acc.single += a;
    acc.grad += b * CVec3(dx, dy, dz);
    acc.v_theta += a * CVec3(tx, ty, 0.0);
    acc.v_phi += a * CVec3(px, py, pz);
    // d x theta_hat_s
    acc.c_theta += b * CVec3(-dz * ty, dz * tx, dx * ty - dy * tx);
    // d x phi_hat_s
    acc.c_phi += b * CVec3(dy * pz - dz * py, dz * px - dx * pz, dx * py - dy * px);
  }
}

}  // namespace detail

/// Ring integrals by Gauss-Legendre panels graded geometrically toward
/// theta = 0, where the 1/|x-y| near-singularity sits. The first panel has
/// the width of the near-singular scale delta / sqrt(rho_t rho_s).
inline RingIntegrals ring_integrals(double rho_t, double z_t, const RingSource& src, cplx k, int m) {
  const auto geo = detail::ring_geometry(rho_t, z_t, src);
  const double scale = geo.delta / std::sqrt(rho_t * src.rho);
  if (!(scale > 1e-13)) throw std::invalid_argument("ring_integrals: target lies on the source ring");
  const double reach = std::abs(k) * (rho_t + src.rho) + std::abs(m) + 1.0;
  const double max_width = std::min(kPi / 4.0, 10.0 / reach);
  const auto& gl = gauss_legendre_16();
  RingIntegrals acc;
  double lo = 0.0;
  double width = std::min(scale, max_width);
  while (lo < kPi) {
    const double hi = std::min(kPi, lo + width);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      detail::accumulate_pair(acc, geo, k, m, mid + half * gl.nodes[q], half * gl.weights[q]);
    }
    lo = hi;
    width = std::min(lo, max_width);
  }
  return acc;
}

/// Same integrals by globally adaptive G7-K15 over [-pi, 0] and [0, pi].
/// Independent of the panel grading; used as the validation oracle.
inline RingIntegrals ring_integrals_adaptive(double rho_t, double z_t, const RingSource& src,
                                             cplx k, int m, double tol = 1e-13) {
  const auto geo = detail::ring_geometry(rho_t, z_t, src);
  if (!(geo.delta > 0.0)) throw std::invalid_argument("ring_integrals_adaptive: coincident ring");
  auto f = [&](double theta) -> RingIntegrals::Packed {
    const Vec3 x(rho_t, 0.0, z_t);
    const double c = std::cos(theta), s = std::sin(theta);
    const Vec3 y(src.rho * c, src.rho * s, src.z);
    const cplx e = std::exp(kI * static_cast<double>(m) * theta);
    const cplx g = helmholtz_g(x, y, k) * e;
    const CVec3 gr = helmholtz_grad_x(x, y, k) * e;
    const Vec3 th(-s, c, 0.0);
    const Vec3 ph = Vec3(src.rho_d * c, src.rho_d * s, src.z_d) / src.sigma;
    RingIntegrals r;
    r.single = g;
    r.grad = gr;
    r.v_theta = g * th.cast<cplx>();
    r.v_phi = g * ph.cast<cplx>();
    r.c_theta = cross(gr, th.cast<cplx>());
    r.c_phi = cross(gr, ph.cast<cplx>());
    return r.pack();
  };
  const RingIntegrals::Packed lo = adaptive_gauss(f, -kPi, 0.0, tol, 60);
  const RingIntegrals::Packed hi = adaptive_gauss(f, 0.0, kPi, tol, 60);
  return RingIntegrals::unpack(lo + hi);
}

// ---------------------------------------------------------------------------
// Modal kernels on the surface
// ---------------------------------------------------------------------------

enum class FrameAxis { theta, phi, normal };

/// Which scalar kernel of the boundary operators is being reduced.
struct KernelKind {
  enum class Tag { single, grad_dot_ntarget, grad_component, single_vector_component, curl_component };
  Tag tag = Tag::single;
  int component = 0;                   // Cartesian index for grad_component
  FrameAxis target = FrameAxis::theta;  // target frame axis (vector kinds)
  FrameAxis source = FrameAxis::theta;  // source current direction (vector kinds)

  static KernelKind single() { return {}; }
  static KernelKind grad_dot_ntarget() { return {Tag::grad_dot_ntarget}; }
  static KernelKind grad_component(int i) { return {Tag::grad_component, i}; }
  static KernelKind single_vector_component(FrameAxis target, FrameAxis source) {
    return {Tag::single_vector_component, 0, target, source};
  }
  static KernelKind curl_component(FrameAxis target, FrameAxis source) {
    return {Tag::curl_component, 0, target, source};
  }
};

inline Vec3 frame_axis(const FrameSample& f, FrameAxis a) {
  switch (a) {
    case FrameAxis::theta: return f.theta_hat;
    case FrameAxis::phi: return f.phi_hat;
    case FrameAxis::normal: return f.n_hat;
  }
  return f.n_hat;
}

/// Selects one kernel component; the target frame is at azimuth 0.
inline cplx select_component(const RingIntegrals& r, const FrameSample& target, const KernelKind& kind) {
  auto source_vec = [&](const CVec3& v_th, const CVec3& v_ph) -> const CVec3& {
    if (kind.source == FrameAxis::normal) {
      throw std::invalid_argument("modal kernel: source currents are tangential");
    }
    return kind.source == FrameAxis::theta ? v_th : v_ph;
  };
  switch (kind.tag) {
    case KernelKind::Tag::single:
      return r.single;
    case KernelKind::Tag::grad_dot_ntarget:
      return along(r.grad, target.n_hat);
    case KernelKind::Tag::grad_component:
      if (kind.component < 0 || kind.component > 2) throw std::out_of_range("grad_component index");
      return r.grad(kind.component);
    case KernelKind::Tag::single_vector_component:
      return along(source_vec(r.v_theta, r.v_phi), frame_axis(target, kind.target));
    case KernelKind::Tag::curl_component:
      return along(source_vec(r.c_theta, r.c_phi), frame_axis(target, kind.target));
  }
  throw std::invalid_argument("modal kernel: unsupported kind");
}

/// Value of a modal kernel; off the diagonal `log_coefficient` is zero.
/// On the diagonal (split requested, single kind only) `value` is the
/// smooth remainder after removing log_coefficient * log(4 sin^2(dphi/2)).
struct ModalKernelValue {
  int m = 0;
  double phi_t = 0.0;
  double phi_s = 0.0;
  cplx value{0.0};
  double log_coefficient = 0.0;
};

/// Coefficient c(phi) of log(4 sin^2((phi_s - phi_t)/2)) in the single-layer
/// modal kernel. Independent of k and m.
inline double single_layer_log_coefficient(const SurfaceOfRevolution& s, double phi) {
  return -1.0 / (4.0 * kPi * s.rho(phi));
}

inline ModalKernelValue modal_kernel(const SurfaceOfRevolution& s, cplx k, int m, const KernelKind& kind,
                                     double phi_t, double phi_s, bool diagonal_split = false) {
  const double gap = std::remainder(phi_s - phi_t, kTwoPi);
  const FrameSample target = frame_at(s, 0.0, phi_t);
  if (std::abs(gap) < 1e-14) {
    if (!diagonal_split) throw std::invalid_argument("modal_kernel: diagonal requested without split flag");
    if (kind.tag != KernelKind::Tag::single) {
      throw std::invalid_argument("modal_kernel: diagonal split is available for the single-layer kind");
    }
    // Symmetric offsets cancel the odd (delta, delta log delta) terms.
    const double c = single_layer_log_coefficient(s, phi_t);
    const double d = 1e-4;
    const double logd = std::log(4.0 * std::pow(std::sin(0.5 * d), 2));
    cplx avg = 0.0;
    for (double sgn : {-1.0, 1.0}) {
      const RingIntegrals r = ring_integrals(target.rho, target.position.z(),
                                             RingSource::from(s.sample(phi_t + sgn * d)), k, m);
      avg += 0.5 * r.single;
    }
    return {m, phi_t, phi_s, avg - c * logd, c};
  }
  const RingIntegrals r = ring_integrals(target.rho, target.position.z(), RingSource::from(s.sample(phi_s)), k, m);
  return {m, phi_t, phi_s, select_component(r, target, kind), 0.0};
}

/// Reference block of modal kernel values K(phi_i, phi_j) on the n-point
/// grid by adaptive theta quadrature. Diagonal entries are left NaN.
inline Eigen::MatrixXcd brute_force_block(const SurfaceOfRevolution& s, cplx k, int m,
                                          const KernelKind& kind, int n, double tol = 1e-13) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Constant(n, n, cplx(nan, nan));
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    const FrameSample target = frame_at(s, 0.0, h * i);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const RingIntegrals r = ring_integrals_adaptive(target.rho, target.position.z(),
                                                      RingSource::from(s.sample(h * j)), k, m, tol);
      out(i, j) = select_component(r, target, kind);
    }
  }
  return out;
}

}  // namespace beltrami
