#pragma once
/// @file geometry.hpp
/// Axisymmetric boundary surfaces: generating curves, local frames, the
/// harmonic tangent-field basis and the A/B homology cycles.
///
/// A surface of revolution is swept by rotating the generating curve
/// (rho(phi), z(phi)) about the z-axis:
///
///     x(theta, phi) = (rho cos(theta), rho sin(theta), z).
///
/// The frame is (theta_hat, phi_hat, n_hat) with theta_hat x phi_hat = n_hat,
/// and n_hat points out of the enclosed solid for curves traversed
/// counter-clockwise in the (rho, z) half plane.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace beltrami {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Bilinear component v . axis. Eigen's dot() conjugates its left operand.
inline cplx along(const CVec3& v, const Vec3& axis) {
  return v(0) * axis(0) + v(1) * axis(1) + v(2) * axis(2);
}

/// Bilinear cross product. Eigen's cross() conjugates complex results.
inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0)};
}

/// Generating-curve sample with first and second derivatives in phi.
struct CurvePoint {
  double phi = 0.0;
  double rho = 0.0;
  double z = 0.0;
  double rho_d = 0.0;
  double z_d = 0.0;
  double rho_dd = 0.0;
  double z_dd = 0.0;

  double sigma() const { return std::hypot(rho_d, z_d); }
};

/// Closed, 2*pi-periodic generating curve with analytic derivatives.
///
/// Curves are supplied as callables; no numerical differentiation is done
/// anywhere on the boundary.
struct SurfaceOfRevolution {
  std::function<double(double)> rho;
  std::function<double(double)> z;
  std::function<double(double)> rho_d;
  std::function<double(double)> z_d;
  std::function<double(double)> rho_dd;
  std::function<double(double)> z_dd;
  /// Torus major radius when the surface came from make_torus, else 0.
  double torus_offset = 0.0;

  CurvePoint sample(double phi) const {
    return CurvePoint{phi,       rho(phi),   z(phi),    rho_d(phi),
                      z_d(phi),  rho_dd(phi), z_dd(phi)};
  }

  double sigma(double phi) const { return std::hypot(rho_d(phi), z_d(phi)); }

  Vec3 position(double theta, double phi) const {
    const double r = rho(phi);
    return {r * std::cos(theta), r * std::sin(theta), z(phi)};
  }

  bool is_torus() const { return torus_offset > 0.0; }
};

/// Builds a surface from user-supplied callables after checking that the
/// curve stays off the axis and is regular on a sampling grid.
inline SurfaceOfRevolution make_surface(std::function<double(double)> rho,
                                        std::function<double(double)> z,
                                        std::function<double(double)> rho_d,
                                        std::function<double(double)> z_d,
                                        std::function<double(double)> rho_dd,
                                        std::function<double(double)> z_dd) {
  SurfaceOfRevolution s{std::move(rho), std::move(z),      std::move(rho_d),
                        std::move(z_d), std::move(rho_dd), std::move(z_dd),
                        0.0};
  constexpr int kChecks = 512;
  for (int i = 0; i < kChecks; ++i) {
    const double phi = kTwoPi * i / kChecks;
    if (!(s.rho(phi) > 0.0)) {
      throw std::invalid_argument("generating curve touches or crosses the axis (rho <= 0)");
    }
    if (!(s.sigma(phi) > 0.0)) {
      throw std::invalid_argument("generating curve is singular (sigma == 0)");
    }
  }
  return s;
}

/// Torus with unit generating circle: rho = major_offset + cos(phi), z = sin(phi).
inline SurfaceOfRevolution make_torus(double major_offset) {
  if (!(major_offset > 1.0)) {
    throw std::invalid_argument("make_torus: major_offset must exceed 1");
  }
  const double R = major_offset;
  SurfaceOfRevolution s{
      [R](double p) { return R + std::cos(p); },
      [](double p) { return std::sin(p); },
      [](double p) { return -std::sin(p); },
      [](double p) { return std::cos(p); },
      [](double p) { return -std::cos(p); },
      [](double p) { return -std::sin(p); },
      R};
  return s;
}

struct FrameSample {
  Vec3 position;
  Vec3 theta_hat;
  Vec3 phi_hat;
  Vec3 n_hat;
  double rho = 0.0;
  double sigma = 0.0;
  /// Area element per unit dtheta dphi (rho * sigma).
  double areal = 0.0;
};

inline FrameSample frame_at(const CurvePoint& c, double theta) {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double sig = c.sigma();
  FrameSample f;
  f.position = {c.rho * ct, c.rho * st, c.z};
  f.theta_hat = {-st, ct, 0.0};
  f.phi_hat = Vec3{c.rho_d * ct, c.rho_d * st, c.z_d} / sig;
  f.n_hat = Vec3{c.z_d * ct, c.z_d * st, -c.rho_d} / sig;
  f.rho = c.rho;
  f.sigma = sig;
  f.areal = c.rho * sig;
  return f;
}

inline FrameSample frame_at(const SurfaceOfRevolution& s, double theta, double phi) {
  return frame_at(s.sample(phi), theta);
}

/// Harmonic tangent fields jH1 = theta_hat / rho and jH2 = phi_hat / rho.
/// jH2 = n_hat x jH1.
inline std::pair<Vec3, Vec3> harmonic_basis_at(const SurfaceOfRevolution& s, double theta,
                                               double phi) {
  const FrameSample f = frame_at(s, theta, phi);
  return {f.theta_hat / f.rho, f.phi_hat / f.rho};
}

enum class CycleKind { A, B };

struct CycleNode {
  Vec3 position;
  Vec3 tangent;
  double line_element = 0.0;
};

/// A: the meridian at theta = 0 (bounds a disk inside the solid).
/// B: the parallel at phi = pi (bounds a disk in the complement for a torus).
struct Cycle {
  CycleKind kind = CycleKind::A;
  std::vector<CycleNode> nodes;

  double length() const {
    double total = 0.0;
    for (const auto& nd : nodes) total += nd.line_element;
    return total;
  }
};

inline Cycle cycle_nodes(const SurfaceOfRevolution& s, CycleKind kind, int n) {
  if (n < 8) throw std::invalid_argument("cycle_nodes: need at least 8 nodes");
  Cycle cyc;
  cyc.kind = kind;
  cyc.nodes.reserve(static_cast<std::size_t>(n));
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    const double u = h * i;
    if (kind == CycleKind::A) {
      const FrameSample f = frame_at(s, 0.0, u);
      cyc.nodes.push_back({f.position, f.phi_hat, f.sigma * h});
    } else {
      const FrameSample f = frame_at(s, u, kPi);
      cyc.nodes.push_back({f.position, f.theta_hat, f.rho * h});
    }
  }
  return cyc;
}

/// Uniform periodic grid phi_i = 2*pi*i/n on the generating curve.
struct BoundaryGrid {
  int n = 0;
  double h = 0.0;
  std::vector<CurvePoint> nodes;

  Eigen::VectorXd rho() const { return collect([](const CurvePoint& c) { return c.rho; }); }
  Eigen::VectorXd sigma() const { return collect([](const CurvePoint& c) { return c.sigma(); }); }
  /// Trapezoid area weights h * rho * sigma (per unit dtheta).
  Eigen::VectorXd areal_weights() const {
    return collect([this](const CurvePoint& c) { return h * c.rho * c.sigma(); });
  }

 private:
  template <class F>
  Eigen::VectorXd collect(F&& f) const {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = f(nodes[static_cast<std::size_t>(i)]);
    return v;
  }
};

inline BoundaryGrid make_grid(const SurfaceOfRevolution& s, int n) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("make_grid: n must be even and >= 4");
  BoundaryGrid g;
  g.n = n;
  g.h = kTwoPi / n;
  g.nodes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g.nodes.push_back(s.sample(g.h * i));
  return g;
}

}  // namespace beltrami
