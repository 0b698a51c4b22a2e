#pragma once
/// @file sphere_oracle.hpp
/// Closed-form Neumann and Beltrami fields on the unit ball, built from
/// Dirichlet eigenfunctions u = j_n(k r) Y_n^m with j_n(k) = 0:
///
///     E = x x grad u,   H = curl E / (i k),   B = E + s i H,  curl B = s k B.
///
/// Real spherical harmonics are orthonormal on the unit sphere and carry no
/// Condon-Shortley phase. Nothing here touches the boundary-integral code.

#include "beltrami/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace beltrami {

// ---------------------------------------------------------------------------
// Spherical Bessel functions
// ---------------------------------------------------------------------------

/// j_l(x) for l = 0..n, x > 0. Upward recurrence when x > n, otherwise
/// Miller's downward recurrence normalized by j_0.
inline std::vector<double> spherical_bessel_all(int n, double x) {
  if (n < 0) throw std::invalid_argument("spherical_bessel: n must be >= 0");
  if (!(x > 0.0)) throw std::invalid_argument("spherical_bessel: x must be > 0");
  std::vector<double> j(static_cast<std::size_t>(n) + 1);
  const double j0 = std::sin(x) / x;
  if (x > static_cast<double>(n)) {
    j[0] = j0;
    if (n >= 1) j[1] = std::sin(x) / (x * x) - std::cos(x) / x;
    for (int l = 1; l < n; ++l) {
      j[static_cast<std::size_t>(l) + 1] = (2.0 * l + 1.0) / x * j[static_cast<std::size_t>(l)] - j[static_cast<std::size_t>(l) - 1];
    }
    return j;
  }
  const int start = n + 30 + static_cast<int>(std::sqrt(40.0 * (n + 1)));
  double above = 0.0, cur = 1e-300;
  for (int l = start; l > 0; --l) {
    const double below = (2.0 * l + 1.0) / x * cur - above;
    above = cur;
    cur = below;
    if (l - 1 <= n) j[static_cast<std::size_t>(l) - 1] = cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      above *= 1e-250;
      for (int i = l - 1; i <= n; ++i) j[static_cast<std::size_t>(i)] *= 1e-250;
    }
  }
  const double scale = j0 / j[0];
  for (double& v : j) v *= scale;
  return j;
}

inline double spherical_bessel(int n, double x) { return spherical_bessel_all(n, x).back(); }

/// j_n and its first two derivatives at x > 0.
struct BesselJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline BesselJet spherical_bessel_jet(int n, double x) {
  const std::vector<double> j = spherical_bessel_all(n + 1, x);
  BesselJet b;
  b.value = j[static_cast<std::size_t>(n)];
  // j_n' = (n / x) j_n - j_{n+1}
  b.d1 = n / x * b.value - j[static_cast<std::size_t>(n) + 1];
  // x^2 j'' + 2 x j' + (x^2 - n(n+1)) j = 0
  b.d2 = -(2.0 * x * b.d1 + (x * x - n * (n + 1.0)) * b.value) / (x * x);
  return b;
}

/// index-th positive zero of j_n (index >= 1): sign-change scan, bisection,
/// then a Newton polish.
inline double bessel_zero(int n, int index) {
  if (n < 0 || index < 1) throw std::invalid_argument("bessel_zero: need n >= 0 and index >= 1");
  constexpr double step = 0.05;
  double a = 0.5 * step;
  double fa = spherical_bessel(n, a);
  int found = 0;
  for (;;) {
    const double b = a + step;
    const double fb = spherical_bessel(n, b);
    if (fa == 0.0 || fa * fb < 0.0) {
      if (++found == index) {
        double lo = a, hi = b, flo = fa;
        if (fa == 0.0) return a;
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = spherical_bessel(n, mid);
          if (fm == 0.0) return mid;
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 3; ++it) {
          const BesselJet jet = spherical_bessel_jet(n, x);
          if (jet.d1 == 0.0) break;
          const double nx = x - jet.value / jet.d1;
          if (!(nx > lo - step && nx < hi + step)) break;
          x = nx;
        }
        return x;
      }
    }
    a = b;
    fa = fb;
  }
}

// ---------------------------------------------------------------------------
// Real solid harmonics with gradients (forward-mode dual numbers)
// ---------------------------------------------------------------------------

/// Value plus gradient in R^3.
struct Dual3 {
  double v = 0.0;
  Vec3 d = Vec3::Zero();

  static Dual3 constant(double c) { return {c, Vec3::Zero()}; }
  static Dual3 coordinate(const Vec3& x, int i) {
    Dual3 r{x(i), Vec3::Zero()};
    r.d(i) = 1.0;
    return r;
  }
};

inline Dual3 operator+(const Dual3& a, const Dual3& b) { return {a.v + b.v, a.d + b.d}; }
inline Dual3 operator-(const Dual3& a, const Dual3& b) { return {a.v - b.v, a.d - b.d}; }
inline Dual3 operator*(const Dual3& a, const Dual3& b) { return {a.v * b.v, a.v * b.d + b.v * a.d}; }
inline Dual3 operator*(double c, const Dual3& a) { return {c * a.v, c * a.d}; }

inline double factorial_ratio(int lo, int hi) {
  // (hi)! / (lo)! for hi >= lo
  double r = 1.0;
  for (int i = lo + 1; i <= hi; ++i) r *= i;
  return r;
}

/// R_n^m(x) = |x|^n Y_n^m(x / |x|) and its gradient. Real orthonormal
/// harmonics: m > 0 uses cos(m phi), m < 0 uses sin(|m| phi).
inline Dual3 solid_harmonic(int n, int m, const Vec3& x) {
  if (n < 0 || std::abs(m) > n) throw std::invalid_argument("solid_harmonic: need |m| <= n");
  const int am = std::abs(m);
  const Dual3 X = Dual3::coordinate(x, 0), Y = Dual3::coordinate(x, 1), Z = Dual3::coordinate(x, 2);
  const Dual3 r2 = X * X + Y * Y + Z * Z;
  // (x + i y)^|m| split into real and imaginary parts
  Dual3 re = Dual3::constant(1.0), im = Dual3::constant(0.0);
  for (int i = 0; i < am; ++i) {
    const Dual3 nre = X * re - Y * im;
    const Dual3 nim = X * im + Y * re;
    re = nre;
    im = nim;
  }
  // z-polynomial part: r^l P_l^|m|(cos theta) / sin^|m| theta, by recurrence in l
  double dfact = 1.0;
  for (int i = 1; i <= 2 * am - 1; i += 2) dfact *= i;
  Dual3 pm2 = Dual3::constant(0.0);
  Dual3 pm1 = Dual3::constant(dfact);
  for (int l = am + 1; l <= n; ++l) {
    const Dual3 next = (1.0 / (l - am)) * ((2.0 * l - 1.0) * (Z * pm1) - (l + am - 1.0) * (r2 * pm2));
    pm2 = pm1;
    pm1 = next;
  }
  const double norm = std::sqrt((2.0 * n + 1.0) / (4.0 * kPi) / factorial_ratio(n - am, n + am));
  if (m == 0) return norm * pm1;
  return (std::sqrt(2.0) * norm) * (pm1 * (m > 0 ? re : im));
}

// ---------------------------------------------------------------------------
// Ball eigenfields
// ---------------------------------------------------------------------------

struct BallFieldValue {
  CVec3 E = CVec3::Zero();
  CVec3 H = CVec3::Zero();
  /// Set for degree 0, where E vanishes identically.
  bool trivial = false;
};

/// Neumann pair from u = j_n(k r) Y_n^m, k the zero_index-th zero of j_n.
class BallEigenfield {
 public:
  BallEigenfield(int n, int m_order, int zero_index)
      : BallEigenfield(n, m_order, zero_index >= 1 && n >= 0 ? bessel_zero(n, zero_index) : -1.0) {}

  /// Explicit wavenumber; used for negative controls with k not a zero.
  static BallEigenfield with_wavenumber(int n, int m_order, double k) { return BallEigenfield(n, m_order, k); }

  int degree() const { return n_; }
  int order() const { return m_; }
  double k() const { return k_; }

  /// u at x (for orthogonality and boundary checks).
  double potential(const Vec3& x) const {
    const double r = x.norm();
    if (!(r > 0.0)) throw std::invalid_argument("BallEigenfield: x must be nonzero");
    return spherical_bessel(n_, k_ * r) / std::pow(r, n_) * solid_harmonic(n_, m_, x).v;
  }

  BallFieldValue evaluate(const Vec3& x) const {
    const double r = x.norm();
    if (!(r > 0.0)) throw std::invalid_argument("BallEigenfield: x must be nonzero");
    BallFieldValue out;
    if (n_ == 0) {
      out.trivial = true;
      return out;
    }
    const Dual3 R = solid_harmonic(n_, m_, x);
    const Vec3 xhat = x / r;
    const BesselJet j = spherical_bessel_jet(n_, k_ * r);
    const double rn = std::pow(r, n_);
    // u = f(r) R(x), f = j_n(k r) / r^n
    const double f = j.value / rn;
    const double fp = k_ * j.d1 / rn - n_ * j.value / (rn * r);
    const Vec3 grad_u = fp * R.v * xhat + f * R.d;
    // w = d/dr (r u) = g(r) R(x), g = (j_n + k r j_n') / r^n
    const double kr = k_ * r;
    const double gnum = j.value + kr * j.d1;
    const double gnum_p = k_ * (2.0 * j.d1 + kr * j.d2);
    const double g = gnum / rn;
    const double gp = gnum_p / rn - n_ * gnum / (rn * r);
    const Vec3 grad_w = gp * R.v * xhat + g * R.d;
    const double u = f * R.v;
    // curl (x x grad u) = x lap u - grad(d/dr (r u)),  lap u = -k^2 u
    const Vec3 curlE = -k_ * k_ * u * x - grad_w;
    out.E = x.cross(grad_u).cast<cplx>();
    out.H = curlE.cast<cplx>() / (kI * k_);
    return out;
  }

 private:
  BallEigenfield(int n, int m_order, double k) : n_(n), m_(m_order), k_(k) {
    if (n < 0 || std::abs(m_order) > n) throw std::invalid_argument("BallEigenfield: need |m_order| <= n");
    if (!(k > 0.0)) throw std::invalid_argument("BallEigenfield: k must be positive");
  }

  int n_;
  int m_;
  double k_;
};

inline BallFieldValue ball_field(int n, int m_order, int zero_index, const Vec3& x) {
  return BallEigenfield(n, m_order, zero_index).evaluate(x);
}

/// B = E + sign i H with curl B = sign k B.
inline CVec3 ball_beltrami(const BallEigenfield& f, int sign, const Vec3& x) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("ball_beltrami: sign must be +1 or -1");
  const BallFieldValue v = f.evaluate(x);
  return v.E + static_cast<double>(sign) * kI * v.H;
}

inline CVec3 ball_beltrami(int n, int m_order, int zero_index, int sign, const Vec3& x) {
  return ball_beltrami(BallEigenfield(n, m_order, zero_index), sign, x);
}

/// Curl by fourth-order central differences of a vector field.
template <class F>
CVec3 fd_curl(F&& field, const Vec3& x, double h) {
  Eigen::Matrix3cd J;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e(j) = h;
    J.col(j) = (8.0 * (field(x + e) - field(x - e)) - (field(x + 2.0 * e) - field(x - 2.0 * e))) / (12.0 * h);
  }
  return {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)};
}

template <class F>
cplx fd_divergence(F&& field, const Vec3& x, double h) {
  cplx div = 0.0;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e(j) = h;
    div += ((8.0 * (field(x + e) - field(x - e)) - (field(x + 2.0 * e) - field(x - 2.0 * e))) / (12.0 * h))(j);
  }
  return div;
}

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

/// Deterministic points with |x| in [r_lo, r_hi].
inline std::vector<Vec3> ball_sample_points(int count, double r_lo, double r_hi, unsigned seed = 7) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double zc = 1.0 - 2.0 * (i + 0.5) / count;
    const double s = std::sqrt(1.0 - zc * zc);
    const double ph = golden * i + 0.1 * seed;
    const double r = r_lo + (r_hi - r_lo) * std::fmod(0.618033988749895 * (i + seed), 1.0);
    pts.emplace_back(r * s * std::cos(ph), r * s * std::sin(ph), r * zc);
  }
  return pts;
}

struct SphereCheck {
  int n = 0;
  int m_order = 0;
  int zero_index = 0;
  double k = 0.0;
  double boundary_E = 0.0;        ///< max |E| on |x| = 1 relative to max |E| inside
  double boundary_nH = 0.0;       ///< max |n . H| on |x| = 1 relative to max |H| inside
  double beltrami_curl = 0.0;     ///< max over sign of max |curl B - s k B| / max |B|
  double divergence = 0.0;        ///< max |div E| / max |E|
};

/// Checks for one (n, m_order, zero_index). `k_override` > 0 replaces the
/// Bessel zero (negative control).
inline SphereCheck sphere_check(int n, int m_order, int zero_index, double k_override = 0.0, int points = 50) {
  SphereCheck c;
  c.n = n;
  c.m_order = m_order;
  c.zero_index = zero_index;
  c.k = k_override > 0.0 ? k_override : bessel_zero(n, zero_index);
  const BallEigenfield f = BallEigenfield::with_wavenumber(n, m_order, c.k);
  const std::vector<Vec3> inner = ball_sample_points(points, 0.2, 0.85);
  double emax = 0.0, hmax = 0.0;
  for (const Vec3& x : inner) {
    const BallFieldValue v = f.evaluate(x);
    emax = std::max(emax, v.E.norm());
    hmax = std::max(hmax, v.H.norm());
  }
  for (const Vec3& x : ball_sample_points(200, 1.0, 1.0)) {
    const Vec3 xs = x / x.norm();
    const BallFieldValue v = f.evaluate(xs);
    c.boundary_E = std::max(c.boundary_E, v.E.norm() / emax);
    c.boundary_nH = std::max(c.boundary_nH, std::abs(along(v.H, xs)) / hmax);
  }
  for (int sign : {1, -1}) {
    auto B = [&](const Vec3& y) { return ball_beltrami(f, sign, y); };
    double num = 0.0, den = 0.0;
    for (const Vec3& x : inner) {
      const CVec3 b = B(x);
      num = std::max(num, (fd_curl(B, x, 1e-3) - static_cast<double>(sign) * c.k * b).norm());
      den = std::max(den, b.norm());
    }
    c.beltrami_curl = std::max(c.beltrami_curl, num / den);
  }
  auto E = [&](const Vec3& y) { return f.evaluate(y).E; };
  double dnum = 0.0;
  for (const Vec3& x : inner) dnum = std::max(dnum, std::abs(fd_divergence(E, x, 1e-3)));
  c.divergence = dnum / emax;
  return c;
}

}  // namespace beltrami
