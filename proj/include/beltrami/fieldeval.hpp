#pragma once
/// @file fieldeval.hpp
/// Evaluation of the represented field inside the domain and the checks that
/// go with it: finite-difference curl and divergence, cycle circulation and
/// cross-section flux.

#include "beltrami/debye_system.hpp"
#include "beltrami/geometry.hpp"
#include "beltrami/kernels.hpp"
#include "beltrami/quadrature.hpp"
#include "beltrami/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace beltrami {

/// Distance from x to the surface, computed in the meridian half-plane.
inline double distance_to_boundary(const SurfaceOfRevolution& s, const Vec3& x) {
  const double rp = std::hypot(x(0), x(1));
  const double zp = x(2);
  constexpr int kCoarse = 1024;
  double best_phi = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kCoarse; ++i) {
    const double phi = kTwoPi * i / kCoarse;
    const double d = std::hypot(s.rho(phi) - rp, s.z(phi) - zp);
    if (d < best) {
      best = d;
      best_phi = phi;
    }
  }
  // Newton on d/dphi of the squared distance.
  double phi = best_phi;
  for (int it = 0; it < 30; ++it) {
    const CurvePoint c = s.sample(phi);
    const double dr = c.rho - rp, dz = c.z - zp;
    const double g = dr * c.rho_d + dz * c.z_d;
    const double H = c.rho_d * c.rho_d + c.z_d * c.z_d + dr * c.rho_dd + dz * c.z_dd;
    if (!(H > 0.0)) break;
    const double step = g / H;
    phi -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return std::min(best, std::hypot(s.rho(phi) - rp, s.z(phi) - zp));
}

/// Winding number of the generating curve around the meridian projection of x.
inline bool is_inside(const SurfaceOfRevolution& s, const Vec3& x) {
  const double rp = std::hypot(x(0), x(1));
  const double zp = x(2);
  constexpr int kSamples = 2048;
  double total = 0.0;
  double prev = std::atan2(s.z(0.0) - zp, s.rho(0.0) - rp);
  for (int i = 1; i <= kSamples; ++i) {
    const double phi = kTwoPi * i / kSamples;
    const double a = std::atan2(s.z(phi) - zp, s.rho(phi) - rp);
    total += std::remainder(a - prev, kTwoPi);
    prev = a;
  }
  return std::abs(total) > kPi;
}

struct FieldSample {
  Vec3 point = Vec3::Zero();
  CVec3 E = CVec3::Zero();
  double curl_residual = 0.0;
  double distance_to_boundary = 0.0;
};

/// Field of a fixed modal density. Densities are resampled by trigonometric
/// interpolation to a grid fine enough for the target's distance from the
/// boundary, then integrated with the trapezoid rule in phi.
class FieldEvaluator {
 public:
  FieldEvaluator(SurfaceOfRevolution s, cplx k, const DebyeDensity& d)
      : s_(std::move(s)), k_(k), m_(d.m), conv_(d.sign_convention) {
    const int n = static_cast<int>(d.r.values.size());
    grid_ = make_grid(s_, n);
    const CurrentMaps maps = current_maps(grid_, d.m, k, d.sign_convention);
    const Eigen::VectorXcd j = maps.from_r * d.r.values + d.c * maps.from_c;
    r_ = d.r.values;
    ja_ = j.head(n);
    jb_ = j.tail(n);
    alpha_ = sign_params(conv_).alpha;
    sigma_max_ = grid_.sigma().maxCoeff();
  }

  /// Field of arbitrary grid densities r and j = (ja, jb), not necessarily
  /// linked by the Debye relations.
  FieldEvaluator(SurfaceOfRevolution s, cplx k, int m, SignConvention conv, Eigen::VectorXcd r,
                 Eigen::VectorXcd ja, Eigen::VectorXcd jb)
      : s_(std::move(s)), k_(k), m_(m), conv_(conv), r_(std::move(r)), ja_(std::move(ja)), jb_(std::move(jb)) {
    if (r_.size() != ja_.size() || r_.size() != jb_.size()) throw std::invalid_argument("FieldEvaluator: size mismatch");
    grid_ = make_grid(s_, static_cast<int>(r_.size()));
    alpha_ = sign_params(conv_).alpha;
    sigma_max_ = grid_.sigma().maxCoeff();
  }

  cplx k() const { return k_; }
  int mode() const { return m_; }
  SignConvention sign_convention() const { return conv_; }
  const SurfaceOfRevolution& surface() const { return s_; }

  /// Fine-grid size used for a target at distance d from the boundary.
  int fine_size(double d) const {
    const double want = 36.0 * sigma_max_ / std::max(d, 1e-3);
    // Rounded up to a multiple of 16 so that nearby targets share a level.
    const int nf = 16 * static_cast<int>(std::ceil(want / 16.0));
    return std::max(grid_.n, nf);
  }

  /// E at x without any distance check; `d` selects the resolution.
  CVec3 evaluate_unchecked(const Vec3& x, double d) const {
    const Level& L = level(fine_size(d));
    const double rp = std::hypot(x(0), x(1));
    const double theta = std::atan2(x(1), x(0));
    CVec3 e0 = CVec3::Zero();
    for (int i = 0; i < L.n; ++i) {
      const RingIntegrals ri = ring_integrals(rp, x(2), L.sources[static_cast<std::size_t>(i)], k_, m_);
      const double w = L.weights(i);
      const cplx ja = L.ja(i), jb = L.jb(i);
      e0 += w * (kI * k_ * (ja * ri.v_theta + jb * ri.v_phi) - L.r(i) * ri.grad -
                 alpha_ * (ja * ri.c_theta + jb * ri.c_phi));
    }
    const double c = std::cos(theta), sn = std::sin(theta);
    CVec3 e;
    e << c * e0(0) - sn * e0(1), sn * e0(0) + c * e0(1), e0(2);
    return std::exp(kI * static_cast<double>(m_) * theta) * e;
  }

  /// E at an interior point at least `min_distance` from the boundary.
  CVec3 evaluate(const Vec3& x, double min_distance = 0.05) const {
    const double d = distance_to_boundary(s_, x);
    if (!is_inside(s_, x)) throw std::invalid_argument("evaluate_field: point lies outside the domain");
    if (d < min_distance) throw std::invalid_argument("evaluate_field: point too close to the boundary");
    return evaluate_unchecked(x, d);
  }

 private:
  struct Level {
    int n = 0;
    std::vector<RingSource> sources;
    Eigen::VectorXd weights;
    Eigen::VectorXcd r, ja, jb;
  };

  const Level& level(int nf) const {
    auto it = levels_.find(nf);
    if (it != levels_.end()) return it->second;
    Level L;
    L.n = nf;
    const Eigen::MatrixXd P = trig_resample_matrix(grid_.n, nf);
    L.r = P.cast<cplx>() * r_;
    L.ja = P.cast<cplx>() * ja_;
    L.jb = P.cast<cplx>() * jb_;
    L.weights.resize(nf);
    const double h = kTwoPi / nf;
    for (int i = 0; i < nf; ++i) {
      const CurvePoint c = s_.sample(h * i);
      L.sources.push_back(RingSource::from(c));
      L.weights(i) = h * c.rho * c.sigma();
    }
    return levels_.emplace(nf, std::move(L)).first->second;
  }

  SurfaceOfRevolution s_;
  cplx k_;
  int m_;
  SignConvention conv_;
  BoundaryGrid grid_;
  Eigen::VectorXcd r_, ja_, jb_;
  cplx alpha_;
  double sigma_max_ = 1.0;
  mutable std::map<int, Level> levels_;
};

/// Density carried by the first null vector of a record.
inline DebyeDensity record_density(const ResonanceRecord& rec) {
  if (rec.null_vectors.empty()) throw std::invalid_argument("resonance record carries no null vector");
  return density_from_vector(rec.null_vectors.front(), rec.mode, rec.n, rec.sign_convention);
}

inline FieldEvaluator make_field_evaluator(const SurfaceOfRevolution& s, const ResonanceRecord& rec) {
  return FieldEvaluator(s, rec.k, record_density(rec));
}

inline std::vector<FieldSample> evaluate_field(const FieldEvaluator& fe, const std::vector<Vec3>& points,
                                               double min_distance = 0.05) {
  std::vector<FieldSample> out;
  out.reserve(points.size());
  for (const Vec3& x : points) {
    FieldSample fs;
    fs.point = x;
    fs.distance_to_boundary = distance_to_boundary(fe.surface(), x);
    fs.E = fe.evaluate(x, min_distance);
    out.push_back(fs);
  }
  return out;
}

inline std::vector<FieldSample> evaluate_field(const SurfaceOfRevolution& s, const ResonanceRecord& rec,
                                               const std::vector<Vec3>& points) {
  return evaluate_field(make_field_evaluator(s, rec), points);
}

// ---------------------------------------------------------------------------
// Finite-difference diagnostics
// ---------------------------------------------------------------------------

/// Jacobian dE_i/dx_j by central differences.
inline Eigen::Matrix3cd field_jacobian(const FieldEvaluator& fe, const Vec3& x, double h, double d) {
  Eigen::Matrix3cd J;
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (fe.evaluate_unchecked(xp, d) - fe.evaluate_unchecked(xm, d)) / (2.0 * h);
  }
  return J;
}

inline CVec3 curl_from_jacobian(const Eigen::Matrix3cd& J) {
  return {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)};
}

struct ResidualReport {
  double value = 0.0;
  /// Set when the field vanishes at every point and the ratio is undefined.
  bool degenerate = false;
  double max_field = 0.0;
};

/// max ||curl E - c k E|| / max ||E||, c = +1 or -1 from the sign convention.
inline ResidualReport curl_residual(const FieldEvaluator& fe, const std::vector<Vec3>& points, cplx k_check,
                                    double h = 1e-4, double min_distance = 0.2) {
  const double c = sign_params(fe.sign_convention()).curl_sign;
  double num = 0.0, den = 0.0;
  for (const Vec3& x : points) {
    const double d = distance_to_boundary(fe.surface(), x);
    if (!is_inside(fe.surface(), x) || d < min_distance) {
      throw std::invalid_argument("curl_residual: point outside or too close to the boundary");
    }
    const CVec3 E = fe.evaluate_unchecked(x, d);
    const CVec3 curl = curl_from_jacobian(field_jacobian(fe, x, h, d));
    num = std::max(num, (curl - c * k_check * E).norm());
    den = std::max(den, E.norm());
  }
  if (den == 0.0) return {0.0, true, 0.0};
  return {num / den, false, den};
}

/// max |div E| / max ||E||.
inline ResidualReport divergence_residual(const FieldEvaluator& fe, const std::vector<Vec3>& points,
                                          double h = 1e-4, double min_distance = 0.2) {
  double num = 0.0, den = 0.0;
  for (const Vec3& x : points) {
    const double d = distance_to_boundary(fe.surface(), x);
    if (!is_inside(fe.surface(), x) || d < min_distance) {
      throw std::invalid_argument("divergence_residual: point outside or too close to the boundary");
    }
    const CVec3 E = fe.evaluate_unchecked(x, d);
    num = std::max(num, std::abs(field_jacobian(fe, x, h, d).trace()));
    den = std::max(den, E.norm());
  }
  if (den == 0.0) return {0.0, true, 0.0};
  return {num / den, false, den};
}

// ---------------------------------------------------------------------------
// Circulation and flux
// ---------------------------------------------------------------------------

/// Meridian loop at theta = 0 pulled inward by `offset` along the normal.
struct OffsetLoop {
  std::vector<Vec3> points;
  std::vector<Vec3> tangents;  ///< dy/dphi
  double h = 0.0;
};

inline OffsetLoop offset_meridian(const SurfaceOfRevolution& s, double offset, int nodes) {
  OffsetLoop L;
  L.h = kTwoPi / nodes;
  for (int i = 0; i < nodes; ++i) {
    const CurvePoint c = s.sample(L.h * i);
    const double sig = c.sigma();
    // n = (z', -rho') / sigma in the (rho, z) plane.
    const double nr = c.z_d / sig, nz = -c.rho_d / sig;
    const double sig_d = (c.rho_d * c.rho_dd + c.z_d * c.z_dd) / sig;
    const double nr_d = (c.z_dd * sig - c.z_d * sig_d) / (sig * sig);
    const double nz_d = (-c.rho_dd * sig + c.rho_d * sig_d) / (sig * sig);
    L.points.emplace_back(c.rho - offset * nr, 0.0, c.z - offset * nz);
    L.tangents.emplace_back(c.rho_d - offset * nr_d, 0.0, c.z_d - offset * nz_d);
  }
  return L;
}

/// Circulation of E around the inward-offset A loop.
inline cplx circulation_at_offset(const FieldEvaluator& fe, double offset, int nodes = 128) {
  const OffsetLoop L = offset_meridian(fe.surface(), offset, nodes);
  cplx total = 0.0;
  for (std::size_t i = 0; i < L.points.size(); ++i) {
    total += L.h * along(fe.evaluate_unchecked(L.points[i], offset), L.tangents[i]);
  }
  return total;
}

/// Flux of E through the planar region bounded by the offset A loop, by
/// the star-shaped map p = c + s (y(phi) - c), c the loop centroid.
/// Oriented so that Stokes reads  circulation = curl_sign * k * flux.
inline cplx flux_at_offset(const FieldEvaluator& fe, double offset, int radial = 16, int angular = 64) {
  const OffsetLoop L = offset_meridian(fe.surface(), offset, angular);
  Vec3 center = Vec3::Zero();
  for (const auto& p : L.points) center += p;
  center /= static_cast<double>(L.points.size());
  const GaussLegendre gl = make_gauss_legendre(radial);
  cplx total = 0.0;
  for (std::size_t i = 0; i < L.points.size(); ++i) {
    const Vec3 rel = L.points[i] - center;
    const Vec3 area = rel.cross(L.tangents[i]);
    for (int q = 0; q < radial; ++q) {
      const double sq = 0.5 * (gl.nodes[static_cast<std::size_t>(q)] + 1.0);
      const double wq = 0.5 * gl.weights[static_cast<std::size_t>(q)];
      const Vec3 p = center + sq * rel;
      const double d = distance_to_boundary(fe.surface(), p);
      total += L.h * wq * sq * along(fe.evaluate_unchecked(p, d), area);
    }
  }
  return total;
}

/// Polynomial (Neville) extrapolation of samples f(x_i) to x = 0.
inline cplx extrapolate_to_zero(const std::vector<double>& x, const std::vector<cplx>& f) {
  if (x.size() != f.size() || x.empty()) throw std::invalid_argument("extrapolate_to_zero: size mismatch");
  std::vector<cplx> p = f;
  const std::size_t n = x.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      p[i] = ((0.0 - x[i + level]) * p[i] - (0.0 - x[i]) * p[i + 1]) / (x[i] - x[i + level]);
    }
  }
  return p[0];
}

inline const std::vector<double>& default_offsets() {
  static const std::vector<double> offs{0.02, 0.04, 0.06, 0.08, 0.10, 0.12};
  return offs;
}

/// A-cycle circulation on the boundary, extrapolated from inward offsets.
inline cplx circulation(const FieldEvaluator& fe, const std::vector<double>& offsets = default_offsets(),
                        int nodes = 128) {
  std::vector<cplx> vals;
  for (double e : offsets) vals.push_back(circulation_at_offset(fe, e, nodes));
  return extrapolate_to_zero(offsets, vals);
}

/// Flux through the theta = 0 cross-section, extrapolated from inward offsets.
inline cplx disk_flux(const FieldEvaluator& fe, const std::vector<double>& offsets = default_offsets(),
                      int radial = 16, int angular = 64) {
  std::vector<cplx> vals;
  for (double e : offsets) vals.push_back(flux_at_offset(fe, e, radial, angular));
  return extrapolate_to_zero(offsets, vals);
}

}  // namespace beltrami
