#pragma once
/// @file spectral.hpp
/// Resonance search: condition-number sweeps, the proxy f(k) = 1/(r1^T A^{-1} r2),
/// Muller's method and SVD null spaces.

#include "beltrami/debye_system.hpp"
#include "beltrami/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace beltrami {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Unit vector with real and imaginary parts uniform in [-1, 1), drawn from
/// mt19937_64. Raw 64-bit outputs are mapped by (x >> 11) * 2^-53 so the
/// sequence does not depend on the standard library's distributions.
inline Eigen::VectorXcd random_unit_vector(Eigen::Index size, std::mt19937_64& rng) {
  auto uniform = [&rng]() { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
  Eigen::VectorXcd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double re = uniform();
    const double im = uniform();
    v(i) = cplx(re, im);
  }
  return v / v.norm();
}

struct ProbeVectors {
  Eigen::VectorXcd r1;
  Eigen::VectorXcd r2;
};

inline ProbeVectors probe_vectors(Eigen::Index size, std::uint64_t seed = kDefaultSeed) {
  std::mt19937_64 rng(seed);
  ProbeVectors p;
  p.r1 = random_unit_vector(size, rng);
  p.r2 = random_unit_vector(size, rng);
  return p;
}

struct ProxyValue {
  cplx value{0.0};
  bool exact_singular = false;
};

/// f = 1 / (r1^T A^{-1} r2) with a plain (unconjugated) transpose.
inline ProxyValue proxy_f(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& r1, const Eigen::VectorXcd& r2) {
  if (A.rows() != A.cols() || A.rows() != r1.size() || A.rows() != r2.size()) {
    throw std::invalid_argument("proxy_f: dimension mismatch");
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const auto& U = lu.matrixLU();
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    if (U(i, i) == 0.0) return {0.0, true};
  }
  const Eigen::VectorXcd x = lu.solve(r2);
  const cplx denom = r1.transpose() * x;
  if (denom == 0.0 || !std::isfinite(std::abs(denom))) return {0.0, true};
  return {1.0 / denom, false};
}

inline ProxyValue proxy_f(const ModalSystem& A, const Eigen::VectorXcd& r1, const Eigen::VectorXcd& r2) {
  return proxy_f(A.matrix, r1, r2);
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& A) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues();
}

inline double condition_number(const Eigen::MatrixXcd& A) {
  const Eigen::VectorXd s = singular_values(A);
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

struct NullSpace {
  int nullity = 0;
  std::vector<Eigen::VectorXcd> vectors;
  Eigen::VectorXd singular_values;
};

/// Right singular vectors with sigma_i <= rel_threshold * sigma_max.
inline NullSpace null_space(const Eigen::MatrixXcd& A, double rel_threshold = 1e-10) {
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  NullSpace ns;
  ns.singular_values = svd.singularValues();
  const Eigen::Index p = ns.singular_values.size();
  const double smax = p > 0 ? ns.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    const double si = i < p ? ns.singular_values(i) : 0.0;
    if (si <= rel_threshold * smax) {
      ns.vectors.push_back(svd.matrixV().col(i));
      ++ns.nullity;
    }
  }
  return ns;
}

// ---------------------------------------------------------------------------
// Muller's method
// ---------------------------------------------------------------------------

struct MullerResult {
  cplx root{0.0};
  cplx value{0.0};
  int iterations = 0;
};

class MullerError : public std::runtime_error {
 public:
  MullerError(const std::string& what, MullerResult best) : std::runtime_error(what), best_(best) {}
  const MullerResult& best() const { return best_; }

 private:
  MullerResult best_;
};

/// Stops when |f| <= tol or the step falls below 1e-13 (relative to
/// max(1, |x|)). Falls back to a secant step when the parabola degenerates.
inline MullerResult muller_find(const std::function<cplx(cplx)>& f, cplx x0, cplx x1, cplx x2, double tol = 1e-14,
                                int maxiter = 60) {
  if (x0 == x1 || x1 == x2 || x0 == x2) throw std::invalid_argument("muller_find: starting points must be distinct");
  cplx f0 = f(x0), f1 = f(x1), f2 = f(x2);
  MullerResult best{x2, f2, 0};
  for (int it = 1; it <= maxiter; ++it) {
    if (std::abs(f2) <= tol) return {x2, f2, it - 1};
    const cplx h1 = x1 - x0, h2 = x2 - x1;
    const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
    const cplx a = (d2 - d1) / (h2 + h1);
    const cplx b = a * h2 + d2;
    const cplx disc = std::sqrt(b * b - 4.0 * a * f2);
    const cplx den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
    cplx step;
    if (std::abs(den) > 0.0 && std::isfinite(std::abs(den))) {
      step = -2.0 * f2 / den;
    } else if (d2 != 0.0) {
      step = -f2 / d2;
    } else {
      throw MullerError("muller_find: degenerate interpolation", best);
    }
    const cplx x3 = x2 + step;
    const cplx f3 = f(x3);
    if (!std::isfinite(std::abs(f3))) throw MullerError("muller_find: non-finite function value", best);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    x2 = x3;
    f2 = f3;
    if (std::abs(f2) < std::abs(best.value) || it == 1) best = {x2, f2, it};
    if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(x2)) || std::abs(f2) <= tol) return {x2, f2, it};
  }
  throw MullerError("muller_find: maximum iterations exceeded", best);
}

// ---------------------------------------------------------------------------
// Sweeps and the full resonance pipeline
// ---------------------------------------------------------------------------

struct SweepSample {
  cplx k{0.0};
  double kappa = 1.0;
  double f_abs = 0.0;
};

/// One mode of one surface at one grid size; produces systems on demand.
struct ResonanceProblem {
  SurfaceOfRevolution surface;
  int mode = 0;
  int n = 50;
  double t = 1.0;
  SignConvention sign_convention = SignConvention::variantA;
  std::uint64_t seed = kDefaultSeed;

  int system_size() const { return mode == 0 ? n + 1 : n; }
  ModalSystem system(cplx k) const { return assemble_full_system(surface, k, mode, n, t, sign_convention); }
  ProbeVectors probes() const { return probe_vectors(system_size(), seed); }
};

inline SweepSample sweep_sample(const Eigen::MatrixXcd& A, cplx k, const ProbeVectors& p) {
  SweepSample s;
  s.k = k;
  s.kappa = condition_number(A);
  s.f_abs = std::abs(proxy_f(A, p.r1, p.r2).value);
  return s;
}

inline std::vector<SweepSample> condition_sweep(const ResonanceProblem& prob, const std::vector<double>& k_values) {
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (!(k_values[i] > 0.0)) throw std::invalid_argument("condition_sweep: k values must be positive");
    if (i > 0 && !(k_values[i] > k_values[i - 1])) throw std::invalid_argument("condition_sweep: k values must be sorted");
  }
  const ProbeVectors p = prob.probes();
  std::vector<SweepSample> out;
  out.reserve(k_values.size());
  for (double k : k_values) out.push_back(sweep_sample(prob.system(k).matrix, k, p));
  return out;
}

/// Inclusive uniform grid kmin, kmin + step, ... <= kmax (+ half-ulp slack).
inline std::vector<double> k_grid(double kmin, double kmax, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("k_grid: step must be positive");
  std::vector<double> ks;
  if (kmax < kmin) return ks;
  const auto count = static_cast<long>(std::floor((kmax - kmin) / step + 1e-9));
  for (long i = 0; i <= count; ++i) ks.push_back(kmin + static_cast<double>(i) * step);
  return ks;
}

/// Indices of interior samples whose kappa exceeds both neighbours and
/// `median_factor` times the sweep median.
inline std::vector<std::size_t> detect_peaks(const std::vector<SweepSample>& sweep, double median_factor = 10.0) {
  std::vector<std::size_t> peaks;
  if (sweep.size() < 3) return peaks;
  std::vector<double> kap;
  for (const auto& s : sweep) kap.push_back(s.kappa);
  std::vector<double> sorted = kap;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t i = 1; i + 1 < sweep.size(); ++i) {
    if (kap[i] > kap[i - 1] && kap[i] > kap[i + 1] && kap[i] > median_factor * median) peaks.push_back(i);
  }
  return peaks;
}

struct ResonanceRecord {
  cplx k{0.0};
  double f_abs = 0.0;
  int nullity = 0;
  std::vector<Eigen::VectorXcd> null_vectors;
  int mode = 0;
  double t = 1.0;
  int n = 0;
  SignConvention sign_convention = SignConvention::variantA;
  std::uint64_t seed = kDefaultSeed;
  /// max ||A v|| / sigma_max over the null vectors.
  double residual = 0.0;
};

/// Muller refinement from a starting triple, then SVD null space. Roots in
/// `deflate` are divided out of the proxy first.
inline ResonanceRecord refine_resonance(const ResonanceProblem& prob, cplx k0, cplx k1, cplx k2,
                                        double null_threshold = 1e-10, const std::vector<cplx>& deflate = {}) {
  const ProbeVectors p = prob.probes();
  auto f = [&](cplx k) {
    cplx v = proxy_f(prob.system(k).matrix, p.r1, p.r2).value;
    for (cplx z : deflate) v /= (k - z);
    return v;
  };
  const MullerResult mr = muller_find(f, k0, k1, k2);
  ResonanceRecord rec;
  rec.k = mr.root;
  rec.f_abs = std::abs(mr.value);
  rec.mode = prob.mode;
  rec.t = prob.t;
  rec.n = prob.n;
  rec.sign_convention = prob.sign_convention;
  rec.seed = prob.seed;
  const Eigen::MatrixXcd A = prob.system(mr.root).matrix;
  const NullSpace ns = null_space(A, null_threshold);
  rec.nullity = ns.nullity;
  rec.null_vectors = ns.vectors;
  for (const auto& v : ns.vectors) {
    rec.residual = std::max(rec.residual, (A * v).norm() / ns.singular_values(0));
  }
  return rec;
}

struct FindOptions {
  double k_step = 0.005;
  double dedup = 1e-6;
  double median_factor = 10.0;
  int max_per_peak = 2;
  /// Roots with |Im k| above this are not physical resonances and are dropped.
  double imag_tol = 1e-8;
};

/// Muller from (peak - step, peak, peak + step) at every kappa peak of a
/// precomputed sweep, then SVD. After each root the proxy is deflated and
/// Muller restarted from the same triple, so two resonances sharing one kappa
/// peak are both found. Complex roots and roots outside [kmin, kmax] are
/// discarded; records sorted by Re k.
inline std::vector<ResonanceRecord> resonances_from_sweep(const ResonanceProblem& prob,
                                                          const std::vector<SweepSample>& sweep, double kmin,
                                                          double kmax, const FindOptions& opt = {}) {
  std::vector<ResonanceRecord> out;
  std::vector<cplx> roots;
  for (std::size_t idx : detect_peaks(sweep, opt.median_factor)) {
    const double kc = sweep[idx].k.real();
    for (int attempt = 0; attempt < opt.max_per_peak; ++attempt) {
      ResonanceRecord rec;
      try {
        rec = refine_resonance(prob, kc - opt.k_step, kc, kc + opt.k_step, 1e-10, roots);
      } catch (const MullerError&) {
        break;
      }
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](cplx z) { return std::abs(z - rec.k) <= opt.dedup; });
      if (dup) break;
      // A deflated restart may wander; only accept roots belonging to this peak.
      if (attempt > 0 && std::abs(rec.k.real() - kc) > 2.0 * opt.k_step) break;
      roots.push_back(rec.k);
      const bool real = std::abs(rec.k.imag()) <= opt.imag_tol;
      if (real && rec.k.real() >= kmin && rec.k.real() <= kmax) out.push_back(std::move(rec));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.k.real() < b.k.real(); });
  return out;
}

/// Sweep over [kmin, kmax] at opt.k_step followed by resonances_from_sweep.
inline std::vector<ResonanceRecord> find_resonances(const ResonanceProblem& prob, double kmin, double kmax,
                                                    std::size_t count = std::numeric_limits<std::size_t>::max(),
                                                    const FindOptions& opt = {}) {
  if (!(kmin > 0.0) || !(kmax > kmin)) throw std::invalid_argument("find_resonances: bracket must lie in (0, inf)");
  const auto sweep = condition_sweep(prob, k_grid(kmin, kmax, opt.k_step));
  std::vector<ResonanceRecord> out = resonances_from_sweep(prob, sweep, kmin, kmax, opt);
  if (out.size() > count) out.resize(count);
  return out;
}

}  // namespace beltrami
