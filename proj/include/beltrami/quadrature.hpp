#pragma once
/// @file quadrature.hpp
/// Periodic quadrature on the uniform phi grid: trapezoid rule, Alpert
/// hybrid Gauss-trapezoidal end corrections for log-singular integrands,
/// Gauss-Legendre panels, adaptive Gauss-Kronrod, and trigonometric
/// interpolation / differentiation.

#include "beltrami/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace beltrami {

template <class F>
auto trapezoid_periodic(F&& f, int n) -> decltype(f(0.0)) {
  using T = decltype(f(0.0));
  if (n < 1) throw std::invalid_argument("trapezoid_periodic: n must be positive");
  const double h = kTwoPi / n;
  T sum = f(0.0);
  for (int i = 1; i < n; ++i) sum += f(h * i);
  return sum * h;
}

// ---------------------------------------------------------------------------
// Alpert rules
// ---------------------------------------------------------------------------

namespace detail {

struct AlpertTable {
  int order;
  int band;  // a: first regular trapezoid node kept on each side
  std::span<const double> nodes;
  std::span<const double> weights;
};

// Log-singular corrections, one-sided: exact for x^j and x^j log x,
// j = 0..l-1, against the zeta-regularized trapezoid sum. Regenerate with
// tools/alpert_tables.py.
inline constexpr std::array<double, 7> kAlpert8Nodes{
    6.531815708567918290235986e-03, 9.086744584657728648511714e-02,
    3.967966533375877679508279e-01, 1.027856640525645700626922e+00,
    1.945288592909266013404492e+00, 2.980147933889639651583716e+00,
    3.998861349951123044203731e+00};
inline constexpr std::array<double, 7> kAlpert8Weights{
    2.462194198995203157808208e-02, 1.701315866854178098335762e-01,
    4.609256358650077235927185e-01, 7.947291148621894268169417e-01,
    1.008710414337932589256139e+00, 1.036093649726215581418507e+00,
    1.004787656533284837504036e+00};

inline constexpr std::array<double, 15> kAlpert16Nodes{
    8.371529832014113271563697e-04, 1.239382725542636982474909e-02,
    6.009290785739467772076614e-02, 1.805991249601927929276380e-01,
    4.142832599028030884010813e-01, 7.964747731112429842230295e-01,
    1.348993882467058808928366e+00, 2.073471660264395027695197e+00,
    2.947904939031493804756887e+00, 3.928129252248611745278372e+00,
    4.957203086563111694870911e+00, 5.986360113977494222055321e+00,
    6.997957704791519278242020e+00, 7.999888757524622397419366e+00,
    8.999998754306119601289328e+00};
inline constexpr std::array<double, 15> kAlpert16Weights{
    3.190919086626234406311362e-03, 2.423621380426338019027226e-02,
    7.740135521653087933451101e-02, 1.704889420286369087236064e-01,
    3.029123478511308610304135e-01, 4.652220834914616653323621e-01,
    6.401489637096768365019078e-01, 8.051212946181061154402723e-01,
    9.362411945698646544249522e-01, 1.014359775369075169130039e+00,
    1.035167721053656806351670e+00, 1.020308624984610370790723e+00,
    1.004798397441513981572314e+00, 1.000395017352309274014013e+00,
    1.000007149422536862756632e+00};

inline AlpertTable alpert_table(int order) {
  switch (order) {
    case 8:
      return {8, 5, kAlpert8Nodes, kAlpert8Weights};
    case 16:
      return {16, 10, kAlpert16Nodes, kAlpert16Weights};
    default:
      throw std::invalid_argument("alpert_table: supported orders are 8 and 16");
  }
}

}  // namespace detail

/// Alpert hybrid rule on the n-point periodic grid for integrands with a
/// log singularity at a grid node. Grid nodes closer than `excluded_band`
/// steps to the target are dropped and replaced by 2*l off-grid nodes at
/// target +- offsets[k]*h with weights weights[k]*h.
struct AlpertRule {
  int n = 0;
  int order = 16;
  int excluded_band = 0;
  double h = 0.0;
  std::vector<double> offsets;  // in units of h
  std::vector<double> weights;  // in units of h
};

/// Order 16 by default; falls back to order 8 for n < 32.
inline AlpertRule make_alpert_rule(int n, int order = 16) {
  if (order == 16 && n < 32) order = 8;
  const auto table = detail::alpert_table(order);
  if (n < 2 * table.band) {
    throw std::invalid_argument("make_alpert_rule: grid too coarse for order " +
                                std::to_string(order));
  }
  AlpertRule r;
  r.n = n;
  r.order = order;
  r.excluded_band = table.band;
  r.h = kTwoPi / n;
  r.offsets.assign(table.nodes.begin(), table.nodes.end());
  r.weights.assign(table.weights.begin(), table.weights.end());
  return r;
}

/// Cyclic distance between grid indices.
inline int cyclic_distance(int i, int j, int n) {
  const int d = std::abs(i - j) % n;
  return std::min(d, n - d);
}

/// Integrates a 2*pi-periodic integrand with a log singularity at grid node
/// `target_index`. `grid_samples` holds the integrand at every grid node
/// (the entry at the target is ignored); `singular_eval(phi)` evaluates the
/// integrand off-grid at the correction nodes.
template <class T, class F>
T alpert_integrate(const AlpertRule& rule, std::span<const T> grid_samples, F&& singular_eval,
                   int target_index) {
  if (target_index < 0 || target_index >= rule.n) {
    throw std::out_of_range("alpert_integrate: target index out of range");
  }
  if (static_cast<int>(grid_samples.size()) != rule.n) {
    throw std::invalid_argument("alpert_integrate: sample count does not match rule");
  }
  T sum = T(0);
  for (int j = 0; j < rule.n; ++j) {
    if (cyclic_distance(j, target_index, rule.n) >= rule.excluded_band) {
      sum += grid_samples[static_cast<std::size_t>(j)];
    }
  }
  const double phi_t = rule.h * target_index;
  for (std::size_t k = 0; k < rule.offsets.size(); ++k) {
    const double dx = rule.offsets[k] * rule.h;
    sum += rule.weights[k] * (singular_eval(phi_t + dx) + singular_eval(phi_t - dx));
  }
  return sum * rule.h;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre and adaptive Gauss-Kronrod
// ---------------------------------------------------------------------------

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline GaussLegendre make_gauss_legendre(int p) {
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(p));
  gl.weights.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (p + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= p; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (p == 1) p0 = 1.0;
      dp = p * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= p; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = p * (x * p1 - p0) / (x * x - 1.0);
    gl.nodes[static_cast<std::size_t>(i)] = x;
    gl.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

inline const GaussLegendre& gauss_legendre_16() {
  static const GaussLegendre gl = make_gauss_legendre(16);
  return gl;
}

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(cplx v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().maxCoeff();
}

// G7-K15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  int depth;
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = hl * kXgk[static_cast<std::size_t>(j)];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    kron += (f1 + f2) * kWgk[static_cast<std::size_t>(j)];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[static_cast<std::size_t>(j / 2)];
  }
  kron *= hl;
  gauss *= hl;
  const T diff = kron - gauss;
  return {a, b, kron, magnitude(diff), depth};
}

}  // namespace detail

/// Thrown when adaptive refinement runs out of depth; carries the best
/// available estimate.
template <class T>
class AdaptiveQuadratureError : public std::runtime_error {
 public:
  AdaptiveQuadratureError(const std::string& what, T estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  const T& estimate() const { return estimate_; }
  double error_estimate() const { return error_; }

 private:
  T estimate_;
  double error_;
};

/// Globally adaptive G7-K15 quadrature. Splits the panel with the largest
/// embedded error estimate until the summed estimate is below
/// tol * (1 + |result|). Accepts scalar, complex or Eigen vector integrands.
template <class F>
auto adaptive_gauss(F&& f, double a, double b, double tol = 1e-12, int max_depth = 40)
    -> std::decay_t<decltype(f(0.0))> {
  using T = std::decay_t<decltype(f(0.0))>;
  using P = detail::Panel<T>;
  auto cmp = [](const P& x, const P& y) { return x.error < y.error; };
  std::priority_queue<P, std::vector<P>, decltype(cmp)> heap(cmp);
  std::vector<P> frozen;  // panels at max depth
  P first = detail::gk15<T>(f, a, b, 0);
  T total = first.value;
  double err = first.error;
  heap.push(first);
  while (err > tol * (1.0 + detail::magnitude(total)) && !heap.empty()) {
    P worst = heap.top();
    heap.pop();
    if (worst.depth >= max_depth) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    P left = detail::gk15<T>(f, worst.a, mid, worst.depth + 1);
    P right = detail::gk15<T>(f, mid, worst.b, worst.depth + 1);
    total = total - worst.value + left.value + right.value;
    err = err - worst.error + left.error + right.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated cancellation in the running total.
  T sum = T(total * 0.0);
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  for (const auto& p : frozen) {
    sum += p.value;
    esum += p.error;
  }
  if (esum > tol * (1.0 + detail::magnitude(sum))) {
    throw AdaptiveQuadratureError<T>("adaptive_gauss: maximum depth exceeded", sum, esum);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Trigonometric interpolation on the uniform periodic grid
// ---------------------------------------------------------------------------

/// Cardinal weights L_j(phi) of the band-limited interpolant on n (even)
/// nodes, Nyquist mode split symmetrically.
inline Eigen::VectorXd trig_interp_weights(int n, double phi) {
  Eigen::VectorXd w(n);
  const double h = kTwoPi / n;
  for (int j = 0; j < n; ++j) {
    double x = std::remainder(phi - h * j, kTwoPi);
    if (std::abs(x) < 1e-14) {
      w.setZero();
      w(j) = 1.0;
      return w;
    }
    w(j) = std::sin(0.5 * n * x) / (n * std::tan(0.5 * x));
  }
  return w;
}

template <class Vec>
cplx trig_interp(const Vec& values, double phi) {
  const int n = static_cast<int>(values.size());
  if (n % 2 != 0) throw std::invalid_argument("trig_interp: n must be even");
  const Eigen::VectorXd w = trig_interp_weights(n, phi);
  cplx s = 0.0;
  for (int j = 0; j < n; ++j) s += w(j) * cplx(values[j]);
  return s;
}

/// Fourier differentiation matrix on n (even) nodes.
inline Eigen::MatrixXd fourier_diff_matrix(int n) {
  if (n % 2 != 0) throw std::invalid_argument("fourier_diff_matrix: n must be even");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = 0.5 * sgn / std::tan(0.5 * h * (i - j));
    }
  }
  return d;
}

/// Second-derivative Fourier matrix on n (even) nodes. Unlike D*D it keeps
/// the Nyquist mode (eigenvalue -n^2/4).
inline Eigen::MatrixXd fourier_diff2_matrix(int n) {
  if (n % 2 != 0) throw std::invalid_argument("fourier_diff2_matrix: n must be even");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
        continue;
      }
      const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      const double sh = std::sin(0.5 * h * (i - j));
      d(i, j) = -0.5 * sgn / (sh * sh);
    }
  }
  return d;
}

inline Eigen::VectorXcd trig_diff(const Eigen::VectorXcd& values) {
  return fourier_diff_matrix(static_cast<int>(values.size())).cast<cplx>() * values;
}

/// Resamples band-limited grid values onto a finer uniform grid of m nodes.
inline Eigen::MatrixXd trig_resample_matrix(int n, int m) {
  Eigen::MatrixXd r(m, n);
  for (int i = 0; i < m; ++i) r.row(i) = trig_interp_weights(n, kTwoPi * i / m).transpose();
  return r;
}

}  // namespace beltrami
