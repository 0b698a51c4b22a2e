#pragma once
/// @file debye_system.hpp
/// Debye-source currents, modal Nystrom matrices of the boundary operators
/// K0..K4, and the square system whose singular values locate force-free
/// resonances.
///
/// The field is represented as
///
///     E = ik S[j] - grad S[r] - curl S[m],   m = alpha j,
///     j = ik (grad_G u + s i n x grad_G u) + c jH,   u = R0 r,
///
/// with jH = jH1 + beta jH2 (mode 0 only). Each sign convention fixes
/// (alpha, s, beta); see SignConvention.

#include "beltrami/geometry.hpp"
#include "beltrami/kernels.hpp"
#include "beltrami/quadrature.hpp"
#include "beltrami/surfcalc.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace beltrami {

/// variantA: alpha = -i, s = -1, jH = jH1 - i jH2; curl E = +k E.
/// variantB: alpha = +i, s = +1, jH = jH1 + i jH2; curl E = -k E.
/// In both, n x j = -s i j on the whole current including jH.
enum class SignConvention { variantA, variantB };

struct SignParams {
  cplx alpha;
  double s;
  cplx beta;
  double curl_sign;
};

inline SignParams sign_params(SignConvention c) {
  if (c == SignConvention::variantA) return {-kI, -1.0, -kI, 1.0};
  return {kI, 1.0, kI, -1.0};
}

inline std::string to_string(SignConvention c) { return c == SignConvention::variantA ? "A" : "B"; }

inline SignConvention parse_sign_convention(const std::string& s) {
  if (s == "A" || s == "a" || s == "variantA") return SignConvention::variantA;
  if (s == "B" || s == "b" || s == "variantB") return SignConvention::variantB;
  throw std::invalid_argument("unknown sign convention '" + s + "' (expected A or B)");
}

struct DebyeDensity {
  int m = 0;
  ModalScalar r;
  cplx c{0.0};
  SignConvention sign_convention = SignConvention::variantA;
};

struct CurrentPair {
  ModalTangentField j;
  ModalTangentField m_current;
};

/// Linear maps from (r, c) to the stacked current [j_theta; j_phi].
struct CurrentMaps {
  Eigen::MatrixXcd from_r;  ///< 2n x n
  Eigen::VectorXcd from_c;  ///< 2n (zero unless m = 0)
};

inline CurrentMaps current_maps(const BoundaryGrid& g, int m, cplx k, SignConvention conv) {
  const SignParams sp = sign_params(conv);
  const int n = g.n;
  const auto G = surface_gradient_matrices(g, m);
  const Eigen::MatrixXcd R0 = r0_matrix(g, m);
  CurrentMaps out;
  out.from_r.resize(2 * n, n);
  out.from_r.topRows(n) = kI * k * (G.theta - sp.s * kI * G.phi) * R0;
  out.from_r.bottomRows(n) = kI * k * (G.phi + sp.s * kI * G.theta) * R0;
  out.from_c = Eigen::VectorXcd::Zero(2 * n);
  if (m == 0) {
    const Eigen::VectorXd inv_rho = g.rho().cwiseInverse();
    out.from_c.head(n) = inv_rho.cast<cplx>();
    out.from_c.tail(n) = sp.beta * inv_rho.cast<cplx>();
  }
  return out;
}

inline CurrentPair currents_from_density(const BoundaryGrid& g, const DebyeDensity& d, cplx k) {
  const int n = g.n;
  if (d.r.values.size() != n) throw std::invalid_argument("currents_from_density: grid size mismatch");
  if (d.m != 0 && d.c != 0.0) throw std::invalid_argument("currents_from_density: c must vanish for m != 0");
  const ModalScalar u = R0_apply(g, d.r);  // validates the mean-zero precondition
  (void)u;
  const CurrentMaps maps = current_maps(g, d.m, k, d.sign_convention);
  const Eigen::VectorXcd j = maps.from_r * d.r.values + d.c * maps.from_c;
  CurrentPair p;
  p.j = {d.m, j.head(n), j.tail(n)};
  const cplx alpha = sign_params(d.sign_convention).alpha;
  p.m_current = {d.m, alpha * p.j.a, alpha * p.j.b};
  return p;
}

inline CurrentPair currents_from_density(const SurfaceOfRevolution& s, const DebyeDensity& d, cplx k) {
  return currents_from_density(make_grid(s, static_cast<int>(d.r.values.size())), d, k);
}

// ---------------------------------------------------------------------------
// Layer-potential Nystrom matrices
// ---------------------------------------------------------------------------

/// Primitive modal layer matrices on the grid, per unit theta-density
/// e^{i m theta}. Index order for axes: 0 = theta, 1 = phi, 2 = normal.
struct LayerMatrices {
  int n = 0;
  int m = 0;
  cplx k{0.0};
  Eigen::MatrixXcd single;  ///< S[f]
  Eigen::MatrixXcd dn;      ///< PV n_t . grad S[f]
  std::array<std::array<Eigen::MatrixXcd, 2>, 3> vec;   ///< t_hat . S[f s_hat]
  std::array<std::array<Eigen::MatrixXcd, 2>, 2> curl;  ///< t_hat . PV curl S[f s_hat]
};

namespace detail {

inline constexpr int kLayerComponents = 12;

inline void layer_components(const RingIntegrals& r, const FrameSample& t, std::array<cplx, kLayerComponents>& out) {
  out[0] = r.single;
  out[1] = along(r.grad, t.n_hat);
  out[2] = along(r.v_theta, t.theta_hat);
  out[3] = along(r.v_phi, t.theta_hat);
  out[4] = along(r.v_theta, t.phi_hat);
  out[5] = along(r.v_phi, t.phi_hat);
  out[6] = along(r.v_theta, t.n_hat);
  out[7] = along(r.v_phi, t.n_hat);
  out[8] = along(r.c_theta, t.theta_hat);
  out[9] = along(r.c_phi, t.theta_hat);
  out[10] = along(r.c_theta, t.phi_hat);
  out[11] = along(r.c_phi, t.phi_hat);
}

}  // namespace detail

/// Assembles all primitive matrices in one pass: trapezoid weights away from
/// each target, Alpert corrections (with trigonometric interpolation of the
/// density) inside the excluded band.
inline LayerMatrices assemble_layer_matrices(const SurfaceOfRevolution& s, const BoundaryGrid& g, cplx k, int m,
                                             const AlpertRule& rule) {
  const int n = g.n;
  if (rule.n != n) throw std::invalid_argument("assemble_layer_matrices: rule/grid size mismatch");
  std::array<Eigen::MatrixXcd, detail::kLayerComponents> M;
  for (auto& mat : M) mat = Eigen::MatrixXcd::Zero(n, n);
  std::array<cplx, detail::kLayerComponents> comp{};
  const int band = rule.excluded_band;
  for (int i = 0; i < n; ++i) {
    const CurvePoint& ct = g.nodes[static_cast<std::size_t>(i)];
    const FrameSample tf = frame_at(ct, 0.0);
    for (int j = 0; j < n; ++j) {
      if (cyclic_distance(i, j, n) < band) continue;
      const CurvePoint& cs = g.nodes[static_cast<std::size_t>(j)];
      const RingIntegrals r = ring_integrals(ct.rho, ct.z, RingSource::from(cs), k, m);
      detail::layer_components(r, tf, comp);
      const double w = g.h * cs.rho * cs.sigma();
      for (int c = 0; c < detail::kLayerComponents; ++c) M[static_cast<std::size_t>(c)](i, j) += w * comp[static_cast<std::size_t>(c)];
    }
    for (std::size_t q = 0; q < rule.offsets.size(); ++q) {
      for (double sgn : {-1.0, 1.0}) {
        const double phi = ct.phi + sgn * rule.offsets[q] * g.h;
        const CurvePoint cs = s.sample(phi);
        const RingIntegrals r = ring_integrals(ct.rho, ct.z, RingSource::from(cs), k, m);
        detail::layer_components(r, tf, comp);
        const double w = g.h * rule.weights[q] * cs.rho * cs.sigma();
        const Eigen::VectorXd T = trig_interp_weights(n, phi);
        for (int c = 0; c < detail::kLayerComponents; ++c) {
          M[static_cast<std::size_t>(c)].row(i) += (w * comp[static_cast<std::size_t>(c)]) * T.transpose().cast<cplx>();
        }
      }
    }
  }
  LayerMatrices L;
  L.n = n;
  L.m = m;
  L.k = k;
  L.single = std::move(M[0]);
  L.dn = std::move(M[1]);
  L.vec[0][0] = std::move(M[2]);
  L.vec[0][1] = std::move(M[3]);
  L.vec[1][0] = std::move(M[4]);
  L.vec[1][1] = std::move(M[5]);
  L.vec[2][0] = std::move(M[6]);
  L.vec[2][1] = std::move(M[7]);
  L.curl[0][0] = std::move(M[8]);
  L.curl[0][1] = std::move(M[9]);
  L.curl[1][0] = std::move(M[10]);
  L.curl[1][1] = std::move(M[11]);
  return L;
}

inline LayerMatrices assemble_layer_matrices(const SurfaceOfRevolution& s, cplx k, int m, int n) {
  return assemble_layer_matrices(s, make_grid(s, n), k, m, make_alpert_rule(n));
}

// ---------------------------------------------------------------------------
// Boundary operators K0..K4
// ---------------------------------------------------------------------------

enum class KopKind { K0, K1, K2n, K2t, K3, K4 };

/// Boundary operators built from the primitive matrices. Tangent fields are
/// stacked as [theta component; phi component].
///   K0:  n x n,   PV n . grad S[r]
///   K1:  2n x n,  n x grad_G S[r]
///   K2n: n x 2n,  n . S[j]
///   K2t: 2n x 2n, n x S[j]
///   K3:  n x 2n,  n . curl S[j]
///   K4:  2n x 2n, n x PV curl S[j]
struct BoundaryOperators {
  Eigen::MatrixXcd K0, K1, K2n, K2t, K3, K4;
  /// Tangential components (not rotated) of S[j] and of PV curl S[j].
  Eigen::MatrixXcd S_t, curl_t;
  /// Tangential surface gradient of S[r].
  Eigen::MatrixXcd grad_S;
};

namespace detail {

inline Eigen::MatrixXcd rotate90_block(const Eigen::MatrixXcd& M) {
  const Eigen::Index n = M.rows() / 2;
  Eigen::MatrixXcd R(M.rows(), M.cols());
  R.topRows(n) = -M.bottomRows(n);
  R.bottomRows(n) = M.topRows(n);
  return R;
}

inline Eigen::MatrixXcd tangential_block(const std::array<Eigen::MatrixXcd, 2>& row0,
                                         const std::array<Eigen::MatrixXcd, 2>& row1) {
  const Eigen::Index n = row0[0].rows();
  Eigen::MatrixXcd B(2 * n, 2 * n);
  B << row0[0], row0[1], row1[0], row1[1];
  return B;
}

}  // namespace detail

inline BoundaryOperators boundary_operators(const BoundaryGrid& g, const LayerMatrices& L) {
  const int n = g.n;
  const Eigen::VectorXd rho = g.rho();
  const Eigen::VectorXd sigma = g.sigma();
  const Eigen::MatrixXcd D = fourier_diff_matrix(n).cast<cplx>();
  const auto G = surface_gradient_matrices(g, L.m);
  BoundaryOperators op;
  op.K0 = L.dn;
  op.grad_S.resize(2 * n, n);
  op.grad_S.topRows(n) = G.theta * L.single;
  op.grad_S.bottomRows(n) = G.phi * L.single;
  op.K1 = detail::rotate90_block(op.grad_S);
  op.S_t = detail::tangential_block(L.vec[0], L.vec[1]);
  op.K2t = detail::rotate90_block(op.S_t);
  op.K2n.resize(n, 2 * n);
  op.K2n << L.vec[2][0], L.vec[2][1];
  // n . curl F = i m F_phi / rho - D(rho F_theta) / (rho sigma) for F = S[j].
  const Eigen::MatrixXcd inv_rho = rho.cwiseInverse().cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd inv_area = rho.cwiseProduct(sigma).cwiseInverse().cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd rho_d = rho.cast<cplx>().asDiagonal();
  const Eigen::MatrixXcd F_theta = op.S_t.topRows(n);
  const Eigen::MatrixXcd F_phi = op.S_t.bottomRows(n);
  op.K3 = kI * static_cast<double>(L.m) * inv_rho * F_phi - inv_area * D * rho_d * F_theta;
  op.curl_t = detail::tangential_block(L.curl[0], L.curl[1]);
  op.K4 = detail::rotate90_block(op.curl_t);
  return op;
}

inline Eigen::MatrixXcd assemble_Kop(KopKind kind, const SurfaceOfRevolution& s, cplx k, int m, int n) {
  if (n < 16 || n % 2 != 0) throw std::invalid_argument("assemble_Kop: n must be even and >= 16");
  const BoundaryGrid g = make_grid(s, n);
  const BoundaryOperators op = boundary_operators(g, assemble_layer_matrices(s, g, k, m, make_alpert_rule(n)));
  switch (kind) {
    case KopKind::K0: return op.K0;
    case KopKind::K1: return op.K1;
    case KopKind::K2n: return op.K2n;
    case KopKind::K2t: return op.K2t;
    case KopKind::K3: return op.K3;
    case KopKind::K4: return op.K4;
  }
  throw std::invalid_argument("assemble_Kop: unsupported kind");
}

// ---------------------------------------------------------------------------
// The modal system
// ---------------------------------------------------------------------------

/// Interior traces of the represented field as linear maps of (r, c).
/// Columns 0..n-1 act on r, column n on c (present for m = 0 only).
struct TraceMaps {
  Eigen::MatrixXcd normal;      ///< n x N: n . E^-
  Eigen::MatrixXcd tangential;  ///< 2n x N: [E^-_theta; E^-_phi]
};

inline TraceMaps interior_traces(const BoundaryGrid& g, const BoundaryOperators& op, const CurrentMaps& J, cplx k, int m,
                                 SignConvention conv) {
  const int n = g.n;
  const int N = m == 0 ? n + 1 : n;
  const cplx alpha = sign_params(conv).alpha;
  const Eigen::MatrixXcd on_j_normal = kI * k * op.K2n - alpha * op.K3;
  // E_t^- = ik S[j]_t - grad_G S[r] - alpha (PV curl S[j]_t + (1/2) n x j)
  Eigen::MatrixXcd half_rot = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  half_rot.block(0, n, n, n) = -0.5 * Eigen::MatrixXcd::Identity(n, n);
  half_rot.block(n, 0, n, n) = 0.5 * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd on_j_tangent = kI * k * op.S_t - alpha * (op.curl_t + half_rot);

  TraceMaps t;
  t.normal = Eigen::MatrixXcd::Zero(n, N);
  t.normal.leftCols(n) = -0.5 * Eigen::MatrixXcd::Identity(n, n) - op.K0 + on_j_normal * J.from_r;
  t.tangential = Eigen::MatrixXcd::Zero(2 * n, N);
  t.tangential.leftCols(n) = -op.grad_S + on_j_tangent * J.from_r;
  if (m == 0) {
    t.normal.col(n) = on_j_normal * J.from_c;
    t.tangential.col(n) = on_j_tangent * J.from_c;
  }
  return t;
}

/// Weighted A/B circulation of the interior tangential trace:
/// t * int_A E.dl + (1 - t) * int_B E.dl (mode 0).
inline Eigen::RowVectorXcd cycle_row_from_traces(const BoundaryGrid& g, const TraceMaps& tr, double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("cycle row: t must lie in [0, 1]");
  const int n = g.n;
  const Eigen::VectorXd sigma = g.sigma();
  const Eigen::RowVectorXcd a_row = (g.h * sigma).transpose().cast<cplx>() * tr.tangential.bottomRows(n);
  const int ib = n / 2;
  const Eigen::RowVectorXcd b_row = kTwoPi * g.nodes[static_cast<std::size_t>(ib)].rho * tr.tangential.row(ib);
  return t * a_row + (1.0 - t) * b_row;
}

struct ModalSystem {
  cplx k{0.0};
  int m = 0;
  int n = 0;
  double t = 1.0;
  SignConvention sign_convention = SignConvention::variantA;
  Eigen::MatrixXcd matrix;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

/// Everything that depends on (k, m) but not on t. Lets a t-sweep reuse one
/// assembly.
struct ModalOperators {
  cplx k{0.0};
  int m = 0;
  SignConvention sign_convention = SignConvention::variantA;
  BoundaryGrid grid;
  BoundaryOperators ops;
  CurrentMaps currents;
  TraceMaps traces;
};

inline ModalOperators modal_operators(const SurfaceOfRevolution& s, cplx k, int m, int n, SignConvention conv) {
  if (n < 16 || n % 2 != 0) throw std::invalid_argument("modal system: n must be even and >= 16");
  ModalOperators mo;
  mo.k = k;
  mo.m = m;
  mo.sign_convention = conv;
  mo.grid = make_grid(s, n);
  mo.ops = boundary_operators(mo.grid, assemble_layer_matrices(s, mo.grid, k, m, make_alpert_rule(n)));
  mo.currents = current_maps(mo.grid, m, k, conv);
  mo.traces = interior_traces(mo.grid, mo.ops, mo.currents, k, m, conv);
  return mo;
}

/// Normal-equation rows n . E^- over (r, c).
inline Eigen::MatrixXcd assemble_normal_row_block(const SurfaceOfRevolution& s, cplx k, int m, int n,
                                                  SignConvention conv) {
  return modal_operators(s, k, m, n, conv).traces.normal;
}

inline Eigen::RowVectorXcd assemble_cycle_row(const SurfaceOfRevolution& s, cplx k, int m, int n, double t,
                                              SignConvention conv = SignConvention::variantA) {
  if (m != 0) throw std::invalid_argument("assemble_cycle_row: cycle conditions exist for m = 0 only");
  const ModalOperators mo = modal_operators(s, k, m, n, conv);
  return cycle_row_from_traces(mo.grid, mo.traces, t);
}

/// Square system: normal rows (with a rank-one mean-zero augmentation on the
/// r block for m = 0) plus the weighted cycle row for m = 0.
inline ModalSystem system_from_operators(const ModalOperators& mo, double t) {
  const int n = mo.grid.n;
  const int m = mo.m;
  ModalSystem sys;
  sys.k = mo.k;
  sys.m = m;
  sys.n = n;
  sys.t = t;
  sys.sign_convention = mo.sign_convention;
  if (m == 0) {
    const Eigen::VectorXd w = mo.grid.areal_weights() / mo.grid.areal_weights().sum();
    sys.matrix.resize(n + 1, n + 1);
    sys.matrix.topRows(n) = mo.traces.normal;
    sys.matrix.topLeftCorner(n, n) += Eigen::VectorXcd::Ones(n) * w.transpose().cast<cplx>();
    sys.matrix.row(n) = cycle_row_from_traces(mo.grid, mo.traces, t);
  } else {
    sys.matrix = mo.traces.normal;
  }
  for (int i = 0; i < n; ++i) {
    sys.row_labels.push_back("normal[" + std::to_string(i) + "]");
    sys.col_labels.push_back("r[" + std::to_string(i) + "]");
  }
  if (m == 0) {
    sys.row_labels.push_back("cycle");
    sys.col_labels.push_back("c");
  }
  return sys;
}

inline ModalSystem assemble_full_system(const SurfaceOfRevolution& s, cplx k, int m, int n, double t = 1.0,
                                        SignConvention conv = SignConvention::variantA) {
  return system_from_operators(modal_operators(s, k, m, n, conv), t);
}

/// Splits a system vector into the density it represents.
inline DebyeDensity density_from_vector(const Eigen::VectorXcd& v, int m, int n, SignConvention conv) {
  if (v.size() != (m == 0 ? n + 1 : n)) throw std::invalid_argument("density_from_vector: size mismatch");
  DebyeDensity d;
  d.m = m;
  d.r = {m, v.head(n)};
  d.c = m == 0 ? v(n) : cplx(0.0);
  d.sign_convention = conv;
  return d;
}

/// Trigonometric interpolation of a system vector from n to n_fine nodes.
inline Eigen::VectorXcd refine_vector(const Eigen::VectorXcd& v, int m, int n, int n_fine) {
  const Eigen::MatrixXd P = trig_resample_matrix(n, n_fine);
  Eigen::VectorXcd out(m == 0 ? n_fine + 1 : n_fine);
  out.head(n_fine) = P.cast<cplx>() * v.head(n);
  if (m == 0) out(n_fine) = v(n);
  return out;
}

}  // namespace beltrami
