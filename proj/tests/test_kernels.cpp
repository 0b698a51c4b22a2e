#include "beltrami/kernels.hpp"

#include <gtest/gtest.h>

using namespace beltrami;

TEST(Helmholtz, ClosedFormValues) {
  const Vec3 x(1, 0, 0), y(0, 0, 0);
  EXPECT_NEAR(std::abs(helmholtz_g(x, y, 0.0) - 1.0 / (4 * kPi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(helmholtz_g(x, y, kPi) + 1.0 / (4 * kPi)), 0.0, 1e-15);
  EXPECT_NEAR((helmholtz_grad_x(x, y, 0.0) - CVec3(-1.0 / (4 * kPi), 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_THROW(helmholtz_g(x, x, 1.0), std::invalid_argument);
}

TEST(Helmholtz, GradientMatchesFiniteDifference) {
  const Vec3 x(0.3, -0.2, 0.9), y(1.1, 0.4, -0.5);
  const cplx k(2.5, 0.1);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    const cplx fd = (helmholtz_g(x + e, y, k) - helmholtz_g(x - e, y, k)) / (2 * h);
    EXPECT_NEAR(std::abs(fd - helmholtz_grad_x(x, y, k)(i)), 0.0, 1e-9);
  }
}

TEST(RingIntegrals, GradedPanelsMatchAdaptiveOracle) {
  const auto s = make_torus(2.0);
  const FrameSample t = frame_at(s, 0.0, 0.7);
  for (double phs : {0.71, 0.8, 2.0, kPi + 0.7}) {
    for (int m : {0, 1, 3}) {
      const RingSource src = RingSource::from(s.sample(phs));
      const auto a = ring_integrals(t.rho, t.position.z(), src, cplx(3.3, 0.0), m).pack();
      const auto b = ring_integrals_adaptive(t.rho, t.position.z(), src, cplx(3.3, 0.0), m).pack();
      EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff()))
          << "phi_s=" << phs << " m=" << m;
    }
  }
}

TEST(ModalKernel, SingleLayerEvenInMode) {
  const auto s = make_torus(2.0);
  for (int m : {1, 2, 5}) {
    const cplx a = modal_kernel(s, 1.7, m, KernelKind::single(), 0.3, 2.2).value;
    const cplx b = modal_kernel(s, 1.7, -m, KernelKind::single(), 0.3, 2.2).value;
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-13 * std::abs(a));
  }
}

TEST(ModalKernel, OppositePointsMatchOracle) {
  const auto s = make_torus(2.0);
  const cplx v = modal_kernel(s, 1.0, 0, KernelKind::single(), 0.0, kPi).value;
  const auto ref = ring_integrals_adaptive(3.0, 0.0, RingSource::from(s.sample(kPi)), 1.0, 0);
  EXPECT_NEAR(std::abs(v - ref.single), 0.0, 1e-10);
  // independent check: plain adaptive integral of g over the source ring
  const Vec3 x(3, 0, 0);
  const cplx direct = adaptive_gauss([&](double th) { return helmholtz_g(x, s.position(th, kPi), 1.0); }, 0.0, kTwoPi);
  EXPECT_NEAR(std::abs(v - direct), 0.0, 1e-10);
}

TEST(ModalKernel, FourierSynthesisReproducesKernel) {
  const auto s = make_torus(2.0);
  const double th = kPi / 3;
  const cplx k = 1.3;
  cplx sum = 0.0;
  for (int m = -20; m <= 20; ++m) {
    sum += modal_kernel(s, k, m, KernelKind::single(), 0.0, kPi).value * std::exp(-kI * static_cast<double>(m) * th);
  }
  sum /= kTwoPi;
  EXPECT_NEAR(std::abs(sum - helmholtz_g(s.position(0.0, 0.0), s.position(th, kPi), k)), 0.0, 1e-8);
}

TEST(ModalKernel, DiagonalNeedsSplitFlag) {
  const auto s = make_torus(2.0);
  EXPECT_THROW(modal_kernel(s, 1.0, 0, KernelKind::single(), 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(modal_kernel(s, 1.0, 0, KernelKind::grad_dot_ntarget(), 0.5, 0.5, true), std::invalid_argument);
  const auto d = modal_kernel(s, 1.0, 0, KernelKind::single(), 0.5, 0.5, true);
  EXPECT_DOUBLE_EQ(d.log_coefficient, single_layer_log_coefficient(s, 0.5));
  EXPECT_TRUE(std::isfinite(std::abs(d.value)));
}

TEST(ModalKernel, LogCoefficientMatchesFit) {
  const auto s = make_torus(2.0);
  const double phi = 1.1;
  auto sym = [&](double d) {
    return 0.5 * (modal_kernel(s, 2.0, 1, KernelKind::single(), phi, phi + d).value +
                  modal_kernel(s, 2.0, 1, KernelKind::single(), phi, phi - d).value);
  };
  auto L = [](double d) { return std::log(4 * std::pow(std::sin(0.5 * d), 2)); };
  const double d1 = 1e-4, d2 = 1e-5;
  const cplx fit = (sym(d1) - sym(d2)) / (L(d1) - L(d2));
  EXPECT_NEAR(std::abs(fit - single_layer_log_coefficient(s, phi)), 0.0, 1e-6);
  // the split remainder is the limit of the smooth part
  const auto split = modal_kernel(s, 2.0, 1, KernelKind::single(), phi, phi, true);
  EXPECT_NEAR(std::abs(split.value - (sym(d2) - split.log_coefficient * L(d2))), 0.0, 1e-6);
}

TEST(BruteForce, AgreesWithModalKernelsOffDiagonal) {
  const auto s = make_torus(2.0);
  const int n = 12;
  const std::vector<KernelKind> kinds{KernelKind::single(), KernelKind::grad_dot_ntarget(),
                                      KernelKind::grad_component(2),
                                      KernelKind::single_vector_component(FrameAxis::phi, FrameAxis::theta),
                                      KernelKind::curl_component(FrameAxis::normal, FrameAxis::phi)};
  for (const auto& kind : kinds) {
    const Eigen::MatrixXcd ref = brute_force_block(s, 1.0, 0, kind, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) {
          EXPECT_TRUE(std::isnan(ref(i, j).real()));
          continue;
        }
        const cplx v = modal_kernel(s, 1.0, 0, kind, kTwoPi * i / n, kTwoPi * j / n).value;
        EXPECT_NEAR(std::abs(v - ref(i, j)), 0.0, 1e-10) << i << "," << j;
      }
    }
  }
}

TEST(BruteForce, LaplaceSingleLayerIsRealSymmetric) {
  const auto s = make_torus(2.0);
  const int n = 12;
  const Eigen::MatrixXcd B = brute_force_block(s, 0.0, 0, KernelKind::single(), n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      EXPECT_LT(std::abs(B(i, j).imag()), 1e-14);
      EXPECT_NEAR(std::abs(B(i, j) - B(j, i)), 0.0, 1e-12);
    }
  }
}

TEST(BruteForce, TighterToleranceChangesLittle) {
  const auto s = make_torus(2.0);
  const Eigen::MatrixXcd a = brute_force_block(s, 2.0, 2, KernelKind::single(), 8, 1e-12);
  const Eigen::MatrixXcd b = brute_force_block(s, 2.0, 2, KernelKind::single(), 8, 1e-14);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (i != j) {
        EXPECT_LT(std::abs(a(i, j) - b(i, j)), 1e-11);
      }
    }
  }
}

TEST(ModalKernel, ReciprocityOfSingleLayer) {
  const auto s = make_torus(2.0);
  for (int m : {0, 2}) {
    const cplx ab = modal_kernel(s, 2.2, m, KernelKind::single(), 0.4, 3.0).value;
    const cplx ba = modal_kernel(s, 2.2, m, KernelKind::single(), 3.0, 0.4).value;
    EXPECT_NEAR(std::abs(ab - ba), 0.0, 1e-10);
  }
}
