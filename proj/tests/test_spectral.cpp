#include <doctest.h>

#include <cmath>

#include "quadrec/linalg.hpp"
#include "quadrec/rng.hpp"
#include "quadrec/spectral.hpp"
#include "test_util.hpp"

using namespace quadrec;
using quadrec::testing::random_cvec;

namespace {

MeasurementEnsemble synthetic_ensemble(std::vector<CMat> mats, CVec y) {
  MeasurementEnsemble ens;
  ens.spec = EnsembleSpec{mats.front().rows(), static_cast<Index>(mats.size()),
                          0.0, 0};
  ens.matrices = std::move(mats);
  ens.measurements = std::move(y);
  return ens;
}

}  // namespace

TEST_CASE("build_S: single measurement") {
  const CMat A = quadrec::testing::random_cmat(4, 4, 1);
  const Complex y(1.25, -0.5);
  CVec ym(1);
  ym << y;
  const auto ens = synthetic_ensemble({A}, ym);
  const CMat S = build_S(ens);
  CHECK((S - std::conj(y) * A).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("build_S: zero signal gives the zero matrix") {
  EnsembleSpec spec{5, 4, 0.0, 77};
  const auto ens = build_ensemble(spec, CVec::Zero(5));
  CHECK(build_S(ens).cwiseAbs().maxCoeff() == 0.0);
  InitConfig cfg;
  CHECK_THROWS_AS(spectral_initializer(ens, cfg), DegenerateMatrixError);
}

TEST_CASE("build_S: concentration around 2 x x^H improves with m") {
  const Index n = 16;
  const int trials = 50;
  double prev_mean = -1.0;
  for (Index mn : {1, 4, 10}) {
    double mean_gap = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t seed = derive_seed(21, {static_cast<std::uint64_t>(mn), static_cast<std::uint64_t>(t)});
      const CVec x = random_cvec(n, seed);
      EnsembleSpec spec{n, mn * n, 0.0, derive_seed(seed, 1)};
      const auto ens = build_ensemble(spec, x);
      const CMat diff = build_S(ens) - 2.0 * x * x.adjoint();
      mean_gap += spectral_norm(diff, 1e-8, 2000) / x.squaredNorm();
    }
    mean_gap /= trials;
    if (prev_mean >= 0.0) CHECK(mean_gap < 1.05 * prev_mean);
    prev_mean = mean_gap;
  }
}

TEST_CASE("estimate_norm4: closed forms") {
  const CMat A = quadrec::testing::random_cmat(3, 3, 2);
  const Complex c(0.8, 0.6);
  CVec y(4);
  y << c, c, c, c;
  const auto ens = synthetic_ensemble({A, A, A, A}, y);
  CHECK(estimate_norm4(ens) == doctest::Approx(std::norm(c) / 2.0).epsilon(1e-14));

  EnsembleSpec spec{5, 4, 0.0, 78};
  CHECK(estimate_norm4(build_ensemble(spec, CVec::Zero(5))) == 0.0);
}

TEST_CASE("spectral_initializer: exact rank-1 spectral matrix") {
  CVec x = random_cvec(8, 3);
  // One synthetic measurement with A = 2 x x^H makes S proportional to x x^H.
  const CMat A = 2.0 * x * x.adjoint();
  CVec y(1);
  y << quad_form(A, x);
  const auto ens = synthetic_ensemble({A}, y);

  InitConfig cfg;
  const auto init = spectral_initializer(ens, cfg);
  CHECK(std::abs(init.v0.dot(x)) / x.norm() > 1.0 - 1e-10);
  CHECK(init.v0.norm() == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(init.norm_estimate_R.has_value());
  CHECK(std::pow(init.z0.norm(), 4) ==
        doctest::Approx(*init.norm_estimate_R).epsilon(1e-10));
  CHECK(init.iters_used < cfg.power_iters);  // rank-1 converges instantly

  InitConfig known;
  known.known_norm = 3.75;
  const auto init_known = spectral_initializer(ens, known);
  CHECK(init_known.z0.norm() == doctest::Approx(3.75).epsilon(1e-12));
  CHECK(!init_known.norm_estimate_R.has_value());
}

TEST_CASE("spectral_initializer: close to the signal at high oversampling") {
  const Index n = 8;
  const CVec x = random_cvec(n, 4);
  EnsembleSpec spec{n, 50 * n, 0.0, 79};
  const auto ens = build_ensemble(spec, x);
  const auto init = spectral_initializer(ens, InitConfig{});
  CHECK(aligned_distance(init.z0, x).distance / x.norm() < 0.3);
}

TEST_CASE("spectral_initializer: mean distance shrinks from m/n=1 to m/n=10") {
  const Index n = 100;
  const int trials = 5;
  for (double q : {-1.0, -0.5, 0.0}) {
    double mean_lo = 0.0, mean_hi = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t seed =
          derive_seed(22, {static_cast<std::uint64_t>(-10 * q), static_cast<std::uint64_t>(t)});
      const CVec x = random_cvec(n, seed);
      for (bool high : {false, true}) {
        EnsembleSpec spec{n, (high ? 10 : 1) * n, q, derive_seed(seed, high)};
        const auto ens = build_ensemble(spec, x);
        const auto init = spectral_initializer(ens, InitConfig{});
        (high ? mean_hi : mean_lo) +=
            aligned_distance(init.z0, x).distance / x.norm() / trials;
      }
    }
    CHECK(mean_hi < mean_lo);
  }
}

TEST_CASE("spectral data: phase invariance and scaling covariance") {
  const Index n = 6;
  const CVec x = random_cvec(n, 5);
  EnsembleSpec spec{n, 10, -0.5, 80};
  const auto base = build_ensemble(spec, x);
  const CMat S = build_S(base);
  const double R = estimate_norm4(base);

  // global phase of x: identical measurements, S and R
  const auto rotated = build_ensemble(spec, x * std::polar(1.0, 1.234));
  CHECK((rotated.measurements - base.measurements).cwiseAbs().maxCoeff() <
        1e-12 * base.measurements.cwiseAbs().maxCoeff());
  CHECK((build_S(rotated) - S).cwiseAbs().maxCoeff() <
        1e-12 * S.cwiseAbs().maxCoeff());

  // real dilation: S scales by t^2, R by t^4
  const double t = 1.7;
  const auto scaled = build_ensemble(spec, (t * x).eval());
  CHECK((build_S(scaled) - t * t * S).cwiseAbs().maxCoeff() <
        1e-12 * S.cwiseAbs().maxCoeff());
  CHECK(estimate_norm4(scaled) ==
        doctest::Approx(std::pow(t, 4) * R).epsilon(1e-12));
}

TEST_CASE("spectral_from_spec: matches the stored-ensemble path") {
  const Index n = 16;
  const CVec x = random_cvec(n, 6);
  EnsembleSpec spec{n, 4 * n, -0.5, 81};
  const auto streamed = spectral_from_spec(spec, x);
  const auto ens = build_ensemble(spec, x);
  const CMat S = build_S(ens);
  const double R = estimate_norm4(ens);
  CHECK((streamed.S - S).cwiseAbs().maxCoeff() <
        1e-12 * S.cwiseAbs().maxCoeff());
  CHECK(streamed.R == doctest::Approx(R).epsilon(1e-12));
}

TEST_CASE("spectral_initializer: deterministic") {
  const Index n = 8;
  const CVec x = random_cvec(n, 7);
  EnsembleSpec spec{n, 3 * n, 0.0, 82};
  const auto ens = build_ensemble(spec, x);
  const auto a = spectral_initializer(ens, InitConfig{});
  const auto b = spectral_initializer(ens, InitConfig{});
  CHECK(quadrec::testing::bitwise_equal(a.z0, b.z0));
}

TEST_CASE("InitConfig: validation") {
  InitConfig bad;
  bad.power_iters = 0;
  EnsembleSpec spec{4, 2, 0.0, 83};
  const auto ens = build_ensemble(spec, random_cvec(4, 8));
  CHECK_THROWS_AS(spectral_initializer(ens, bad), std::invalid_argument);
  InitConfig neg;
  neg.known_norm = -1.0;
  CHECK_THROWS_AS(spectral_initializer(ens, neg), std::invalid_argument);
}
