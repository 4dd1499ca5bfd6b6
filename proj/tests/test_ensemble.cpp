#include <doctest.h>

#include <cmath>
#include <random>

#include "quadrec/ensemble.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/rng.hpp"
#include "test_util.hpp"

using namespace quadrec;
using quadrec::testing::bitwise_equal;
using quadrec::testing::random_cvec;

TEST_CASE("gamma_scale: exact endpoints") {
  CHECK(gamma_scale(8, 0.0) == 1.0);
  CHECK(gamma_scale(1, 0.0) == 1.0);
  CHECK(gamma_scale(8, -1.0) == std::sqrt(8.0));
  CHECK(gamma_scale(50, -1.0) == std::sqrt(50.0));
}

TEST_CASE("gamma_scale: matches a Monte Carlo chi-moment oracle") {
  // gamma = sqrt(d / E[||s||^{2(q+1)}]); estimate the moment by sampling.
  const Index d = 8;
  const double q = -0.5;
  std::mt19937_64 eng(2024);
  std::normal_distribution<double> nd;
  const long trials = 1'200'000;
  double moment = 0.0;
  for (long t = 0; t < trials; ++t) {
    double sumsq = 0.0;
    for (Index k = 0; k < d; ++k) {
      const double v = nd(eng);
      sumsq += v * v;
    }
    moment += std::pow(sumsq, q + 1.0);  // ||s||^{2(q+1)}
  }
  moment /= trials;
  const double oracle = std::sqrt(static_cast<double>(d) / moment);
  CHECK(gamma_scale(d, q) == doctest::Approx(oracle).epsilon(0.005));
}

TEST_CASE("gamma_scale: domain errors") {
  CHECK_THROWS_AS(gamma_scale(8, 0.5), std::domain_error);
  CHECK_THROWS_AS(gamma_scale(8, -1.5), std::domain_error);
  CHECK_THROWS_AS(gamma_scale(0, 0.0), std::domain_error);
}

TEST_CASE("sample_coefficient_vector: q=-1 lands on the sphere of radius sqrt(d)") {
  auto eng = make_stream(5, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const RVec r = sample_coefficient_vector(24, -1.0, eng);
    CHECK(r.norm() == doctest::Approx(std::sqrt(24.0)).epsilon(1e-12));
  }
}

TEST_CASE("sample_coefficient_vector: pooled second moment is 1") {
  const Index d = 32;
  for (double q : {0.0, -0.5}) {
    auto eng = make_stream(6, static_cast<std::uint64_t>(q * -2));
    double sumsq = 0.0;
    const long draws = 100'000;
    for (long t = 0; t < draws; ++t)
      sumsq += sample_coefficient_vector(d, q, eng).squaredNorm();
    const double pooled = sumsq / (static_cast<double>(draws) * d);
    CHECK(pooled > 0.98);
    CHECK(pooled < 1.02);
  }
}

TEST_CASE("sample_matrix: packing matches the coefficient vector layout") {
  // Same stream position implies the matrix is exactly the coefficient
  // vector reshaped row-major with interleaved (real, imag) pairs.
  const Index n = 5;
  auto eng_vec = make_stream(7, 3);
  auto eng_mat = make_stream(7, 3);
  const RVec r = sample_coefficient_vector(2 * n * n, -0.5, eng_vec);
  const CMat A = sample_matrix(n, -0.5, eng_mat);
  for (Index row = 0; row < n; ++row)
    for (Index col = 0; col < n; ++col) {
      const Index k = 2 * (row * n + col);
      CHECK(A(row, col).real() == r(k));
      CHECK(A(row, col).imag() == r(k + 1));
    }
}

TEST_CASE("sample_matrix: determinism at equal stream positions") {
  auto e1 = make_stream(8, 1);
  auto e2 = make_stream(8, 1);
  CHECK(bitwise_equal(sample_matrix(4, -0.3, e1), sample_matrix(4, -0.3, e2)));
}

TEST_CASE("sample_matrix: entry second moment is 2, distinct entries uncorrelated") {
  const Index n = 4;
  const int draws = 10'000;
  Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(n, n);
  std::vector<CMat> sample;
  sample.reserve(draws);
  auto eng = make_stream(9, 0);
  for (int t = 0; t < draws; ++t) {
    sample.push_back(sample_matrix(n, 0.0, eng));
    moment += sample.back().cwiseAbs2();
  }
  moment /= draws;
  CHECK(moment.minCoeff() > 1.9);
  CHECK(moment.maxCoeff() < 2.1);

  // pooled over all ordered pairs of distinct entries
  double cross = 0.0;
  int pairs = 0;
  for (Index a = 0; a < n * n; ++a)
    for (Index b = 0; b < n * n; ++b) {
      if (a == b) continue;
      Complex acc = 0.0;
      for (const auto& A : sample)
        acc += std::conj(A(a / n, a % n)) * A(b / n, b % n);
      cross += std::abs(acc / static_cast<double>(draws));
      ++pairs;
    }
  CHECK(cross / pairs < 0.05);
}

TEST_CASE("sample_matrix: rotation invariance of pooled entry moments") {
  const Index n = 4;
  // fixed unitary: QR of a fixed complex matrix
  const CMat G = quadrec::testing::random_cmat(n, n, 777);
  const Eigen::MatrixXcd Q =
      Eigen::HouseholderQR<Eigen::MatrixXcd>(G).householderQ();
  const int draws = 10'000;
  Eigen::MatrixXd mom_a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd mom_b = Eigen::MatrixXd::Zero(n, n);
  auto eng = make_stream(10, 0);
  for (int t = 0; t < draws; ++t) {
    const CMat A = sample_matrix(n, -0.5, eng);
    mom_a += A.cwiseAbs2();
    mom_b += (Q * A).cwiseAbs2();
  }
  const double diff = ((mom_a - mom_b) / draws).cwiseAbs().mean();
  CHECK(diff < 0.05);
}

TEST_CASE("streams of distinct measurement indices are uncorrelated") {
  const Index n = 4;
  const int draws = 10'000;
  Complex acc = 0.0;
  for (int t = 0; t < draws; ++t) {
    auto ea = make_stream(11, 2 * t);
    auto eb = make_stream(11, 2 * t + 1);
    const CMat A = sample_matrix(n, 0.0, ea);
    const CMat B = sample_matrix(n, 0.0, eb);
    acc += (A.conjugate().cwiseProduct(B)).sum() / static_cast<double>(n * n);
  }
  CHECK(std::abs(acc) / draws < 0.05);
}

TEST_CASE("build_ensemble: trivial signals") {
  EnsembleSpec spec{6, 5, 0.0, 13};
  const CVec zero = CVec::Zero(6);
  const auto ens0 = build_ensemble(spec, zero);
  CHECK(ens0.measurements.cwiseAbs().maxCoeff() == 0.0);

  CVec e1 = CVec::Zero(6);
  e1(0) = 1.0;
  const auto ens1 = build_ensemble(spec, e1);
  for (Index i = 0; i < spec.m; ++i)
    CHECK(std::abs(ens1.measurements(i) - ens1.matrices[i](0, 0)) <
          1e-15 * std::abs(ens1.matrices[i](0, 0)));
}

TEST_CASE("build_ensemble: bitwise reproducible from the spec") {
  EnsembleSpec spec{8, 12, -0.5, 14};
  const CVec x = random_cvec(8, 900);
  const auto a = build_ensemble(spec, x);
  const auto b = build_ensemble(spec, x);
  REQUIRE(a.matrices.size() == b.matrices.size());
  for (std::size_t i = 0; i < a.matrices.size(); ++i)
    CHECK(bitwise_equal(a.matrices[i], b.matrices[i]));
  CHECK(bitwise_equal(a.measurements, b.measurements));
}

TEST_CASE("build_ensemble: norm estimator concentrates at ||x||^4") {
  // mean of (1/2m) sum |y_i|^2 over 200 ensembles, m = 10 n, n = 16
  const Index n = 16;
  EnsembleSpec spec{n, 10 * n, 0.0, 0};
  const CVec x = random_cvec(n, 1000);
  const double x4 = std::pow(x.squaredNorm(), 2);
  double mean_R = 0.0;
  const int ensembles = 200;
  for (int t = 0; t < ensembles; ++t) {
    spec.base_seed = derive_seed(15, t);
    const auto ens = build_ensemble(spec, x);
    double sum = 0.0;
    for (Index i = 0; i < spec.m; ++i) sum += std::norm(ens.measurements(i));
    mean_R += sum / (2.0 * spec.m);
  }
  mean_R /= ensembles;
  CHECK(mean_R / x4 > 0.95);
  CHECK(mean_R / x4 < 1.05);
}

TEST_CASE("build_ensemble: shape and domain errors") {
  EnsembleSpec spec{6, 5, 0.0, 13};
  CHECK_THROWS_AS(build_ensemble(spec, random_cvec(7, 1)), std::invalid_argument);
  EnsembleSpec bad_q{6, 5, 0.25, 13};
  CHECK_THROWS_AS(build_ensemble(bad_q, random_cvec(6, 1)), std::domain_error);
  EnsembleSpec bad_m{6, 0, 0.0, 13};
  CHECK_THROWS_AS(build_ensemble(bad_m, random_cvec(6, 1)), std::invalid_argument);
}

TEST_CASE("EnsembleSpec: JSON round trip") {
  const EnsembleSpec spec{33, 200, -0.75, 0xDEADBEEFull};
  const nlohmann::json j = spec;
  const auto back = j.get<EnsembleSpec>();
  CHECK(back.n == spec.n);
  CHECK(back.m == spec.m);
  CHECK(back.q == spec.q);
  CHECK(back.base_seed == spec.base_seed);
  CHECK(j.at("n") == 33);
}
