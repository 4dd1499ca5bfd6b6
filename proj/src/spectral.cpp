#include "quadrec/spectral.hpp"

#include <stdexcept>

#include "quadrec/linalg.hpp"
#include "quadrec/parallel.hpp"
#include "quadrec/rng.hpp"

namespace quadrec {

namespace {
// Below this many complex multiply-adds a sum runs cheaper on one thread.
constexpr Index kParallelWork = Index(1) << 24;
}  // namespace

void InitConfig::validate() const {
  if (power_iters < 1)
    throw std::invalid_argument("InitConfig: power_iters must be >= 1");
  if (known_norm && !(*known_norm > 0.0))
    throw std::invalid_argument("InitConfig: known norm must be > 0");
  if (power_tol < 0.0)
    throw std::invalid_argument("InitConfig: power_tol must be >= 0");
}

CMat build_S(const MeasurementEnsemble& ensemble) {
  const Index m = ensemble.m();
  const Index n = ensemble.n();
  if (m == 0) throw std::invalid_argument("build_S: empty ensemble");

  CMat S = CMat::Zero(n, n);
  lane_sum(
      m, S,
      [&](int, LaneRange range) {
        CMat part = CMat::Zero(n, n);
        for (Index i = range.begin; i < range.end; ++i)
          part.noalias() +=
              std::conj(ensemble.measurements(i)) * ensemble.matrices[i];
        return part;
      },
      [](CMat& acc, const CMat& part) { acc += part; },
      /*parallel=*/m * n * n >= kParallelWork);
  S /= static_cast<double>(m);
  return S;
}

double estimate_norm4(const MeasurementEnsemble& ensemble) {
  const Index m = ensemble.m();
  if (m == 0) throw std::invalid_argument("estimate_norm4: empty ensemble");
  double sum = 0.0;
  for (Index i = 0; i < m; ++i) sum += std::norm(ensemble.measurements(i));
  return sum / (2.0 * static_cast<double>(m));
}

InitResult spectral_initializer(const MeasurementEnsemble& ensemble,
                                const InitConfig& cfg) {
  cfg.validate();
  const CMat S = build_S(ensemble);
  if (S.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateMatrixError("spectral_initializer: spectral matrix is zero");

  const auto triple = leading_singular_pair(S, cfg.power_iters, cfg.power_tol);
  InitResult out;
  out.v0 = triple.v;
  out.iters_used = triple.iters_used;
  if (cfg.known_norm) {
    out.z0 = *cfg.known_norm * triple.v;
  } else {
    const double R = estimate_norm4(ensemble);
    out.norm_estimate_R = R;
    out.z0 = std::pow(R, 0.25) * triple.v;
  }
  return out;
}

StreamedSpectral spectral_from_spec(const EnsembleSpec& spec, const CVec& x) {
  spec.validate();
  if (x.size() != spec.n)
    throw std::invalid_argument("spectral_from_spec: signal length mismatch");

  const Index n = spec.n;
  struct Partial {
    CMat S;
    double sumsq_y = 0.0;
  };
  Partial total;
  total.S = CMat::Zero(n, n);
  lane_sum(
      spec.m, total,
      [&](int, LaneRange range) {
        Partial part;
        part.S = CMat::Zero(n, n);
        CMat A;
        for (Index i = range.begin; i < range.end; ++i) {
          std::mt19937_64 eng =
              make_stream(spec.base_seed, static_cast<std::uint64_t>(i));
          Complex y_raw;
          const double t = detail::fill_matrix_raw(n, spec.q, eng, A, &x, &y_raw);
          // A_i = t * A_raw and y_i = t * y_raw, so the S term
          // conj(y_i) A_i = t^2 conj(y_raw) A_raw folds into one scalar.
          const Complex y = t * y_raw;
          part.S.noalias() += (t * std::conj(y)) * A;
          part.sumsq_y += std::norm(y);
        }
        return part;
      },
      [](Partial& acc, const Partial& part) {
        acc.S += part.S;
        acc.sumsq_y += part.sumsq_y;
      },
      /*parallel=*/spec.m * n * n >= kParallelWork);

  StreamedSpectral out;
  out.S = std::move(total.S);
  out.S /= static_cast<double>(spec.m);
  out.R = total.sumsq_y / (2.0 * static_cast<double>(spec.m));
  return out;
}

}  // namespace quadrec
