#include "quadrec/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "quadrec/linalg.hpp"
#include "quadrec/parallel.hpp"
#include "quadrec/rng.hpp"

namespace quadrec {

void EnsembleSpec::validate() const {
  if (n < 1) throw std::invalid_argument("EnsembleSpec: n must be >= 1");
  if (m < 1) throw std::invalid_argument("EnsembleSpec: m must be >= 1");
  if (!(q >= -1.0 && q <= 0.0))
    throw std::domain_error("EnsembleSpec: q must lie in [-1, 0]");
}

void to_json(nlohmann::json& j, const EnsembleSpec& spec) {
  j = nlohmann::json{{"n", spec.n},
                     {"m", spec.m},
                     {"q", spec.q},
                     {"base_seed", spec.base_seed}};
}

void from_json(const nlohmann::json& j, EnsembleSpec& spec) {
  j.at("n").get_to(spec.n);
  j.at("m").get_to(spec.m);
  j.at("q").get_to(spec.q);
  j.at("base_seed").get_to(spec.base_seed);
}

double gamma_scale(Index d, double q) {
  if (d < 1) throw std::domain_error("gamma_scale: d must be >= 1");
  if (!(q >= -1.0 && q <= 0.0))
    throw std::domain_error("gamma_scale: q must lie in [-1, 0]");
  // Exact endpoints: q = 0 leaves a standard normal, q = -1 projects onto
  // the sphere where E[u_i^2] = 1/d.
  if (q == 0.0) return 1.0;
  if (q == -1.0) return std::sqrt(static_cast<double>(d));
  // gamma^2 = d / E[||s||^{2(q+1)}] with ||s|| chi-distributed:
  // E[||s||^p] = 2^{p/2} Gamma((d+p)/2) / Gamma(d/2).
  const double p = 2.0 * (q + 1.0);
  const double log_moment = 0.5 * p * std::numbers::ln2 +
                            std::lgamma(0.5 * (d + p)) - std::lgamma(0.5 * d);
  return std::sqrt(static_cast<double>(d)) * std::exp(-0.5 * log_moment);
}

namespace detail {

double fill_matrix_raw(Index n, double q, std::mt19937_64& eng, CMat& out,
                       const CVec* x, Complex* y_raw) {
  const Index d = 2 * n * n;
  out.resize(n, n);
  // complex<double> is layout-compatible with double[2]; writing the
  // interleaved coefficients in storage order realizes the documented
  // packing: coefficient 2(r n + c) -> Re A(r,c), 2(r n + c)+1 -> Im A(r,c).
  auto* coeffs = reinterpret_cast<double*>(out.data());
  NormalSampler normal(eng);
  double sumsq = 0.0;
  Complex y{};
  do {
    sumsq = 0.0;
    y = Complex{};
    for (Index r = 0; r < n; ++r) {
      double* row = coeffs + 2 * r * n;
      for (Index k = 0; k < 2 * n; ++k) {
        row[k] = normal();
        sumsq += row[k] * row[k];
      }
      if (x) y += std::conj((*x)(r)) * (out.row(r) * (*x)).value();
    }
  } while (sumsq == 0.0);  // measure-zero guard: redraw a degenerate s
  if (y_raw) *y_raw = y;
  const double norm_s = std::sqrt(sumsq);
  return gamma_scale(d, q) * std::pow(norm_s, q);
}

}  // namespace detail

RVec sample_coefficient_vector(Index d, double q, std::mt19937_64& eng) {
  if (d < 1) throw std::domain_error("sample_coefficient_vector: d must be >= 1");
  if (!(q >= -1.0 && q <= 0.0))
    throw std::domain_error("sample_coefficient_vector: q must lie in [-1, 0]");
  RVec s(d);
  NormalSampler normal(eng);
  double sumsq = 0.0;
  do {
    sumsq = 0.0;
    for (Index k = 0; k < d; ++k) {
      s(k) = normal();
      sumsq += s(k) * s(k);
    }
  } while (sumsq == 0.0);
  const double scale = gamma_scale(d, q) * std::pow(std::sqrt(sumsq), q);
  if (scale != 1.0) s *= scale;
  return s;
}

CMat sample_matrix(Index n, double q, std::mt19937_64& eng) {
  if (n < 1) throw std::domain_error("sample_matrix: n must be >= 1");
  CMat A;
  const double scale = detail::fill_matrix_raw(n, q, eng, A);
  if (scale != 1.0) A *= scale;  // q = 0 keeps the raw draw bit-exact
  return A;
}

MeasurementEnsemble build_ensemble(const EnsembleSpec& spec, const CVec& x) {
  spec.validate();
  if (x.size() != spec.n)
    throw std::invalid_argument("build_ensemble: signal length does not match spec.n");
  if (!x.allFinite())
    throw std::invalid_argument("build_ensemble: signal has non-finite entries");

  MeasurementEnsemble ens;
  ens.spec = spec;
  ens.matrices.resize(spec.m);
  ens.measurements.resize(spec.m);
  parallel_for(spec.m, [&](Index i) {
    std::mt19937_64 eng = make_stream(spec.base_seed, static_cast<std::uint64_t>(i));
    ens.matrices[i] = sample_matrix(spec.n, spec.q, eng);
    ens.measurements(i) = quad_form(ens.matrices[i], x);
  });
  return ens;
}

}  // namespace quadrec
