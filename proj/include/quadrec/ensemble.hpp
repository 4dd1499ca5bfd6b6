#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

#include "quadrec/types.hpp"

namespace quadrec {

// Parameters of a measurement ensemble. `q` selects the coefficient
// distribution: q = 0 is iid Gaussian, q = -1 is uniform on the sphere,
// values in between interpolate. Coefficients are always scaled to unit
// per-coordinate variance.
struct EnsembleSpec {
  Index n = 0;        // signal length
  Index m = 0;        // number of measurements
  double q = 0.0;     // shape parameter in [-1, 0]
  std::uint64_t base_seed = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const EnsembleSpec& spec);
void from_json(const nlohmann::json& j, EnsembleSpec& spec);

// m measurement matrices plus the quadratic measurements y_i = x^H A_i x.
// Regenerating from the same spec reproduces the matrices bit for bit.
struct MeasurementEnsemble {
  EnsembleSpec spec;
  std::vector<CMat> matrices;
  CVec measurements;

  Index n() const { return spec.n; }
  Index m() const { return spec.m; }
};

/// Scaling gamma such that the coefficient vector r = gamma * ||s||^q * s
/// (s standard normal in R^d) has unit per-coordinate second moment.
double gamma_scale(Index d, double q);

/// One coefficient vector r = gamma * ||s||^q * s of length d.
RVec sample_coefficient_vector(Index d, double q, std::mt19937_64& eng);

/// One n x n measurement matrix: a coefficient vector of length 2 n^2 packed
/// row-major, consecutive (real, imag) pairs per entry.
CMat sample_matrix(Index n, double q, std::mt19937_64& eng);

/// The full ensemble for a signal: matrix i comes from the stream
/// (base_seed, i), measurements are y_i = x^H A_i x. Pure in (spec, x).
MeasurementEnsemble build_ensemble(const EnsembleSpec& spec, const CVec& x);

namespace detail {

// Fills `out` with the raw (unscaled) normal coefficients of one matrix and
// returns the scale t = gamma * ||s||^q that sample_matrix would apply.
// When `x` is given, also accumulates y_raw = x^H A_raw x row by row while
// the data is cache-hot; the scaled measurement is then t * y_raw.
double fill_matrix_raw(Index n, double q, std::mt19937_64& eng, CMat& out,
                       const CVec* x = nullptr, Complex* y_raw = nullptr);

}  // namespace detail

}  // namespace quadrec
