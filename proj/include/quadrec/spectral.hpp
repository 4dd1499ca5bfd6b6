#pragma once

#include <optional>

#include "quadrec/ensemble.hpp"
#include "quadrec/types.hpp"

namespace quadrec {

struct InitConfig {
  // Known signal norm; when absent the norm is estimated from the
  // measurements via R = (1/2m) sum |y_i|^2.
  std::optional<double> known_norm;
  int power_iters = 10;
  double power_tol = 1e-12;  // early exit on successive-vector change; 0 disables

  void validate() const;
};

struct InitResult {
  CVec z0;
  CVec v0;                               // unit leading right singular vector
  std::optional<double> norm_estimate_R; // set in estimated-norm mode
  int iters_used = 0;
};

/// S = (1/m) sum conj(y_i) A_i, the data-built estimate of 2 x x^H.
CMat build_S(const MeasurementEnsemble& ensemble);

/// R = (1/2m) sum |y_i|^2, an estimate of ||x||_2^4.
double estimate_norm4(const MeasurementEnsemble& ensemble);

/// Spectral initializer: scale the leading right singular vector of S by the
/// known norm or by R^{1/4}.
InitResult spectral_initializer(const MeasurementEnsemble& ensemble,
                                const InitConfig& cfg);

// Streaming accumulation of S and R directly from a spec, one matrix at a
// time. Equivalent (up to roundoff) to build_S/estimate_norm4 on a stored
// ensemble, but with O(n^2) memory; the benchmark sizes never fit in RAM.
struct StreamedSpectral {
  CMat S;
  double R = 0.0;
};

StreamedSpectral spectral_from_spec(const EnsembleSpec& spec, const CVec& x);

}  // namespace quadrec
