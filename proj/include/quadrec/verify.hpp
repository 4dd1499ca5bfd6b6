#pragma once

#include <random>
#include <vector>

#include "quadrec/ensemble.hpp"
#include "quadrec/types.hpp"

namespace quadrec {

// Regularity condition parameters RC(alpha, beta, rho) at concentration
// level nu. The pair must satisfy 4/(alpha beta) <= 1 so that a step size
// eta <= 2/beta contracts the error.
struct RegularityParams {
  double nu = 0.01;
  double rho = 0.2;
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const;
};

struct RegularityReport {
  bool holds = false;
  double lhs = 0.0;  // Re< grad f(z), z - x e^{j phi_min} >
  double rhs = 0.0;  // dist^2 / alpha + ||grad f||^2 / beta
};

/// || (1/m) sum (p^H A_i^H q) A_i - 2 q p^H || for unit probes p, q.
double concentration_gap(const std::vector<CMat>& matrices, const CVec& p,
                         const CVec& q);

/// Evaluates the regularity condition at z; the caller must keep z inside
/// E(rho) = { dist(z, truth) <= rho ||truth|| }.
RegularityReport regularity_check(const CVec& z, const CVec& truth,
                                  const MeasurementEnsemble& ensemble,
                                  const RegularityParams& params);

/// True iff dist_traj[t]^2 <= (1 - 2 eta / alpha)^t dist_traj[0]^2 for all t
/// (up to 1e-10 absolute slack).
bool convergence_envelope_check(const std::vector<double>& dist_traj,
                                double eta, double alpha);

/// Central-difference directional derivative of the loss at z along d.
double fd_directional_derivative(const CVec& z, const CVec& d,
                                 const MeasurementEnsemble& ensemble, double h);

/// Draws z = truth + h with h approximately uniform over the ball of radius
/// rho ||truth||: Gaussian direction, radius rho ||truth|| u^{1/(2n)}.
CVec sample_in_neighborhood(const CVec& truth, double rho, std::mt19937_64& eng);

}  // namespace quadrec
