#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "quadrec/ensemble.hpp"
#include "quadrec/types.hpp"

namespace quadrec {

struct SolverConfig {
  double step_scale = 0.1;        // eta = step_scale / norm_sq_estimate
  double norm_sq_estimate = 1.0;  // estimate of ||x||_2^2
  int max_iters = 2500;
  double succ_tol = 1e-6;         // on the successive-iterate distance
  bool record_trajectory = false;

  // Stopping measures the aligned distance between consecutive iterates,
  // either divided by sqrt(norm_sq_estimate) or as-is.
  enum class StopMode { relative, absolute };
  StopMode stop_mode = StopMode::relative;

  void validate() const;
};

enum class Termination { tolerance_met, max_iters };

struct TrajectoryPoint {
  int iter = 0;            // 1-based update index
  double loss = 0.0;       // f(z^{iter-1}), the value the step descended
  double succ_rel_dist = 0.0;  // dist(z^{iter-1}, z^{iter}) / sqrt(norm_sq_estimate)
};

struct RecoveryResult {
  CVec z_final;
  int iters = 0;
  Termination termination = Termination::max_iters;
  std::vector<TrajectoryPoint> trajectory;  // filled iff record_trajectory
  std::vector<double> dist_to_truth;        // dist(z^t, truth), t = 0..iters, iff truth given
};

// The iterates left the finite range; reports the update index.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// f(z) = (1/m) sum |z^H A_i z - y_i|^2.
Real loss(const CVec& z, const MeasurementEnsemble& ensemble);

/// Wirtinger gradient: (1/m) sum [ conj(c_i) A_i z + c_i A_i^H z ] with
/// residuals c_i = z^H A_i z - y_i.
CVec gradient(const CVec& z, const MeasurementEnsemble& ensemble);

/// Gradient and loss from one pass over the ensemble.
std::pair<CVec, Real> gradient_and_loss(const CVec& z,
                                        const MeasurementEnsemble& ensemble);

/// Gradient descent z <- z - eta * grad f(z) from z0 until the successive
/// distance drops below succ_tol or max_iters updates are spent.
RecoveryResult wf_run(const CVec& z0, const MeasurementEnsemble& ensemble,
                      const SolverConfig& cfg,
                      const std::optional<CVec>& truth = std::nullopt);

}  // namespace quadrec
