#include "quadrec/wf.hpp"

#include <cmath>

#include "quadrec/linalg.hpp"
#include "quadrec/parallel.hpp"

namespace quadrec {

void SolverConfig::validate() const {
  if (!(step_scale > 0.0))
    throw std::invalid_argument("SolverConfig: step_scale must be > 0");
  if (!(norm_sq_estimate > 0.0))
    throw std::invalid_argument("SolverConfig: norm_sq_estimate must be > 0");
  if (max_iters < 1)
    throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(succ_tol > 0.0))
    throw std::invalid_argument("SolverConfig: succ_tol must be > 0");
}

namespace {

constexpr Index kParallelWork = Index(1) << 24;

struct GradLoss {
  CVec g;
  double loss = 0.0;
};

// One sweep over a lane of measurements. Each matrix row is touched once:
// it feeds both w = A z and v = A^H z while resident in cache, which makes
// the solver memory-bound on a single pass instead of two.
GradLoss lane_gradient(const MeasurementEnsemble& ens, const CVec& z,
                       LaneRange range) {
  const Index n = z.size();
  GradLoss out;
  out.g = CVec::Zero(n);
  CVec w(n), v(n);
  for (Index i = range.begin; i < range.end; ++i) {
    const CMat& A = ens.matrices[i];
    v.setZero();
    for (Index r = 0; r < n; ++r) {
      const auto row = A.row(r);
      w(r) = (row * z).value();
      v.noalias() += z(r) * row.adjoint();
    }
    const Complex c = z.dot(w) - ens.measurements(i);
    out.g.noalias() += std::conj(c) * w + c * v;
    out.loss += std::norm(c);
  }
  return out;
}

double lane_loss(const MeasurementEnsemble& ens, const CVec& z, LaneRange range) {
  const Index n = z.size();
  double sum = 0.0;
  CVec w(n);
  for (Index i = range.begin; i < range.end; ++i) {
    w.noalias() = ens.matrices[i] * z;
    sum += std::norm(z.dot(w) - ens.measurements(i));
  }
  return sum;
}

void check_shapes(const CVec& z, const MeasurementEnsemble& ens, const char* who) {
  if (z.size() != ens.n())
    throw std::invalid_argument(std::string(who) + ": iterate length mismatch");
  if (static_cast<Index>(ens.matrices.size()) != ens.m() ||
      ens.measurements.size() != ens.m())
    throw std::invalid_argument(std::string(who) + ": inconsistent ensemble");
}

}  // namespace

Real loss(const CVec& z, const MeasurementEnsemble& ensemble) {
  check_shapes(z, ensemble, "loss");
  const Index m = ensemble.m();
  double sum = 0.0;
  lane_sum(
      m, sum,
      [&](int, LaneRange range) { return lane_loss(ensemble, z, range); },
      [](double& acc, double part) { acc += part; },
      m * z.size() * z.size() >= kParallelWork);
  return sum / static_cast<double>(m);
}

std::pair<CVec, Real> gradient_and_loss(const CVec& z,
                                        const MeasurementEnsemble& ensemble) {
  check_shapes(z, ensemble, "gradient");
  const Index m = ensemble.m();
  GradLoss total;
  total.g = CVec::Zero(z.size());
  lane_sum(
      m, total,
      [&](int, LaneRange range) { return lane_gradient(ensemble, z, range); },
      [](GradLoss& acc, const GradLoss& part) {
        acc.g += part.g;
        acc.loss += part.loss;
      },
      2 * m * z.size() * z.size() >= kParallelWork);
  total.g /= static_cast<double>(m);
  total.loss /= static_cast<double>(m);
  return {std::move(total.g), total.loss};
}

CVec gradient(const CVec& z, const MeasurementEnsemble& ensemble) {
  return gradient_and_loss(z, ensemble).first;
}

RecoveryResult wf_run(const CVec& z0, const MeasurementEnsemble& ensemble,
                      const SolverConfig& cfg, const std::optional<CVec>& truth) {
  cfg.validate();
  check_shapes(z0, ensemble, "wf_run");
  if (truth && truth->size() != ensemble.n())
    throw std::invalid_argument("wf_run: truth length mismatch");

  const double eta = cfg.step_scale / cfg.norm_sq_estimate;
  const double norm_scale = std::sqrt(cfg.norm_sq_estimate);

  RecoveryResult res;
  CVec z = z0;
  if (truth) res.dist_to_truth.push_back(aligned_distance(z, *truth).distance);
  if (cfg.record_trajectory) res.trajectory.reserve(64);

  for (int t = 1; t <= cfg.max_iters; ++t) {
    auto [g, f] = gradient_and_loss(z, ensemble);
    if (!std::isfinite(f))
      throw DivergenceError("wf_run: non-finite loss at iteration " + std::to_string(t), t);
    CVec z_next = z - eta * g;
    if (!z_next.allFinite())
      throw DivergenceError("wf_run: non-finite iterate at iteration " + std::to_string(t), t);

    const double step_dist = aligned_distance(z, z_next).distance;
    if (cfg.record_trajectory)
      res.trajectory.push_back({t, f, step_dist / norm_scale});
    if (truth)
      res.dist_to_truth.push_back(aligned_distance(z_next, *truth).distance);

    z.swap(z_next);
    res.iters = t;
    const double measured =
        cfg.stop_mode == SolverConfig::StopMode::relative ? step_dist / norm_scale
                                                          : step_dist;
    if (measured < cfg.succ_tol) {
      res.termination = Termination::tolerance_met;
      res.z_final = std::move(z);
      return res;
    }
  }
  res.termination = Termination::max_iters;
  res.z_final = std::move(z);
  return res;
}

}  // namespace quadrec
