#include "quadrec/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "quadrec/linalg.hpp"
#include "quadrec/parallel.hpp"
#include "quadrec/rng.hpp"
#include "quadrec/wf.hpp"

namespace quadrec {

void RegularityParams::validate() const {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("RegularityParams: nu must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("RegularityParams: rho must lie in (0, 1)");
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("RegularityParams: alpha and beta must be > 0");
  if (4.0 / (alpha * beta) > 1.0)
    throw std::invalid_argument("RegularityParams: need 4/(alpha*beta) <= 1");
}

double concentration_gap(const std::vector<CMat>& matrices, const CVec& p,
                         const CVec& q) {
  if (matrices.empty())
    throw std::invalid_argument("concentration_gap: no matrices");
  const Index n = matrices.front().rows();
  if (p.size() != n || q.size() != n)
    throw std::invalid_argument("concentration_gap: probe length mismatch");
  if (std::abs(p.norm() - 1.0) > 1e-10 || std::abs(q.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("concentration_gap: probes must be unit norm");

  const Index m = static_cast<Index>(matrices.size());
  CMat G = CMat::Zero(n, n);
  lane_sum(
      m, G,
      [&](int, LaneRange range) {
        CMat part = CMat::Zero(n, n);
        for (Index i = range.begin; i < range.end; ++i) {
          // p^H A^H q = conj(q^H A p)
          const Complex coef = std::conj(q.dot(matrices[i] * p));
          part.noalias() += coef * matrices[i];
        }
        return part;
      },
      [](CMat& acc, const CMat& part) { acc += part; },
      m * n * n >= (Index(1) << 24));
  G /= static_cast<double>(m);
  G.noalias() -= 2.0 * q * p.adjoint();
  return spectral_norm(G, 1e-10, 5000);
}

RegularityReport regularity_check(const CVec& z, const CVec& truth,
                                  const MeasurementEnsemble& ensemble,
                                  const RegularityParams& params) {
  params.validate();
  const auto aligned = aligned_distance(z, truth);
  const double truth_norm = truth.norm();
  if (aligned.distance > params.rho * truth_norm * (1.0 + 1e-12))
    throw std::invalid_argument("regularity_check: z lies outside E(rho)");

  const CVec g = gradient(z, ensemble);
  const CVec w = z - truth * std::polar(1.0, aligned.phi_min);

  RegularityReport rep;
  rep.lhs = w.dot(g).real();
  rep.rhs = aligned.distance * aligned.distance / params.alpha +
            g.squaredNorm() / params.beta;
  // Both sides live in units of ||h||^2 ||x||^2; the slack only absorbs
  // roundoff at h ~ 0 where the exact sides are 0 >= 0.
  const double slack = 1e-10 * std::pow(truth_norm, 4);
  rep.holds = rep.lhs >= rep.rhs - slack;
  return rep;
}

bool convergence_envelope_check(const std::vector<double>& dist_traj,
                                double eta, double alpha) {
  if (dist_traj.empty())
    throw std::invalid_argument("convergence_envelope_check: empty trajectory");
  for (double d : dist_traj)
    if (!(d >= 0.0))
      throw std::invalid_argument("convergence_envelope_check: negative distance");
  const double rate = 1.0 - 2.0 * eta / alpha;
  if (rate < 0.0)
    throw std::invalid_argument("convergence_envelope_check: 1 - 2 eta/alpha < 0");

  double envelope = dist_traj.front() * dist_traj.front();
  for (std::size_t t = 0; t < dist_traj.size(); ++t) {
    if (dist_traj[t] * dist_traj[t] > envelope + 1e-10) return false;
    envelope *= rate;
  }
  return true;
}

double fd_directional_derivative(const CVec& z, const CVec& d,
                                 const MeasurementEnsemble& ensemble, double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("fd_directional_derivative: h must be > 0");
  const double fp = loss(z + h * d, ensemble);
  const double fm = loss(z - h * d, ensemble);
  return (fp - fm) / (2.0 * h);
}

CVec sample_in_neighborhood(const CVec& truth, double rho, std::mt19937_64& eng) {
  const Index n = truth.size();
  NormalSampler normal(eng);
  CVec dir(n);
  for (Index k = 0; k < n; ++k) dir(k) = Complex(normal(), normal());
  const double dn = dir.norm();
  if (dn == 0.0) return sample_in_neighborhood(truth, rho, eng);
  const double u = (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
  const double radius =
      rho * truth.norm() * std::pow(u, 1.0 / (2.0 * static_cast<double>(n)));
  return truth + (radius / dn) * dir;
}

}  // namespace quadrec
