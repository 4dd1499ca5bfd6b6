#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "quadrec/types.hpp"

namespace quadrec {

// Power iteration ran out of iterations; carries the last estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

class DegenerateMatrixError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// z^H A z for a square A.
template <typename DerivedA, typename DerivedZ>
typename DerivedA::Scalar quad_form(const Eigen::MatrixBase<DerivedA>& A,
                                    const Eigen::MatrixBase<DerivedZ>& z) {
  if (A.rows() != A.cols() || A.cols() != z.size())
    throw std::invalid_argument("quad_form: incompatible shapes");
  using Scalar = typename DerivedA::Scalar;
  const Vec<Scalar> w = A.derived() * z.derived();
  return z.derived().dot(w);
}

struct AlignedDistance {
  Real distance = 0.0;  // min over phases of ||z - x e^{j phi}||_2
  Real phi_min = 0.0;   // minimizing phase in (0, 2pi]; 2pi when z^H x = 0
};

// Distance modulo the global phase: dist^2 = ||z||^2 + ||x||^2 - 2 |z^H x|,
// minimized at phi = -arg(z^H x).
template <typename DerivedZ, typename DerivedX>
AlignedDistance aligned_distance(const Eigen::MatrixBase<DerivedZ>& z,
                                 const Eigen::MatrixBase<DerivedX>& x) {
  if (z.size() != x.size())
    throw std::invalid_argument("aligned_distance: length mismatch");
  const Complex ip = z.derived().dot(x.derived());
  const Real d2 = z.derived().squaredNorm() + x.derived().squaredNorm() -
                  2.0 * std::abs(ip);
  AlignedDistance out;
  out.distance = std::sqrt(std::max(d2, 0.0));
  if (std::abs(ip) == 0.0) {
    out.phi_min = 2.0 * std::numbers::pi;  // any phase is optimal
  } else {
    Real phi = -std::arg(ip);
    if (phi <= 0.0) phi += 2.0 * std::numbers::pi;
    out.phi_min = phi;
  }
  return out;
}

namespace detail {

// Fixed deterministic start for power iterations; reproducible by design.
template <typename Scalar>
Vec<Scalar> power_start(Index n) {
  return Vec<Scalar>::Constant(n, Scalar(1) / std::sqrt(Real(n)));
}

}  // namespace detail

/// Largest singular value of M via power iteration on M^H M to relative
/// tolerance `tol`. Throws ConvergenceError (with the last estimate) if
/// `max_iter` rounds do not converge.
template <typename Derived>
Real spectral_norm(const Eigen::MatrixBase<Derived>& M, Real tol = 1e-10,
                   int max_iter = 1000) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() == 0 || M.cols() == 0)
    throw std::invalid_argument("spectral_norm: empty matrix");
  if (tol <= 0.0) throw std::invalid_argument("spectral_norm: tol must be > 0");
  if (M.derived().cwiseAbs().maxCoeff() == 0.0) return 0.0;

  Vec<Scalar> v = detail::power_start<Scalar>(M.cols());
  // The all-ones start can land in the null space of a structured M; fall
  // back to canonical basis vectors (some column of a nonzero M is nonzero).
  for (Index k = 0; (M.derived() * v).squaredNorm() == 0.0; ++k) {
    if (k >= M.cols())
      throw DegenerateMatrixError("spectral_norm: no usable start vector");
    v.setZero();
    v(k) = Scalar(1);
  }

  Real sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec<Scalar> w = M.derived() * v;
    const Real sigma_next = w.norm();
    if (sigma_next == 0.0) return 0.0;
    Vec<Scalar> t = M.derived().adjoint() * w;
    const Real tn = t.norm();
    if (tn == 0.0) return sigma_next;
    v = t / tn;
    if (it > 0 && std::abs(sigma_next - sigma) <= tol * sigma_next) {
      return sigma_next;
    }
    sigma = sigma_next;
  }
  throw ConvergenceError("spectral_norm: power iteration did not converge", sigma);
}

template <typename Scalar>
struct SingularTriple {
  Vec<Scalar> u;
  Real sigma = 0.0;
  Vec<Scalar> v;
  int iters_used = 0;
};

/// Leading singular triple of a square M by `iters` rounds of
/// v <- M^H M v / ||M^H M v|| from the fixed start, then u = M v / ||M v||.
/// If `tol` > 0, stops early once successive iterates move less than tol.
template <typename Derived>
SingularTriple<typename Derived::Scalar> leading_singular_pair(
    const Eigen::MatrixBase<Derived>& M, int iters, Real tol = 0.0) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() != M.cols())
    throw std::invalid_argument("leading_singular_pair: matrix must be square");
  if (iters < 1)
    throw std::invalid_argument("leading_singular_pair: iters must be >= 1");

  Vec<Scalar> v = detail::power_start<Scalar>(M.cols());
  int used = 0;
  for (int it = 1; it <= iters; ++it) {
    Vec<Scalar> w = M.derived().adjoint() * (M.derived() * v);
    const Real wn = w.norm();
    if (wn == 0.0)
      throw DegenerateMatrixError("leading_singular_pair: M^H M v vanished");
    w /= wn;
    used = it;
    if (tol > 0.0 && (w - v).norm() < tol) {
      v.swap(w);
      break;
    }
    v.swap(w);
  }

  SingularTriple<Scalar> out;
  Vec<Scalar> Mv = M.derived() * v;
  out.sigma = Mv.norm();
  if (out.sigma == 0.0)
    throw DegenerateMatrixError("leading_singular_pair: M v vanished");
  out.u = Mv / out.sigma;
  out.v = std::move(v);
  out.iters_used = used;
  return out;
}

/// Leading singular triple through a full SVD. Exists as the benchmark
/// baseline and as an independent oracle for the power-iteration routines.
template <typename Derived>
SingularTriple<typename Derived::Scalar> leading_singular_pair_svd(
    const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::BDCSVD<Dense> svd(M.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularTriple<Scalar> out;
  out.u = svd.matrixU().col(0);
  out.sigma = svd.singularValues()(0);
  out.v = svd.matrixV().col(0);
  out.iters_used = 0;
  return out;
}

}  // namespace quadrec
