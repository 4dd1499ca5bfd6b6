#pragma once

#include <Eigen/Dense>
#include <complex>

namespace quadrec {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Measurement matrices are filled coefficient-by-coefficient in row-major
// order, so the dense type stores rows contiguously.
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RVec = Vec<Real>;
using CVec = Vec<Complex>;
using CMat = Mat<Complex>;

}  // namespace quadrec
