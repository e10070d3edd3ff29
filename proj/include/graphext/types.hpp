#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace graphext {

using Real = double;
using Complex = std::complex<double>;

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

using SparseRealMatrix = Eigen::SparseMatrix<Real>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

}  // namespace graphext
