#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace forge::linalg {

struct EigenPairs {
  std::vector<double> values;  // ascending
  Eigen::MatrixXd vectors;     // one unit-norm column per value
};

/// The `count` smallest eigenpairs of a dense symmetric matrix.
///
/// Householder tridiagonalization, then per unreduced tridiagonal block:
/// Sturm-sequence bisection for eigenvalues and inverse iteration (with
/// Gram-Schmidt against earlier vectors of the same block) for eigenvectors.
/// Cost is dominated by the O(n^3) reduction; only `count` vectors are
/// back-transformed. Inverse iteration stops once the residual
/// ||T x - lambda x|| is below `tolerance` * ||T||.
///
/// Throws NonConvergence if a residual stays above 1e-6 * ||T||.
EigenPairs smallest_eigenpairs(const Eigen::MatrixXd& symmetric, std::size_t count,
                               std::uint64_t seed, double tolerance = 1e-8);

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off)
/// strictly less than x.
std::size_t sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x);

}  // namespace forge::linalg
