#pragma once

#include <Eigen/Dense>

namespace marketnet {

struct SymEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, aligned with values
  int sweeps = 0;
  double offdiag = 0.0;     // remaining off-diagonal Frobenius norm
};

// Cyclic Jacobi rotations for symmetric matrices. Runs full sweeps until the
// off-diagonal Frobenius norm drops below tol_rel * ||A||_F.
SymEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol_rel = 1e-13, int max_sweeps = 64);

}  // namespace marketnet
