#pragma once

#include <Eigen/Dense>

namespace graphflow {

// Singular decomposition of a linear map df : T_xM -> T_yN between
// two-dimensional inner-product spaces.  The singular values lambda_1 <=
// lambda_2 are the square roots of the eigenvalues of the pullback metric
// df^T gN df relative to gM.  The frames diagonalise the geometry of the
// graph of df inside the product space:
//
//   alpha_i : gM-orthonormal right singular vectors (domain)
//   beta_i  : gN-orthonormal left singular vectors (target), df(alpha_i) =
//             lambda_i beta_i whenever lambda_i is above the rank cutoff
//   e_i     = (alpha_i, df(alpha_i)) / sqrt(1 + lambda_i^2)   tangent frame
//   xi_i    = (-lambda_i alpha_i, beta_i) / sqrt(1 + lambda_i^2) normal frame
//
// e and xi are orthonormal for the product metric gM x gN and each
// 4-component vector is stored as (domain part, target part).
struct SingularData {
  double lambda[2];
  int rank;
  double alpha[2][2];  // alpha[i][component]
  double beta[2][2];
  double e[2][4];
  double xi[2][4];
};

SingularData singular_decompose(const Eigen::Matrix2d& gM,
                                const Eigen::Matrix2d& gN,
                                const Eigen::Matrix2d& df);

// Values of the parallel tensor s = gM - gN on the product, restricted to
// the singular frames.  In these frames s is diagonal with the closed forms
//
//   s(e_i, e_i)       =  (1 - lambda_i^2) / (1 + lambda_i^2)
//   s(xi_i, xi_i)     = -(1 - lambda_i^2) / (1 + lambda_i^2)
//   s(e_i, xi_i)      = -2 lambda_i / (1 + lambda_i^2)
//
// and every other pairing vanishes.  eps_node is the smallest tangent
// diagonal entry; it is positive exactly when the map is length-decreasing
// at this point.
struct STensorValues {
  double s_diag[2];
  double sperp_diag[2];
  double mixed[2];
  double eps_node;
};

STensorValues s_tensor_values(const SingularData& sd);

}  // namespace graphflow
