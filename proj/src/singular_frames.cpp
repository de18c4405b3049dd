#include "graphflow/singular_frames.hpp"

#include <algorithm>
#include <cmath>

#include "graphflow/errors.hpp"

namespace graphflow {

namespace {

// Flip v so that its largest-magnitude component is positive.  Eigenvectors
// are only defined up to sign; this pins one deterministically.
void fix_sign(double v[2]) {
  const double pivot = std::abs(v[0]) >= std::abs(v[1]) ? v[0] : v[1];
  if (pivot < 0.0) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
}

double gdot(const Eigen::Matrix2d& g, const double a[2], const double b[2]) {
  return a[0] * g(0, 0) * b[0] + a[0] * g(0, 1) * b[1] +
         a[1] * g(1, 0) * b[0] + a[1] * g(1, 1) * b[1];
}

}  // namespace

SingularData singular_decompose(const Eigen::Matrix2d& gM,
                                const Eigen::Matrix2d& gN,
                                const Eigen::Matrix2d& df) {
  if (!(gM(0, 0) > 0.0) || !(gM.determinant() > 0.0))
    throw NumericalError("singular_decompose: domain metric is not positive definite");
  if (!(gN(0, 0) > 0.0) || !(gN.determinant() > 0.0))
    throw NumericalError("singular_decompose: target metric is not positive definite");

  const Eigen::Matrix2d pullback = df.transpose() * gN * df;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> eig(
      pullback, gM, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (eig.info() != Eigen::Success)
    throw NumericalError("singular_decompose: generalized eigensolve failed");

  SingularData sd{};
  // Eigenvalues come back ascending and the eigenvectors are gM-orthonormal.
  for (int i = 0; i < 2; ++i) {
    sd.lambda[i] = std::sqrt(std::max(eig.eigenvalues()[i], 0.0));
    sd.alpha[i][0] = eig.eigenvectors()(0, i);
    sd.alpha[i][1] = eig.eigenvectors()(1, i);
    fix_sign(sd.alpha[i]);
  }

  const double cutoff = 1e-9 * (1.0 + sd.lambda[1]);
  sd.rank = (sd.lambda[0] > cutoff ? 1 : 0) + (sd.lambda[1] > cutoff ? 1 : 0);

  // Left vectors: df(alpha_i)/lambda_i where the singular value carries a
  // direction, gN-orthonormal completion where it does not.  Singular values
  // are sorted ascending, so the completed slots come first and are
  // orthogonalised against the slots the map actually determines.
  bool have[2] = {false, false};
  for (int i = 0; i < 2; ++i) {
    if (sd.lambda[i] <= cutoff) continue;
    const Eigen::Vector2d image =
        df * Eigen::Vector2d(sd.alpha[i][0], sd.alpha[i][1]);
    sd.beta[i][0] = image[0] / sd.lambda[i];
    sd.beta[i][1] = image[1] / sd.lambda[i];
    have[i] = true;
  }
  for (int i = 0; i < 2; ++i) {
    if (have[i]) continue;
    double best[2] = {0.0, 0.0};
    double best_norm2 = -1.0;
    for (int axis = 0; axis < 2; ++axis) {
      double cand[2] = {axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0};
      for (int j = 0; j < 2; ++j) {
        if (!have[j]) continue;
        const double proj = gdot(gN, cand, sd.beta[j]);
        cand[0] -= proj * sd.beta[j][0];
        cand[1] -= proj * sd.beta[j][1];
      }
      const double n2 = gdot(gN, cand, cand);
      if (n2 > best_norm2) {
        best_norm2 = n2;
        best[0] = cand[0];
        best[1] = cand[1];
      }
    }
    if (!(best_norm2 > 0.0))
      throw NumericalError("singular_decompose: could not complete the target frame");
    const double inv = 1.0 / std::sqrt(best_norm2);
    sd.beta[i][0] = best[0] * inv;
    sd.beta[i][1] = best[1] * inv;
    fix_sign(sd.beta[i]);
    have[i] = true;
  }

  for (int i = 0; i < 2; ++i) {
    const double s = 1.0 / std::sqrt(1.0 + sd.lambda[i] * sd.lambda[i]);
    const Eigen::Vector2d image =
        df * Eigen::Vector2d(sd.alpha[i][0], sd.alpha[i][1]);
    sd.e[i][0] = s * sd.alpha[i][0];
    sd.e[i][1] = s * sd.alpha[i][1];
    sd.e[i][2] = s * image[0];
    sd.e[i][3] = s * image[1];
    sd.xi[i][0] = -s * sd.lambda[i] * sd.alpha[i][0];
    sd.xi[i][1] = -s * sd.lambda[i] * sd.alpha[i][1];
    sd.xi[i][2] = s * sd.beta[i][0];
    sd.xi[i][3] = s * sd.beta[i][1];
  }
  return sd;
}

STensorValues s_tensor_values(const SingularData& sd) {
  STensorValues out{};
  for (int i = 0; i < 2; ++i) {
    const double l2 = sd.lambda[i] * sd.lambda[i];
    out.s_diag[i] = (1.0 - l2) / (1.0 + l2);
    out.sperp_diag[i] = -out.s_diag[i];
    out.mixed[i] = -2.0 * sd.lambda[i] / (1.0 + l2);
  }
  out.eps_node = std::min(out.s_diag[0], out.s_diag[1]);
  return out;
}

}  // namespace graphflow
