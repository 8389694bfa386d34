#include "fslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fslab/errors.hpp"

namespace fslab {

DarkStateReport dark_state_check(const Matrix& h, const std::vector<JumpOperator>& jumps,
                                 const Vector& psi, double tolerance) {
  if (h.rows() != psi.size()) {
    throw DimensionError("dark_state_check: Hamiltonian and state dimensions differ");
  }
  DarkStateReport report;
  report.tolerance = tolerance;
  const Vector h_psi = h * psi;
  const cplx energy = psi.dot(h_psi);
  report.energy = energy.real();
  report.eigen_residual = (h_psi - energy * psi).norm();
  for (const auto& jump : jumps) {
    report.max_jump_residual =
        std::max(report.max_jump_residual, (jump.collapse() * psi).norm());
  }
  report.dark = report.eigen_residual <= tolerance && report.max_jump_residual <= tolerance;
  return report;
}

int ProductDecomposition::rank(double cutoff) const {
  int r = 0;
  for (Eigen::Index k = 0; k < schmidt_values.size(); ++k) {
    if (schmidt_values(k) > cutoff) ++r;
  }
  return r;
}

ProductDecomposition sublattice_schmidt(const Vector& psi, int n_cells) {
  if (n_cells < 1 || psi.size() != 2 * n_cells) {
    throw DimensionError("sublattice_schmidt: state has " + std::to_string(psi.size()) +
                         " entries, expected 2 * n_cells = " + std::to_string(2 * n_cells));
  }
  // Cell-major storage means psi(2m + s) = M(m, s), a row-major n_cells x 2 view.
  const Matrix reshaped =
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, 2, Eigen::RowMajor>>(psi.data(),
                                                                                n_cells, 2);
  Eigen::JacobiSVD<Matrix> svd(reshaped, Eigen::ComputeThinU | Eigen::ComputeThinV);

  ProductDecomposition out;
  out.schmidt_values = Eigen::VectorXd::Zero(2);
  const auto& s = svd.singularValues();
  for (Eigen::Index k = 0; k < s.size(); ++k) out.schmidt_values(k) = s(k);
  out.cell_factor = svd.matrixU().col(0);
  // M = U S V^dag, so the sublattice factor is the conjugate of V's first column.
  out.sublattice_factor = {std::conj(svd.matrixV()(0, 0)), std::conj(svd.matrixV()(1, 0))};

  const double total = out.schmidt_values.squaredNorm();
  for (Eigen::Index k = 0; k < out.schmidt_values.size(); ++k) {
    const double p = out.schmidt_values(k) * out.schmidt_values(k) / total;
    if (p > 0.0) out.entropy -= p * std::log(p);
  }
  return out;
}

Vector product_reference(cplx alpha, std::array<cplx, 2> c, int n_cells,
                         double tail_tolerance) {
  const TruncatedFockSpace space(n_cells - 1);
  const auto cs = coherent_state(alpha, space, tail_tolerance);
  Vector pair(2);
  pair << c[0], c[1];
  pair /= pair.norm();
  Vector out(2 * n_cells);
  for (int m = 0; m < n_cells; ++m) {
    out(site_index(Sublattice::A, m)) = cs.amplitudes(m) * pair(0);
    out(site_index(Sublattice::B, m)) = cs.amplitudes(m) * pair(1);
  }
  return out;
}

double product_fidelity(const Vector& psi, cplx alpha, std::array<cplx, 2> c,
                        double tail_tolerance) {
  if (psi.size() % 2 != 0) throw DimensionError("product_fidelity: odd state dimension");
  const Vector ref = product_reference(alpha, c, static_cast<int>(psi.size() / 2), tail_tolerance);
  return std::norm(ref.dot(psi / psi.norm()));
}

double product_fidelity(const DensityMatrix& rho, cplx alpha, std::array<cplx, 2> c,
                        double tail_tolerance) {
  if (rho.dim() % 2 != 0) throw DimensionError("product_fidelity: odd state dimension");
  const Vector ref = product_reference(alpha, c, rho.dim() / 2, tail_tolerance);
  return ref.dot(rho.entries() * ref).real();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  const Matrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()),
                                               Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Vector principal_state(const DensityMatrix& rho) {
  const Matrix herm = 0.5 * (rho.entries() + rho.entries().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  return solver.eigenvectors().col(herm.rows() - 1);
}

}  // namespace fslab
