#pragma once

#include <array>
#include <vector>

#include "fslab/dynamics.hpp"

namespace fslab {

struct DarkStateReport {
  double energy = 0.0;
  /// ||H psi - <psi|H|psi> psi||
  double eigen_residual = 0.0;
  /// max_k ||L_k psi||
  double max_jump_residual = 0.0;
  double tolerance = 0.0;
  bool dark = false;
};

DarkStateReport dark_state_check(const Matrix& h, const std::vector<JumpOperator>& jumps,
                                 const Vector& psi, double tolerance = 1e-10);

/// Schmidt decomposition across cell (x) sublattice. Sublattice factor order is
/// (A, B).
struct ProductDecomposition {
  /// Descending, nonnegative, two entries.
  Eigen::VectorXd schmidt_values;
  Vector cell_factor;
  std::array<cplx, 2> sublattice_factor{};
  /// Von Neumann entropy of the reduced sublattice state, in nats.
  double entropy = 0.0;

  int rank(double cutoff = 1e-12) const;
};

/// Reshapes psi (cell-major) into an n_cells x 2 matrix and takes its SVD.
/// The leading singular pair gives psi ~ s0 cell_factor (x) sublattice_factor.
/// Throws DimensionError unless psi has 2 * n_cells entries.
ProductDecomposition sublattice_schmidt(const Vector& psi, int n_cells);

/// coherent_state(alpha) (x) c on the cell (x) sublattice basis, c normalized.
Vector product_reference(cplx alpha, std::array<cplx, 2> c, int n_cells,
                         double tail_tolerance = 1e-12);

/// |<ref|psi>|^2 for unit psi. Propagates TruncationError from coherent_state.
double product_fidelity(const Vector& psi, cplx alpha, std::array<cplx, 2> c,
                        double tail_tolerance = 1e-12);

/// <ref|rho|ref>. This is the overlap with a pure reference, not the Uhlmann
/// fidelity between two mixed states.
double product_fidelity(const DensityMatrix& rho, cplx alpha, std::array<cplx, 2> c,
                        double tail_tolerance = 1e-12);

/// (1/2) ||a - b||_1 for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);

/// Eigenvector of rho with the largest eigenvalue.
Vector principal_state(const DensityMatrix& rho);

}  // namespace fslab
