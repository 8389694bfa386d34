#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fslab/fock_ops.hpp"

namespace fslab {

// Basis ordering shared by every module: cell-major, sublattice A then B,
//   index(A, m) = 2m,  index(B, m) = 2m + 1.
// In the Jaynes-Cummings picture A is the atomic ground state, B the excited
// state and the cell index m is the photon number.
enum class Sublattice { A = 0, B = 1 };

constexpr int site_index(Sublattice s, int cell) { return 2 * cell + static_cast<int>(s); }

enum class Boundary { open, periodic };

/// Two-band ladder lattice
///   H = delta sum_m |B,m><B,m| + sum_m v_intra(m) |B,m><A,m|
///       + sum_m v_inter(m) |B,m-1><A,m| + j1 (same-sublattice m -> m+1)
///       + j2 (same-sublattice m -> m+2) + H.c.
/// Coupling arrays of length 1 are broadcast to every cell. v_inter(m) is the
/// bond between (A,m) and (B,m-1); v_inter(0) only enters with periodic
/// boundaries, where it closes the ring between (A,0) and (B,n_cells-1).
struct LadderSpec {
  int n_cells = 2;
  double delta = 0.0;
  std::vector<double> v_intra{0.0};
  std::vector<double> v_inter{0.0};
  cplx j1{0.0, 0.0};
  cplx j2{0.0, 0.0};
  Boundary boundary = Boundary::open;

  double intra(int cell) const;
  double inter(int cell) const;
  /// True when both coupling arrays are site independent.
  bool uniform() const;
  /// Throws DimensionError on bad cell counts or array lengths.
  void validate() const;
};

/// Driven Jaynes-Cummings parameters (resonant case).
struct JCParams {
  double lambda = 1.0;
  double mu = 0.0;
  double gamma = 0.0;
  int n_max = 2;
  cplx f_drive{0.0, 0.0};
  cplx g_drive{0.0, 0.0};
};

/// How drive amplitudes map to same-sublattice hoppings.
///   real_hopping: J1 = F, J2 = G.
///   literal: from i(F b^dag - F* b) and i(G b^2 - G* b^dag^2) with the
///            sqrt(n) factors dropped, J1 = iF and J2 = -i G*.
enum class DrivePhase { real_hopping, literal };

enum class LossChannel {
  photon_loss,           // -i gamma/2 n on both sublattices
  photon_loss_deformed,  // -i gamma/2 A^dag A = -i gamma/2 (1 - |0><0|)
  atom_decay,            // -i gamma/2 on the B sublattice
};

struct LatticeHamiltonian {
  OperatorMatrix matrix;
  /// Equivalent ladder description; for builders that assemble from operators
  /// (tensor-product JC, NLJC) this is the lattice they are proven to equal.
  LadderSpec lattice;
  std::optional<JCParams> jc;
  std::string origin;
  bool hermitian = true;
  DrivePhase drive_phase = DrivePhase::real_hopping;
  std::optional<LossChannel> loss;
  double loss_rate = 0.0;

  int n_cells() const { return lattice.n_cells; }
  int dim() const { return matrix.dim(); }
};

LatticeHamiltonian build_ladder(const LadderSpec& spec);

/// Ladder transcription: delta = 0, v_intra = mu, v_inter(m) = lambda sqrt(m),
/// n_cells = n_max + 1.
LatticeHamiltonian build_driven_jc(const JCParams& params);

/// The same Hamiltonian assembled as lambda sigma+ b + lambda sigma- b^dag
/// + mu (sigma+ + sigma-) from Kronecker products of Fock and atom operators.
LatticeHamiltonian build_driven_jc_tensor(const JCParams& params);

/// Site-independent ladder with v_intra = v (t_intra) and v_inter = w (t_inter).
LatticeHamiltonian build_ssh(double v, double w, int n_cells, cplx j1 = 0.0, cplx j2 = 0.0,
                             Boundary boundary = Boundary::open);

/// Nonlinear JC with f(n) = 1/sqrt(n): lambda sigma+ A + lambda sigma- A^dag
/// + mu (sigma+ + sigma-) with the phase operator A, n_cells = n_max + 1.
LatticeHamiltonian build_nljc(const JCParams& params);

/// Replace the same-sublattice hoppings of an SSH or NLJC Hamiltonian by the
/// values implied by a single-photon drive F and a two-photon drive G.
LatticeHamiltonian add_drives(const LatticeHamiltonian& h, cplx f_drive, cplx g_drive,
                              DrivePhase phase = DrivePhase::real_hopping);

/// Non-Hermitian effective Hamiltonian H - i gamma/2 K for the loss channel K.
LatticeHamiltonian build_heff(const LatticeHamiltonian& h, double gamma, LossChannel loss);

/// Same-sublattice hopping matrix alone (both sublattices, Hermitian closure).
Matrix same_sublattice_hopping(int n_cells, cplx j1, cplx j2, Boundary boundary);

/// Sigma = diag(+1 on A, -1 on B).
Matrix chiral_operator(int n_cells);

/// max |H - H^dag| entry.
double hermiticity_defect(const Matrix& h);

}  // namespace fslab
