#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fslab/hamiltonians.hpp"

namespace fslab {

/// Energy window between the top of the lower bulk band and the bottom of the
/// upper bulk band.
struct GapWindow {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double energy) const { return energy > lower && energy < upper; }
  double width() const { return upper - lower; }
};

struct SpectrumResult {
  /// Ascending by real part. Imaginary parts vanish for Hermitian input.
  Vector eigenvalues;
  /// Unit-norm columns matching `eigenvalues`.
  Matrix eigenvectors;
  bool hermitian = true;
  int n_cells = 0;
  std::optional<GapWindow> gap_window;
  std::vector<int> in_gap_indices;

  Eigen::VectorXd energies() const { return eigenvalues.real(); }
  Vector state(int index) const { return eigenvectors.col(index); }
};

struct DiagonalizeOptions {
  int max_dim = 8192;
  /// Residual bound, relative to ||H||_F.
  double residual_tol = 1e-10;
  /// Rotate eigenvectors inside near-degenerate clusters (spacing below
  /// residual_tol * ||H||_F) to the basis that diagonalizes the cell position.
  /// Separates left and right edge modes that hybridize only through the
  /// exponentially small overlap across the chain.
  bool localize_degenerate = true;
};

/// Full dense diagonalization. Hermitian input goes through the self-adjoint
/// solver, anything else through the general complex solver. Attaches the
/// periodic-boundary gap window whenever the lattice couplings are uniform and
/// the bulk bands are separated.
/// Throws ConvergenceError when a reported pair misses the residual bound.
SpectrumResult diagonalize(const LatticeHamiltonian& h, const DiagonalizeOptions& options = {});

/// Bulk band edges of the uniform ladder, from the 2x2 Bloch Hamiltonian
/// sampled on `k_points` momenta and refined around the extremal samples.
/// Throws NoGapError when the bands overlap or touch.
GapWindow bulk_gap(const LadderSpec& spec, int k_points = 4096);

/// Fraction of |psi|^2 on the first `cells` cells.
double left_weight(const Vector& psi, int cells);

/// In-gap eigenstates whose weight on the first ceil(n_cells/4) cells exceeds
/// `loc_threshold`. Throws NoGapError when the spectrum has no gap window.
std::vector<int> find_edge_states(const SpectrumResult& spectrum, double loc_threshold = 0.9);

/// Inclusive cell range.
struct FitWindow {
  int first = 0;
  int last = 0;
  int size() const { return last - first + 1; }
};

struct SublatticeFit {
  cplx ratio{0.0, 0.0};
  cplx c0{0.0, 0.0};
  double rms_residual = 0.0;
  int used_sites = 0;
  /// Fewer than four usable amplitudes; the other fields are zero.
  bool empty = true;
};

/// Per-sublattice fit of psi_m = c0 r^m, done as linear regression of
/// log|psi_m| against m. Residuals are in natural-log amplitude units.
struct EdgeStateFit {
  SublatticeFit a;
  SublatticeFit b;
  FitWindow window;

  /// Root mean square of the log residuals pooled over both sublattices.
  double rms_residual() const;
  /// |c0| |r|^m for the given sublattice, zero if that sublattice is empty.
  double fitted_abs(Sublattice s, int cell) const;
};

/// Default window: cells 1..ceil(n_cells/2).
FitWindow default_fit_window(int n_cells);

/// Amplitudes below `floor` are skipped. Throws InsufficientSupportError when
/// neither sublattice has four usable sites.
EdgeStateFit fit_geometric(const Vector& psi, std::optional<FitWindow> window = std::nullopt,
                           double floor = 1e-12);

/// E_ES = -2 (t_intra / t_inter) J1. Throws std::invalid_argument if t_inter == 0.
double predicted_edge_energy(double t_intra, double t_inter, double j1);

/// Winding of h(k) = v + w e^{-ik} around the origin, counted in the
/// direction e^{-ik} turns so that the topological phase |w| > |v| gives +1.
/// Throws GapClosureError for |v| == |w| (within 1e-12), std::invalid_argument
/// for k_points < 16.
int winding_number(double v, double w, int k_points = 256);

/// Zero-energy A-sublattice solution of v_intra(m) phi_m + v_inter(m+1) phi_{m+1} = 0,
/// started from phi_0 = 1 and normalized; B amplitudes are zero. The arrays use
/// LadderSpec's convention (v_inter(m) couples (A,m) to (B,m-1); v_inter(0) is
/// unused) and may have length 1.
/// Throws NormalizationError when the amplitude is still growing at the last cell.
Vector solve_recurrence(std::span<const double> v_intra, std::span<const double> v_inter,
                        int n_cells);

}  // namespace fslab
