#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "fslab/hamiltonians.hpp"

namespace fslab {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Hermitian, positive, unit-trace matrix over the shared basis.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Throws DimensionError when `entries` is not square.
  explicit DensityMatrix(Matrix entries);
  static DensityMatrix pure(const Vector& psi);

  const Matrix& entries() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double trace() const { return entries_.trace().real(); }
  double purity() const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;
  /// Throws NumericalError naming the violated invariant.
  void validate(double hermitian_tol = 1e-12, double trace_tol = 1e-10,
                double positivity_floor = -1e-10) const;

 private:
  Matrix entries_;
};

enum class JumpLabel { atom_decay, photon_loss };

/// Collapse operator sqrt(rate) * matrix.
struct JumpOperator {
  OperatorMatrix matrix;
  double rate = 0.0;
  JumpLabel label = JumpLabel::atom_decay;

  Matrix collapse() const;
};

/// L_m = sqrt(gamma) |A,m><B,m|, one operator per cell.
std::vector<JumpOperator> atom_decay_jumps(int n_cells, double gamma);

/// Single operator sqrt(gamma) sigma- acting on every cell at once.
JumpOperator collective_atom_decay(int n_cells, double gamma);

/// sqrt(gamma) b on the cell index, identity on the sublattice.
JumpOperator photon_loss_jump(int n_cells, double gamma);

/// Phase-operator variant sqrt(gamma) A on the cell index.
JumpOperator deformed_photon_loss_jump(int n_cells, double gamma);

/// omega b^dag b on the cell index, identity on the sublattice.
Matrix cavity_number(int n_cells, double omega = 1.0);

/// Bosonic two-photon drive i(G b^2 - G* b^dag^2) on the cell index.
Matrix two_photon_drive(int n_cells, cplx g_drive);

/// H - (i/2) sum_k L_k^dag L_k.
Matrix effective_hamiltonian(const Matrix& h, const std::vector<JumpOperator>& jumps);

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> trace;
  std::vector<double> purity;
  /// Filled for trajectory ensembles: jumps summed over all trajectories.
  std::int64_t total_jumps = 0;
};

struct LindbladOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_trace_drift = 1e-8;
  double initial_step = 1e-3;
  long max_steps = 50'000'000;
};

/// d rho/dt = -i[H, rho] + sum_k (L rho L^dag - 1/2 {L^dag L, rho}), integrated
/// with an adaptive Dormand-Prince 5(4) scheme. The trace is checked, never
/// renormalized. Throws StepFailure when the step size collapses, the step
/// budget runs out, or the trace drifts beyond `max_trace_drift`.
EvolutionResult lindblad_evolve(const Matrix& h, const std::vector<JumpOperator>& jumps,
                                const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                const LindbladOptions& options = {});

EvolutionResult lindblad_evolve(const LatticeHamiltonian& h,
                                const std::vector<JumpOperator>& jumps,
                                const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                const LindbladOptions& options = {});

/// Right-hand side of the master equation, exposed for stationarity checks.
Matrix lindblad_rhs(const Matrix& h, const std::vector<JumpOperator>& jumps, const Matrix& rho);

/// Vectorized generator acting on column-stacked rho:
/// vec(A rho B) = (B^T kron A) vec(rho).
SparseMatrix liouvillian(const Matrix& h, const std::vector<JumpOperator>& jumps);

/// Null vector of the Liouvillian with unit trace, from a sparse LU solve in
/// which one equation is replaced by the trace condition.
DensityMatrix steady_state(const Matrix& h, const std::vector<JumpOperator>& jumps);

struct JumpRecord {
  double time;
  int channel;
};

struct TrajectoryResult {
  std::vector<double> times;
  /// Normalized state at each output time.
  std::vector<Vector> states;
  std::vector<JumpRecord> jumps;
};

struct TrajectoryOptions {
  /// Relative tolerance on the squared norm when locating a jump time.
  double norm_tol = 1e-10;
  /// Propagation step between norm checks.
  double max_step = 0.05;
};

/// One quantum trajectory: the unnormalized state follows exp(-i H_eff t); a
/// jump fires when its squared norm falls to a uniform draw, the jump time is
/// refined by bisection, and the channel is chosen with weight ||L_k psi||^2.
TrajectoryResult trajectory_evolve(const Matrix& h_eff, const std::vector<JumpOperator>& jumps,
                                   const Vector& psi0, const std::vector<double>& t_grid,
                                   std::uint64_t seed, const TrajectoryOptions& options = {});

/// Seed of trajectory `index`: splitmix64(seed) ^ index.
std::uint64_t trajectory_seed(std::uint64_t seed, int index);

/// Average of |psi><psi| over `n_trajectories` runs; trajectory i uses
/// trajectory_seed(seed, i).
/// Runs on up to `n_threads` workers (0 = hardware concurrency); the result is
/// identical for any thread count.
EvolutionResult trajectory_average(const Matrix& h_eff, const std::vector<JumpOperator>& jumps,
                                   const Vector& psi0, const std::vector<double>& t_grid,
                                   std::uint64_t seed, int n_trajectories, int n_threads = 0,
                                   const TrajectoryOptions& options = {});

/// alpha0 exp(-(i omega + gamma/2) t): coherent amplitude under photon loss.
cplx coherent_decay_reference(cplx alpha0, double omega, double gamma, double t);

/// Uniform grid t0, t0 + dt, ..., t1 with `n_intervals` steps.
std::vector<double> uniform_grid(double t0, double t1, int n_intervals);

}  // namespace fslab
