#include "fslab/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>
#include <Eigen/SparseLU>

#include "fslab/errors.hpp"

namespace fslab {

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw DimensionError("DensityMatrix: matrix must be square");
  }
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const Vector unit = psi / psi.norm();
  return DensityMatrix(unit * unit.adjoint());
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho
  return (entries_.cwiseProduct(entries_.transpose())).sum().real();
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double hermitian_tol, double trace_tol,
                             double positivity_floor) const {
  const double defect = hermiticity_defect(entries_);
  if (defect > hermitian_tol) {
    throw NumericalError("DensityMatrix: hermiticity defect " + std::to_string(defect));
  }
  if (std::abs(trace() - 1.0) > trace_tol) {
    throw NumericalError("DensityMatrix: trace " + std::to_string(trace()));
  }
  const double low = min_eigenvalue();
  if (low < positivity_floor) {
    throw NumericalError("DensityMatrix: negative eigenvalue " + std::to_string(low));
  }
}

// ---------------------------------------------------------------------------
// Jump operators

Matrix JumpOperator::collapse() const { return std::sqrt(rate) * matrix.entries; }

std::vector<JumpOperator> atom_decay_jumps(int n_cells, double gamma) {
  std::vector<JumpOperator> out;
  out.reserve(static_cast<std::size_t>(n_cells));
  for (int m = 0; m < n_cells; ++m) {
    Matrix l = Matrix::Zero(2 * n_cells, 2 * n_cells);
    l(site_index(Sublattice::A, m), site_index(Sublattice::B, m)) = 1.0;
    out.push_back({{l, BasisTag::ladder}, gamma, JumpLabel::atom_decay});
  }
  return out;
}

JumpOperator collective_atom_decay(int n_cells, double gamma) {
  Matrix l = Matrix::Zero(2 * n_cells, 2 * n_cells);
  for (int m = 0; m < n_cells; ++m) {
    l(site_index(Sublattice::A, m), site_index(Sublattice::B, m)) = 1.0;
  }
  return {{l, BasisTag::ladder}, gamma, JumpLabel::atom_decay};
}

JumpOperator photon_loss_jump(int n_cells, double gamma) {
  const TruncatedFockSpace space(n_cells - 1);
  return {{kron(annihilation_matrix(space).entries, Matrix::Identity(2, 2)), BasisTag::ladder},
          gamma,
          JumpLabel::photon_loss};
}

JumpOperator deformed_photon_loss_jump(int n_cells, double gamma) {
  const TruncatedFockSpace space(n_cells - 1);
  return {{kron(deformed_annihilation_matrix(space).entries, Matrix::Identity(2, 2)),
           BasisTag::ladder},
          gamma,
          JumpLabel::photon_loss};
}

Matrix cavity_number(int n_cells, double omega) {
  const TruncatedFockSpace space(n_cells - 1);
  return omega * kron(number_matrix(space).entries, Matrix::Identity(2, 2));
}

Matrix two_photon_drive(int n_cells, cplx g_drive) {
  const TruncatedFockSpace space(n_cells - 1);
  const Matrix b = annihilation_matrix(space).entries;
  const Matrix b2 = b * b;
  const Matrix fock = cplx{0.0, 1.0} * (g_drive * b2 - std::conj(g_drive) * b2.adjoint());
  return kron(fock, Matrix::Identity(2, 2));
}

Matrix effective_hamiltonian(const Matrix& h, const std::vector<JumpOperator>& jumps) {
  Matrix out = h;
  for (const auto& jump : jumps) {
    const Matrix l = jump.collapse();
    out -= cplx{0.0, 0.5} * (l.adjoint() * l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Master equation

namespace {

SparseMatrix to_sparse(const Matrix& m) {
  SparseMatrix out = m.sparseView(1.0, 0.0);
  out.makeCompressed();
  return out;
}

class LindbladGenerator {
 public:
  LindbladGenerator(const Matrix& h, const std::vector<JumpOperator>& jumps)
      : h_eff_(to_sparse(effective_hamiltonian(h, jumps))) {
    for (const auto& jump : jumps) {
      if (jump.rate < 0.0) throw std::invalid_argument("JumpOperator: rate must be >= 0");
      if (jump.rate == 0.0) continue;
      collapse_.push_back(to_sparse(jump.collapse()));
    }
  }

  Matrix operator()(const Matrix& rho) const {
    const cplx minus_i{0.0, -1.0};
    Matrix out = minus_i * (h_eff_ * rho);
    out += (minus_i * (h_eff_ * rho.adjoint())).adjoint();
    for (const auto& l : collapse_) {
      const Matrix left = l * rho;
      out += (l * left.adjoint()).adjoint();
    }
    return out;
  }

 private:
  SparseMatrix h_eff_;
  std::vector<SparseMatrix> collapse_;
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <typename Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, const LindbladOptions& options) : rhs_(std::move(rhs)), opt_(options) {}

  // Advances y from t0 to t1 exactly. `h` carries the step size between calls.
  void advance(Matrix& y, double t0, double t1, double& h, long& steps) {
    double t = t0;
    if (!have_k1_) {
      k1_ = rhs_(y);
      have_k1_ = true;
    }
    while (t < t1) {
      if (++steps > opt_.max_steps) throw StepFailure("lindblad_evolve: step budget exhausted");
      const bool last = t + h >= t1;
      const double step = last ? t1 - t : h;
      if (step <= 1e-14 * std::max(1.0, std::abs(t))) {
        std::ostringstream msg;
        msg << "lindblad_evolve: step size collapsed to " << step << " at t = " << t;
        throw StepFailure(msg.str());
      }
      const Matrix k2 = rhs_(y + step * a21 * k1_);
      const Matrix k3 = rhs_(y + step * (a31 * k1_ + a32 * k2));
      const Matrix k4 = rhs_(y + step * (a41 * k1_ + a42 * k2 + a43 * k3));
      const Matrix k5 = rhs_(y + step * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      const Matrix k6 = rhs_(y + step * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Matrix y_new = y + step * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Matrix k7 = rhs_(y_new);
      const Matrix err =
          step * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (Eigen::Index j = 0; j < err.cols(); ++j) {
        for (Eigen::Index i = 0; i < err.rows(); ++i) {
          const double scale =
              opt_.atol + opt_.rtol * std::max(std::abs(y(i, j)), std::abs(y_new(i, j)));
          err_norm = std::max(err_norm, std::abs(err(i, j)) / scale);
        }
      }

      if (err_norm <= 1.0) {
        t = last ? t1 : t + step;
        y = std::move(y_new);
        k1_ = std::move(k7);
        const double grow = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
        // A shortened final step says nothing about the natural step size.
        if (!last || step >= h) h = step * std::clamp(grow, 0.2, 5.0);
      } else {
        h = step * std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 1.0);
      }
    }
  }

 private:
  Rhs rhs_;
  LindbladOptions opt_;
  Matrix k1_;
  bool have_k1_ = false;
};

void check_grid(const std::vector<double>& t_grid, const char* who) {
  if (t_grid.empty()) throw std::invalid_argument(std::string(who) + ": empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) {
      throw std::invalid_argument(std::string(who) + ": times must be strictly increasing");
    }
  }
}

}  // namespace

Matrix lindblad_rhs(const Matrix& h, const std::vector<JumpOperator>& jumps, const Matrix& rho) {
  return LindbladGenerator(h, jumps)(rho);
}

EvolutionResult lindblad_evolve(const Matrix& h, const std::vector<JumpOperator>& jumps,
                                const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                const LindbladOptions& options) {
  check_grid(t_grid, "lindblad_evolve");
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) {
    throw std::invalid_argument("lindblad_evolve: tolerances must be > 0");
  }
  if (h.rows() != rho0.dim()) {
    throw DimensionError("lindblad_evolve: Hamiltonian and state dimensions differ");
  }
  const LindbladGenerator generator(h, jumps);
  DormandPrince stepper([&](const Matrix& rho) { return generator(rho); }, options);

  EvolutionResult out;
  Matrix rho = rho0.entries();
  const double trace0 = rho0.trace();
  double step = options.initial_step;
  long steps = 0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (k > 0) stepper.advance(rho, t_grid[k - 1], t_grid[k], step, steps);
    DensityMatrix state(rho);
    const double drift = std::abs(state.trace() - trace0);
    if (drift > options.max_trace_drift) {
      std::ostringstream msg;
      msg << "lindblad_evolve: trace drift " << drift << " at t = " << t_grid[k];
      throw StepFailure(msg.str());
    }
    out.times.push_back(t_grid[k]);
    out.trace.push_back(state.trace());
    out.purity.push_back(state.purity());
    out.states.push_back(std::move(state));
  }
  return out;
}

EvolutionResult lindblad_evolve(const LatticeHamiltonian& h,
                                const std::vector<JumpOperator>& jumps,
                                const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                const LindbladOptions& options) {
  return lindblad_evolve(h.matrix.entries, jumps, rho0, t_grid, options);
}

SparseMatrix liouvillian(const Matrix& h, const std::vector<JumpOperator>& jumps) {
  const Eigen::Index d = h.rows();
  SparseMatrix identity(d, d);
  identity.setIdentity();
  const SparseMatrix hs = to_sparse(h);
  const cplx minus_i{0.0, -1.0};
  SparseMatrix out = minus_i * (Eigen::kroneckerProduct(identity, hs).eval() -
                                Eigen::kroneckerProduct(SparseMatrix(hs.transpose()), identity).eval());
  for (const auto& jump : jumps) {
    if (jump.rate == 0.0) continue;
    const SparseMatrix l = to_sparse(jump.collapse());
    const SparseMatrix ldl = l.adjoint() * l;
    const SparseMatrix l_conj = l.conjugate();
    out += Eigen::kroneckerProduct(l_conj, l).eval();
    out -= 0.5 * Eigen::kroneckerProduct(identity, ldl).eval();
    out -= 0.5 * Eigen::kroneckerProduct(SparseMatrix(ldl.transpose()), identity).eval();
  }
  out.makeCompressed();
  return out;
}

DensityMatrix steady_state(const Matrix& h, const std::vector<JumpOperator>& jumps) {
  const Eigen::Index d = h.rows();
  const SparseMatrix gen = liouvillian(h, jumps);
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(gen.nonZeros() + d));
  for (Eigen::Index col = 0; col < gen.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(gen, col); it; ++it) {
      if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) triplets.emplace_back(0, i * d + i, 1.0);
  SparseMatrix system(d * d, d * d);
  system.setFromTriplets(triplets.begin(), triplets.end());
  system.makeCompressed();

  Eigen::SparseLU<SparseMatrix> solver;
  solver.analyzePattern(system);
  solver.factorize(system);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("steady_state: sparse LU factorization failed (" +
                           solver.lastErrorMessage() + ")");
  }
  Vector rhs = Vector::Zero(d * d);
  rhs(0) = 1.0;
  const Vector x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) {
    throw ConvergenceError("steady_state: sparse LU solve failed");
  }
  const Matrix rho = Eigen::Map<const Matrix>(x.data(), d, d);
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

// ---------------------------------------------------------------------------
// Quantum trajectories

namespace {

class UnitDraw {
 public:
  explicit UnitDraw(std::uint64_t seed) : engine_(seed) {}
  // Uniform on (0, 1].
  double operator()() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

class Propagator {
 public:
  explicit Propagator(const Matrix& h_eff) : generator_(cplx{0.0, -1.0} * h_eff) {}

  const Matrix& step(double dt) {
    auto it = cache_.find(dt);
    if (it == cache_.end()) it = cache_.emplace(dt, (generator_ * dt).exp().eval()).first;
    return it->second;
  }
  Matrix at(double dt) const { return (generator_ * dt).exp(); }

 private:
  Matrix generator_;
  std::map<double, Matrix> cache_;
};

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t seed, int index) {
  // splitmix64 finalizer, so nearby user seeds do not share trajectory seeds.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z ^ static_cast<std::uint64_t>(index);
}

TrajectoryResult trajectory_evolve(const Matrix& h_eff, const std::vector<JumpOperator>& jumps,
                                   const Vector& psi0, const std::vector<double>& t_grid,
                                   std::uint64_t seed, const TrajectoryOptions& options) {
  check_grid(t_grid, "trajectory_evolve");
  if (h_eff.rows() != psi0.size()) {
    throw DimensionError("trajectory_evolve: Hamiltonian and state dimensions differ");
  }
  std::vector<Matrix> collapse;
  for (const auto& jump : jumps) collapse.push_back(jump.collapse());

  Propagator propagator(h_eff);
  UnitDraw draw(seed);
  TrajectoryResult out;

  Vector psi = psi0 / psi0.norm();
  double threshold = draw();
  double t = t_grid.front();

  auto jump = [&](const Vector& pre_jump, double when) {
    std::vector<double> weights(collapse.size());
    double total = 0.0;
    for (std::size_t k = 0; k < collapse.size(); ++k) {
      weights[k] = (collapse[k] * pre_jump).squaredNorm();
      total += weights[k];
    }
    if (total <= 0.0) {
      // Norm decay without any open channel: the effective Hamiltonian does not
      // match the jump set. Keep the no-jump state.
      psi = pre_jump / pre_jump.norm();
      return;
    }
    const double pick = draw() * total;
    std::size_t channel = 0;
    double acc = weights[0];
    while (acc < pick && channel + 1 < weights.size()) acc += weights[++channel];
    const Vector after = collapse[channel] * pre_jump;
    psi = after / after.norm();
    out.jumps.push_back({when, static_cast<int>(channel)});
  };

  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    while (t < t_grid[k]) {
      const double dt = std::min(options.max_step, t_grid[k] - t);
      Vector next = propagator.step(dt) * psi;
      if (next.squaredNorm() > threshold) {
        psi = std::move(next);
        t += dt;
        continue;
      }
      double lo = 0.0;
      double hi = dt;
      Vector at_hi = std::move(next);
      for (int it = 0; it < 200; ++it) {
        if (std::abs(at_hi.squaredNorm() - threshold) <= options.norm_tol * threshold) break;
        const double mid = 0.5 * (lo + hi);
        Vector trial = propagator.at(mid) * psi;
        if (trial.squaredNorm() > threshold) {
          lo = mid;
        } else {
          hi = mid;
          at_hi = std::move(trial);
        }
      }
      t += hi;
      jump(at_hi, t);
      threshold = draw();
    }
    out.times.push_back(t_grid[k]);
    out.states.push_back(psi / psi.norm());
  }
  return out;
}

EvolutionResult trajectory_average(const Matrix& h_eff, const std::vector<JumpOperator>& jumps,
                                   const Vector& psi0, const std::vector<double>& t_grid,
                                   std::uint64_t seed, int n_trajectories, int n_threads,
                                   const TrajectoryOptions& options) {
  check_grid(t_grid, "trajectory_average");
  if (n_trajectories < 1) {
    throw std::invalid_argument("trajectory_average: n_trajectories must be >= 1");
  }
  constexpr int kChunk = 8;
  const int n_chunks = (n_trajectories + kChunk - 1) / kChunk;
  const auto dim = psi0.size();
  const std::size_t n_times = t_grid.size();

  std::vector<std::vector<Matrix>> partial(static_cast<std::size_t>(n_chunks));
  std::vector<std::int64_t> partial_jumps(static_cast<std::size_t>(n_chunks), 0);
  std::atomic<int> next_chunk{0};

  auto worker = [&]() {
    for (int chunk = next_chunk++; chunk < n_chunks; chunk = next_chunk++) {
      std::vector<Matrix> sums(n_times, Matrix::Zero(dim, dim));
      const int first = chunk * kChunk;
      const int last = std::min(n_trajectories, first + kChunk);
      for (int i = first; i < last; ++i) {
        const auto run = trajectory_evolve(h_eff, jumps, psi0, t_grid,
                                           trajectory_seed(seed, i), options);
        for (std::size_t k = 0; k < n_times; ++k) {
          sums[k].noalias() += run.states[k] * run.states[k].adjoint();
        }
        partial_jumps[chunk] += static_cast<std::int64_t>(run.jumps.size());
      }
      partial[chunk] = std::move(sums);
    }
  };

  int threads = n_threads > 0 ? n_threads
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n_chunks);
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }

  EvolutionResult out;
  out.times = t_grid;
  for (std::size_t k = 0; k < n_times; ++k) {
    Matrix rho = Matrix::Zero(dim, dim);
    for (const auto& chunk : partial) rho += chunk[k];
    rho /= static_cast<double>(n_trajectories);
    DensityMatrix state(std::move(rho));
    out.trace.push_back(state.trace());
    out.purity.push_back(state.purity());
    out.states.push_back(std::move(state));
  }
  for (auto j : partial_jumps) out.total_jumps += j;
  return out;
}

cplx coherent_decay_reference(cplx alpha0, double omega, double gamma, double t) {
  if (gamma < 0.0) throw std::invalid_argument("coherent_decay_reference: gamma must be >= 0");
  return alpha0 * std::exp(-cplx{0.5 * gamma, omega} * t);
}

std::vector<double> uniform_grid(double t0, double t1, int n_intervals) {
  if (n_intervals < 1 || !(t1 > t0)) {
    throw std::invalid_argument("uniform_grid: need t1 > t0 and at least one interval");
  }
  std::vector<double> out(static_cast<std::size_t>(n_intervals) + 1);
  for (int k = 0; k <= n_intervals; ++k) {
    out[k] = k == n_intervals ? t1 : t0 + (t1 - t0) * k / n_intervals;
  }
  return out;
}

}  // namespace fslab
