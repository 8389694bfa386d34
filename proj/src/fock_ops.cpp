#include "fslab/fock_ops.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "fslab/errors.hpp"

namespace fslab {

namespace {

// log(n!) for n = 0..n_max as a running sum of log(k).
std::vector<double> log_factorials(int n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    out[n] = out[n - 1] + std::log(static_cast<double>(n));
  }
  return out;
}

}  // namespace

TruncatedFockSpace::TruncatedFockSpace(int n_max) : n_max_(n_max) {
  if (n_max < 1) {
    throw DimensionError("TruncatedFockSpace: n_max must be >= 1, got " +
                         std::to_string(n_max));
  }
}

OperatorMatrix annihilation_matrix(const TruncatedFockSpace& space) {
  Matrix b = Matrix::Zero(space.dim(), space.dim());
  for (int n = 0; n < space.n_max(); ++n) {
    b(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  }
  return {b, BasisTag::fock};
}

OperatorMatrix number_matrix(const TruncatedFockSpace& space) {
  Matrix n_op = Matrix::Zero(space.dim(), space.dim());
  for (int n = 0; n <= space.n_max(); ++n) {
    n_op(n, n) = static_cast<double>(n);
  }
  return {n_op, BasisTag::fock};
}

OperatorMatrix deformed_annihilation_matrix(const TruncatedFockSpace& space) {
  Matrix a = Matrix::Zero(space.dim(), space.dim());
  for (int n = 0; n < space.n_max(); ++n) {
    a(n, n + 1) = 1.0;
  }
  return {a, BasisTag::fock};
}

double coherent_tail_mass(double abs_alpha_sq, int n_max) {
  if (abs_alpha_sq == 0.0) return 0.0;
  const double log_x = std::log(abs_alpha_sq);
  // log of the Poisson weight at n = n_max + 1
  double log_term = -abs_alpha_sq + (n_max + 1) * log_x - std::lgamma(n_max + 2.0);
  double tail = 0.0;
  const int n_stop = n_max + 1 + static_cast<int>(20.0 * abs_alpha_sq) + 2000;
  for (int n = n_max + 1; n < n_stop; ++n) {
    const double term = std::exp(log_term);
    tail += term;
    // Past the Poisson mode the terms shrink geometrically.
    if (n > abs_alpha_sq && term <= tail * 1e-18) break;
    log_term += log_x - std::log(static_cast<double>(n + 1));
  }
  return tail;
}

ReferenceState coherent_state(cplx alpha, const TruncatedFockSpace& space,
                              double tolerance) {
  const int dim = space.dim();
  Vector amps = Vector::Zero(dim);
  if (alpha == cplx{0.0, 0.0}) {
    amps(0) = 1.0;
    return {amps, CoherentKind{alpha}, 0.0};
  }

  const double x = std::norm(alpha);
  const double tail = coherent_tail_mass(x, space.n_max());
  if (tail > tolerance) {
    std::ostringstream msg;
    msg << "coherent_state: tail mass " << tail << " beyond n_max=" << space.n_max()
        << " exceeds tolerance " << tolerance << " for |alpha|=" << std::abs(alpha);
    throw TruncationError(msg.str());
  }

  const auto log_fact = log_factorials(space.n_max());
  const double log_abs = std::log(std::abs(alpha));
  const double phase = std::arg(alpha);
  for (int n = 0; n < dim; ++n) {
    const double log_mag = -0.5 * x + n * log_abs - 0.5 * log_fact[n];
    amps(n) = std::polar(std::exp(log_mag), n * phase);
  }
  amps /= amps.norm();
  return {amps, CoherentKind{alpha}, tail};
}

ReferenceState geometric_state(cplx ratio, int length) {
  if (length < 1) {
    throw DimensionError("geometric_state: length must be >= 1");
  }
  const double abs_r = std::abs(ratio);
  if (abs_r >= 1.0) {
    std::ostringstream msg;
    msg << "geometric_state: |r| = " << abs_r
        << " >= 1, series is not normalizable (trivial regime)";
    throw DivergenceError(msg.str());
  }
  Vector amps(length);
  cplx term = std::sqrt(1.0 - abs_r * abs_r);
  for (int m = 0; m < length; ++m) {
    amps(m) = term;
    term *= ratio;
  }
  const double tail = std::pow(abs_r, 2.0 * length);
  return {amps, GeometricKind{ratio}, tail};
}

ReferenceState fock_state(int n, const TruncatedFockSpace& space) {
  if (n < 0 || n > space.n_max()) {
    throw DimensionError("fock_state: index " + std::to_string(n) +
                         " outside 0.." + std::to_string(space.n_max()));
  }
  Vector amps = Vector::Zero(space.dim());
  amps(n) = 1.0;
  return {amps, FockKind{n}, 0.0};
}

Matrix kron(const Matrix& left, const Matrix& right) {
  return Eigen::kroneckerProduct(left, right).eval();
}

}  // namespace fslab
