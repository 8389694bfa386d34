#pragma once

#include <complex>
#include <variant>

#include <Eigen/Dense>

namespace fslab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class BasisTag { fock, ladder };

/// Photon-number basis {|0>, ..., |n_max>}.
class TruncatedFockSpace {
 public:
  explicit TruncatedFockSpace(int n_max);

  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }

 private:
  int n_max_;
};

struct OperatorMatrix {
  Matrix entries;
  BasisTag basis = BasisTag::fock;

  int dim() const { return static_cast<int>(entries.rows()); }
  OperatorMatrix adjoint() const { return {entries.adjoint(), basis}; }
};

struct CoherentKind {
  cplx alpha;
};
struct GeometricKind {
  cplx ratio;
};
struct FockKind {
  int n;
};
using StateKind = std::variant<CoherentKind, GeometricKind, FockKind>;

/// A reference state in the photon-number basis together with the probability
/// mass of the untruncated series that lies beyond the last retained index.
struct ReferenceState {
  Vector amplitudes;
  StateKind kind;
  double tail_error = 0.0;
};

/// Bosonic annihilation operator b with <n|b|n+1> = sqrt(n+1).
OperatorMatrix annihilation_matrix(const TruncatedFockSpace& space);

/// Number operator b^dagger b, diagonal 0..n_max.
OperatorMatrix number_matrix(const TruncatedFockSpace& space);

/// Susskind-Glogower phase operator A: A|n> = |n-1>, A|0> = 0, i.e. the
/// f-deformed annihilator with f(n) = 1/sqrt(n).
OperatorMatrix deformed_annihilation_matrix(const TruncatedFockSpace& space);

/// Poisson tail mass sum_{n > n_max} e^{-x} x^n / n! with x = |alpha|^2.
/// Summed term by term in log space, so it stays accurate far below 1e-16.
double coherent_tail_mass(double abs_alpha_sq, int n_max);

/// Glauber coherent state, renormalized on the truncated space.
/// Throws TruncationError when the discarded tail mass exceeds `tolerance`.
ReferenceState coherent_state(cplx alpha, const TruncatedFockSpace& space,
                              double tolerance = 1e-12);

/// c0 * r^m for m = 0..length-1 with |c0|^2 = 1 - |r|^2. The amplitudes are not
/// renormalized; their norm is 1 - tail_error with tail_error = |r|^(2 length).
/// Throws DivergenceError for |r| >= 1.
ReferenceState geometric_state(cplx ratio, int length);

ReferenceState fock_state(int n, const TruncatedFockSpace& space);

/// Dense Kronecker product; the right factor is the fast index.
Matrix kron(const Matrix& left, const Matrix& right);

}  // namespace fslab
