#include <doctest.h>

#include <cmath>
#include <vector>

#include "fslab/errors.hpp"
#include "fslab/spectra.hpp"
#include "oracles.hpp"

using namespace fslab;

namespace {

constexpr int A(int m) { return site_index(Sublattice::A, m); }
constexpr int B(int m) { return site_index(Sublattice::B, m); }

double b_weight(const Vector& psi) {
  double w = 0.0;
  for (int m = 0; m < psi.size() / 2; ++m) w += std::norm(psi(B(m)));
  return w;
}

LatticeHamiltonian from_matrix(const Matrix& m, bool hermitian) {
  LatticeHamiltonian h;
  h.matrix = {m, BasisTag::ladder};
  h.lattice.n_cells = static_cast<int>(m.rows() / 2);
  h.lattice.v_intra = {1.0};
  h.lattice.v_inter = {2.0, 3.0};
  h.hermitian = hermitian;
  return h;
}

}  // namespace

TEST_CASE("pauli x") {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  const auto s = diagonalize(from_matrix(m, true));
  CHECK(s.eigenvalues(0).real() == doctest::Approx(-1.0));
  CHECK(s.eigenvalues(1).real() == doctest::Approx(1.0));
  CHECK_FALSE(s.gap_window.has_value());
}

TEST_CASE("ring spectrum matches closed-form bands") {
  const auto s = diagonalize(build_ssh(1.0, 2.0, 64, 0.0, 0.0, Boundary::periodic));
  const auto bands = oracle::ssh_ring_bands(1.0, 2.0, 64);
  for (int k = 0; k < 128; ++k) CHECK(std::abs(s.eigenvalues(k).real() - bands[k]) < 1e-10);
  const Matrix gram = s.eigenvectors.adjoint() * s.eigenvectors;
  CHECK((gram - Matrix::Identity(128, 128)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("bulk gap window") {
  LadderSpec spec;
  spec.n_cells = 10;
  spec.v_intra = {-1.0};
  spec.v_inter = {-2.0};
  const auto gap = bulk_gap(spec);
  CHECK(gap.lower == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(gap.upper == doctest::Approx(1.0).epsilon(1e-12));

  spec.j1 = -0.5;
  const auto shifted = bulk_gap(spec);
  // Lower band top at k = pi: -2 J1 - |v - w|; upper bottom at k = pi as well.
  CHECK(shifted.lower == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(shifted.upper == doctest::Approx(2.0).epsilon(1e-12));

  spec.j1 = -1.0;
  CHECK_THROWS_AS(bulk_gap(spec), NoGapError);

  spec.j1 = 0.0;
  spec.v_inter = {-1.0};
  CHECK_THROWS_AS(bulk_gap(spec), NoGapError);
}

TEST_CASE("topological chain has one left zero mode") {
  const auto h = build_ssh(-1.0, -2.0, 40);
  const auto s = diagonalize(h);
  const double scale = h.matrix.entries.norm();
  int near_zero = 0;
  for (int k = 0; k < s.eigenvalues.size(); ++k) {
    if (std::abs(s.eigenvalues(k)) < 1e-10 * scale) ++near_zero;
  }
  // Left and right end modes, split by (1/2)^40.
  CHECK(near_zero == 2);
  const auto edges = find_edge_states(s);
  REQUIRE(edges.size() == 1);
  const Vector psi = s.state(edges[0]);
  CHECK(std::abs(s.eigenvalues(edges[0])) < 1e-10 * scale);
  CHECK(b_weight(psi) < 1e-10);
  const auto geo = geometric_state(-0.5, 40);
  const cplx phase = psi(A(0)) / geo.amplitudes(0);
  for (int m = 0; m < 20; ++m) {
    const cplx expected = phase * geo.amplitudes(m);
    CHECK(std::abs(psi(A(m)) - expected) <= 1e-6 * std::abs(expected));
  }
}

TEST_CASE("trivial chain has no left edge state") {
  const auto s = diagonalize(build_ssh(2.0, 1.0, 40));
  REQUIRE(s.gap_window.has_value());
  CHECK(find_edge_states(s).empty());
  CHECK(s.in_gap_indices.empty());
}

TEST_CASE("edge states disappear when the gap closes") {
  const auto s = diagonalize(build_ssh(-1.0, -2.0, 80, -1.0));
  CHECK_FALSE(s.gap_window.has_value());
  CHECK_THROWS_AS(find_edge_states(s), NoGapError);
}

TEST_CASE("non-Hermitian spectrum") {
  const auto h = build_heff(build_ssh(-1.0, -2.0, 8), 0.4, LossChannel::atom_decay);
  const auto s = diagonalize(h);
  CHECK_FALSE(s.hermitian);
  for (int k = 0; k + 1 < s.eigenvalues.size(); ++k) {
    CHECK(s.eigenvalues(k).real() <= s.eigenvalues(k + 1).real());
  }
  const Matrix r = h.matrix.entries * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal();
  CHECK(r.colwise().norm().maxCoeff() < 1e-10 * h.matrix.entries.norm());
  for (int k = 0; k < s.eigenvalues.size(); ++k) CHECK(s.eigenvalues(k).imag() <= 1e-12);
}

TEST_CASE("dimension guard") {
  DiagonalizeOptions opts;
  opts.max_dim = 10;
  CHECK_THROWS_AS(diagonalize(build_ssh(1.0, 2.0, 6), opts), DimensionError);
}

TEST_CASE("fit of an exact geometric series") {
  const auto geo = geometric_state(-0.5, 40);
  Vector psi = Vector::Zero(80);
  for (int m = 0; m < 40; ++m) psi(A(m)) = geo.amplitudes(m);
  const auto fit = fit_geometric(psi);
  CHECK(std::abs(fit.a.ratio - cplx{-0.5, 0.0}) < 1e-10);
  CHECK(fit.a.rms_residual < 1e-10);
  CHECK(std::abs(std::norm(fit.a.c0) - 0.75) < 1e-10);
  CHECK(fit.b.empty);
  CHECK(fit.window.first == 1);
  CHECK(fit.window.last == 20);
  CHECK(fit.fitted_abs(Sublattice::A, 3) == doctest::Approx(std::sqrt(0.75) / 8.0));
  CHECK(fit.fitted_abs(Sublattice::B, 3) == 0.0);
}

TEST_CASE("fit of a complex ratio") {
  const cplx r = std::polar(0.7, 1.1);
  const auto geo = geometric_state(r, 30);
  Vector psi = Vector::Zero(60);
  for (int m = 0; m < 30; ++m) psi(B(m)) = cplx{0.0, 1.0} * geo.amplitudes(m);
  const auto fit = fit_geometric(psi);
  CHECK(std::abs(fit.b.ratio - r) < 1e-10);
  CHECK(std::abs(fit.b.c0 - cplx{0.0, 1.0} * geo.amplitudes(0)) < 1e-10);
  CHECK(fit.a.empty);
}

TEST_CASE("fit needs support") {
  Vector psi = Vector::Zero(40);
  psi(A(0)) = 1.0;
  psi(A(1)) = 0.5;
  CHECK_THROWS_AS(fit_geometric(psi), InsufficientSupportError);
  CHECK_THROWS_AS(fit_geometric(psi, FitWindow{0, 25}), DimensionError);
}

TEST_CASE("edge state fits degrade under drives") {
  auto residual = [](double j1, double j2) {
    const auto s = diagonalize(build_ssh(-1.0, -2.0, 120, j1, j2));
    const auto edges = find_edge_states(s);
    REQUIRE(edges.size() == 1);
    return fit_geometric(s.state(edges[0])).rms_residual();
  };
  const double clean = residual(-0.5, 0.0);
  const double near_bulk = residual(-0.9, 0.0);
  const double two_photon = residual(-0.5, -0.5);
  CHECK(clean < near_bulk);
  CHECK(near_bulk < two_photon);
  CHECK(two_photon >= 10.0 * clean);
}

TEST_CASE("predicted edge energy") {
  CHECK(predicted_edge_energy(-1.0, -2.0, -0.5) == doctest::Approx(0.5));
  CHECK(predicted_edge_energy(-1.0, -2.0, 0.0) == 0.0);
  CHECK(predicted_edge_energy(-1.0, -2.0, -1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(predicted_edge_energy(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("edge energy follows the linear law") {
  for (double j1 : {-0.1, -0.25, -0.4, -0.5}) {
    const auto s = diagonalize(build_ssh(-1.0, -2.0, 60, j1));
    const auto edges = find_edge_states(s);
    REQUIRE(edges.size() == 1);
    const double predicted = predicted_edge_energy(-1.0, -2.0, j1);
    CHECK(std::abs(s.eigenvalues(edges[0]).real() - predicted) <= 0.02 * std::abs(predicted));
  }
}

TEST_CASE("winding number") {
  CHECK(winding_number(1.0, 2.0) == 1);
  CHECK(winding_number(2.0, 1.0) == 0);
  CHECK(winding_number(-1.0, -2.0) == 1);
  CHECK(winding_number(1.0, -2.0, 16) == 1);
  CHECK_THROWS_AS(winding_number(1.0, 1.0), GapClosureError);
  CHECK_THROWS_AS(winding_number(1.0, -1.0), GapClosureError);
  CHECK_THROWS_AS(winding_number(1.0, 2.0, 8), std::invalid_argument);
}

TEST_CASE("recurrence reproduces geometric and coherent amplitudes") {
  const std::vector<double> one{1.0}, two{2.0};
  const Vector geo_psi = solve_recurrence(one, two, 40);
  const auto geo = geometric_state(-0.5, 40);
  for (int m = 0; m < 40; ++m) {
    CHECK(std::abs(geo_psi(A(m)) - geo.amplitudes(m) / geo.amplitudes.norm()) < 1e-14);
    CHECK(geo_psi(B(m)) == cplx{0.0, 0.0});
  }

  JCParams p;
  p.lambda = 1.0;
  p.mu = 0.5;
  p.n_max = 40;
  const auto jc = build_driven_jc(p);
  const Vector jc_psi = solve_recurrence(jc.lattice.v_intra, jc.lattice.v_inter, 41);
  const auto cs = coherent_state(-0.5, TruncatedFockSpace(40));
  for (int m = 0; m <= 40; ++m) CHECK(std::abs(jc_psi(A(m)) - cs.amplitudes(m)) < 1e-14);
  CHECK((jc.matrix.entries * jc_psi).norm() < 1e-14);

  const std::vector<double> zero{0.0};
  const Vector site0 = solve_recurrence(zero, two, 10);
  CHECK(site0(A(0)) == cplx{1.0, 0.0});
  CHECK(site0.tail(19).norm() == 0.0);

  CHECK_THROWS_AS(solve_recurrence(two, one, 30), NormalizationError);
}

TEST_CASE("left weight") {
  Vector psi = Vector::Zero(8);
  psi(A(0)) = 1.0;
  psi(B(3)) = 1.0;
  CHECK(left_weight(psi, 1) == doctest::Approx(0.5));
  CHECK(left_weight(psi, 4) == doctest::Approx(1.0));
}
