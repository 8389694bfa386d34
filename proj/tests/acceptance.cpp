// One PASS/FAIL line per acceptance criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fslab/diagnostics.hpp"
#include "fslab/errors.hpp"
#include "fslab/spectra.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fslab;

namespace {

constexpr int A(int m) { return site_index(Sublattice::A, m); }
constexpr int B(int m) { return site_index(Sublattice::B, m); }

// Regression bounds frozen from the first verified run.
constexpr double kFitRatioFloor = 50.0;         // residual(J2) / residual(J1=-0.5); measured 59.6
constexpr double kSchmidtJ2Floor = 0.23;        // second Schmidt value at J2=-0.5; measured 0.2386
constexpr double kTwoPhotonPurityCeiling = 0.84;  // purity at t=5 with G=0.3; measured 0.8367

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Verdict()>& body, double budget_s) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) v.pass = false;
  if (!v.pass) ++failures;
  std::printf("[%s] %d %s | %s | %.2fs", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  if (budget_s > 0.0) std::printf(" (budget %.0fs)", budget_s);
  std::printf("\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Vector coherent_on(Sublattice s, cplx alpha, int n_cells) {
  const auto cs = coherent_state(alpha, TruncatedFockSpace(n_cells - 1));
  Vector psi = Vector::Zero(2 * n_cells);
  for (int m = 0; m < n_cells; ++m) psi(site_index(s, m)) = cs.amplitudes(m);
  return psi;
}

Vector single_edge(const SpectrumResult& s) {
  const auto edges = find_edge_states(s);
  if (edges.size() != 1) throw NumericalError(fmt("expected one edge state, found %zu", edges.size()));
  return s.state(edges[0]);
}

Verdict edge_geometric() {
  const auto h = build_ssh(-1.0, -2.0, 40);
  const auto s = diagonalize(h);
  const double scale = h.matrix.entries.norm();
  int near_zero = 0;
  for (int k = 0; k < s.eigenvalues.size(); ++k) near_zero += std::abs(s.eigenvalues(k)) < 1e-10 * scale;
  const auto edges = find_edge_states(s);
  int left_zero = 0;
  for (int k : edges) left_zero += std::abs(s.eigenvalues(k)) < 1e-10 * scale;
  if (edges.size() != 1) return {false, fmt("left edge states %zu", edges.size())};
  const Vector psi = s.state(edges[0]);
  const cplx phase = psi(A(0)) / std::abs(psi(A(0)));
  const double c0 = std::abs(psi(A(0)));
  double worst = 0.0;
  for (int m = 0; m < 20; ++m) {
    const cplx expected = phase * c0 * std::pow(-0.5, m);
    worst = std::max(worst, std::abs(psi(A(m)) - expected) / std::abs(expected));
  }
  double b_weight = 0.0;
  for (int m = 0; m < 40; ++m) b_weight += std::norm(psi(B(m)));
  const bool ok = left_zero == 1 && worst < 1e-6 && std::abs(c0 * c0 - 0.75) < 1e-6 && b_weight < 1e-10;
  return {ok, fmt("left zero modes=%d (near-zero incl. right end=%d) max rel err=%.2e |c0|^2=%.9f "
                  "B weight=%.2e",
                  left_zero, near_zero, worst, c0 * c0, b_weight)};
}

Verdict coherent_dark() {
  JCParams p;
  p.lambda = 1.0;
  p.mu = 0.5;
  p.n_max = 40;
  const auto h = build_driven_jc(p);
  const auto jumps = atom_decay_jumps(41, 1.0);
  const Vector psi = coherent_on(Sublattice::A, -0.5, 41);
  const auto report = dark_state_check(h.matrix.entries, jumps, psi);
  const auto ss = steady_state(h.matrix.entries, jumps);
  const double td = trace_distance(ss.entries(), psi * psi.adjoint());
  const bool ok = report.eigen_residual < 1e-8 && report.max_jump_residual < 1e-10 && td < 1e-6 &&
                  std::abs(report.energy) < 1e-10;
  return {ok, fmt("E=%.1e eigen residual=%.2e jump residual=%.2e steady-state trace distance=%.2e",
                  report.energy, report.eigen_residual, report.max_jump_residual, td)};
}

Verdict edge_energy_law() {
  double worst = 0.0;
  std::string bad;
  for (int k = 0; k <= 10; ++k) {
    const double j1 = -0.05 * k;
    const auto h = build_ssh(-1.0, -2.0, 80, j1);
    const auto s = diagonalize(h);
    const auto edges = find_edge_states(s);
    if (edges.size() != 1) {
      bad += fmt(" J1=%.2f:%zu states", j1, edges.size());
      continue;
    }
    const double e = s.eigenvalues(edges[0]).real();
    const double predicted = predicted_edge_energy(-1.0, -2.0, j1);
    const double err = predicted == 0.0 ? (std::abs(e) < 1e-10 * h.matrix.entries.norm() ? 0.0 : 1.0)
                                        : std::abs(e - predicted) / std::abs(predicted);
    worst = std::max(worst, err);
  }
  bool merged = false;
  try {
    merged = find_edge_states(diagonalize(build_ssh(-1.0, -2.0, 80, -1.0))).empty();
  } catch (const NoGapError&) {
    merged = true;
  }
  return {bad.empty() && worst < 0.02 && merged,
          fmt("max rel err over J1 in [-0.5,0]=%.3e; J1=-1 isolated in-gap state absent=%s%s", worst,
              merged ? "yes" : "no", bad.c_str())};
}

double fit_residual(double j1, double j2) {
  const auto s = diagonalize(build_ssh(-1.0, -2.0, 120, j1, j2));
  return fit_geometric(single_edge(s)).rms_residual();
}

Verdict fit_ordering() {
  const double r1 = fit_residual(-0.5, 0.0);
  const double r2 = fit_residual(-0.9, 0.0);
  const double r3 = fit_residual(-0.5, -0.5);
  const double ratio = r3 / r1;
  return {r1 < r2 && r2 < r3 && ratio >= 10.0 && ratio >= kFitRatioFloor,
          fmt("rms(-0.5,0)=%.3e rms(-0.9,0)=%.3e rms(-0.5,-0.5)=%.3e ratio=%.1f (>=10, frozen >=%.0f)",
              r1, r2, r3, ratio, kFitRatioFloor)};
}

Verdict product_structure() {
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const auto s = diagonalize(build_ssh(-1.0, -2.0, 120, -0.1 * k));
    worst = std::max(worst, sublattice_schmidt(single_edge(s), 120).schmidt_values(1));
  }
  const auto s2 = diagonalize(build_ssh(-1.0, -2.0, 120, -0.5, -0.5));
  const double entangled = sublattice_schmidt(single_edge(s2), 120).schmidt_values(1);
  return {worst < 1e-8 && entangled > 1e-3 && entangled >= kSchmidtJ2Floor,
          fmt("max s1 (J2=0, J1=-0.1..-0.9)=%.2e s1(J2=-0.5)=%.4f (>1e-3, frozen >=%.2f)", worst,
              entangled, kSchmidtJ2Floor)};
}

Verdict pointer_dynamics() {
  const double omega = 1.0, gamma = 0.2;
  const int n_cells = 21;
  const auto grid = uniform_grid(0.0, 5.0, 10);
  const auto loss = std::vector{photon_loss_jump(n_cells, gamma)};
  const auto run = lindblad_evolve(cavity_number(n_cells, omega), loss,
                                   DensityMatrix::pure(coherent_on(Sublattice::A, 1.0, n_cells)), grid);
  double min_purity = 1.0, min_fid = 1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    min_purity = std::min(min_purity, run.purity[k]);
    const cplx a_t = coherent_decay_reference(1.0, omega, gamma, grid[k]);
    min_fid = std::min(min_fid, product_fidelity(run.states[k], a_t, {1.0, 0.0}));
  }

  const int big = 41;
  const auto sq = lindblad_evolve(cavity_number(big, omega) + two_photon_drive(big, 0.3),
                                  std::vector{photon_loss_jump(big, gamma)},
                                  DensityMatrix::pure(coherent_on(Sublattice::A, 1.0, big)), {0.0, 5.0});
  const double sq_purity = sq.purity.back();
  const double gaussian = oracle::gaussian_purity(omega, 0.3, gamma, 5.0);

  gen::Source src(6);
  const auto h = build_ssh(-1.0, -2.0, 6, -0.3, -0.2);
  std::vector<JumpOperator> jumps = atom_decay_jumps(6, 0.4);
  jumps.push_back(photon_loss_jump(6, 0.2));
  const DensityMatrix rho0(src.density(12));
  const auto me = lindblad_evolve(h, jumps, rho0, {0.0, 2.0});
  std::vector<Matrix> collapse;
  for (const auto& j : jumps) collapse.push_back(j.collapse());
  const Matrix exact = oracle::expm_evolve(oracle::dense_liouvillian(h.matrix.entries, collapse),
                                           rho0.entries(), 2.0);
  const double expm_diff = (me.states.back().entries() - exact).cwiseAbs().maxCoeff();

  const bool ok = min_purity > 1.0 - 1e-6 && min_fid > 1.0 - 1e-6 && sq_purity < 0.99 &&
                  sq_purity <= kTwoPhotonPurityCeiling && std::abs(sq_purity - gaussian) < 1e-6 &&
                  expm_diff < 1e-8;
  return {ok, fmt("loss: min purity=1-%.1e min fidelity=1-%.1e; +G=0.3: purity(t=5)=%.6f "
                  "(Gaussian %.6f, <0.99, frozen <=%.2f); expm check dim 12 max diff=%.1e",
                  1.0 - min_purity, 1.0 - min_fid, sq_purity, gaussian, kTwoPhotonPurityCeiling,
                  expm_diff)};
}

Verdict matrix_identity() {
  double worst = 0.0;
  for (int n_max : {10, 40, 100}) {
    JCParams p;
    p.lambda = -2.0;
    p.mu = -1.0;
    p.n_max = n_max;
    const Matrix diff = build_nljc(p).matrix.entries - build_ssh(-1.0, -2.0, n_max + 1).matrix.entries;
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-15, fmt("max |NLJC - SSH| over n_max in {10,40,100} = %.1e", worst)};
}

Verdict property_suites() {
  gen::Source src(8);
  int checked = 0;
  double herm = 0.0, chiral = 0.0, trace = 0.0, neg = 0.0, rec = 0.0;
  bool winding_ok = true;
  for (int trial = 0; trial < 20; ++trial, ++checked) {
    const auto spec = src.ladder(false);
    const Matrix h = build_ladder(spec).matrix.entries;
    herm = std::max(herm, hermiticity_defect(h) / h.norm());
    const auto cspec = src.ladder(true);
    const Matrix hc = build_ladder(cspec).matrix.entries;
    const Matrix sigma = chiral_operator(cspec.n_cells);
    chiral = std::max(chiral, (sigma * hc * sigma + hc).cwiseAbs().maxCoeff());

    const double v = src.uniform(-2.0, 2.0), w = src.uniform(-2.0, 2.0);
    if (std::abs(std::abs(v) - std::abs(w)) > 1e-6) {
      const int base = winding_number(v, w);
      for (double c : {1e-8, -3.0, 1e9}) winding_ok &= winding_number(c * v, c * w) == base;
    }

    const double ww = src.uniform(1.0, 2.0);
    const double vv = ww * src.uniform(-0.8, 0.8);
    const int n = src.integer(6, 40);
    const std::vector<double> vi{vv}, ve{ww};
    const Vector phi = solve_recurrence(vi, ve, n);
    Vector r = build_ssh(vv, ww, n).matrix.entries * phi;
    r(B(n - 1)) -= vv * phi(A(n - 1));
    rec = std::max(rec, r.norm());
  }
  for (int trial = 0; trial < 4; ++trial) {
    const int n_cells = src.integer(2, 5);
    const auto h = build_ssh(src.uniform(-1, 1), src.uniform(-1, 1), n_cells, src.uniform(-0.5, 0.5));
    auto jumps = atom_decay_jumps(n_cells, src.uniform(0.1, 1.0));
    jumps.push_back(photon_loss_jump(n_cells, src.uniform(0.1, 1.0)));
    const auto run = lindblad_evolve(h, jumps, DensityMatrix(src.density(2 * n_cells)), uniform_grid(0, 2, 4));
    for (const auto& rho : run.states) {
      trace = std::max(trace, std::abs(rho.trace() - 1.0));
      neg = std::min(neg, rho.min_eigenvalue());
      herm = std::max(herm, hermiticity_defect(rho.entries()));
    }
  }
  const bool ok = herm <= 1e-14 && chiral == 0.0 && trace <= 1e-8 && neg >= -1e-8 && rec < 1e-14 &&
                  winding_ok;
  return {ok, fmt("hermiticity=%.1e chiral=%.1e trace drift=%.1e min eig=%.1e recurrence residual=%.1e "
                  "winding scale invariance=%s (full suites: test_properties)",
                  herm, chiral, trace, neg, rec, winding_ok ? "ok" : "broken")};
}

}  // namespace

int main() {
  run(1, "edge state is a geometric series", edge_geometric, 1.0);
  run(2, "coherent dark state", coherent_dark, 10.0);
  run(3, "edge-energy law", edge_energy_law, 0.0);
  run(4, "fit degradation ordering", fit_ordering, 0.0);
  run(5, "product structure vs entanglement", product_structure, 0.0);
  run(6, "pointer-state dynamics", pointer_dynamics, 0.0);
  run(7, "NLJC and SSH matrices coincide", matrix_identity, 0.0);
  run(8, "property suites", property_suites, 0.0);
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
