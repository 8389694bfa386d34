#include "fslab/spectra.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fslab/errors.hpp"

namespace fslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct BandSample {
  double lower;
  double upper;
};

BandSample bloch_bands(const LadderSpec& spec, double k) {
  const cplx i{0.0, 1.0};
  const cplx h = spec.intra(0) + spec.inter(0) * std::exp(i * k);
  const double shift = 2.0 * std::real(spec.j1 * std::exp(-i * k)) +
                       2.0 * std::real(spec.j2 * std::exp(-2.0 * i * k)) + 0.5 * spec.delta;
  const double split = std::sqrt(0.25 * spec.delta * spec.delta + std::norm(h));
  return {shift - split, shift + split};
}

// Golden-section search for the maximum of f on [a, b].
template <typename F>
double golden_max(F f, double a, double b) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 100 && (b - a) > 1e-13; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return std::max({fc, fd, f(0.5 * (a + b))});
}

Eigen::VectorXd residual_norms(const Matrix& h, const Vector& values, const Matrix& vectors) {
  const Matrix r = h * vectors - vectors * values.asDiagonal();
  return r.colwise().norm().transpose();
}

// Within each cluster of eigenvalues closer than `spacing`, replace the
// eigenvectors by the eigenbasis of the projected cell-position operator.
void localize_clusters(const Matrix& h, Vector& values, Matrix& vectors, int n_cells,
                       double spacing, double residual_bound) {
  const int n = static_cast<int>(values.size());
  Eigen::VectorXd position(2 * n_cells);
  for (int k = 0; k < 2 * n_cells; ++k) position(k) = static_cast<double>(k / 2);

  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && values(stop).real() - values(stop - 1).real() <= spacing) ++stop;
    const int size = stop - start;
    if (size > 1) {
      const Matrix block = vectors.middleCols(start, size);
      const Matrix projected = block.adjoint() * position.asDiagonal() * block;
      Eigen::SelfAdjointEigenSolver<Matrix> local(projected);
      const Matrix rotated = block * local.eigenvectors();
      Vector rayleigh(size);
      for (int c = 0; c < size; ++c) {
        rayleigh(c) = (rotated.col(c).adjoint() * h * rotated.col(c))(0, 0).real();
      }
      if (residual_norms(h, rayleigh, rotated).maxCoeff() <= residual_bound) {
        vectors.middleCols(start, size) = rotated;
        values.segment(start, size) = rayleigh;
      }
    }
    start = stop;
  }
}

void sort_by_real_part(Vector& values, Matrix& vectors) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });
  Vector sorted_values(values.size());
  Matrix sorted_vectors(vectors.rows(), vectors.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted_values(k) = values(order[k]);
    sorted_vectors.col(k) = vectors.col(order[k]);
  }
  values = std::move(sorted_values);
  vectors = std::move(sorted_vectors);
}

}  // namespace

GapWindow bulk_gap(const LadderSpec& spec, int k_points) {
  spec.validate();
  if (!spec.uniform()) {
    throw NoGapError("bulk_gap: couplings are site dependent, no Bloch reference");
  }
  if (k_points < 16) k_points = 16;
  // Even sample count so that k = 0 and k = pi are both on the grid.
  if (k_points % 2 != 0) ++k_points;
  const double dk = kTwoPi / k_points;

  int best_lower = 0;
  int best_upper = 0;
  double lower_max = -std::numeric_limits<double>::infinity();
  double upper_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < k_points; ++j) {
    const auto s = bloch_bands(spec, j * dk);
    if (s.lower > lower_max) {
      lower_max = s.lower;
      best_lower = j;
    }
    if (s.upper < upper_min) {
      upper_min = s.upper;
      best_upper = j;
    }
  }
  lower_max = std::max(lower_max,
                       golden_max([&](double k) { return bloch_bands(spec, k).lower; },
                                  (best_lower - 1) * dk, (best_lower + 1) * dk));
  upper_min = std::min(upper_min,
                       -golden_max([&](double k) { return -bloch_bands(spec, k).upper; },
                                   (best_upper - 1) * dk, (best_upper + 1) * dk));

  const double scale = std::abs(spec.intra(0)) + std::abs(spec.inter(0)) + std::abs(spec.j1) +
                       std::abs(spec.j2) + std::abs(spec.delta);
  if (upper_min - lower_max <= 1e-12 * scale) {
    std::ostringstream msg;
    msg << "bulk_gap: bands overlap or touch (lower band top " << lower_max
        << ", upper band bottom " << upper_min << ")";
    throw NoGapError(msg.str());
  }
  return {lower_max, upper_min};
}

SpectrumResult diagonalize(const LatticeHamiltonian& h, const DiagonalizeOptions& options) {
  const Matrix& m = h.matrix.entries;
  const int dim = static_cast<int>(m.rows());
  if (dim > options.max_dim) {
    throw DimensionError("diagonalize: dimension " + std::to_string(dim) +
                         " exceeds configured maximum " + std::to_string(options.max_dim));
  }
  const double norm = m.norm();
  const double bound = options.residual_tol * std::max(norm, 1e-300);

  SpectrumResult out;
  out.hermitian = h.hermitian;
  out.n_cells = dim / 2;

  if (h.hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceError("diagonalize: self-adjoint solver did not converge");
    }
    out.eigenvalues = solver.eigenvalues().cast<cplx>();
    out.eigenvectors = solver.eigenvectors();
    if (options.localize_degenerate && dim % 2 == 0) {
      localize_clusters(m, out.eigenvalues, out.eigenvectors, out.n_cells, bound, bound);
      sort_by_real_part(out.eigenvalues, out.eigenvectors);
    }
  } else {
    Eigen::ComplexEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceError("diagonalize: complex solver did not converge");
    }
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    out.eigenvectors.colwise().normalize();
    sort_by_real_part(out.eigenvalues, out.eigenvectors);
  }

  const Eigen::VectorXd residuals = residual_norms(m, out.eigenvalues, out.eigenvectors);
  if (dim > 0 && residuals.maxCoeff() > bound) {
    std::ostringstream msg;
    msg << "diagonalize: max eigen-residual " << residuals.maxCoeff() << " exceeds bound "
        << bound;
    throw ConvergenceError(msg.str());
  }

  if (h.hermitian && h.lattice.uniform() && dim == 2 * h.lattice.n_cells) {
    try {
      out.gap_window = bulk_gap(h.lattice);
    } catch (const NoGapError&) {
      out.gap_window.reset();
    }
  }
  if (out.gap_window) {
    for (int k = 0; k < dim; ++k) {
      if (out.gap_window->contains(out.eigenvalues(k).real())) out.in_gap_indices.push_back(k);
    }
  }
  return out;
}

double left_weight(const Vector& psi, int cells) {
  const int sites = std::min<int>(2 * cells, static_cast<int>(psi.size()));
  const double total = psi.squaredNorm();
  if (total == 0.0) return 0.0;
  return psi.head(sites).squaredNorm() / total;
}

std::vector<int> find_edge_states(const SpectrumResult& spectrum, double loc_threshold) {
  if (!spectrum.gap_window) {
    throw NoGapError("find_edge_states: spectrum has no bulk gap window");
  }
  const int cells = (spectrum.n_cells + 3) / 4;
  std::vector<int> out;
  for (int k : spectrum.in_gap_indices) {
    if (left_weight(spectrum.eigenvectors.col(k), cells) > loc_threshold) out.push_back(k);
  }
  return out;
}

double EdgeStateFit::rms_residual() const {
  double sum = 0.0;
  int count = 0;
  for (const auto* fit : {&a, &b}) {
    if (fit->empty) continue;
    sum += fit->rms_residual * fit->rms_residual * fit->used_sites;
    count += fit->used_sites;
  }
  return count == 0 ? 0.0 : std::sqrt(sum / count);
}

double EdgeStateFit::fitted_abs(Sublattice s, int cell) const {
  const auto& fit = s == Sublattice::A ? a : b;
  if (fit.empty) return 0.0;
  return std::abs(fit.c0) * std::pow(std::abs(fit.ratio), cell);
}

FitWindow default_fit_window(int n_cells) { return {1, (n_cells + 1) / 2}; }

namespace {

SublatticeFit fit_sublattice(const Vector& psi, Sublattice s, const FitWindow& window,
                             double floor) {
  std::vector<int> cells;
  for (int m = window.first; m <= window.last; ++m) {
    if (std::abs(psi(site_index(s, m))) > floor) cells.push_back(m);
  }
  SublatticeFit fit;
  if (cells.size() < 4) return fit;

  const double n = static_cast<double>(cells.size());
  double sx = 0.0, sy = 0.0;
  for (int m : cells) {
    sx += m;
    sy += std::log(std::abs(psi(site_index(s, m))));
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int m : cells) {
    const double dx = m - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(std::abs(psi(site_index(s, m)))) - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  double ss = 0.0;
  for (int m : cells) {
    const double r = std::log(std::abs(psi(site_index(s, m)))) - (intercept + slope * m);
    ss += r * r;
  }

  // Phase of r from successive ratios, weighted by amplitude.
  cplx phase_acc{0.0, 0.0};
  for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
    if (cells[k + 1] != cells[k] + 1) continue;
    phase_acc += psi(site_index(s, cells[k + 1])) * std::conj(psi(site_index(s, cells[k])));
  }
  const double phase = std::abs(phase_acc) > 0.0 ? std::arg(phase_acc) : 0.0;

  fit.ratio = std::polar(std::exp(slope), phase);
  const int m0 = cells.front();
  const cplx anchor = psi(site_index(s, m0)) / std::pow(fit.ratio, m0);
  fit.c0 = std::polar(std::exp(intercept), std::arg(anchor));
  fit.rms_residual = std::sqrt(ss / n);
  fit.used_sites = static_cast<int>(cells.size());
  fit.empty = false;
  return fit;
}

}  // namespace

EdgeStateFit fit_geometric(const Vector& psi, std::optional<FitWindow> window, double floor) {
  if (psi.size() % 2 != 0 || psi.size() < 2) {
    throw DimensionError("fit_geometric: state dimension must be 2 * n_cells");
  }
  const int n_cells = static_cast<int>(psi.size() / 2);
  const FitWindow w = window.value_or(default_fit_window(n_cells));
  if (w.first < 0 || w.last >= n_cells || w.size() < 1) {
    throw DimensionError("fit_geometric: window outside 0.." + std::to_string(n_cells - 1));
  }
  EdgeStateFit out;
  out.window = w;
  out.a = fit_sublattice(psi, Sublattice::A, w, floor);
  out.b = fit_sublattice(psi, Sublattice::B, w, floor);
  if (out.a.empty && out.b.empty) {
    throw InsufficientSupportError(
        "fit_geometric: fewer than 4 amplitudes above the floor on both sublattices");
  }
  return out;
}

double predicted_edge_energy(double t_intra, double t_inter, double j1) {
  if (t_inter == 0.0) {
    throw std::invalid_argument("predicted_edge_energy: t_inter must be nonzero");
  }
  return -2.0 * (t_intra / t_inter) * j1;
}

int winding_number(double v, double w, int k_points) {
  if (k_points < 16) {
    throw std::invalid_argument("winding_number: k_points must be >= 16");
  }
  const double scale = std::max(std::abs(v), std::abs(w));
  if (scale == 0.0 || std::abs(std::abs(v) - std::abs(w)) <= 1e-12 * scale) {
    throw GapClosureError("winding_number: |v| == |w|, gap closes");
  }
  const cplx i{0.0, 1.0};
  auto h = [&](int j) { return v + w * std::exp(-i * (kTwoPi * j / k_points)); };
  double total = 0.0;
  cplx prev = h(0);
  for (int j = 1; j <= k_points; ++j) {
    const cplx next = h(j % k_points);
    total += std::arg(next / prev);
    prev = next;
  }
  return -static_cast<int>(std::lround(total / kTwoPi));
}

Vector solve_recurrence(std::span<const double> v_intra, std::span<const double> v_inter,
                        int n_cells) {
  if (n_cells < 2) throw DimensionError("solve_recurrence: n_cells must be >= 2");
  auto check = [&](std::span<const double> v, const char* name) {
    if (v.size() != 1 && v.size() != static_cast<std::size_t>(n_cells)) {
      throw DimensionError(std::string("solve_recurrence: ") + name +
                           " must have length 1 or n_cells");
    }
  };
  check(v_intra, "v_intra");
  check(v_inter, "v_inter");
  auto at = [](std::span<const double> v, int m) { return v.size() == 1 ? v[0] : v[m]; };

  std::vector<double> phi(static_cast<std::size_t>(n_cells), 0.0);
  phi[0] = 1.0;
  for (int m = 0; m + 1 < n_cells; ++m) {
    const double bond = at(v_inter, m + 1);
    if (bond == 0.0) {
      throw std::invalid_argument("solve_recurrence: v_inter(" + std::to_string(m + 1) +
                                  ") is zero");
    }
    phi[m + 1] = -at(v_intra, m) / bond * phi[m];
  }

  double peak = 0.0;
  for (int m = 0; m + 1 < n_cells; ++m) peak = std::max(peak, std::abs(phi[m]));
  const double last = std::abs(phi.back());
  if (!std::isfinite(last) || (last > 0.0 && last >= peak)) {
    std::ostringstream msg;
    msg << "solve_recurrence: amplitude does not decay inside " << n_cells
        << " cells (|phi_last| = " << last << ", earlier peak " << peak << ")";
    throw NormalizationError(msg.str());
  }

  Vector out = Vector::Zero(2 * n_cells);
  for (int m = 0; m < n_cells; ++m) out(site_index(Sublattice::A, m)) = phi[m];
  out /= out.norm();
  return out;
}

}  // namespace fslab
