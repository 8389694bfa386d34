#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fslab/diagnostics.hpp"
#include "fslab/errors.hpp"
#include "fslab/spectra.hpp"
#include "fslab/version.hpp"

namespace py = pybind11;
using namespace fslab;

namespace {

Boundary boundary_of(const std::string& name) {
  if (name == "open") return Boundary::open;
  if (name == "periodic") return Boundary::periodic;
  throw std::invalid_argument("boundary must be 'open' or 'periodic'");
}

DrivePhase phase_of(const std::string& name) {
  if (name == "real_hopping") return DrivePhase::real_hopping;
  if (name == "literal") return DrivePhase::literal;
  throw std::invalid_argument("drive_phase must be 'real_hopping' or 'literal'");
}

py::dict evolution_dict(const EvolutionResult& r) {
  std::vector<Matrix> states;
  for (const auto& s : r.states) states.push_back(s.entries());
  py::dict out;
  out["times"] = r.times;
  out["states"] = states;
  out["trace"] = r.trace;
  out["purity"] = r.purity;
  out["total_jumps"] = r.total_jumps;
  return out;
}

py::dict fit_side(const SublatticeFit& f) {
  py::dict out;
  out["ratio"] = f.ratio;
  out["c0"] = f.c0;
  out["rms_residual"] = f.rms_residual;
  out["used_sites"] = f.used_sites;
  out["empty"] = f.empty;
  return out;
}

}  // namespace

PYBIND11_MODULE(_fslab, m) {
  m.doc() = "Fock-space lattice models: operators, spectra, open-system dynamics";
  m.attr("__version__") = version;

  auto base = py::register_exception<Error>(m, "Error");
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", numerical.ptr());
  py::register_exception<NoGapError>(m, "NoGapError", numerical.ptr());
  py::register_exception<GapClosureError>(m, "GapClosureError", numerical.ptr());
  py::register_exception<InsufficientSupportError>(m, "InsufficientSupportError", numerical.ptr());
  py::register_exception<NormalizationError>(m, "NormalizationError", numerical.ptr());
  py::register_exception<StepFailure>(m, "StepFailure", numerical.ptr());

  m.def("annihilation", [](int n_max) { return annihilation_matrix(TruncatedFockSpace(n_max)).entries; },
        py::arg("n_max"));
  m.def("deformed_annihilation",
        [](int n_max) { return deformed_annihilation_matrix(TruncatedFockSpace(n_max)).entries; },
        py::arg("n_max"));
  m.def("coherent_state",
        [](cplx alpha, int n_max, double tolerance) {
          return coherent_state(alpha, TruncatedFockSpace(n_max), tolerance).amplitudes;
        },
        py::arg("alpha"), py::arg("n_max"), py::arg("tolerance") = 1e-12);
  m.def("coherent_tail_mass", &coherent_tail_mass, py::arg("abs_alpha_sq"), py::arg("n_max"));

  py::class_<LatticeHamiltonian>(m, "LatticeHamiltonian")
      .def_property_readonly("matrix", [](const LatticeHamiltonian& h) { return h.matrix.entries; })
      .def_property_readonly("n_cells", &LatticeHamiltonian::n_cells)
      .def_property_readonly("hermitian", [](const LatticeHamiltonian& h) { return h.hermitian; })
      .def_property_readonly("origin", [](const LatticeHamiltonian& h) { return h.origin; });

  m.def("build_ssh",
        [](double v, double w, int n_cells, cplx j1, cplx j2, const std::string& boundary) {
          return build_ssh(v, w, n_cells, j1, j2, boundary_of(boundary));
        },
        py::arg("v"), py::arg("w"), py::arg("n_cells"), py::arg("j1") = cplx{}, py::arg("j2") = cplx{},
        py::arg("boundary") = "open");
  m.def("add_drives",
        [](const LatticeHamiltonian& h, cplx f, cplx g, const std::string& phase) {
          return add_drives(h, f, g, phase_of(phase));
        },
        py::arg("h"), py::arg("f_drive"), py::arg("g_drive"), py::arg("drive_phase") = "real_hopping");
  m.def("build_driven_jc",
        [](double lambda, double mu, int n_max) {
          JCParams p;
          p.lambda = lambda;
          p.mu = mu;
          p.n_max = n_max;
          return build_driven_jc(p);
        },
        py::arg("lambda_"), py::arg("mu"), py::arg("n_max"));

  m.def("diagonalize",
        [](const LatticeHamiltonian& h) {
          const auto s = diagonalize(h);
          py::dict out;
          out["eigenvalues"] = s.eigenvalues;
          out["eigenvectors"] = s.eigenvectors;
          out["hermitian"] = s.hermitian;
          out["in_gap_indices"] = s.in_gap_indices;
          if (s.gap_window) {
            out["gap_window"] = py::make_tuple(s.gap_window->lower, s.gap_window->upper);
            out["edge_states"] = find_edge_states(s);
          } else {
            out["gap_window"] = py::none();
            out["edge_states"] = std::vector<int>{};
          }
          return out;
        },
        py::arg("h"));
  m.def("fit_geometric",
        [](const Vector& psi, double floor) {
          const auto f = fit_geometric(psi, std::nullopt, floor);
          py::dict out;
          out["A"] = fit_side(f.a);
          out["B"] = fit_side(f.b);
          out["window"] = py::make_tuple(f.window.first, f.window.last);
          out["rms_residual"] = f.rms_residual();
          return out;
        },
        py::arg("psi"), py::arg("floor") = 1e-12);
  m.def("predicted_edge_energy", &predicted_edge_energy, py::arg("t_intra"), py::arg("t_inter"),
        py::arg("j1"));
  m.def("winding_number", &winding_number, py::arg("v"), py::arg("w"), py::arg("k_points") = 256);
  m.def("solve_recurrence",
        [](const std::vector<double>& v_intra, const std::vector<double>& v_inter, int n_cells) {
          return solve_recurrence(v_intra, v_inter, n_cells);
        },
        py::arg("v_intra"), py::arg("v_inter"), py::arg("n_cells"));

  py::class_<JumpOperator>(m, "JumpOperator")
      .def_readonly("rate", &JumpOperator::rate)
      .def("collapse", &JumpOperator::collapse);
  m.def("atom_decay_jumps", &atom_decay_jumps, py::arg("n_cells"), py::arg("gamma"));
  m.def("photon_loss_jump", &photon_loss_jump, py::arg("n_cells"), py::arg("gamma"));
  m.def("cavity_number", &cavity_number, py::arg("n_cells"), py::arg("omega") = 1.0);
  m.def("two_photon_drive", &two_photon_drive, py::arg("n_cells"), py::arg("g_drive"));

  m.def("lindblad_evolve",
        [](const Matrix& h, const std::vector<JumpOperator>& jumps, const Matrix& rho0,
           const std::vector<double>& times, double rtol, double atol) {
          LindbladOptions opts;
          opts.rtol = rtol;
          opts.atol = atol;
          EvolutionResult r;
          {
            py::gil_scoped_release release;
            r = lindblad_evolve(h, jumps, DensityMatrix(rho0), times, opts);
          }
          return evolution_dict(r);
        },
        py::arg("h"), py::arg("jumps"), py::arg("rho0"), py::arg("times"), py::arg("rtol") = 1e-10,
        py::arg("atol") = 1e-12);
  m.def("steady_state",
        [](const Matrix& h, const std::vector<JumpOperator>& jumps) {
          return steady_state(h, jumps).entries();
        },
        py::arg("h"), py::arg("jumps"));
  m.def("trajectory_average",
        [](const Matrix& h, const std::vector<JumpOperator>& jumps, const Vector& psi0,
           const std::vector<double>& times, std::uint64_t seed, int n_trajectories, int threads) {
          EvolutionResult r;
          {
            py::gil_scoped_release release;
            r = trajectory_average(effective_hamiltonian(h, jumps), jumps, psi0, times, seed,
                                   n_trajectories, threads);
          }
          return evolution_dict(r);
        },
        py::arg("h"), py::arg("jumps"), py::arg("psi0"), py::arg("times"), py::arg("seed"),
        py::arg("n_trajectories"), py::arg("threads") = 0);

  m.def("sublattice_schmidt",
        [](const Vector& psi, int n_cells) {
          const auto p = sublattice_schmidt(psi, n_cells);
          py::dict out;
          out["schmidt_values"] = Eigen::VectorXd(p.schmidt_values);
          out["entropy"] = p.entropy;
          out["cell_factor"] = p.cell_factor;
          out["sublattice_factor"] = py::make_tuple(p.sublattice_factor[0], p.sublattice_factor[1]);
          return out;
        },
        py::arg("psi"), py::arg("n_cells"));
  m.def("dark_state_check",
        [](const Matrix& h, const std::vector<JumpOperator>& jumps, const Vector& psi, double tol) {
          const auto r = dark_state_check(h, jumps, psi, tol);
          py::dict out;
          out["energy"] = r.energy;
          out["eigen_residual"] = r.eigen_residual;
          out["max_jump_residual"] = r.max_jump_residual;
          out["dark"] = r.dark;
          return out;
        },
        py::arg("h"), py::arg("jumps"), py::arg("psi"), py::arg("tolerance") = 1e-10);
  m.def("trace_distance", &trace_distance, py::arg("a"), py::arg("b"));
}
