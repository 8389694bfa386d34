#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "fslab/diagnostics.hpp"
#include "fslab/errors.hpp"
#include "fslab/io.hpp"
#include "fslab/spectra.hpp"
#include "fslab/version.hpp"

namespace fslab::cli {

namespace fs = std::filesystem;
using io::format_double;
using io::json;

RunContext::RunContext(Config config, fs::path out_dir, std::uint64_t seed, bool gnuplot)
    : config_(std::move(config)), out_dir_(std::move(out_dir)), seed_(seed), gnuplot_(gnuplot) {
  fs::create_directories(out_dir_);
}

void RunContext::write(const std::string& name, const std::string& contents) {
  io::write_file_atomic(out_dir_ / name, contents);
  files_[name] = contents;
}

void RunContext::finish(const std::string& command) {
  write("config.cfg", config_.render());
  json files = json::array();
  for (const auto& [name, contents] : files_) {
    files.push_back({{"name", name},
                     {"bytes", contents.size()},
                     {"fnv1a64", io::hex64(io::fnv1a64(contents))}});
  }
  json cfg = json::object();
  std::istringstream lines(config_.render());
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }
  const json manifest = {
      {"command", command},
      {"version", version},
      {"seed", seed_},
      {"config", cfg},
      {"files", files},
      {"rerun", "fslab_cli " + command + " --config config.cfg --seed " + std::to_string(seed_)}};
  io::write_file_atomic(out_dir_ / "manifest.json", manifest.dump(2) + "\n");
}

namespace {

// Runs task(0..n-1) on a worker pool. Results land in index order; if any task
// throws, the exception from the lowest index is rethrown.
template <typename T, typename F>
std::vector<T> parallel_map(int n, int threads, F task) {
  std::vector<T> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(n, 1));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string fmt(double x) { return format_double(x == 0.0 ? 0.0 : x); }

Boundary boundary_of(const Config& c) {
  const auto b = c.text("boundary");
  if (b == "open") return Boundary::open;
  if (b == "periodic") return Boundary::periodic;
  c.fail("boundary", "expected open or periodic");
}

DrivePhase phase_of(const Config& c) {
  const auto p = c.text("drive_phase");
  if (p == "real_hopping") return DrivePhase::real_hopping;
  if (p == "literal") return DrivePhase::literal;
  c.fail("drive_phase", "expected real_hopping or literal");
}

int positive(const Config& c, const std::string& key, int minimum) {
  const int v = c.integer(key);
  if (v < minimum) c.fail(key, "must be >= " + std::to_string(minimum));
  return v;
}

double nonnegative(const Config& c, const std::string& key) {
  const double v = c.number(key);
  if (!(v >= 0.0)) c.fail(key, "must be >= 0");
  return v;
}

std::vector<double> sweep(const Config& c, const std::string& prefix) {
  const double start = c.number(prefix + "_start");
  const double stop = c.number(prefix + "_stop");
  const double step = c.number(prefix + "_step");
  if (start == stop) return {start};
  if (step == 0.0 || (stop - start) / step < 0.0) {
    c.fail(prefix + "_step", "does not lead from " + prefix + "_start to " + prefix + "_stop");
  }
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 100000) c.fail(prefix + "_step", "sweep has more than 100000 points");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(std::round((start + k * step) * 1e12) / 1e12);
  return out;
}

LatticeHamiltonian driven_ssh(const Config& c, int n_cells, double j1, double j2) {
  const auto base = build_ssh(c.number("t_intra"), c.number("t_inter"), n_cells, 0.0, 0.0,
                              boundary_of(c));
  return add_drives(base, j1, j2, phase_of(c));
}

// ---------------------------------------------------------------------------

void run_spectrum(RunContext& ctx) {
  const auto& c = ctx.config();
  const int n_cells = positive(c, "n_cells", 2);
  const double j2 = c.number("j2");
  const auto j1s = sweep(c, "j1");
  boundary_of(c);
  phase_of(c);

  struct Point {
    SpectrumResult spectrum;
    std::vector<int> edges;
  };
  const auto points = parallel_map<Point>(static_cast<int>(j1s.size()), c.integer("threads"),
                                          [&](int i) {
    Point p{diagonalize(driven_ssh(c, n_cells, j1s[i], j2)), {}};
    if (p.spectrum.gap_window) p.edges = find_edge_states(p.spectrum, c.number("loc_threshold"));
    return p;
  });

  io::CsvWriter all({"j1", "eigenvalue_index", "energy", "in_gap"});
  io::CsvWriter edges({"j1", "eigenvalue_index", "energy", "predicted", "rel_error", "left_weight"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& s = points[i].spectrum;
    for (int k = 0; k < s.eigenvalues.size(); ++k) {
      const double e = s.eigenvalues(k).real();
      const bool in_gap = s.gap_window && s.gap_window->contains(e);
      all.row({fmt(j1s[i]), std::to_string(k), fmt(e), in_gap ? "1" : "0"});
    }
    const double predicted = predicted_edge_energy(c.number("t_intra"), c.number("t_inter"), j1s[i]);
    for (int k : points[i].edges) {
      const double e = s.eigenvalues(k).real();
      const double rel = predicted == 0.0 ? std::abs(e) : std::abs(e - predicted) / std::abs(predicted);
      edges.row({fmt(j1s[i]), std::to_string(k), fmt(e), fmt(predicted), fmt(rel),
                 fmt(left_weight(s.state(k), (n_cells + 3) / 4))});
    }
  }
  ctx.write("spectrum.csv", all.str());
  ctx.write("edge_states.csv", edges.str());
  if (ctx.gnuplot()) {
    ctx.write("spectrum.gp",
              "set datafile separator ','\n"
              "set key autotitle columnhead\n"
              "set xlabel 'J1'\nset ylabel 'E'\n"
              "plot 'spectrum.csv' using 1:($4 == 0 ? $3 : 1/0) with points pt 7 ps 0.3 title 'bulk', \\\n"
              "     'spectrum.csv' using 1:($4 == 1 ? $3 : 1/0) with points pt 7 ps 0.6 title 'in gap', \\\n"
              "     'edge_states.csv' using 1:4 with lines title 'predicted'\n");
  }
}

// ---------------------------------------------------------------------------

void run_edgefit(RunContext& ctx) {
  const auto& c = ctx.config();
  const int n_cells = positive(c, "n_cells", 8);
  const auto j1s = c.numbers("j1_values");
  const auto j2s = c.numbers("j2_values");
  if (j1s.size() != j2s.size()) c.fail("j2_values", "must have as many entries as j1_values");
  const double floor = c.number("fit_floor");
  if (!(floor > 0.0)) c.fail("fit_floor", "must be > 0");
  boundary_of(c);
  phase_of(c);

  struct Point {
    Vector psi;
    double energy = 0.0;
    EdgeStateFit fit;
    ProductDecomposition schmidt;
  };
  const auto points = parallel_map<Point>(static_cast<int>(j1s.size()), c.integer("threads"),
                                          [&](int i) {
    const auto s = diagonalize(driven_ssh(c, n_cells, j1s[i], j2s[i]));
    const auto edges = find_edge_states(s, c.number("loc_threshold"));
    if (edges.empty()) {
      std::ostringstream msg;
      msg << "edgefit: no localized in-gap state at j1=" << j1s[i] << ", j2=" << j2s[i];
      throw NumericalError(msg.str());
    }
    int best = edges.front();
    for (int k : edges) {
      if (left_weight(s.state(k), (n_cells + 3) / 4) > left_weight(s.state(best), (n_cells + 3) / 4)) best = k;
    }
    Point p;
    p.psi = s.state(best);
    p.energy = s.eigenvalues(best).real();
    p.fit = fit_geometric(p.psi, std::nullopt, floor);
    p.schmidt = sublattice_schmidt(p.psi, n_cells);
    return p;
  });

  io::CsvWriter summary({"point", "j1", "j2", "energy", "predicted_energy", "rms_residual",
                         "ratio_a_re", "ratio_a_im", "schmidt_1"});
  std::string plot = "set datafile separator ','\nset key autotitle columnhead\nset logscale y\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const std::string stem = "edgefit_" + std::to_string(i);
    json record = {{"j1", j1s[i]},
                   {"j2", j2s[i]},
                   {"n_cells", n_cells},
                   {"energy", p.energy},
                   {"predicted_energy",
                    predicted_edge_energy(c.number("t_intra"), c.number("t_inter"), j1s[i])},
                   {"fit", io::fit_to_json(p.fit)},
                   {"schmidt", io::schmidt_to_json(p.schmidt)}};
    ctx.write(stem + ".json", record.dump(2) + "\n");
    ctx.write(stem + ".csv", io::fit_csv(p.psi, p.fit));
    summary.row({std::to_string(i), fmt(j1s[i]), fmt(j2s[i]), fmt(p.energy),
                 fmt(record["predicted_energy"].get<double>()), fmt(p.fit.rms_residual()),
                 fmt(p.fit.a.ratio.real()), fmt(p.fit.a.ratio.imag()),
                 fmt(p.schmidt.schmidt_values(1))});
    plot += "set title 'J1 = " + fmt(j1s[i]) + ", J2 = " + fmt(j2s[i]) + "'\n"
            "plot '" + stem + ".csv' using 1:2 with points pt 7 title '|psi_A|', \\\n"
            "     '" + stem + ".csv' using 1:3 with points pt 6 title '|psi_B|', \\\n"
            "     '" + stem + ".csv' using 1:4 with lines title 'fit A', \\\n"
            "     '" + stem + ".csv' using 1:5 with lines title 'fit B'\n"
            "pause -1\n";
  }
  ctx.write("edgefit_summary.csv", summary.str());
  if (ctx.gnuplot()) ctx.write("edgefit.gp", plot);
}

// ---------------------------------------------------------------------------

void run_darkstate(RunContext& ctx) {
  const auto& c = ctx.config();
  const double lambda = c.number("lambda");
  if (lambda == 0.0) c.fail("lambda", "must be nonzero for a coherent dark state");
  const double gamma = c.number("gamma");
  if (!(gamma > 0.0)) c.fail("gamma", "must be > 0 for a unique steady state");
  JCParams p;
  p.lambda = lambda;
  p.mu = c.number("mu");
  p.n_max = positive(c, "n_max", 2);
  const double tol = c.number("tail_tolerance");
  if (!(tol > 0.0)) c.fail("tail_tolerance", "must be > 0");
  const int n_cells = p.n_max + 1;

  const cplx alpha = -p.mu / p.lambda;
  const auto cs = coherent_state(alpha, TruncatedFockSpace(p.n_max), tol);
  Vector closed = Vector::Zero(2 * n_cells);
  for (int m = 0; m < n_cells; ++m) closed(site_index(Sublattice::A, m)) = cs.amplitudes(m);

  const auto h = build_driven_jc(p);
  const Vector recurrence = solve_recurrence(h.lattice.v_intra, h.lattice.v_inter, n_cells);
  const auto jumps = atom_decay_jumps(n_cells, gamma);
  const auto steady = steady_state(h.matrix.entries, jumps);
  Vector principal = principal_state(steady);
  const cplx overlap = closed.dot(principal);
  if (std::abs(overlap) > 0.0) principal *= std::conj(overlap) / std::abs(overlap);

  const auto report = dark_state_check(h.matrix.entries, jumps, closed, c.number("dark_tolerance"));
  const double closed_vs_rec = (closed - recurrence).norm();
  const double closed_vs_steady = trace_distance(steady.entries(), closed * closed.adjoint());
  const double rec_vs_steady = trace_distance(steady.entries(), recurrence * recurrence.adjoint());
  const double agree_tol = c.number("agreement_tolerance");

  const json record = {
      {"alpha", io::to_json(alpha)},
      {"tail_error", cs.tail_error},
      {"dark_state", io::dark_report_to_json(report)},
      {"agreement",
       {{"closed_form_vs_recurrence", closed_vs_rec},
        {"closed_form_vs_steady_state", closed_vs_steady},
        {"recurrence_vs_steady_state", rec_vs_steady},
        {"tolerance", agree_tol},
        {"agree", std::max({closed_vs_rec, closed_vs_steady, rec_vs_steady}) < agree_tol}}},
      {"steady_state_purity", steady.purity()}};
  ctx.write("darkstate.json", record.dump(2) + "\n");

  io::CsvWriter csv({"n", "closed_re", "closed_im", "recurrence_re", "recurrence_im", "steady_re",
                     "steady_im"});
  for (int m = 0; m < n_cells; ++m) {
    const int a = site_index(Sublattice::A, m);
    csv.row({std::to_string(m), fmt(closed(a).real()), fmt(closed(a).imag()),
             fmt(recurrence(a).real()), fmt(recurrence(a).imag()), fmt(principal(a).real()),
             fmt(principal(a).imag())});
  }
  ctx.write("amplitudes.csv", csv.str());
  if (ctx.gnuplot()) {
    ctx.write("darkstate.gp",
              "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'n'\n"
              "plot 'amplitudes.csv' using 1:2 with linespoints title 'closed form', \\\n"
              "     'amplitudes.csv' using 1:4 with points pt 6 title 'recurrence', \\\n"
              "     'amplitudes.csv' using 1:6 with points pt 2 title 'steady state'\n");
  }
}

// ---------------------------------------------------------------------------

void run_evolve(RunContext& ctx) {
  const auto& c = ctx.config();
  const int n_cells = positive(c, "n_cells", 2);
  const double omega = c.number("omega");
  const double gamma = nonnegative(c, "gamma");
  const cplx alpha{c.number("alpha_re"), c.number("alpha_im")};
  const cplx g{c.number("g_re"), c.number("g_im")};
  const double t_end = c.number("t_end");
  if (!(t_end > 0.0)) c.fail("t_end", "must be > 0");
  const int n_steps = positive(c, "n_steps", 1);
  const auto mode = c.text("mode");
  if (mode != "master" && mode != "trajectory") c.fail("mode", "expected master or trajectory");
  const auto sub = c.text("sublattice");
  if (sub != "A" && sub != "B") c.fail("sublattice", "expected A or B");
  const std::array<cplx, 2> pair = sub == "A" ? std::array<cplx, 2>{1.0, 0.0}
                                              : std::array<cplx, 2>{0.0, 1.0};
  const double tol = c.number("tail_tolerance");

  const Vector psi0 = product_reference(alpha, pair, n_cells, tol);
  const Matrix h = cavity_number(n_cells, omega) + two_photon_drive(n_cells, g);
  std::vector<JumpOperator> jumps;
  if (gamma > 0.0) jumps.push_back(photon_loss_jump(n_cells, gamma));
  const auto grid = uniform_grid(0.0, t_end, n_steps);

  EvolutionResult run;
  if (mode == "master") {
    LindbladOptions opts;
    opts.rtol = c.number("rtol");
    opts.atol = c.number("atol");
    if (!(opts.rtol > 0.0)) c.fail("rtol", "must be > 0");
    if (!(opts.atol > 0.0)) c.fail("atol", "must be > 0");
    run = lindblad_evolve(h, jumps, DensityMatrix::pure(psi0), grid, opts);
  } else {
    run = trajectory_average(effective_hamiltonian(h, jumps), jumps, psi0, grid, ctx.seed(),
                             positive(c, "trajectories", 1), c.integer("threads"));
  }

  io::CsvWriter csv({"time", "trace", "purity", "fidelity", "alpha_re", "alpha_im", "schmidt_0",
                     "schmidt_1"});
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const cplx a_t = coherent_decay_reference(alpha, omega, gamma, run.times[k]);
    const auto schmidt = sublattice_schmidt(principal_state(run.states[k]), n_cells);
    csv.row({fmt(run.times[k]), fmt(run.trace[k]), fmt(run.purity[k]),
             fmt(product_fidelity(run.states[k], a_t, pair, 1.0)), fmt(a_t.real()), fmt(a_t.imag()),
             fmt(schmidt.schmidt_values(0)), fmt(schmidt.schmidt_values(1))});
  }
  ctx.write("evolve.csv", csv.str());
  json final_state = io::density_to_json(run.states.back());
  final_state["time"] = run.times.back();
  final_state["mode"] = mode;
  if (mode == "trajectory") final_state["total_jumps"] = run.total_jumps;
  ctx.write("final_state.json", final_state.dump(2) + "\n");
  if (ctx.gnuplot()) {
    ctx.write("evolve.gp",
              "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n"
              "plot 'evolve.csv' using 1:3 with lines title 'purity', \\\n"
              "     'evolve.csv' using 1:4 with lines title 'fidelity'\n");
  }
}

// ---------------------------------------------------------------------------

void run_winding(RunContext& ctx) {
  const auto& c = ctx.config();
  const auto vs = c.numbers("v_values");
  const auto ws = c.numbers("w_values");
  const int k_points = positive(c, "k_points", 16);

  io::CsvWriter csv({"v", "w", "winding", "status"});
  json rows = json::array();
  int closed = 0;
  for (double v : vs) {
    for (double w : ws) {
      try {
        const int n = winding_number(v, w, k_points);
        csv.row({fmt(v), fmt(w), std::to_string(n), "ok"});
        rows.push_back({{"v", v}, {"w", w}, {"winding", n}});
      } catch (const GapClosureError&) {
        ++closed;
        csv.row({fmt(v), fmt(w), "", "gap_closed"});
        rows.push_back({{"v", v}, {"w", w}, {"winding", nullptr}});
      }
    }
  }
  if (closed == static_cast<int>(vs.size() * ws.size())) {
    throw GapClosureError("winding: the gap closes at every requested (v, w)");
  }
  ctx.write("winding.csv", csv.str());
  ctx.write("winding.json", json{{"k_points", k_points}, {"points", rows}}.dump(2) + "\n");
  if (ctx.gnuplot()) {
    ctx.write("winding.gp",
              "set datafile separator ','\nset key autotitle columnhead\n"
              "set xlabel 'v'\nset ylabel 'w'\n"
              "plot 'winding.csv' using 1:2:3 with points pt 5 palette title 'winding'\n");
  }
}

const std::map<std::string, std::string> kLattice = {
    {"t_inter", "-2"}, {"t_intra", "-1"}, {"boundary", "open"}, {"drive_phase", "real_hopping"},
    {"loc_threshold", "0.9"}, {"threads", "0"}};

std::map<std::string, std::string> with_lattice(std::map<std::string, std::string> extra) {
  extra.insert(kLattice.begin(), kLattice.end());
  return extra;
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> all = {
      {"spectrum", "Eigenvalues of the driven SSH ladder over a J1 sweep",
       with_lattice({{"n_cells", "80"},
                     {"j1_start", "0"},
                     {"j1_stop", "-1"},
                     {"j1_step", "-0.05"},
                     {"j2", "0"}}),
       run_spectrum},
      {"edgefit", "Geometric fits and Schmidt values of the edge state",
       with_lattice({{"n_cells", "120"},
                     {"j1_values", "-0.5,-0.9,-0.5"},
                     {"j2_values", "0,0,-0.5"},
                     {"fit_floor", "1e-12"}}),
       run_edgefit},
      {"darkstate", "Coherent dark state of the driven JC model, three constructions",
       {{"lambda", "1"},
        {"mu", "0.5"},
        {"n_max", "40"},
        {"gamma", "1"},
        {"tail_tolerance", "1e-12"},
        {"dark_tolerance", "1e-10"},
        {"agreement_tolerance", "1e-8"}},
       run_darkstate},
      {"evolve", "Open-system evolution of a coherent product state",
       {{"mode", "master"},
        {"n_cells", "21"},
        {"omega", "1"},
        {"gamma", "0.2"},
        {"alpha_re", "1"},
        {"alpha_im", "0"},
        {"g_re", "0"},
        {"g_im", "0"},
        {"sublattice", "A"},
        {"t_end", "5"},
        {"n_steps", "50"},
        {"trajectories", "500"},
        {"threads", "0"},
        {"rtol", "1e-10"},
        {"atol", "1e-12"},
        {"tail_tolerance", "1e-12"}},
       run_evolve},
      {"winding", "Winding number of v + w exp(-ik) over a (v, w) grid",
       {{"v_values", "1,2"}, {"w_values", "2,1"}, {"k_points", "256"}},
       run_winding},
  };
  return all;
}

}  // namespace fslab::cli
