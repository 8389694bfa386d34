#include "fslab/hamiltonians.hpp"

#include <cmath>
#include <stdexcept>

#include "fslab/errors.hpp"

namespace fslab {

namespace {

double pick(const std::vector<double>& values, int cell) {
  return values.size() == 1 ? values.front() : values[static_cast<std::size_t>(cell)];
}

// Atom operators on the (A, B) = (ground, excited) pair.
Matrix sigma_plus() {
  Matrix s = Matrix::Zero(2, 2);
  s(1, 0) = 1.0;  // |B><A|
  return s;
}

// Fock operator on the cell index, atom operator on the sublattice index.
Matrix cell_major(const Matrix& fock_part, const Matrix& atom_part) {
  return kron(fock_part, atom_part);
}

Matrix assemble_jc(double lambda, double mu, const Matrix& lowering) {
  const auto n = lowering.rows();
  const Matrix sp = sigma_plus();
  const Matrix sm = sp.adjoint();
  Matrix h = lambda * cell_major(lowering, sp) + lambda * cell_major(lowering.adjoint(), sm) +
             mu * cell_major(Matrix::Identity(n, n), sp + sm);
  return h;
}

void check_jc(const JCParams& p, const char* who) {
  if (p.n_max < 2) {
    throw DimensionError(std::string(who) + ": n_max must be >= 2");
  }
}

}  // namespace

double LadderSpec::intra(int cell) const { return pick(v_intra, cell); }
double LadderSpec::inter(int cell) const { return pick(v_inter, cell); }

bool LadderSpec::uniform() const {
  auto flat = [](const std::vector<double>& v) {
    for (double x : v) {
      if (x != v.front()) return false;
    }
    return true;
  };
  return flat(v_intra) && flat(v_inter);
}

void LadderSpec::validate() const {
  if (n_cells < 2) {
    throw DimensionError("LadderSpec: n_cells must be >= 2, got " + std::to_string(n_cells));
  }
  auto check = [&](const std::vector<double>& v, const char* name) {
    if (v.size() != 1 && v.size() != static_cast<std::size_t>(n_cells)) {
      throw DimensionError(std::string("LadderSpec: ") + name + " has length " +
                           std::to_string(v.size()) + ", expected 1 or " +
                           std::to_string(n_cells));
    }
  };
  check(v_intra, "v_intra");
  check(v_inter, "v_inter");
}

Matrix same_sublattice_hopping(int n_cells, cplx j1, cplx j2, Boundary boundary) {
  const int dim = 2 * n_cells;
  Matrix h = Matrix::Zero(dim, dim);
  const cplx hops[] = {j1, j2};
  for (int range = 1; range <= 2; ++range) {
    const cplx j = hops[range - 1];
    if (j == cplx{0.0, 0.0}) continue;
    for (int m = 0; m < n_cells; ++m) {
      int target = m + range;
      if (target >= n_cells) {
        if (boundary == Boundary::open) continue;
        target %= n_cells;
      }
      for (auto s : {Sublattice::A, Sublattice::B}) {
        const int from = site_index(s, m);
        const int to = site_index(s, target);
        h(to, from) += j;
        h(from, to) += std::conj(j);
      }
    }
  }
  return h;
}

LatticeHamiltonian build_ladder(const LadderSpec& spec) {
  spec.validate();
  const int n = spec.n_cells;
  Matrix h = Matrix::Zero(2 * n, 2 * n);

  auto couple = [&](int b_site, int a_site, double value) {
    h(b_site, a_site) += value;
    h(a_site, b_site) += value;
  };

  for (int m = 0; m < n; ++m) {
    const int a = site_index(Sublattice::A, m);
    const int b = site_index(Sublattice::B, m);
    h(b, b) += spec.delta;
    couple(b, a, spec.intra(m));
    if (m > 0) {
      couple(site_index(Sublattice::B, m - 1), a, spec.inter(m));
    } else if (spec.boundary == Boundary::periodic) {
      couple(site_index(Sublattice::B, n - 1), a, spec.inter(0));
    }
  }
  h += same_sublattice_hopping(n, spec.j1, spec.j2, spec.boundary);

  LatticeHamiltonian out;
  out.matrix = {h, BasisTag::ladder};
  out.lattice = spec;
  out.origin = "ladder";
  out.hermitian = true;
  return out;
}

LatticeHamiltonian build_driven_jc(const JCParams& params) {
  check_jc(params, "build_driven_jc");
  LadderSpec spec;
  spec.n_cells = params.n_max + 1;
  spec.v_intra = {params.mu};
  spec.v_inter.resize(static_cast<std::size_t>(spec.n_cells));
  for (int m = 0; m < spec.n_cells; ++m) {
    spec.v_inter[m] = params.lambda * std::sqrt(static_cast<double>(m));
  }
  auto out = build_ladder(spec);
  out.jc = params;
  out.origin = "driven_jc";
  return out;
}

LatticeHamiltonian build_driven_jc_tensor(const JCParams& params) {
  check_jc(params, "build_driven_jc_tensor");
  const TruncatedFockSpace space(params.n_max);
  LatticeHamiltonian out;
  out.matrix = {assemble_jc(params.lambda, params.mu, annihilation_matrix(space).entries),
                BasisTag::ladder};
  out.lattice = build_driven_jc(params).lattice;
  out.jc = params;
  out.origin = "driven_jc_tensor";
  return out;
}

LatticeHamiltonian build_ssh(double v, double w, int n_cells, cplx j1, cplx j2,
                             Boundary boundary) {
  LadderSpec spec;
  spec.n_cells = n_cells;
  spec.v_intra = {v};
  spec.v_inter = {w};
  spec.j1 = j1;
  spec.j2 = j2;
  spec.boundary = boundary;
  auto out = build_ladder(spec);
  out.origin = "ssh";
  return out;
}

LatticeHamiltonian build_nljc(const JCParams& params) {
  check_jc(params, "build_nljc");
  const TruncatedFockSpace space(params.n_max);
  LatticeHamiltonian out;
  out.matrix = {
      assemble_jc(params.lambda, params.mu, deformed_annihilation_matrix(space).entries),
      BasisTag::ladder};
  LadderSpec spec;
  spec.n_cells = space.dim();
  spec.v_intra = {params.mu};
  spec.v_inter = {params.lambda};
  out.lattice = spec;
  out.jc = params;
  out.origin = "nljc";
  return out;
}

LatticeHamiltonian add_drives(const LatticeHamiltonian& h, cplx f_drive, cplx g_drive,
                              DrivePhase phase) {
  if (h.origin != "ssh" && h.origin != "nljc") {
    throw std::invalid_argument("add_drives: expected an ssh or nljc Hamiltonian, got '" +
                                h.origin + "'");
  }
  const cplx i{0.0, 1.0};
  const cplx j1 = phase == DrivePhase::real_hopping ? f_drive : i * f_drive;
  const cplx j2 = phase == DrivePhase::real_hopping ? g_drive : -i * std::conj(g_drive);

  LatticeHamiltonian out = h;
  out.matrix.entries += same_sublattice_hopping(h.n_cells(), j1 - h.lattice.j1,
                                                j2 - h.lattice.j2, h.lattice.boundary);
  out.lattice.j1 = j1;
  out.lattice.j2 = j2;
  out.drive_phase = phase;
  if (out.jc) {
    out.jc->f_drive = f_drive;
    out.jc->g_drive = g_drive;
  }
  return out;
}

LatticeHamiltonian build_heff(const LatticeHamiltonian& h, double gamma, LossChannel loss) {
  if (gamma < 0.0) {
    throw std::invalid_argument("build_heff: gamma must be >= 0");
  }
  LatticeHamiltonian out = h;
  out.loss = loss;
  out.loss_rate = gamma;
  if (gamma == 0.0) return out;

  const cplx shift{0.0, -0.5 * gamma};
  for (int m = 0; m < h.n_cells(); ++m) {
    for (auto s : {Sublattice::A, Sublattice::B}) {
      const int k = site_index(s, m);
      switch (loss) {
        case LossChannel::photon_loss:
          out.matrix.entries(k, k) += shift * static_cast<double>(m);
          break;
        case LossChannel::photon_loss_deformed:
          if (m > 0) out.matrix.entries(k, k) += shift;
          break;
        case LossChannel::atom_decay:
          if (s == Sublattice::B) out.matrix.entries(k, k) += shift;
          break;
      }
    }
  }
  out.hermitian = false;
  return out;
}

Matrix chiral_operator(int n_cells) {
  Matrix sigma = Matrix::Zero(2 * n_cells, 2 * n_cells);
  for (int m = 0; m < n_cells; ++m) {
    sigma(site_index(Sublattice::A, m), site_index(Sublattice::A, m)) = 1.0;
    sigma(site_index(Sublattice::B, m), site_index(Sublattice::B, m)) = -1.0;
  }
  return sigma;
}

double hermiticity_defect(const Matrix& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace fslab
