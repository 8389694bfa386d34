#include "fslab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fslab/errors.hpp"

namespace fslab::io {

namespace {

const char* basis_name(BasisTag tag) { return tag == BasisTag::ladder ? "cell_major_AB" : "fock"; }

const char* origin_loss_name(LossChannel loss) {
  switch (loss) {
    case LossChannel::photon_loss: return "photon_loss";
    case LossChannel::photon_loss_deformed: return "photon_loss_deformed";
    case LossChannel::atom_decay: return "atom_decay";
  }
  return "unknown";
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(to_json(v(k)));
  return out;
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw DimensionError("complex value must be a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const OperatorMatrix& op) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < op.entries.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < op.entries.cols(); ++c) row.push_back(to_json(op.entries(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"dimension", op.entries.rows()}, {"basis", basis_name(op.basis)}, {"entries", rows}};
}

OperatorMatrix matrix_from_json(const json& j) {
  const auto dim = j.at("dimension").get<Eigen::Index>();
  const auto& rows = j.at("entries");
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim) {
    throw DimensionError("matrix_from_json: entries do not match dimension");
  }
  OperatorMatrix out;
  const auto basis = j.at("basis").get<std::string>();
  if (basis == "cell_major_AB") {
    out.basis = BasisTag::ladder;
  } else if (basis == "fock") {
    out.basis = BasisTag::fock;
  } else {
    throw DimensionError("matrix_from_json: unknown basis '" + basis + "'");
  }
  out.entries.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != dim) {
      throw DimensionError("matrix_from_json: row " + std::to_string(r) + " has wrong length");
    }
    for (Eigen::Index c = 0; c < dim; ++c) out.entries(r, c) = complex_from_json(rows[r][c]);
  }
  return out;
}

json hamiltonian_to_json(const LatticeHamiltonian& h) {
  json out = matrix_to_json(h.matrix);
  out["origin"] = h.origin;
  out["hermitian"] = h.hermitian;
  out["n_cells"] = h.n_cells();
  out["drive_phase"] = h.drive_phase == DrivePhase::literal ? "literal" : "real_hopping";
  out["j1"] = to_json(h.lattice.j1);
  out["j2"] = to_json(h.lattice.j2);
  if (h.loss) {
    out["loss"] = {{"channel", origin_loss_name(*h.loss)}, {"gamma", h.loss_rate}};
  }
  return out;
}

json spectrum_to_json(const SpectrumResult& s, bool include_vectors) {
  json out;
  out["hermitian"] = s.hermitian;
  out["n_cells"] = s.n_cells;
  out["eigenvalues"] = vector_to_json(s.eigenvalues);
  if (s.gap_window) {
    out["gap_window"] = json::array({s.gap_window->lower, s.gap_window->upper});
  } else {
    out["gap_window"] = nullptr;
  }
  out["in_gap_indices"] = s.in_gap_indices;
  if (include_vectors) {
    json cols = json::array();
    for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c) {
      cols.push_back(vector_to_json(s.eigenvectors.col(c)));
    }
    out["eigenvectors"] = std::move(cols);
  }
  return out;
}

json fit_to_json(const EdgeStateFit& fit) {
  auto side = [](const SublatticeFit& f) {
    return json{{"empty", f.empty},
                {"ratio", to_json(f.ratio)},
                {"c0", to_json(f.c0)},
                {"rms_residual", f.rms_residual},
                {"used_sites", f.used_sites}};
  };
  return {{"A", side(fit.a)},
          {"B", side(fit.b)},
          {"fit_window", json::array({fit.window.first, fit.window.last})},
          {"rms_residual", fit.rms_residual()}};
}

json schmidt_to_json(const ProductDecomposition& p) {
  std::vector<double> values(p.schmidt_values.data(),
                             p.schmidt_values.data() + p.schmidt_values.size());
  return {{"schmidt_values", values},
          {"entropy", p.entropy},
          {"sublattice_factor", json::array({to_json(p.sublattice_factor[0]),
                                             to_json(p.sublattice_factor[1])})}};
}

json dark_report_to_json(const DarkStateReport& r) {
  return {{"energy", r.energy},
          {"eigen_residual", r.eigen_residual},
          {"max_jump_residual", r.max_jump_residual},
          {"tolerance", r.tolerance},
          {"dark", r.dark}};
}

json density_to_json(const DensityMatrix& rho) {
  json out = matrix_to_json({rho.entries(), BasisTag::ladder});
  out["trace"] = rho.trace();
  out["purity"] = rho.purity();
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) {
    throw DimensionError("CsvWriter: row has " + std::to_string(fields.size()) +
                         " fields, header has " + std::to_string(columns_));
  }
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k > 0) text_ += ',';
    text_ += csv_escape(fields[k]);
  }
  text_ += "\r\n";
}

std::string spectrum_csv(const SpectrumResult& s) {
  CsvWriter csv({"index", "re", "im", "in_gap"});
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    const bool in_gap = s.gap_window && s.gap_window->contains(s.eigenvalues(k).real());
    csv.row({std::to_string(k), format_double(s.eigenvalues(k).real()),
             format_double(s.eigenvalues(k).imag()), in_gap ? "1" : "0"});
  }
  return csv.str();
}

std::string fit_csv(const Vector& psi, const EdgeStateFit& fit) {
  CsvWriter csv({"cell", "abs_a", "abs_b", "fit_a", "fit_b"});
  const int n_cells = static_cast<int>(psi.size() / 2);
  for (int m = 0; m < n_cells; ++m) {
    csv.row({std::to_string(m), format_double(std::abs(psi(site_index(Sublattice::A, m)))),
             format_double(std::abs(psi(site_index(Sublattice::B, m)))),
             format_double(fit.fitted_abs(Sublattice::A, m)),
             format_double(fit.fitted_abs(Sublattice::B, m))});
  }
  return csv.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace fslab::io
