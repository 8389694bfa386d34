#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fslab/diagnostics.hpp"
#include "fslab/spectra.hpp"

namespace fslab::io {

using json = nlohmann::json;

// Complex numbers are written as [re, im] pairs everywhere.
json to_json(cplx z);
cplx complex_from_json(const json& j);

/// {"dimension": n, "basis": "cell_major_AB" | "fock", "entries": [[[re, im], ...], ...]}
json matrix_to_json(const OperatorMatrix& op);
/// Throws DimensionError on ragged rows or a dimension mismatch.
OperatorMatrix matrix_from_json(const json& j);

/// Matrix record plus origin, hermitian flag, cell count and drive/loss metadata.
json hamiltonian_to_json(const LatticeHamiltonian& h);

json spectrum_to_json(const SpectrumResult& s, bool include_vectors = false);
json fit_to_json(const EdgeStateFit& fit);
json schmidt_to_json(const ProductDecomposition& p);
json dark_report_to_json(const DarkStateReport& r);
json density_to_json(const DensityMatrix& rho);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

/// RFC 4180 field quoting: fields with comma, quote, CR or LF are wrapped in
/// quotes and embedded quotes doubled.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// One row per eigenvalue: index, re, im, in_gap.
std::string spectrum_csv(const SpectrumResult& s);

/// One row per cell: cell, abs_a, abs_b, fit_a, fit_b.
std::string fit_csv(const Vector& psi, const EdgeStateFit& fit);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a, used for manifest checksums.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace fslab::io
