#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluocnn/data/oil_record.hpp"
#include "fluocnn/data/spectrum.hpp"

namespace fluocnn::data {

inline constexpr int kDefaultRepetitions = 20;

/// Spectra plus their labels. Invariants (checked by validate()):
/// one shared grid; every spectrum's oil has a record and every record has
/// spectra; each (oil, excitation) pair has exactly `repetitions_per_oil`
/// spectra, so N = R * N_oil for single-excitation data.
struct Dataset {
  GridRef grid;
  std::vector<Spectrum> spectra;
  std::vector<OilRecord> records;
  int repetitions_per_oil = kDefaultRepetitions;

  void validate() const;

  std::size_t oil_count() const noexcept { return records.size(); }
  const OilRecord& record(std::string_view oil_id) const;
  std::vector<Excitation> excitations() const;

  /// Indices into `spectra` for one oil, in stored order.
  std::vector<std::size_t> spectra_of(std::string_view oil_id) const;
};

/// Keeps the oils whose record carries `p`, with all their spectra.
/// Throws Error(empty_dataset) if none remain.
Dataset filter_for_parameter(const Dataset& dataset, ParameterId p);

std::vector<OilRecord> records_with(const std::vector<OilRecord>& records, ParameterId p);

/// Subtracts `dark` (when given) and normalizes every spectrum that is not
/// normalized yet.
Dataset prepare(const Dataset& dataset, std::optional<std::span<const double>> dark = std::nullopt);

// --- file formats ----------------------------------------------------------
//
// Spectra CSV:  header `oil_id,excitation_nm,repetition,i_0,...,i_{P-1}`,
//               one spectrum per row.
// Grid file:    one wavelength (nm) per line, P lines.
// Dark file:    one intensity per line, P lines (same layout as the grid).
//
// Numbers are written in shortest round-trip form.

std::string render_grid(const WavelengthGrid& grid);
WavelengthGrid parse_grid(std::string_view text);

std::string render_spectra_csv(const Dataset& dataset);
std::vector<Spectrum> parse_spectra_csv(std::string_view csv, const GridRef& grid);

std::vector<double> parse_value_column(std::string_view text);

/// Layout of a dataset directory written by `fluocnn generate`.
struct DatasetFiles {
  std::filesystem::path spectra;  // spectra.csv
  std::filesystem::path grid;     // grid.txt
  std::filesystem::path labels;   // labels.csv
  std::filesystem::path dark;     // dark.txt (optional)

  static DatasetFiles in(const std::filesystem::path& dir);
};

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Reads spectra, grid and labels; a present dark file is returned through
/// `dark_out` rather than applied.
Dataset read_dataset(const DatasetFiles& files,
                     std::optional<std::vector<double>>* dark_out = nullptr);

}  // namespace fluocnn::data
