#include "fluocnn/data/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::data {

namespace {

std::vector<std::string_view> non_empty_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    const auto line = text::trim(text.substr(pos, end - pos));
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

}  // namespace

void Dataset::validate() const {
  if (!grid) throw Error(ErrorKind::internal_consistency, "dataset has no grid");
  if (repetitions_per_oil < 1) {
    throw Error(ErrorKind::domain, "repetitions_per_oil must be >= 1");
  }
  std::set<std::string, std::less<>> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.oil_id).second) {
      throw Error(ErrorKind::duplicate, "duplicate oil_id " + r.oil_id);
    }
  }
  std::map<std::pair<std::string, int>, int> counts;
  for (const auto& s : spectra) {
    if (s.grid != grid && !(s.grid && *s.grid == *grid)) {
      throw Error(ErrorKind::dimension, "spectrum of " + s.oil_id + " uses a different grid");
    }
    if (s.intensities.size() != grid->size()) {
      throw Error(ErrorKind::dimension,
                  "spectrum of " + s.oil_id + " has " + std::to_string(s.intensities.size()) +
                      " pixels, grid has " + std::to_string(grid->size()));
    }
    if (!ids.contains(s.oil_id)) {
      throw Error(ErrorKind::internal_consistency, "spectrum without label record: " + s.oil_id);
    }
    ++counts[{s.oil_id, to_nm(s.excitation)}];
  }
  std::set<std::string, std::less<>> with_spectra;
  for (const auto& [key, n] : counts) {
    if (n != repetitions_per_oil) {
      throw Error(ErrorKind::internal_consistency,
                  "oil " + key.first + " at " + std::to_string(key.second) + " nm has " +
                      std::to_string(n) + " spectra, expected " +
                      std::to_string(repetitions_per_oil));
    }
    with_spectra.insert(key.first);
  }
  for (const auto& r : records) {
    if (!with_spectra.contains(r.oil_id)) {
      throw Error(ErrorKind::internal_consistency, "record without spectra: " + r.oil_id);
    }
  }
}

const OilRecord& Dataset::record(std::string_view oil_id) const {
  for (const auto& r : records) {
    if (r.oil_id == oil_id) return r;
  }
  throw Error(ErrorKind::internal_consistency, "unknown oil " + std::string(oil_id));
}

std::vector<Excitation> Dataset::excitations() const {
  std::vector<Excitation> out;
  for (const auto& s : spectra) {
    if (std::find(out.begin(), out.end(), s.excitation) == out.end()) {
      out.push_back(s.excitation);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> Dataset::spectra_of(std::string_view oil_id) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    if (spectra[i].oil_id == oil_id) idx.push_back(i);
  }
  return idx;
}

std::vector<OilRecord> records_with(const std::vector<OilRecord>& records, ParameterId p) {
  std::vector<OilRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [p](const OilRecord& r) { return r.has(p); });
  return out;
}

Dataset filter_for_parameter(const Dataset& dataset, ParameterId p) {
  Dataset out;
  out.grid = dataset.grid;
  out.repetitions_per_oil = dataset.repetitions_per_oil;
  out.records = records_with(dataset.records, p);
  if (out.records.empty()) {
    throw Error(ErrorKind::empty_dataset,
                "no oil carries a value for " + std::string(to_string(p)));
  }
  std::set<std::string, std::less<>> keep;
  for (const auto& r : out.records) keep.insert(r.oil_id);
  std::copy_if(dataset.spectra.begin(), dataset.spectra.end(),
               std::back_inserter(out.spectra),
               [&](const Spectrum& s) { return keep.contains(s.oil_id); });
  return out;
}

Dataset prepare(const Dataset& dataset, std::optional<std::span<const double>> dark) {
  Dataset out = dataset;
  for (auto& s : out.spectra) {
    if (s.normalized) continue;
    if (dark) s.intensities = subtract_dark(s.intensities, *dark);
    s = normalize(s);
  }
  return out;
}

std::string render_grid(const WavelengthGrid& grid) {
  std::string out;
  for (double nm : grid.values()) {
    out += text::format_double(nm);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_value_column(std::string_view text) {
  std::vector<double> values;
  std::size_t row = 0;
  for (auto line : non_empty_lines(text)) {
    ++row;
    try {
      values.push_back(text::parse_double(line));
    } catch (const Error& e) {
      throw ParseError(row, e.what());
    }
  }
  return values;
}

WavelengthGrid parse_grid(std::string_view text) {
  return WavelengthGrid(parse_value_column(text));
}

std::string render_spectra_csv(const Dataset& dataset) {
  const std::size_t P = dataset.grid->size();
  std::string out = "oil_id,excitation_nm,repetition";
  for (std::size_t i = 0; i < P; ++i) {
    out += ",i_";
    out += std::to_string(i);
  }
  out += '\n';
  for (const auto& s : dataset.spectra) {
    out += s.oil_id;
    out += ',';
    out += std::to_string(to_nm(s.excitation));
    out += ',';
    out += std::to_string(s.repetition);
    for (double v : s.intensities) {
      out += ',';
      out += text::format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<Spectrum> parse_spectra_csv(std::string_view csv, const GridRef& grid) {
  const std::size_t P = grid->size();
  std::vector<Spectrum> spectra;
  std::size_t row = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < csv.size()) {
    const auto nl = csv.find('\n', pos);
    const auto end = nl == std::string_view::npos ? csv.size() : nl;
    const auto line = text::trim(csv.substr(pos, end - pos));
    pos = end + 1;
    ++row;
    if (line.empty()) continue;
    const auto fields = text::split_csv(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != P + 3 || fields[0] != "oil_id" ||
          fields[1] != "excitation_nm" || fields[2] != "repetition" ||
          fields[3] != "i_0" || fields.back() != "i_" + std::to_string(P - 1)) {
        throw ParseError(row, "unexpected spectra header (expected " +
                                  std::to_string(P) + " intensity columns)");
      }
      continue;
    }
    if (fields.size() != P + 3) {
      throw ParseError(row, "expected " + std::to_string(P + 3) + " fields, got " +
                                std::to_string(fields.size()));
    }
    Spectrum s;
    s.grid = grid;
    s.oil_id = std::string(fields[0]);
    try {
      s.excitation = excitation_from_nm(text::parse_integer(fields[1]));
      s.repetition = static_cast<int>(text::parse_integer(fields[2]));
      s.intensities.resize(P);
      for (std::size_t i = 0; i < P; ++i) {
        s.intensities[i] = text::parse_double(fields[3 + i]);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::unsupported_excitation) throw;
      throw ParseError(row, e.what());
    }
    spectra.push_back(std::move(s));
  }
  if (!header_seen) throw ParseError(1, "empty spectra file");
  return spectra;
}

DatasetFiles DatasetFiles::in(const std::filesystem::path& dir) {
  return {dir / "spectra.csv", dir / "grid.txt", dir / "labels.csv", dir / "dark.txt"};
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto files = DatasetFiles::in(dir);
  text::write_file(files.grid, render_grid(*dataset.grid));
  text::write_file(files.spectra, render_spectra_csv(dataset));
  text::write_file(files.labels, render_labels(dataset.records));
}

Dataset read_dataset(const DatasetFiles& files, std::optional<std::vector<double>>* dark_out) {
  Dataset ds;
  ds.grid = std::make_shared<const WavelengthGrid>(parse_grid(text::read_file(files.grid)));
  ds.spectra = parse_spectra_csv(text::read_file(files.spectra), ds.grid);
  const auto all_records = load_labels(files.labels);

  // Keep only labelled oils that have spectra; the labels file may list more.
  std::set<std::string, std::less<>> measured;
  std::map<std::pair<std::string, int>, int> counts;
  for (const auto& s : ds.spectra) {
    measured.insert(s.oil_id);
    ++counts[{s.oil_id, to_nm(s.excitation)}];
  }
  for (const auto& r : all_records) {
    if (measured.contains(r.oil_id)) ds.records.push_back(r);
  }
  if (!counts.empty()) ds.repetitions_per_oil = counts.begin()->second;

  if (dark_out != nullptr) {
    if (std::filesystem::exists(files.dark)) {
      auto dark = parse_value_column(text::read_file(files.dark));
      if (dark.size() != ds.grid->size()) {
        throw Error(ErrorKind::dimension, "dark frame has " + std::to_string(dark.size()) +
                                              " pixels, grid has " +
                                              std::to_string(ds.grid->size()));
      }
      *dark_out = std::move(dark);
    } else {
      dark_out->reset();
    }
  }
  ds.validate();
  return ds;
}

}  // namespace fluocnn::data
