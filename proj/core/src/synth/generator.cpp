#include "fluocnn/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fluocnn/error.hpp"
#include "fluocnn/rng.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::synth {

namespace {

constexpr double kMinWidthNm = 0.1;

std::string peak_key(std::size_t i, std::string_view field) {
  return "peak." + std::to_string(i) + "." + std::string(field);
}

std::string coupling_key(std::size_t i, std::string_view field) {
  return "coupling." + std::to_string(i) + "." + std::string(field);
}

std::vector<Excitation> parse_excitation_list(std::string_view text) {
  std::vector<Excitation> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto sep = text.find_first_of(", ", pos);
    if (sep == std::string_view::npos) sep = text.size();
    const auto token = text::trim(text.substr(pos, sep - pos));
    if (!token.empty()) out.push_back(data::excitation_from_nm(text::parse_integer(token)));
    pos = sep + 1;
  }
  return out;
}

}  // namespace

bool PeakSpec::appears_at(Excitation e) const {
  return std::find(excitations.begin(), excitations.end(), e) != excitations.end();
}

GeneratorConfig GeneratorConfig::defaults() {
  GeneratorConfig c;
  c.peaks = {
      {678.0, 12.0, 1.0, {Excitation::nm365, Excitation::nm395}},
      {722.0, 20.0, 0.35, {Excitation::nm365, Excitation::nm395}},
      {525.0, 30.0, 0.08, {Excitation::nm365}},
  };
  // Normalization removes the overall scale, so every signature is a change
  // in spectral shape: the 678/722 ratio, a position or a width.
  c.couplings = {
      {ParameterId::acidity, 0, -0.35, 0.0, 0.0, 0.3},
      {ParameterId::peroxide, 0, 0.0, 0.5, 0.0, 8.0},
      {ParameterId::k270, 1, 0.0, 100.0, 0.0, 0.13},
      {ParameterId::k232, 1, 0.0, 0.0, 8.0, 1.6},
      {ParameterId::ethyl_esters, 0, 0.0, 0.0, 0.1, 20.0},
      {ParameterId::ethyl_esters, 2, 0.02, 0.0, 0.0, 20.0},
  };
  return c;
}

void GeneratorConfig::validate() const {
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::config, "noise_sigma must be >= 0");
  if (resolution_px < 1) throw Error(ErrorKind::config, "resolution_px must be >= 1");
  if (peaks.empty()) throw Error(ErrorKind::config, "at least one peak is required");
  if (!(intensity_scale > 0.0)) throw Error(ErrorKind::config, "intensity_scale must be > 0");
  if (!(gain_365 > 0.0) || !(gain_395 > 0.0)) {
    throw Error(ErrorKind::config, "excitation gains must be > 0");
  }
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (!(peaks[i].width_nm > 0.0)) {
      throw Error(ErrorKind::config, "peak " + std::to_string(i) + ": width_nm must be > 0");
    }
    if (!(peaks[i].base_amplitude >= 0.0)) {
      throw Error(ErrorKind::config, "peak " + std::to_string(i) + ": amplitude must be >= 0");
    }
  }
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    if (couplings[i].peak >= peaks.size()) {
      throw Error(ErrorKind::config,
                  "coupling " + std::to_string(i) + " targets missing peak " +
                      std::to_string(couplings[i].peak));
    }
  }
}

GeneratorConfig GeneratorConfig::from_kv(const KeyValueConfig& kv) {
  const auto d = defaults();
  GeneratorConfig c;
  c.seed = static_cast<std::uint64_t>(kv.get_integer("seed", static_cast<long long>(d.seed)));
  c.noise_sigma = kv.get_double("noise_sigma", d.noise_sigma);
  c.resolution_px = static_cast<int>(kv.get_integer("resolution_px", d.resolution_px));
  c.intensity_scale = kv.get_double("intensity_scale", d.intensity_scale);
  c.gain_365 = kv.get_double("excitation_gain.365", d.gain_365);
  c.gain_395 = kv.get_double("excitation_gain.395", d.gain_395);

  if (!kv.contains(peak_key(0, "center_nm"))) {
    c.peaks = d.peaks;
  }
  for (std::size_t i = 0; kv.contains(peak_key(i, "center_nm")); ++i) {
    PeakSpec p;
    p.center_nm = kv.require_double(peak_key(i, "center_nm"));
    p.width_nm = kv.require_double(peak_key(i, "width_nm"));
    p.base_amplitude = kv.require_double(peak_key(i, "amplitude"));
    if (auto ex = kv.get(peak_key(i, "excitation"))) {
      p.excitations = parse_excitation_list(*ex);
    }
    c.peaks.push_back(std::move(p));
  }

  // An explicit empty coupling list is written as `couplings = none`.
  if (kv.get_string("couplings", "") == "none") {
    c.couplings.clear();
  } else if (!kv.contains(coupling_key(0, "parameter"))) {
    c.couplings = d.couplings;
  }
  for (std::size_t i = 0; kv.contains(coupling_key(i, "parameter")); ++i) {
    ParameterCoupling pc;
    pc.parameter = data::parse_parameter(kv.require_string(coupling_key(i, "parameter")));
    pc.peak = static_cast<std::size_t>(kv.get_integer(coupling_key(i, "peak"), 0));
    pc.amplitude_gain = kv.get_double(coupling_key(i, "amplitude_gain"), 0.0);
    pc.shift_gain = kv.get_double(coupling_key(i, "shift_gain"), 0.0);
    pc.width_gain = kv.get_double(coupling_key(i, "width_gain"), 0.0);
    pc.reference = kv.get_double(coupling_key(i, "reference"), 0.0);
    c.couplings.push_back(pc);
  }
  c.validate();
  return c;
}

KeyValueConfig GeneratorConfig::to_kv() const {
  KeyValueConfig kv;
  kv.set("seed", std::to_string(seed));
  kv.set("noise_sigma", text::format_double(noise_sigma));
  kv.set("resolution_px", std::to_string(resolution_px));
  kv.set("intensity_scale", text::format_double(intensity_scale));
  kv.set("excitation_gain.365", text::format_double(gain_365));
  kv.set("excitation_gain.395", text::format_double(gain_395));
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    kv.set(peak_key(i, "center_nm"), text::format_double(peaks[i].center_nm));
    kv.set(peak_key(i, "width_nm"), text::format_double(peaks[i].width_nm));
    kv.set(peak_key(i, "amplitude"), text::format_double(peaks[i].base_amplitude));
    std::string ex;
    for (auto e : peaks[i].excitations) {
      if (!ex.empty()) ex += ',';
      ex += std::to_string(data::to_nm(e));
    }
    kv.set(peak_key(i, "excitation"), ex);
  }
  if (couplings.empty()) kv.set("couplings", "none");
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const auto& pc = couplings[i];
    kv.set(coupling_key(i, "parameter"), std::string(data::to_string(pc.parameter)));
    kv.set(coupling_key(i, "peak"), std::to_string(pc.peak));
    kv.set(coupling_key(i, "amplitude_gain"), text::format_double(pc.amplitude_gain));
    kv.set(coupling_key(i, "shift_gain"), text::format_double(pc.shift_gain));
    kv.set(coupling_key(i, "width_gain"), text::format_double(pc.width_gain));
    kv.set(coupling_key(i, "reference"), text::format_double(pc.reference));
  }
  return kv;
}

GridSpec GridSpec::from_kv(const KeyValueConfig& kv) {
  GridSpec g;
  g.start_nm = kv.get_double("grid.start_nm", g.start_nm);
  g.end_nm = kv.get_double("grid.end_nm", g.end_nm);
  const auto px = kv.get_integer("grid.pixels", static_cast<long long>(g.pixels));
  if (px < 2) throw Error(ErrorKind::config, "grid.pixels must be >= 2");
  g.pixels = static_cast<std::size_t>(px);
  if (!(g.end_nm > g.start_nm)) throw Error(ErrorKind::config, "grid.end_nm must exceed grid.start_nm");
  return g;
}

void GridSpec::write_to(KeyValueConfig& kv) const {
  kv.set("grid.start_nm", text::format_double(start_nm));
  kv.set("grid.end_nm", text::format_double(end_nm));
  kv.set("grid.pixels", std::to_string(pixels));
}

data::WavelengthGrid GridSpec::make() const {
  return data::WavelengthGrid::linear(start_nm, end_nm, pixels);
}

std::vector<EffectivePeak> effective_peaks(const data::OilRecord& record, Excitation excitation,
                                           const GeneratorConfig& config) {
  std::vector<EffectivePeak> out;
  out.reserve(config.peaks.size());
  std::vector<double> amp_factor(config.peaks.size(), 1.0);
  for (const auto& p : config.peaks) {
    out.push_back({p.center_nm, p.width_nm, p.appears_at(excitation) ? p.base_amplitude : 0.0});
  }
  for (const auto& c : config.couplings) {
    const auto v = record.value(c.parameter);
    if (!v) continue;
    const double delta = *v - c.reference;
    amp_factor[c.peak] += c.amplitude_gain * delta;
    out[c.peak].center_nm += c.shift_gain * delta;
    out[c.peak].width_nm += c.width_gain * delta;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].amplitude *= std::max(0.0, amp_factor[i]);
    out[i].width_nm = std::max(kMinWidthNm, out[i].width_nm);
  }
  return out;
}

std::vector<double> emission_profile(const data::OilRecord& record, Excitation excitation,
                                     const GeneratorConfig& config,
                                     const data::WavelengthGrid& grid) {
  const double gain = excitation == Excitation::nm365 ? config.gain_365 : config.gain_395;
  const double scale = config.intensity_scale * gain;
  std::vector<double> out(grid.size(), 0.0);
  for (const auto& p : effective_peaks(record, excitation, config)) {
    if (p.amplitude == 0.0) continue;
    const double inv = 1.0 / (2.0 * p.width_nm * p.width_nm);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = grid[i] - p.center_nm;
      out[i] += scale * p.amplitude * std::exp(-d * d * inv);
    }
  }
  return out;
}

std::vector<double> instrument_response(std::span<const double> values, int width_px) {
  if (width_px < 1) throw Error(ErrorKind::domain, "instrument width must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const auto w = static_cast<std::ptrdiff_t>(width_px);
  // Window of source j: [j - w/2, j - w/2 + w - 1], clipped to the array.
  std::vector<double> diff(values.size() + 1, 0.0);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto lo = std::max<std::ptrdiff_t>(0, j - w / 2);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, j - w / 2 + w - 1);
    const double share = values[static_cast<std::size_t>(j)] / static_cast<double>(hi - lo + 1);
    diff[static_cast<std::size_t>(lo)] += share;
    diff[static_cast<std::size_t>(hi + 1)] -= share;
  }
  std::vector<double> out(values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    acc += diff[i];
    out[i] = acc;
  }
  return out;
}

data::Spectrum generate_spectrum(const data::OilRecord& record, Excitation excitation,
                                 int repetition, const GeneratorConfig& config,
                                 const data::GridRef& grid) {
  // Validates the excitation value even when built from a raw integer.
  excitation = data::excitation_from_nm(data::to_nm(excitation));
  if (std::none_of(record.values.begin(), record.values.end(),
                   [](const auto& v) { return v.has_value(); })) {
    throw Error(ErrorKind::insufficient_data, "oil " + record.oil_id + " has no label values");
  }
  config.validate();

  auto intensities =
      instrument_response(emission_profile(record, excitation, config, *grid), config.resolution_px);

  if (config.noise_sigma > 0.0) {
    auto rng = SeedKey(config.seed)
                   .mix("spectrum")
                   .mix(record.oil_id)
                   .mix(std::int64_t{data::to_nm(excitation)})
                   .mix(std::int64_t{repetition})
                   .rng();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : intensities) v *= 1.0 + config.noise_sigma * normal(rng);
  }
  for (double& v : intensities) v = std::max(0.0, v);

  data::Spectrum s;
  s.grid = grid;
  s.intensities = std::move(intensities);
  s.excitation = excitation;
  s.oil_id = record.oil_id;
  s.repetition = repetition;
  s.normalized = false;
  return s;
}

data::Dataset generate_dataset(const std::vector<data::OilRecord>& records,
                               Excitation excitation, int repetitions,
                               const GeneratorConfig& config, const data::GridRef& grid) {
  if (records.empty()) throw Error(ErrorKind::empty_dataset, "no oil records to generate");
  if (repetitions < 1) throw Error(ErrorKind::domain, "repetitions must be >= 1");
  data::Dataset ds;
  ds.grid = grid;
  ds.records = records;
  ds.repetitions_per_oil = repetitions;
  ds.spectra.reserve(records.size() * static_cast<std::size_t>(repetitions));
  for (const auto& r : records) {
    for (int rep = 1; rep <= repetitions; ++rep) {
      ds.spectra.push_back(generate_spectrum(r, excitation, rep, config, grid));
    }
  }
  ds.validate();
  return ds;
}

}  // namespace fluocnn::synth
