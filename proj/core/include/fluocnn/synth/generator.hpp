#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fluocnn/data/dataset.hpp"
#include "fluocnn/kv_config.hpp"

namespace fluocnn::synth {

using data::Excitation;
using data::ParameterId;

struct PeakSpec {
  double center_nm = 0.0;
  double width_nm = 1.0;  // Gaussian sigma
  double base_amplitude = 1.0;
  std::vector<Excitation> excitations{Excitation::nm365, Excitation::nm395};

  bool appears_at(Excitation e) const;
};

/// Linear label dependence of one peak: each property moves by
/// `gain * (value - reference)`. Amplitude gains are relative (a gain of
/// -0.3 lowers the peak by 30% per unit above the reference); shift and
/// width gains are in nm per unit. A missing label contributes nothing.
struct ParameterCoupling {
  ParameterId parameter = ParameterId::acidity;
  std::size_t peak = 0;
  double amplitude_gain = 0.0;
  double shift_gain = 0.0;
  double width_gain = 0.0;
  double reference = 0.0;
};

struct GeneratorConfig {
  std::uint64_t seed = 7;
  std::vector<PeakSpec> peaks;
  double noise_sigma = 0.01;
  int resolution_px = 30;
  std::vector<ParameterCoupling> couplings;
  double intensity_scale = 10000.0;
  double gain_365 = 1.0;
  double gain_395 = 1.15;

  /// Peaks at 678/722 nm (both excitations) and 525 nm (365 nm only), with
  /// one independent coupling signature per quality parameter.
  static GeneratorConfig defaults();

  static GeneratorConfig from_kv(const KeyValueConfig& kv);
  KeyValueConfig to_kv() const;

  /// Throws Error(config) on a violated invariant.
  void validate() const;
};

/// Wavelength axis settings read from the same key-value file (`grid.*`).
struct GridSpec {
  double start_nm = 350.0;
  double end_nm = 800.0;
  std::size_t pixels = 1024;

  static GridSpec from_kv(const KeyValueConfig& kv);
  void write_to(KeyValueConfig& kv) const;
  data::WavelengthGrid make() const;
};

/// Peak parameters after applying the label couplings.
struct EffectivePeak {
  double center_nm = 0.0;
  double width_nm = 0.0;
  double amplitude = 0.0;
};

std::vector<EffectivePeak> effective_peaks(const data::OilRecord& record, Excitation excitation,
                                           const GeneratorConfig& config);

/// Noise-free emission before the instrument response: sum of Gaussians
/// scaled by intensity_scale and the excitation gain.
std::vector<double> emission_profile(const data::OilRecord& record, Excitation excitation,
                                     const GeneratorConfig& config,
                                     const data::WavelengthGrid& grid);

/// Box instrument response of `width_px` pixels. Each source pixel spreads
/// its intensity uniformly over the window that fits inside the array, so
/// the total intensity is preserved exactly up to rounding.
std::vector<double> instrument_response(std::span<const double> values, int width_px);

data::Spectrum generate_spectrum(const data::OilRecord& record, Excitation excitation,
                                 int repetition, const GeneratorConfig& config,
                                 const data::GridRef& grid);

/// `repetitions` spectra per record. Throws Error(empty_dataset) for no records.
data::Dataset generate_dataset(const std::vector<data::OilRecord>& records,
                               Excitation excitation, int repetitions,
                               const GeneratorConfig& config, const data::GridRef& grid);

}  // namespace fluocnn::synth
