#include "fluocnn/data/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "fluocnn/error.hpp"

namespace fluocnn::data {

WavelengthGrid::WavelengthGrid(std::vector<double> nm) : nm_(std::move(nm)) {
  if (nm_.size() < 2) {
    throw Error(ErrorKind::dimension, "wavelength grid needs at least 2 pixels");
  }
  for (std::size_t i = 1; i < nm_.size(); ++i) {
    if (!(nm_[i] > nm_[i - 1])) {
      throw Error(ErrorKind::domain, "wavelength grid is not strictly increasing at pixel " +
                                         std::to_string(i));
    }
  }
}

WavelengthGrid WavelengthGrid::linear(double start_nm, double end_nm,
                                      std::size_t pixels) {
  if (pixels < 2) {
    throw Error(ErrorKind::dimension, "wavelength grid needs at least 2 pixels");
  }
  std::vector<double> nm(pixels);
  const double step = (end_nm - start_nm) / static_cast<double>(pixels - 1);
  for (std::size_t i = 0; i < pixels; ++i) {
    nm[i] = start_nm + step * static_cast<double>(i);
  }
  nm.back() = end_nm;
  return WavelengthGrid(std::move(nm));
}

std::size_t WavelengthGrid::nearest_pixel(double nm) const {
  const auto it = std::lower_bound(nm_.begin(), nm_.end(), nm);
  if (it == nm_.begin()) return 0;
  if (it == nm_.end()) return nm_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - nm_.begin());
  return (nm - nm_[hi - 1] <= nm_[hi] - nm) ? hi - 1 : hi;
}

bool operator==(const WavelengthGrid& a, const WavelengthGrid& b) {
  return std::equal(a.nm_.begin(), a.nm_.end(), b.nm_.begin(), b.nm_.end(),
                    [](double x, double y) {
                      return std::bit_cast<std::uint64_t>(x) ==
                             std::bit_cast<std::uint64_t>(y);
                    });
}

Excitation excitation_from_nm(long long nm) {
  if (nm == 365) return Excitation::nm365;
  if (nm == 395) return Excitation::nm395;
  throw Error(ErrorKind::unsupported_excitation,
              "unsupported excitation " + std::to_string(nm) +
                  " nm (expected 365 or 395)");
}

Moments population_moments(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::dimension, "moments of an empty array");
  }
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<double> subtract_dark(std::span<const double> raw,
                                  std::span<const double> dark) {
  if (raw.size() != dark.size()) {
    throw Error(ErrorKind::dimension,
                "dark frame has " + std::to_string(dark.size()) +
                    " pixels, spectrum has " + std::to_string(raw.size()));
  }
  std::vector<double> out(raw.size());
  std::transform(raw.begin(), raw.end(), dark.begin(), out.begin(),
                 [](double r, double d) { return r - d; });
  return out;
}

std::vector<double> normalize_values(std::span<const double> values) {
  const auto m = population_moments(values);
  if (!(m.std > 0.0) || !std::isfinite(m.std)) {
    throw Error(ErrorKind::degenerate_spectrum,
                "spectrum has zero variance and cannot be normalized");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - m.mean) / m.std;
  }
  // A second pass removes the residual mean left by rounding in the first,
  // which keeps |mean| at the 1e-16 level even for large offsets.
  const auto r = population_moments(out);
  for (double& v : out) v = (v - r.mean) / r.std;
  return out;
}

Spectrum normalize(const Spectrum& spectrum) {
  if (spectrum.normalized) {
    throw Error(ErrorKind::domain,
                "spectrum " + spectrum.oil_id + " is already normalized");
  }
  Spectrum out = spectrum;
  out.intensities = normalize_values(spectrum.intensities);
  out.normalized = true;
  return out;
}

}  // namespace fluocnn::data
