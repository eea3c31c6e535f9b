#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fluocnn::data {

/// Strictly increasing wavelength axis in nm, shared by every spectrum of a
/// dataset.
class WavelengthGrid {
 public:
  explicit WavelengthGrid(std::vector<double> nm);

  /// `pixels` evenly spaced points from `start_nm` to `end_nm` inclusive.
  static WavelengthGrid linear(double start_nm, double end_nm, std::size_t pixels);

  std::size_t size() const noexcept { return nm_.size(); }
  std::span<const double> values() const noexcept { return nm_; }
  double operator[](std::size_t i) const { return nm_[i]; }

  /// Index of the pixel closest to `nm`.
  std::size_t nearest_pixel(double nm) const;

  /// Bitwise equality of every wavelength.
  friend bool operator==(const WavelengthGrid& a, const WavelengthGrid& b);

 private:
  std::vector<double> nm_;
};

using GridRef = std::shared_ptr<const WavelengthGrid>;

enum class Excitation : int { nm365 = 365, nm395 = 395 };

/// Throws Error(unsupported_excitation) for anything but 365 or 395.
Excitation excitation_from_nm(long long nm);
inline int to_nm(Excitation e) { return static_cast<int>(e); }

struct Spectrum {
  GridRef grid;
  std::vector<double> intensities;
  Excitation excitation = Excitation::nm395;
  std::string oil_id;
  int repetition = 1;
  bool normalized = false;
};

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population form
};

Moments population_moments(std::span<const double> values);

/// Elementwise raw - dark. Negative results are kept.
std::vector<double> subtract_dark(std::span<const double> raw,
                                  std::span<const double> dark);

/// (x - mean) / std with the population standard deviation. Throws
/// Error(degenerate_spectrum) if all values are equal.
std::vector<double> normalize_values(std::span<const double> values);

/// Normalized copy of `spectrum`. Throws Error(domain) if it is already
/// normalized.
Spectrum normalize(const Spectrum& spectrum);

}  // namespace fluocnn::data
