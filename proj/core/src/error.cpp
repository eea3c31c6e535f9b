#include "fluocnn/error.hpp"

#include <utility>

namespace fluocnn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::degenerate_spectrum: return "degenerate-spectrum";
    case ErrorKind::parse: return "parse";
    case ErrorKind::duplicate: return "duplicate";
    case ErrorKind::empty_dataset: return "empty-dataset";
    case ErrorKind::unsupported_excitation: return "unsupported-excitation";
    case ErrorKind::shape: return "shape";
    case ErrorKind::architecture: return "architecture";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::internal_consistency: return "internal-consistency";
    case ErrorKind::empty_batch: return "empty-batch";
    case ErrorKind::insufficient_samples: return "insufficient-samples";
    case ErrorKind::degenerate_variance: return "degenerate-variance";
    case ErrorKind::domain: return "domain";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::comparison_domain: return "comparison-domain";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(std::size_t row, const std::string& message)
    : Error(ErrorKind::parse, "row " + std::to_string(row) + ": " + message),
      row_(row) {}

DivergenceError::DivergenceError(std::size_t epoch, const std::string& message)
    : Error(ErrorKind::divergence,
            "epoch " + std::to_string(epoch) + ": " + message),
      epoch_(epoch) {}

ArchitectureError::ArchitectureError(std::string layer,
                                     const std::string& message)
    : Error(ErrorKind::architecture, layer + ": " + message),
      layer_(std::move(layer)) {}

}  // namespace fluocnn
