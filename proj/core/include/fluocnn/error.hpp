#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fluocnn {

enum class ErrorKind {
  dimension,
  degenerate_spectrum,
  parse,
  duplicate,
  empty_dataset,
  unsupported_excitation,
  shape,
  architecture,
  divergence,
  internal_consistency,
  empty_batch,
  insufficient_samples,
  degenerate_variance,
  domain,
  insufficient_data,
  comparison_domain,
  io,
  config,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// stable and is what callers (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input text. `row` is 1-based and counts the header line.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& message);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& message);
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// A network layer would have an empty output for the requested input length.
class ArchitectureError : public Error {
 public:
  ArchitectureError(std::string layer, const std::string& message);
  const std::string& layer() const noexcept { return layer_; }

 private:
  std::string layer_;
};

}  // namespace fluocnn
