#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace taskvis {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or empty input while loading a dataset. `row` is the 1-based
// source line (CSV) or record index (JSON) of the first offending row.
class IngestionError : public Error {
 public:
  explicit IngestionError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
      : Error(what), row_(row) {}

  std::optional<std::size_t> row() const { return row_; }

 private:
  std::optional<std::size_t> row_;
};

class DatasetTooLarge : public IngestionError {
 public:
  using IngestionError::IngestionError;
};

// A field retype that some existing cell cannot satisfy.
class ConversionError : public Error {
 public:
  ConversionError(const std::string& what, std::string cell) : Error(what), cell_(std::move(cell)) {}
  const std::string& cell() const { return cell_; }

 private:
  std::string cell_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Invalid arguments: unknown field, bad operand arity, bad request shape.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace taskvis
