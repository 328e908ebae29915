#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsnids {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed arguments outside an operation's contract.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or insufficient data (parse failures, unknown labels, exhausted pools).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownLabel : public DataError {
 public:
  using DataError::DataError;
};

class UnsupportedFeature : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientData : public DataError {
 public:
  using DataError::DataError;
};

class SolverError : public Error {
 public:
  SolverError(std::size_t iterations, const std::string& what)
      : Error(what + " after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

/// Violations of the distributed training or detection protocols.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class AgentNotReady : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

}  // namespace wsnids
