#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace anykernel {

// Argument outside a kernel's or operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent experiment or builder configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Induced subgraph too large for the isomorphism search.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A Gram matrix failed the eigenvalue test by more than the tolerance.
class PsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nature or a caller broke the online protocol at a specific round.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::int64_t round, const std::string& what);
  std::int64_t round() const { return round_; }

 private:
  std::int64_t round_;
};

// Malformed persisted artifact (transcript, graph stream, CSV).
class FormatError : public std::runtime_error {
 public:
  FormatError(std::int64_t line, const std::string& what);
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

}  // namespace anykernel
