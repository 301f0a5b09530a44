#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vanetmac {

/// Malformed textual input. `position()` is the zero-based character offset
/// where parsing stopped, or the offending line for multi-line inputs.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Invalid configuration value. `key()` names the offending setting.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A protocol table operation was called with a violated precondition.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Inconsistent trace handed to the metrics layer.
class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vanetmac
