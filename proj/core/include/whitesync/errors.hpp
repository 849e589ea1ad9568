#pragma once

#include <stdexcept>
#include <string>

namespace whitesync {

/// Thrown when a party with an empty open-channel list asks for a strategy
/// that can only place mass on open channels. The harness treats the
/// underlying condition as a failed environment instead of propagating this.
class NoOpenChannelsError : public std::runtime_error {
 public:
  explicit NoOpenChannelsError(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

/// Thrown when two results that must describe the same experiment
/// (same densities, compatible strategy family) are combined.
class InputMismatchError : public std::invalid_argument {
 public:
  explicit InputMismatchError(const std::string& what_arg)
      : std::invalid_argument(what_arg) {}
};

}  // namespace whitesync
