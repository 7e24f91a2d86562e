#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace waitsee {

enum class ErrorKind {
  EmptySystem,
  LengthMismatch,
  NegativeParameter,
  InvalidMoment,
  Unstable,
  WrongArity,
  IndexOutOfRange,
  NoWaitingState,
  NotSymmetric,
  NotAsymmetric,
  NotDeterministic,
  NotWorthWaiting,
  NegativeAllocation,
  MomentMismatch,
  InvalidArgument,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Thrown for every precondition or validation failure in the library.
class PollingError : public std::runtime_error {
 public:
  PollingError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Non-fatal conditions attached to a result. A flagged result is still the
/// analytically forced value (e.g. a 0/0 term replaced by its limit).
enum class Flag : std::uint32_t {
  None = 0,
  DegenerateNoSwitchover = 1u << 0,
  DegenerateNoIdle = 1u << 1,
  HalfLoad = 1u << 2,
  DidNotConverge = 1u << 3,
  Unbounded = 1u << 4,
  UnstableDetected = 1u << 5,
};

constexpr Flag operator|(Flag a, Flag b) noexcept {
  return static_cast<Flag>(static_cast<std::uint32_t>(a) | static_cast<std::uint32_t>(b));
}
constexpr Flag& operator|=(Flag& a, Flag b) noexcept { return a = a | b; }
constexpr bool has(Flag set, Flag f) noexcept {
  return (static_cast<std::uint32_t>(set) & static_cast<std::uint32_t>(f)) != 0;
}

std::string describe(Flag flags);

}  // namespace waitsee
