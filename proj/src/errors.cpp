#include "waitsee/errors.hpp"

#include <array>
#include <utility>

namespace waitsee {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptySystem: return "EmptySystem";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NegativeParameter: return "NegativeParameter";
    case ErrorKind::InvalidMoment: return "InvalidMoment";
    case ErrorKind::Unstable: return "Unstable";
    case ErrorKind::WrongArity: return "WrongArity";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NoWaitingState: return "NoWaitingState";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotAsymmetric: return "NotAsymmetric";
    case ErrorKind::NotDeterministic: return "NotDeterministic";
    case ErrorKind::NotWorthWaiting: return "NotWorthWaiting";
    case ErrorKind::NegativeAllocation: return "NegativeAllocation";
    case ErrorKind::MomentMismatch: return "MomentMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::string describe(Flag flags) {
  static constexpr std::array<std::pair<Flag, const char*>, 6> names{{
      {Flag::DegenerateNoSwitchover, "degenerate_no_switchover"},
      {Flag::DegenerateNoIdle, "degenerate_no_idle"},
      {Flag::HalfLoad, "half_load"},
      {Flag::DidNotConverge, "did_not_converge"},
      {Flag::Unbounded, "unbounded"},
      {Flag::UnstableDetected, "unstable_detected"},
  }};
  std::string out;
  for (const auto& [f, name] : names) {
    if (has(flags, f)) {
      if (!out.empty()) out += ',';
      out += name;
    }
  }
  return out;
}

}  // namespace waitsee
