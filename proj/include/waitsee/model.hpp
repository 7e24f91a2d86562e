#pragma once

// System parameters of the cyclic polling model and the load quantities
// derived from them. Everything here is templated on the scalar type so the
// analytic layer can be evaluated in double or in extended precision.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "waitsee/errors.hpp"

namespace waitsee {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kRelTol = 1e-12;
inline constexpr double kAbsTol = 1e-15;

template <typename Scalar>
bool nearly_equal(Scalar a, Scalar b, Scalar rel = Scalar(kRelTol), Scalar absolute = Scalar(kAbsTol)) {
  using std::abs;
  using std::max;
  const Scalar diff = abs(a - b);
  return diff <= absolute || diff <= rel * max(abs(a), abs(b));
}

/// Per-station traffic: Poisson arrival rate, first two moments of the
/// message length and the wait-and-see credit.
template <typename Scalar>
struct StationParams {
  Scalar lambda{};
  Scalar b{};
  Scalar b2{};
  Scalar T{};
};

/// First two moments of the switchover from station i to station i+1.
template <typename Scalar>
struct SwitchoverMoments {
  Scalar r{};
  Scalar r2{};
  bool deterministic{false};

  static SwitchoverMoments fixed(Scalar mean) { return {mean, mean * mean, true}; }

  static SwitchoverMoments from_moments(Scalar mean, Scalar second) {
    return {mean, second, nearly_equal<Scalar>(second, mean * mean)};
  }

  Scalar variance() const { return r2 - r * r; }
};

/// Full parameterisation. Entry i of `switchovers` is the switch from station
/// i to station (i+1) mod N.
template <typename Scalar>
struct PollingConfig {
  std::vector<StationParams<Scalar>> stations;
  std::vector<SwitchoverMoments<Scalar>> switchovers;

  std::size_t size() const noexcept { return stations.size(); }

  Vec<Scalar> lambdas() const { return column([](const auto& s) { return s.lambda; }); }
  Vec<Scalar> means() const { return column([](const auto& s) { return s.b; }); }
  Vec<Scalar> second_moments() const { return column([](const auto& s) { return s.b2; }); }
  Vec<Scalar> credits() const { return column([](const auto& s) { return s.T; }); }

  Vec<Scalar> switch_means() const {
    Vec<Scalar> v(static_cast<Eigen::Index>(switchovers.size()));
    for (std::size_t i = 0; i < switchovers.size(); ++i) v[static_cast<Eigen::Index>(i)] = switchovers[i].r;
    return v;
  }
  Vec<Scalar> switch_second_moments() const {
    Vec<Scalar> v(static_cast<Eigen::Index>(switchovers.size()));
    for (std::size_t i = 0; i < switchovers.size(); ++i) v[static_cast<Eigen::Index>(i)] = switchovers[i].r2;
    return v;
  }

  bool all_deterministic() const {
    for (const auto& s : switchovers)
      if (!s.deterministic) return false;
    return true;
  }

  template <typename Other>
  PollingConfig<Other> cast() const {
    PollingConfig<Other> out;
    for (const auto& s : stations)
      out.stations.push_back({Other(s.lambda), Other(s.b), Other(s.b2), Other(s.T)});
    for (const auto& s : switchovers) out.switchovers.push_back({Other(s.r), Other(s.r2), s.deterministic});
    return out;
  }

 private:
  template <typename F>
  Vec<Scalar> column(F&& get) const {
    Vec<Scalar> v(static_cast<Eigen::Index>(stations.size()));
    for (std::size_t i = 0; i < stations.size(); ++i) v[static_cast<Eigen::Index>(i)] = get(stations[i]);
    return v;
  }
};

template <typename Scalar>
struct DerivedLoads {
  Vec<Scalar> rho;    // lambda_i * b_i
  Scalar rho0{};      // total load
  Scalar r0{};        // sum of mean switchover times
  Scalar r0_2{};      // second moment of the summed switchover time
  Scalar T0{};        // total credit per cycle
  bool stable{false};
};

template <typename Scalar>
DerivedLoads<Scalar> derive_loads(const PollingConfig<Scalar>& config) {
  const auto n = static_cast<Eigen::Index>(config.size());
  DerivedLoads<Scalar> out;
  out.rho = config.lambdas().cwiseProduct(config.means());
  out.rho0 = out.rho.sum();
  const Vec<Scalar> r = config.switch_means();
  out.r0 = r.sum();
  Scalar r0_2 = config.switch_second_moments().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) r0_2 += r[i] * r[j];
  out.r0_2 = r0_2;
  out.T0 = config.credits().sum();
  out.stable = out.rho0 < Scalar(1);
  return out;
}

template <typename Scalar>
class ValidatedConfig;

template <typename Scalar>
ValidatedConfig<Scalar> validate(PollingConfig<Scalar> config);

/// A PollingConfig whose invariants have been checked and which is stable.
/// Only `validate` and `with_credits` produce one.
template <typename Scalar>
class ValidatedConfig {
 public:
  const PollingConfig<Scalar>& config() const noexcept { return config_; }
  const DerivedLoads<Scalar>& loads() const noexcept { return loads_; }
  std::size_t size() const noexcept { return config_.size(); }
  const StationParams<Scalar>& station(std::size_t i) const { return config_.stations[i]; }
  const SwitchoverMoments<Scalar>& switchover(std::size_t i) const { return config_.switchovers[i]; }

  /// Same system with the credits replaced; stability does not depend on them.
  ValidatedConfig with_credits(const Vec<Scalar>& credits) const {
    if (static_cast<std::size_t>(credits.size()) != size())
      throw PollingError(ErrorKind::LengthMismatch, "credit vector length differs from station count");
    PollingConfig<Scalar> next = config_;
    for (std::size_t i = 0; i < size(); ++i) next.stations[i].T = credits[static_cast<Eigen::Index>(i)];
    return validate(std::move(next));
  }

 private:
  ValidatedConfig(PollingConfig<Scalar> config, DerivedLoads<Scalar> loads)
      : config_(std::move(config)), loads_(std::move(loads)) {}

  friend ValidatedConfig validate<Scalar>(PollingConfig<Scalar> config);

  PollingConfig<Scalar> config_;
  DerivedLoads<Scalar> loads_;
};

namespace detail {

template <typename Scalar>
bool finite(Scalar x) {
  using std::isfinite;
  return isfinite(x);
}

// True when `second` undercuts `mean^2` by more than rounding.
template <typename Scalar>
bool below_square(Scalar second, Scalar mean) {
  const Scalar sq = mean * mean;
  return second < sq && !nearly_equal<Scalar>(second, sq);
}

}  // namespace detail

template <typename Scalar>
ValidatedConfig<Scalar> validate(PollingConfig<Scalar> config) {
  if (config.stations.empty()) throw PollingError(ErrorKind::EmptySystem, "no stations");
  if (config.stations.size() != config.switchovers.size())
    throw PollingError(ErrorKind::LengthMismatch, "stations and switchovers differ in length");

  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& s = config.stations[i];
    const std::string at = " at station " + std::to_string(i);
    if (!detail::finite(s.lambda) || !detail::finite(s.b) || !detail::finite(s.b2) || !detail::finite(s.T))
      throw PollingError(ErrorKind::InvalidArgument, "non-finite parameter" + at);
    if (!(s.lambda > 0)) throw PollingError(ErrorKind::NegativeParameter, "lambda must be positive" + at);
    if (!(s.b > 0)) throw PollingError(ErrorKind::NegativeParameter, "b must be positive" + at);
    if (s.T < 0) throw PollingError(ErrorKind::NegativeParameter, "credit T must be nonnegative" + at);
    if (detail::below_square(s.b2, s.b)) throw PollingError(ErrorKind::InvalidMoment, "b2 < b^2" + at);
  }
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& w = config.switchovers[i];
    const std::string at = " on switchover " + std::to_string(i);
    if (!detail::finite(w.r) || !detail::finite(w.r2))
      throw PollingError(ErrorKind::InvalidArgument, "non-finite parameter" + at);
    if (w.r < 0) throw PollingError(ErrorKind::NegativeParameter, "r must be nonnegative" + at);
    if (detail::below_square(w.r2, w.r)) throw PollingError(ErrorKind::InvalidMoment, "r2 < r^2" + at);
    if (w.r == 0 && w.r2 != 0)
      throw PollingError(ErrorKind::InvalidMoment, "a switchover with zero mean must have zero second moment" + at);
    if (w.deterministic != nearly_equal<Scalar>(w.r2, w.r * w.r))
      throw PollingError(ErrorKind::InvalidMoment, "deterministic flag disagrees with r2 = r^2" + at);
  }

  auto loads = derive_loads(config);
  if (!loads.stable)
    throw PollingError(ErrorKind::Unstable, "total load rho0 = " + std::to_string(static_cast<double>(loads.rho0)) +
                                                " is not below 1");
  return ValidatedConfig<Scalar>(std::move(config), std::move(loads));
}

using Config = PollingConfig<double>;
using Checked = ValidatedConfig<double>;

}  // namespace waitsee
