#pragma once

// Closed-form mean delay of the cyclic polling model with exhaustive service
// and wait-and-see credits, plus an independent evaluation of the same
// quantity assembled from the conditional workloads of the idle states.
//
// Station indices are 0-based in this API; the cyclic successor of N-1 is 0.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "waitsee/model.hpp"

namespace waitsee {

template <typename Scalar>
struct Term {
  std::string name;
  Scalar value{};
};

template <typename Scalar>
struct DelayReport {
  /// E D_i, only where it is known in closed form (N = 1).
  std::optional<Vec<Scalar>> per_station;
  Scalar weighted_mean{};
  std::vector<Term<Scalar>> terms;
  Flag flags{Flag::None};

  Scalar term(std::string_view name) const {
    for (const auto& t : terms)
      if (t.name == name) return t.value;
    throw PollingError(ErrorKind::InvalidArgument, "no term named " + std::string(name));
  }
};

template <typename Scalar>
struct Flagged {
  Scalar value{};
  Flag flags{Flag::None};
};

/// The seven constants of the two-station delay written as a rational
/// function of (T1, T2).
template <typename Scalar>
struct TwoStationCoefficients {
  Scalar c1{}, c2{}, c3{}, c4{}, c5{}, c6{}, c7{};
};

template <typename Scalar>
struct WorkloadBreakdown {
  Scalar ev_mg1{};
  Vec<Scalar> ev_switching;                        // E V_i while switching away from i
  std::vector<std::optional<Scalar>> ev_waiting;   // E V_i while waiting at i; empty when T_i = 0
  Vec<Scalar> p;                                   // P(switching away from i)
  Vec<Scalar> q_station;                           // P(waiting at i)
  Scalar q{};                                      // P(switching | idle)
  Scalar ec{};                                     // mean cycle time
  Vec<Scalar> ez;                                  // mean first busy period at i
  Flag flags{Flag::None};
};

namespace detail {

template <typename Scalar>
DelayReport<Scalar> make_report(std::vector<Term<Scalar>> terms, Flag flags, std::size_t n) {
  DelayReport<Scalar> out;
  out.terms = std::move(terms);
  Scalar sum(0);
  for (const auto& t : out.terms) sum += t.value;
  out.weighted_mean = sum;
  out.flags = flags;
  if (n == 1) out.per_station = Vec<Scalar>::Constant(1, sum);
  return out;
}

inline void require_arity(std::size_t n, std::size_t want, const char* what) {
  if (n != want)
    throw PollingError(ErrorKind::WrongArity,
                       std::string(what) + " needs N = " + std::to_string(want) + ", got " + std::to_string(n));
}

// Sum of rho over the 1-based inclusive station range [lo, hi]; empty when lo > hi.
template <typename Scalar>
Scalar rho_range(const Vec<Scalar>& rho, Eigen::Index lo, Eigen::Index hi) {
  if (lo > hi) return Scalar(0);
  return rho.segment(lo - 1, hi - lo + 1).sum();
}

}  // namespace detail

template <typename Scalar>
Scalar mean_cycle_time(const ValidatedConfig<Scalar>& cfg) {
  const auto& d = cfg.loads();
  return (d.r0 + d.T0) / (Scalar(1) - d.rho0);
}

/// Mean workload of the M/G/1 queue fed by all stations' traffic.
template <typename Scalar>
Scalar mg1_workload(const ValidatedConfig<Scalar>& cfg) {
  const auto& c = cfg.config();
  return c.lambdas().dot(c.second_moments()) / (Scalar(2) * (Scalar(1) - cfg.loads().rho0));
}

/// Classical exhaustive polling (all credits ignored).
template <typename Scalar>
DelayReport<Scalar> exhaustive_delay(const ValidatedConfig<Scalar>& cfg) {
  const auto& d = cfg.loads();
  const Scalar one(1), two(2);
  const Scalar spread = d.rho0 * d.rho0 - d.rho.squaredNorm();
  Flag flags = Flag::None;
  Scalar residual(0);
  if (d.r0 > 0)
    residual = d.r0_2 / (two * d.r0);
  else
    flags |= Flag::DegenerateNoSwitchover;
  return detail::make_report<Scalar>({{"mg1", mg1_workload(cfg)},
                                      {"switching_load", d.r0 * spread / (two * d.rho0 * (one - d.rho0))},
                                      {"residual_switchover", residual}},
                                     flags, cfg.size());
}

/// Mean average delay under the wait-and-see strategy, evaluated term by term.
template <typename Scalar>
DelayReport<Scalar> wait_and_see_delay(const ValidatedConfig<Scalar>& cfg) {
  const auto& d = cfg.loads();
  const auto n = static_cast<Eigen::Index>(cfg.size());
  const Vec<Scalar> T = cfg.config().credits();
  const Scalar one(1), two(2);
  const Scalar idle = d.r0 + d.T0;
  const Scalar spread = d.rho0 * d.rho0 - d.rho.squaredNorm();

  std::vector<Term<Scalar>> terms{{"mg1", mg1_workload(cfg)},
                                  {"idle_load", idle * spread / (two * d.rho0 * (one - d.rho0))}};
  if (!(idle > 0)) {
    terms.push_back({"switchover_credit", Scalar(0)});
    terms.push_back({"credit_quadratic", Scalar(0)});
    return detail::make_report<Scalar>(std::move(terms), Flag::DegenerateNoIdle, cfg.size());
  }

  const Vec<Scalar> others = Vec<Scalar>::Constant(n, d.rho0) - d.rho;
  const Scalar linear = d.rho0 * d.r0_2 / two + d.r0 * T.dot(others);

  Scalar quad(0);
  for (Eigen::Index i = 0; i < n; ++i)
    quad += T[i] * T[i] * (one - two * d.rho[i]) * others[i] / (two * (one - d.rho[i]));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) quad += T[i] * T[j] * (d.rho0 - d.rho[i] - d.rho[j]);

  terms.push_back({"switchover_credit", linear / (d.rho0 * idle)});
  terms.push_back({"credit_quadratic", quad / (idle * d.rho0)});
  return detail::make_report<Scalar>(std::move(terms), Flag::None, cfg.size());
}

/// Two-station specialisation, evaluated from its own bracketed form.
template <typename Scalar>
DelayReport<Scalar> two_station_delay(const ValidatedConfig<Scalar>& cfg) {
  detail::require_arity(cfg.size(), 2, "two_station_delay");
  const auto& d = cfg.loads();
  const Scalar one(1), two(2);
  const Scalar rho1 = d.rho[0], rho2 = d.rho[1];
  const Scalar T1 = cfg.station(0).T, T2 = cfg.station(1).T;
  const Scalar idle = d.r0 + T1 + T2;
  const Scalar mg1 = mg1_workload(cfg);
  if (!(idle > 0)) return detail::make_report<Scalar>({{"mg1", mg1}, {"bracket", Scalar(0)}}, Flag::DegenerateNoIdle, 2);

  const Scalar bracket = d.r0_2 * d.rho0 / two + rho1 * rho2 / (one - d.rho0) * idle * idle +
                         rho2 * T1 * (d.r0 + T1 * (one - two * rho1) / (two * (one - rho1))) +
                         rho1 * T2 * (d.r0 + T2 * (one - two * rho2) / (two * (one - rho2)));
  return detail::make_report<Scalar>({{"mg1", mg1}, {"bracket", bracket / (d.rho0 * idle)}}, Flag::None, 2);
}

template <typename Scalar>
TwoStationCoefficients<Scalar> coefficients_two_station(const ValidatedConfig<Scalar>& cfg) {
  detail::require_arity(cfg.size(), 2, "coefficients_two_station");
  const auto& d = cfg.loads();
  const Scalar one(1), two(2);
  const Scalar rho1 = d.rho[0], rho2 = d.rho[1], r0 = d.r0;
  TwoStationCoefficients<Scalar> c;
  c.c1 = mg1_workload(cfg);
  c.c2 = rho1 * rho2 * r0 * r0 / (one - d.rho0) + d.rho0 * d.r0_2 / two;
  c.c3 = r0 * rho2 + two * rho2 * rho1 * r0 / (one - d.rho0);
  c.c4 = r0 * rho1 + two * rho1 * rho2 * r0 / (one - d.rho0);
  c.c5 = two * rho2 * rho1 / (one - d.rho0);
  c.c6 = c.c5 / two + rho2 / two * (one - rho1 / (one - rho1));
  c.c7 = c.c5 / two + rho1 / two * (one - rho2 / (one - rho2));
  return c;
}

template <typename Scalar>
DelayReport<Scalar> delay_via_cs(const ValidatedConfig<Scalar>& cfg) {
  const auto c = coefficients_two_station(cfg);
  const auto& d = cfg.loads();
  const Scalar T1 = cfg.station(0).T, T2 = cfg.station(1).T;
  const Scalar idle = d.r0 + T1 + T2;
  if (!(idle > 0)) return detail::make_report<Scalar>({{"c1", c.c1}, {"ratio", Scalar(0)}}, Flag::DegenerateNoIdle, 2);
  const Scalar num = c.c2 + c.c3 * T1 + c.c4 * T2 + c.c5 * T1 * T2 + c.c6 * T1 * T1 + c.c7 * T2 * T2;
  return detail::make_report<Scalar>({{"c1", c.c1}, {"ratio", num / (d.rho0 * idle)}}, Flag::None, 2);
}

/// N = 1: an M/G/1 queue whose server takes a vacation after idling T_1 in total.
template <typename Scalar>
DelayReport<Scalar> single_station_delay(const ValidatedConfig<Scalar>& cfg) {
  detail::require_arity(cfg.size(), 1, "single_station_delay");
  const auto& s = cfg.station(0);
  const auto& w = cfg.switchover(0);
  const Scalar one(1), two(2);
  const Scalar mg1 = s.lambda * s.b2 / (two * (one - s.lambda * s.b));
  const Scalar idle = w.r + s.T;
  if (!(idle > 0)) return detail::make_report<Scalar>({{"mg1", mg1}, {"vacation", Scalar(0)}}, Flag::DegenerateNoIdle, 1);
  return detail::make_report<Scalar>({{"mg1", mg1}, {"vacation", w.r2 / (two * idle)}}, Flag::None, 1);
}

namespace detail {

// Work generated during earlier switchovers and station visits that is still
// present when observing the server idle at station i (1-based). Shared by
// the switching and waiting conditional workloads.
template <typename Scalar>
Scalar carried_workload(const ValidatedConfig<Scalar>& cfg, Eigen::Index i, Scalar ec) {
  const auto& d = cfg.loads();
  const auto n = static_cast<Eigen::Index>(cfg.size());
  Scalar v(0);
  for (Eigen::Index j = 1; j <= n; ++j) {
    const Scalar rj = cfg.switchover(static_cast<std::size_t>(j - 1)).r;
    const Scalar visit = d.rho[j - 1] * ec + cfg.station(static_cast<std::size_t>(j - 1)).T;
    if (j < i) {
      v += rj * (rho_range(d.rho, i + 1, n) + rho_range(d.rho, 1, j));
      v += visit * (rho_range(d.rho, i + 1, n) + rho_range(d.rho, 1, j - 1));
    } else if (j > i) {
      v += rj * rho_range(d.rho, i + 1, j);
      v += visit * rho_range(d.rho, i + 1, j - 1);
    }
  }
  return v;
}

inline void require_index(std::size_t i, std::size_t n) {
  if (i >= n)
    throw PollingError(ErrorKind::IndexOutOfRange,
                       "station index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
}

}  // namespace detail

/// Mean workload seen at a random instant while the server switches from
/// station i to i+1. The backward-recurrence term is 0/0 when r_i = 0; it is
/// set to zero and flagged.
template <typename Scalar>
Flagged<Scalar> workload_while_switching(const ValidatedConfig<Scalar>& cfg, std::size_t i) {
  detail::require_index(i, cfg.size());
  const auto& d = cfg.loads();
  const Scalar ec = mean_cycle_time(cfg);
  const Scalar rho_i = d.rho[static_cast<Eigen::Index>(i)];
  const auto& w = cfg.switchover(i);
  Flagged<Scalar> out;
  out.value = detail::carried_workload(cfg, static_cast<Eigen::Index>(i) + 1, ec) + rho_i * ec * (d.rho0 - rho_i) +
              (d.rho0 - rho_i) * cfg.station(i).T;
  if (w.r > 0)
    out.value += d.rho0 * w.r2 / (Scalar(2) * w.r);
  else
    out.flags = Flag::DegenerateNoSwitchover;
  return out;
}

/// Mean workload seen at a random instant while the server idles at station i.
template <typename Scalar>
Scalar workload_while_waiting(const ValidatedConfig<Scalar>& cfg, std::size_t i) {
  detail::require_index(i, cfg.size());
  const Scalar Ti = cfg.station(i).T;
  if (!(Ti > 0)) throw PollingError(ErrorKind::NoWaitingState, "credit of station " + std::to_string(i) + " is zero");
  const auto& d = cfg.loads();
  const Scalar one(1), two(2);
  const Scalar ec = mean_cycle_time(cfg);
  const Scalar rho_i = d.rho[static_cast<Eigen::Index>(i)];
  return detail::carried_workload(cfg, static_cast<Eigen::Index>(i) + 1, ec) +
         (d.rho0 - rho_i) * (rho_i * ec + Ti / two * (one - rho_i / (one - rho_i)));
}

template <typename Scalar>
WorkloadBreakdown<Scalar> workload_breakdown(const ValidatedConfig<Scalar>& cfg) {
  const auto& c = cfg.config();
  const auto& d = cfg.loads();
  const auto n = static_cast<Eigen::Index>(cfg.size());
  const Scalar one(1);

  WorkloadBreakdown<Scalar> out;
  out.ev_mg1 = mg1_workload(cfg);
  out.ec = mean_cycle_time(cfg);
  out.ev_switching = Vec<Scalar>::Zero(n);
  out.ev_waiting.assign(cfg.size(), std::nullopt);
  out.p = Vec<Scalar>::Zero(n);
  out.q_station = Vec<Scalar>::Zero(n);
  out.ez = Vec<Scalar>::Zero(n);

  const bool idle = d.r0 + d.T0 > 0;
  if (!idle) out.flags |= Flag::DegenerateNoIdle;

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto& s = c.stations[k];
    const auto sw = workload_while_switching(cfg, k);
    out.ev_switching[i] = sw.value;
    out.flags |= sw.flags;
    if (s.T > 0) out.ev_waiting[k] = workload_while_waiting(cfg, k);
    if (idle) {
      out.p[i] = c.switchovers[k].r / out.ec;
      out.q_station[i] = s.T / out.ec;
    }
    out.ez[i] = d.rho[i] * out.ec - s.lambda * s.T * s.b / (one - d.rho[i]);
  }
  const Scalar ps = out.p.sum(), qs = out.q_station.sum();
  out.q = ps + qs > 0 ? ps / (ps + qs) : Scalar(0);
  return out;
}

/// Mean delay recovered from the workload decomposition and Little's law,
/// coded independently of `wait_and_see_delay` so the two cross-check.
template <typename Scalar>
DelayReport<Scalar> delay_via_workload_decomposition(const ValidatedConfig<Scalar>& cfg) {
  const auto& c = cfg.config();
  const auto& d = cfg.loads();
  const auto wb = workload_breakdown(cfg);
  const auto n = static_cast<Eigen::Index>(cfg.size());
  const Scalar two(2);

  const Scalar p_switch = wb.p.sum();
  const Scalar p_wait = wb.q_station.sum();
  Scalar ev_switching(0), ev_waiting(0);
  if (p_switch > 0) ev_switching = wb.p.dot(wb.ev_switching) / p_switch;
  if (p_wait > 0) {
    Scalar acc(0);
    for (Eigen::Index i = 0; i < n; ++i)
      if (wb.ev_waiting[static_cast<std::size_t>(i)]) acc += wb.q_station[i] * *wb.ev_waiting[static_cast<std::size_t>(i)];
    ev_waiting = acc / p_wait;
  }

  Scalar in_service(0);
  for (const auto& s : c.stations) in_service += s.lambda * s.b * s.b2 / (two * s.b);

  return detail::make_report<Scalar>({{"mg1_workload", wb.ev_mg1 / d.rho0},
                                      {"switching_workload", wb.q * ev_switching / d.rho0},
                                      {"waiting_workload", (Scalar(1) - wb.q) * ev_waiting / d.rho0},
                                      {"residual_service", -in_service / d.rho0}},
                                     wb.flags, cfg.size());
}

}  // namespace waitsee
