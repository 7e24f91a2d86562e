#pragma once

// Discrete-event simulation of the cyclic polling system. One run is a
// single sequential timeline driven by per-source random streams, so results
// are reproducible bit for bit from the seed. Statistics use batch means over
// the measured service starts.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "waitsee/distributions.hpp"
#include "waitsee/errors.hpp"
#include "waitsee/model.hpp"

namespace waitsee {

enum class Strategy {
  WaitAndSee,  // idle up to a total of T_i per visit, interleaved with busy periods
  TotalTimer,  // stay until T_i after arrival, then clear the queue exhaustively
  BoxmaTimer,  // timer only when the station is found empty; leave after the first busy period
  Exhaustive,  // credits ignored
};

std::string_view to_string(Strategy s) noexcept;
Strategy strategy_from_string(std::string_view name);

struct SimConfig {
  Strategy strategy = Strategy::WaitAndSee;
  /// Per-station message-length laws; empty means fitted from the config moments.
  std::vector<DistributionSpec> service;
  /// Per-edge switchover laws; empty means fitted from the config moments.
  std::vector<DistributionSpec> switchover;
  std::uint64_t seed = 1;
  std::uint64_t warmup_arrivals = 10'000;
  std::uint64_t warmup_cycles = 1'000;
  std::uint64_t measured_arrivals = 1'000'000;
  int batches = 30;
  bool boxma_all_stations = false;  // timer at every station instead of station 0 only
  std::uint64_t queue_guard = 50'000'000;  // total queued messages that abort the run
};

/// Point estimate with the half-width of a 99% batch-means interval.
struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;
  int batches = 0;  // batches that contributed

  bool covers(double value) const { return value >= mean - half_width && value <= mean + half_width; }
};

struct StateFractions {
  Estimate working;
  Estimate switching;
  Estimate waiting;
};

struct SimEstimate {
  std::vector<Estimate> per_station_delay;
  Estimate weighted_delay;
  Estimate mean_cycle;
  StateFractions state_fractions;
  std::vector<Estimate> switching_fraction;  // time switching away from station i
  std::vector<Estimate> waiting_fraction;    // time idling at station i
  std::vector<Estimate> mean_queue_length;   // messages waiting (not in service) at station i
  Estimate mean_workload;                    // time-average unfinished work
  std::vector<Estimate> workload_switching;  // mean workload while switching away from i
  std::vector<Estimate> workload_waiting;    // mean workload while idling at i (batches = 0 if never)
  double max_credit_deviation = 0.0;         // wait-and-see: max |idle time of a visit - T_i|
  std::uint64_t measured = 0;
  std::uint64_t cycles = 0;
  double measured_time = 0.0;
  Flag flags = Flag::None;
};

/// Resolves the laws used for a run: given ones are checked against the
/// config moments (MomentMismatch beyond relative 1e-9), missing ones fitted.
void resolve_distributions(const Checked& cfg, SimConfig& sim);

SimEstimate simulate(const Checked& cfg, SimConfig sim);

/// Two-station heuristic for the best total-timer credit at station 1:
/// T1* + rho1 * E C evaluated at the optimal wait-and-see credits.
double strategy_ii_heuristic_credit(const Checked& cfg);

}  // namespace waitsee
