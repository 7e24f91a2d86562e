#include "waitsee/simulator.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "waitsee/optimize.hpp"

namespace waitsee {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::WaitAndSee: return "wait_and_see";
    case Strategy::TotalTimer: return "total_timer";
    case Strategy::BoxmaTimer: return "boxma_timer";
    case Strategy::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
  for (Strategy s : {Strategy::WaitAndSee, Strategy::TotalTimer, Strategy::BoxmaTimer, Strategy::Exhaustive})
    if (to_string(s) == name) return s;
  throw PollingError(ErrorKind::InvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

namespace {

constexpr double kMomentTol = 1e-9;
constexpr double kConfidence = 0.99;

double t_quantile(int batches) {
  boost::math::students_t dist(static_cast<double>(batches - 1));
  return boost::math::quantile(dist, 0.5 + kConfidence / 2.0);
}

Estimate summarize(double point, const std::vector<double>& values) {
  Estimate e;
  e.mean = point;
  e.batches = static_cast<int>(values.size());
  if (values.size() < 2) {
    e.half_width = std::numeric_limits<double>::infinity();
    return e;
  }
  double avg = 0.0;
  for (double v : values) avg += v;
  avg /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - avg) * (v - avg);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  e.half_width = t_quantile(e.batches) * sd / std::sqrt(static_cast<double>(values.size()));
  return e;
}

// Ratio estimator split over batches: per-batch ratios give the interval,
// the ratio of totals gives the point estimate.
class BatchRatio {
 public:
  explicit BatchRatio(int batches = 0) : num_(static_cast<std::size_t>(batches), 0.0), den_(num_.size(), 0.0) {}

  void add(int k, double num, double den) {
    num_[static_cast<std::size_t>(k)] += num;
    den_[static_cast<std::size_t>(k)] += den;
  }

  bool valid(std::size_t k) const { return den_[k] > 0; }
  double ratio(std::size_t k) const { return num_[k] / den_[k]; }
  std::size_t size() const { return num_.size(); }

  double overall() const {
    double n = 0.0, d = 0.0;
    for (std::size_t k = 0; k < num_.size(); ++k) {
      n += num_[k];
      d += den_[k];
    }
    return d > 0 ? n / d : std::numeric_limits<double>::quiet_NaN();
  }

  Estimate estimate() const {
    std::vector<double> values;
    for (std::size_t k = 0; k < num_.size(); ++k)
      if (valid(k)) values.push_back(ratio(k));
    return summarize(overall(), values);
  }

 private:
  std::vector<double> num_;
  std::vector<double> den_;
};

enum class Activity { Working, Switching, Waiting };

class Engine {
 public:
  Engine(const Checked& cfg, const SimConfig& sim)
      : cfg_(cfg), sim_(sim), n_(cfg.size()), queue_(n_), qlen_(n_, 0), scratch_(n_, 0.0) {
    const int b = sim.batches;
    per_batch_ = std::max<std::uint64_t>(1, sim.measured_arrivals / static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& s = cfg.station(i);
      Source src{Rng(derive_seed(sim.seed, 3 * i)), Rng(derive_seed(sim.seed, 3 * i + 1)),
                 std::exponential_distribution<double>(s.lambda), Sampler(sim.service[i]), 0.0, 0.0};
      sources_.push_back(std::move(src));
      draw_next(i);
      switch_rng_.emplace_back(derive_seed(sim.seed, 3 * i + 2));
      switch_sampler_.emplace_back(sim.switchover[i]);
      delay_.emplace_back(b);
      switching_.emplace_back(b);
      waiting_.emplace_back(b);
      queue_stat_.emplace_back(b);
      wl_switching_.emplace_back(b);
      wl_waiting_.emplace_back(b);
    }
    working_ = BatchRatio(b);
    switching_total_ = BatchRatio(b);
    waiting_total_ = BatchRatio(b);
    cycle_ = BatchRatio(b);
    workload_stat_ = BatchRatio(b);
  }

  SimEstimate run() {
    std::size_t station = 0;
    double cycle_start = 0.0;
    std::uint64_t served_at_cycle_start = 0;
    while (!stop_) {
      visit(station);
      if (stop_) break;
      const double r = switch_sampler_[station](switch_rng_[station]);
      advance(t_ + r, Activity::Switching, station, false);
      if (stop_) break;
      station = (station + 1) % n_;
      if (station == 0) {
        if (measuring_) cycle_.add(batch_, t_ - cycle_start, 1.0);
        ++cycles_;
        if (t_ == cycle_start && served_ == served_at_cycle_start) idle_until_next_arrival();
        cycle_start = t_;
        served_at_cycle_start = served_;
      }
      if (queued_ > sim_.queue_guard) {
        flags_ |= Flag::UnstableDetected;
        break;
      }
    }
    return collect();
  }

 private:
  struct Message {
    double arrival;
    double size;
  };
  struct Source {
    Rng arrival_rng;
    Rng service_rng;
    std::exponential_distribution<double> gap;
    Sampler service;
    double next_time;
    double next_size;
  };

  void draw_next(std::size_t j) {
    auto& s = sources_[j];
    s.next_time += s.gap(s.arrival_rng);
    s.next_size = s.service(s.service_rng);
  }

  // Moves the clock to `until` with the server in `act` at `station`,
  // absorbing arrivals before `until` (or at it, when inclusive) and
  // integrating workload and queue lengths over the interval.
  void advance(double until, Activity act, std::size_t station, bool inclusive) {
    const double dt = std::max(0.0, until - t_);
    const bool meas = measuring_;
    double vint = 0.0;
    if (meas) {
      vint = workload_ * dt - (act == Activity::Working ? 0.5 * dt * dt : 0.0);
      for (std::size_t j = 0; j < n_; ++j) scratch_[j] = static_cast<double>(qlen_[j]) * dt;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      auto& s = sources_[j];
      while (inclusive ? s.next_time <= until : s.next_time < until) {
        queue_[j].push_back({s.next_time, s.next_size});
        ++qlen_[j];
        ++queued_;
        workload_ += s.next_size;
        if (meas) {
          vint += s.next_size * (until - s.next_time);
          scratch_[j] += until - s.next_time;
        }
        draw_next(j);
      }
    }
    if (act == Activity::Working) workload_ = std::max(0.0, workload_ - dt);
    if (meas) {
      const int k = batch_;
      working_.add(k, act == Activity::Working ? dt : 0.0, dt);
      switching_total_.add(k, act == Activity::Switching ? dt : 0.0, dt);
      waiting_total_.add(k, act == Activity::Waiting ? dt : 0.0, dt);
      for (std::size_t j = 0; j < n_; ++j) {
        switching_[j].add(k, act == Activity::Switching && j == station ? dt : 0.0, dt);
        waiting_[j].add(k, act == Activity::Waiting && j == station ? dt : 0.0, dt);
        queue_stat_[j].add(k, scratch_[j], dt);
      }
      if (act == Activity::Switching) wl_switching_[station].add(k, vint, dt);
      if (act == Activity::Waiting) wl_waiting_[station].add(k, vint, dt);
      workload_stat_.add(k, vint, dt);
      measured_time_ += dt;
    }
    t_ = until;
  }

  void start_service(std::size_t i, double delay) {
    ++served_;
    if (!measuring_ && served_ > sim_.warmup_arrivals && cycles_ >= sim_.warmup_cycles) measuring_ = true;
    if (!measuring_) return;
    batch_ = static_cast<int>(std::min<std::uint64_t>(measured_ / per_batch_, static_cast<std::uint64_t>(sim_.batches - 1)));
    delay_[i].add(batch_, delay, 1.0);
    if (++measured_ >= sim_.measured_arrivals) stop_ = true;
  }

  void serve_front(std::size_t i) {
    const Message m = queue_[i].front();
    queue_[i].pop_front();
    --qlen_[i];
    --queued_;
    start_service(i, t_ - m.arrival);
    if (stop_) return;
    advance(t_ + m.size, Activity::Working, i, false);
  }

  void serve_exhaustively(std::size_t i) {
    while (!stop_ && !queue_[i].empty()) serve_front(i);
  }

  double next_arrival(std::size_t i) const { return sources_[i].next_time; }

  void visit(std::size_t i) {
    const double credit = cfg_.station(i).T;
    switch (sim_.strategy) {
      case Strategy::Exhaustive:
        serve_exhaustively(i);
        return;

      case Strategy::WaitAndSee: {
        double left = credit;
        double waited = 0.0;
        for (;;) {
          if (stop_) return;
          if (!queue_[i].empty()) {
            serve_front(i);
            continue;
          }
          if (left > 0) {
            const double a = next_arrival(i);
            if (a < t_ + left) {
              const double dt = a - t_;
              waited += dt;
              left -= dt;
              advance(a, Activity::Waiting, i, true);
              continue;
            }
            waited += left;
            advance(t_ + left, Activity::Waiting, i, false);
            left = 0.0;
          }
          break;
        }
        max_credit_deviation_ = std::max(max_credit_deviation_, std::abs(waited - credit));
        return;
      }

      case Strategy::TotalTimer: {
        const double deadline = t_ + credit;
        for (;;) {
          if (stop_) return;
          if (!queue_[i].empty()) {
            serve_front(i);
            continue;
          }
          if (t_ < deadline) {
            const double a = next_arrival(i);
            if (a < deadline) {
              advance(a, Activity::Waiting, i, true);
              continue;
            }
            advance(deadline, Activity::Waiting, i, false);
          }
          break;
        }
        return;
      }

      case Strategy::BoxmaTimer: {
        const bool armed = credit > 0 && (sim_.boxma_all_stations || i == 0) && queue_[i].empty();
        if (armed) {
          const double a = next_arrival(i);
          if (a < t_ + credit) {
            advance(a, Activity::Waiting, i, true);
          } else {
            advance(t_ + credit, Activity::Waiting, i, false);
            return;
          }
        }
        serve_exhaustively(i);
        return;
      }
    }
  }

  // A whole cycle passed in zero time with nothing to serve (all switchovers
  // and credits zero): the server idles in place until work appears.
  void idle_until_next_arrival() {
    double next = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_; ++j) next = std::min(next, next_arrival(j));
    advance(next, Activity::Switching, n_ - 1, true);
  }

  SimEstimate collect() const {
    SimEstimate out;
    const auto& d = cfg_.loads();
    for (std::size_t i = 0; i < n_; ++i) {
      out.per_station_delay.push_back(delay_[i].estimate());
      out.switching_fraction.push_back(switching_[i].estimate());
      out.waiting_fraction.push_back(waiting_[i].estimate());
      out.mean_queue_length.push_back(queue_stat_[i].estimate());
      out.workload_switching.push_back(wl_switching_[i].estimate());
      out.workload_waiting.push_back(wl_waiting_[i].estimate());
    }

    double point = 0.0;
    for (std::size_t i = 0; i < n_; ++i) point += d.rho[static_cast<Eigen::Index>(i)] / d.rho0 * delay_[i].overall();
    std::vector<double> values;
    for (std::size_t k = 0; k < static_cast<std::size_t>(sim_.batches); ++k) {
      double v = 0.0;
      bool ok = true;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!delay_[i].valid(k)) {
          ok = false;
          break;
        }
        v += d.rho[static_cast<Eigen::Index>(i)] / d.rho0 * delay_[i].ratio(k);
      }
      if (ok) values.push_back(v);
    }
    out.weighted_delay = summarize(point, values);
    out.mean_cycle = cycle_.estimate();
    out.mean_workload = workload_stat_.estimate();
    out.state_fractions = {working_.estimate(), switching_total_.estimate(), waiting_total_.estimate()};
    out.max_credit_deviation = max_credit_deviation_;
    out.measured = measured_;
    out.cycles = cycles_;
    out.measured_time = measured_time_;
    out.flags = flags_;
    return out;
  }

  const Checked& cfg_;
  const SimConfig& sim_;
  std::size_t n_;

  std::vector<Source> sources_;
  std::vector<Rng> switch_rng_;
  std::vector<Sampler> switch_sampler_;
  std::vector<std::deque<Message>> queue_;
  std::vector<std::uint64_t> qlen_;
  std::vector<double> scratch_;

  double t_ = 0.0;
  double workload_ = 0.0;
  std::uint64_t queued_ = 0;
  std::uint64_t served_ = 0;
  std::uint64_t measured_ = 0;
  std::uint64_t cycles_ = 0;
  std::uint64_t per_batch_ = 1;
  int batch_ = 0;
  bool measuring_ = false;
  bool stop_ = false;
  double measured_time_ = 0.0;
  double max_credit_deviation_ = 0.0;
  Flag flags_ = Flag::None;

  std::vector<BatchRatio> delay_, switching_, waiting_, queue_stat_, wl_switching_, wl_waiting_;
  BatchRatio working_, switching_total_, waiting_total_, cycle_, workload_stat_;
};

bool moments_match(double expected, double actual) {
  if (expected == 0.0) return std::abs(actual) <= 1e-12;
  return std::abs(actual - expected) <= kMomentTol * std::abs(expected);
}

}  // namespace

void resolve_distributions(const Checked& cfg, SimConfig& sim) {
  const std::size_t n = cfg.size();
  if (sim.service.empty())
    for (std::size_t i = 0; i < n; ++i) sim.service.push_back(fit_two_moment(cfg.station(i).b, cfg.station(i).b2));
  if (sim.switchover.empty())
    for (std::size_t i = 0; i < n; ++i)
      sim.switchover.push_back(fit_two_moment(cfg.switchover(i).r, cfg.switchover(i).r2));
  if (sim.service.size() != n || sim.switchover.size() != n)
    throw PollingError(ErrorKind::LengthMismatch, "one service and one switchover law per station required");
  for (std::size_t i = 0; i < n; ++i) {
    check_parameters(sim.service[i]);
    check_parameters(sim.switchover[i]);
    const auto& s = cfg.station(i);
    if (!moments_match(s.b, mean(sim.service[i])) || !moments_match(s.b2, second_moment(sim.service[i])))
      throw PollingError(ErrorKind::MomentMismatch, "service law of station " + std::to_string(i) +
                                                        " does not match b, b2");
    const auto& w = cfg.switchover(i);
    if (!moments_match(w.r, mean(sim.switchover[i])) || !moments_match(w.r2, second_moment(sim.switchover[i])))
      throw PollingError(ErrorKind::MomentMismatch, "switchover law " + std::to_string(i) + " does not match r, r2");
  }
}

SimEstimate simulate(const Checked& cfg, SimConfig sim) {
  if (sim.batches < 10) throw PollingError(ErrorKind::InvalidArgument, "at least 10 batches required");
  if (sim.measured_arrivals < 10 * static_cast<std::uint64_t>(sim.batches))
    throw PollingError(ErrorKind::InvalidArgument, "measured arrivals must be at least 10 per batch");
  resolve_distributions(cfg, sim);
  Engine engine(cfg, sim);
  return engine.run();
}

double strategy_ii_heuristic_credit(const Checked& cfg) {
  const auto decision = optimal_credits_two_station(cfg);
  const auto& d = cfg.loads();
  const double ec = (d.r0 + decision.t_opt.sum()) / (1.0 - d.rho0);
  return decision.t_opt[0] + d.rho[0] * ec;
}

}  // namespace waitsee
