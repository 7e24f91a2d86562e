#include "waitsee/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "waitsee/rational_form.hpp"

namespace waitsee {

namespace {

void require_two(const Checked& cfg, const char* what) {
  if (cfg.size() != 2)
    throw PollingError(ErrorKind::WrongArity, std::string(what) + " needs N = 2, got " + std::to_string(cfg.size()));
}

double delay_at(const Checked& cfg, const Eigen::VectorXd& t) {
  return wait_and_see_delay(cfg.with_credits(t)).weighted_mean;
}

Checked swap_stations(const Checked& cfg) {
  Config c = cfg.config();
  std::swap(c.stations[0], c.stations[1]);
  std::swap(c.switchovers[0], c.switchovers[1]);
  return validate(std::move(c));
}

std::string verdict_message(const std::array<bool, 2>& worth) {
  if (!worth[0] && !worth[1]) return "no gain from waiting at either station";
  if (worth[0] && worth[1]) return "worth waiting at both stations";
  const int gain = worth[0] ? 1 : 2;
  const int none = worth[0] ? 2 : 1;
  return "worth waiting at station " + std::to_string(gain) + "; no gain from waiting at station " +
         std::to_string(none);
}

}  // namespace

SymmetricVerdict symmetric_worth_waiting(const Checked& cfg) {
  require_two(cfg, "symmetric_worth_waiting");
  const auto& d = cfg.loads();
  if (std::abs(d.rho[0] - d.rho[1]) > kSymmetryTol)
    throw PollingError(ErrorKind::NotSymmetric, "rho1 and rho2 differ");
  const double rho = d.rho[0];
  SymmetricVerdict v;
  v.lhs = 2.0 * rho;
  if (rho >= 0.5) {
    v.flags = Flag::HalfLoad;
    return v;
  }
  if (!(d.r0 > 0)) {
    v.flags = Flag::DegenerateNoSwitchover;
    return v;
  }
  const double r0sq = d.r0 * d.r0;
  v.rhs = 1.0 - r0sq / (d.r0_2 + r0sq * rho / (1.0 - 2.0 * rho));
  const double variance = d.r0_2 - r0sq;
  v.rhs_variance_form = 1.0 - r0sq / (variance + r0sq * (1.0 - rho) / (1.0 - 2.0 * rho));
  if (!nearly_equal(v.rhs, v.rhs_variance_form, 1e-12, 1e-12))
    throw std::logic_error("symmetric worth-waiting bound: the two algebraic forms disagree");
  v.worth_waiting = v.lhs < v.rhs;
  return v;
}

double symmetric_optimal_credit(const Checked& cfg) {
  const auto verdict = symmetric_worth_waiting(cfg);
  if (!verdict.worth_waiting) throw PollingError(ErrorKind::NotWorthWaiting, "symmetric condition fails");
  const auto& d = cfg.loads();
  const double rho = d.rho[0];
  const double r0 = d.r0;
  const double a = d.r0_2 + r0 * r0 * rho / (1.0 - 2.0 * rho);
  const double disc = 4.0 * r0 * r0 * rho - 3.0 * r0 * r0 + a * (4.0 - 12.0 * rho + 8.0 * rho * rho);
  return -0.5 * r0 + 0.5 * std::sqrt(disc);
}

AsymmetricVerdict asymmetric_worth_waiting(const Checked& cfg) {
  require_two(cfg, "asymmetric_worth_waiting");
  if (!cfg.config().all_deterministic())
    throw PollingError(ErrorKind::NotDeterministic, "switchover times must be deterministic");
  const double rho1 = cfg.loads().rho[0], rho2 = cfg.loads().rho[1];
  if (!(rho1 > rho2 + kSymmetryTol)) throw PollingError(ErrorKind::NotAsymmetric, "requires rho1 > rho2");
  AsymmetricVerdict v;
  v.condition = rho1 - rho1 * rho1 + rho2 * rho2 - rho2 - 2.0 * rho1 * rho2;
  v.station1 = v.condition > 0;
  return v;
}

Eigen::Vector2d asymmetric_optimal_credit(const Checked& cfg) {
  if (!asymmetric_worth_waiting(cfg).station1)
    throw PollingError(ErrorKind::NotWorthWaiting, "asymmetric condition fails");
  const auto c = coefficients_two_station(cfg);
  const double r0 = cfg.loads().r0;
  return {-r0 + std::sqrt(r0 * r0 + (c.c2 - c.c3 * r0) / c.c6), 0.0};
}

double stationarity_residual(const Checked& cfg, double T1, double T2) {
  require_two(cfg, "stationarity_residual");
  if (!(cfg.loads().r0 + T1 + T2 > 0))
    throw PollingError(ErrorKind::InvalidArgument, "stationarity needs r0 + T1 + T2 > 0");
  const auto c = coefficients_two_station(cfg);
  return (c.c5 - 2.0 * c.c6) * T1 - (c.c3 - c.c4) - (c.c5 - 2.0 * c.c7) * T2;
}

double stationarity_scale(const Checked& cfg) {
  const auto c = coefficients_two_station(cfg);
  return std::abs(c.c3) + std::abs(c.c4) + 1.0;
}

GeneralOptimum optimal_credits_general(const Checked& cfg, const MinimizerOptions& options) {
  const auto form = rational_form(cfg);
  Objective obj{[&form](const Eigen::VectorXd& t) { return form.value(t); },
                [&form](const Eigen::VectorXd& t) { return form.gradient(t); }};
  const double scale = cfg.loads().r0 > 0 ? cfg.loads().r0 : 1.0;
  const auto res = minimize_nonnegative(obj, static_cast<Eigen::Index>(cfg.size()), scale, options);
  return {res.x, res.value, res.kkt_residual, res.iterations, res.flags};
}

TwoStationDecision optimal_credits_two_station(const Checked& cfg, const MinimizerOptions& options) {
  require_two(cfg, "optimal_credits_two_station");
  const auto& d = cfg.loads();
  TwoStationDecision out;
  out.exhaustive = exhaustive_delay(cfg).weighted_mean;
  out.symmetric = std::abs(d.rho[0] - d.rho[1]) <= kSymmetryTol;

  if (out.symmetric) {
    out.branch = "symmetric";
    const auto v = symmetric_worth_waiting(cfg);
    out.flags |= v.flags;
    out.condition_values = {{"lhs", v.lhs}, {"rhs", v.rhs}, {"rhs_variance_form", v.rhs_variance_form}};
    if (v.worth_waiting) {
      const double t = symmetric_optimal_credit(cfg);
      out.t_opt = {t, t};
    }
  } else if (cfg.config().all_deterministic()) {
    out.branch = "asymmetric_deterministic";
    const bool swapped = d.rho[0] < d.rho[1];
    const Checked ordered = swapped ? swap_stations(cfg) : cfg;
    const auto v = asymmetric_worth_waiting(ordered);
    out.condition_values = {{"condition", v.condition}};
    if (v.station1) {
      const Eigen::Vector2d t = asymmetric_optimal_credit(ordered);
      out.t_opt = swapped ? Eigen::Vector2d(t[1], t[0]) : t;
    }
  } else {
    out.branch = "numerical";
    const auto g = optimal_credits_general(cfg, options);
    out.flags |= g.flags;
    out.t_opt = g.t;
    out.condition_values = {{"kkt_residual", g.kkt_residual}};
  }

  out.delay_opt = out.t_opt.isZero() ? out.exhaustive : delay_at(cfg, out.t_opt);
  if (out.delay_opt > out.exhaustive && !nearly_equal(out.delay_opt, out.exhaustive)) {
    if (out.branch != "numerical") throw std::logic_error("closed-form credits worse than exhaustive service");
    out.t_opt.setZero();
    out.delay_opt = out.exhaustive;
  }
  if (out.t_opt[0] > 0 && out.t_opt[1] > 0)
    out.condition_values.push_back({"stationarity_residual", stationarity_residual(cfg, out.t_opt[0], out.t_opt[1])});
  out.worth_waiting = {out.t_opt[0] > 0, out.t_opt[1] > 0};
  out.message = verdict_message(out.worth_waiting);
  return out;
}

}  // namespace waitsee
