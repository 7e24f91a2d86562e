#pragma once

// Choosing the wait-and-see credits. Two stations have closed forms for the
// symmetric case and for the asymmetric case with deterministic switchovers;
// everything else goes through the numerical minimiser on the rational
// quadratic form of the delay.

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "waitsee/analytic.hpp"
#include "waitsee/minimizer.hpp"
#include "waitsee/model.hpp"

namespace waitsee {

inline constexpr double kSymmetryTol = 1e-12;

struct SymmetricVerdict {
  bool worth_waiting = false;
  double lhs = 0.0;            // 2 rho
  double rhs = 0.0;            // 1 - r0^2 / (r0_2 + r0^2 rho / (1 - 2 rho))
  double rhs_variance_form = 0.0;  // same bound written with var(R1 + R2)
  Flag flags = Flag::None;
};

struct AsymmetricVerdict {
  bool station1 = false;  // station 2 never gains from waiting
  double condition = 0.0;  // rho1 - rho1^2 + rho2^2 - rho2 - 2 rho1 rho2
};

struct TwoStationDecision {
  bool symmetric = false;
  std::array<bool, 2> worth_waiting{false, false};
  Eigen::Vector2d t_opt = Eigen::Vector2d::Zero();
  double delay_opt = 0.0;
  double exhaustive = 0.0;
  std::vector<Term<double>> condition_values;
  std::string branch;   // "symmetric", "asymmetric_deterministic" or "numerical"
  std::string message;
  Flag flags = Flag::None;
};

struct GeneralOptimum {
  Eigen::VectorXd t;
  double delay = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  Flag flags = Flag::None;
};

/// Requires N = 2 and |rho1 - rho2| <= 1e-12. For rho >= 1/2 the answer is
/// "no" with the HalfLoad flag.
SymmetricVerdict symmetric_worth_waiting(const Checked& cfg);

/// Common optimal credit T* = T1* = T2* of the symmetric two-station system.
/// Throws NotWorthWaiting when the verdict is negative.
double symmetric_optimal_credit(const Checked& cfg);

/// Requires N = 2, rho1 > rho2 and deterministic switchovers.
AsymmetricVerdict asymmetric_worth_waiting(const Checked& cfg);

/// (T1*, 0) for the asymmetric deterministic system; throws NotWorthWaiting
/// when the condition fails.
Eigen::Vector2d asymmetric_optimal_credit(const Checked& cfg);

/// Signed residual (c5 - 2c6) T1 - (c3 - c4) - (c5 - 2c7) T2 of the linear
/// relation every interior minimiser satisfies.
double stationarity_residual(const Checked& cfg, double T1, double T2);

/// Scale used to judge the stationarity residual: |c3| + |c4| + 1.
double stationarity_scale(const Checked& cfg);

TwoStationDecision optimal_credits_two_station(const Checked& cfg, const MinimizerOptions& options = {});

GeneralOptimum optimal_credits_general(const Checked& cfg, const MinimizerOptions& options = {});

}  // namespace waitsee
