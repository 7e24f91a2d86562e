#pragma once

// Lower bound on the mean delay of any strategy that idles at a station based
// only on what happened at that station since the server arrived. The bound
// is parameterised by the mean idle time f_i spent at each station per cycle
// and minimised over f >= 0.

#include <Eigen/Dense>

#include "waitsee/analytic.hpp"
#include "waitsee/minimizer.hpp"
#include "waitsee/model.hpp"

namespace waitsee {

template <typename Scalar>
struct LowerBoundPoint {
  Vec<Scalar> f;
  Scalar f0{};
  Vec<Scalar> alpha;  // rho_j (r0 + f0) / (1 - rho0) + f_j
  Scalar objective{};
  Flag flags{Flag::None};
};

namespace detail {

// Bound expression without the f >= 0 check, so finite differences may step
// across the boundary.
template <typename Scalar>
LowerBoundPoint<Scalar> lb_evaluate(const ValidatedConfig<Scalar>& cfg, const Vec<Scalar>& f) {
  const auto& d = cfg.loads();
  const auto& c = cfg.config();
  const auto n = static_cast<Eigen::Index>(cfg.size());
  const Scalar one(1), two(2);

  LowerBoundPoint<Scalar> out;
  out.f = f;
  out.f0 = f.sum();
  out.alpha = d.rho * ((d.r0 + out.f0) / (one - d.rho0)) + f;

  const Scalar spread = d.rho0 * d.rho0 - d.rho.squaredNorm();
  const Scalar first = c.lambdas().dot(c.second_moments()) / (two * (one - d.rho0)) +
                       d.r0 * spread / (two * d.rho0 * (one - d.rho0));
  const Scalar idle = d.r0 + out.f0;
  if (!(idle > 0)) {
    out.objective = first;
    out.flags = Flag::DegenerateNoIdle;
    return out;
  }

  Scalar bracket = d.rho0 * d.r0_2 / two;
  for (Eigen::Index i = 0; i < n; ++i) bracket += (d.r0 * f[i] + f[i] * f[i] / two) * (d.rho0 - d.rho[i]);
  for (Eigen::Index i = 1; i <= n; ++i) {
    Scalar carried(0);
    for (Eigen::Index j = 1; j < i; ++j)
      carried += out.alpha[j - 1] * (rho_range(d.rho, i + 1, n) + rho_range(d.rho, 1, j - 1));
    for (Eigen::Index j = i + 1; j <= n; ++j) carried += out.alpha[j - 1] * rho_range(d.rho, i + 1, j - 1);
    bracket += f[i - 1] * carried;
  }
  out.objective = first + bracket / (d.rho0 * idle);
  return out;
}

}  // namespace detail

/// Value of the bound at the idle allocation f (one entry per station).
template <typename Scalar>
LowerBoundPoint<Scalar> lb_objective(const ValidatedConfig<Scalar>& cfg, const Vec<Scalar>& f) {
  if (static_cast<std::size_t>(f.size()) != cfg.size())
    throw PollingError(ErrorKind::LengthMismatch, "allocation length differs from station count");
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (f[i] < 0) throw PollingError(ErrorKind::NegativeAllocation, "f must be nonnegative");
  return detail::lb_evaluate(cfg, f);
}

inline LowerBoundPoint<double> lb_objective(const Checked& cfg, const Eigen::VectorXd& f) {
  return lb_objective<double>(cfg, f);
}

struct LowerBoundResult {
  LowerBoundPoint<double> point;
  double bound = 0.0;
  bool unbounded = false;  // infimum approached as f grows without limit
  double kkt_residual = 0.0;
  Flag flags = Flag::None;
};

inline MinimizerOptions default_lower_bound_options() {
  MinimizerOptions o;
  o.tolerance = 1e-7;  // gradients come from central differences
  return o;
}

/// Minimum of the bound over f >= 0, using the same minimiser as the credit
/// optimisation with central-difference gradients (h = 1e-6 (r0 + 1)).
LowerBoundResult delay_lower_bound(const Checked& cfg, const MinimizerOptions& options = default_lower_bound_options());

}  // namespace waitsee
