#include "waitsee/lower_bound.hpp"

namespace waitsee {

LowerBoundResult delay_lower_bound(const Checked& cfg, const MinimizerOptions& options) {
  const double r0 = cfg.loads().r0;
  const double h = 1e-6 * (r0 + 1.0);
  auto value = [&cfg](const Eigen::VectorXd& f) { return detail::lb_evaluate(cfg, f).objective; };
  Objective obj{value, [&value, h](const Eigen::VectorXd& f) { return central_difference_gradient(value, f, h); }};

  const auto res =
      minimize_nonnegative(obj, static_cast<Eigen::Index>(cfg.size()), r0 > 0 ? r0 : 1.0, options);

  LowerBoundResult out;
  out.point = detail::lb_evaluate(cfg, res.x);
  out.bound = res.value;
  out.unbounded = has(res.flags, Flag::Unbounded);
  out.kkt_residual = res.kkt_residual;
  out.flags = res.flags | out.point.flags;
  return out;
}

}  // namespace waitsee
