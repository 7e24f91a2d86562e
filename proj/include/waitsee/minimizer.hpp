#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

#include "waitsee/errors.hpp"

namespace waitsee {

struct MinimizerOptions {
  double tolerance = 1e-10;  // projected-gradient norm at which a start is converged
  int max_iters = 5000;
  int multistart = 8;        // random starts on top of the fixed ones
  std::uint64_t seed = 0x5eedULL;
};

struct Objective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  Flag flags = Flag::None;
};

/// Norm of the gradient projected onto the tangent cone of the nonnegative
/// orthant at x: components at the bound only count when they point inward.
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g);

Eigen::VectorXd central_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                            const Eigen::VectorXd& x, double h);

/// Minimises over x >= 0 by projected gradient descent (Barzilai-Borwein
/// trial step, Armijo backtracking) from the starts {0, scale*e_i, scale*1}
/// plus `multistart` uniform points in [0, 5*scale]^n. The best start wins;
/// ties go to the lexicographically smaller point. Afterwards the objective
/// is probed along a ray; three successive decreases of at least
/// `tolerance` when scaling by 10 mark the problem Unbounded and the value
/// is replaced by the ray limit.
MinimizeResult minimize_nonnegative(const Objective& objective, Eigen::Index n, double scale,
                                    const MinimizerOptions& options);

}  // namespace waitsee
