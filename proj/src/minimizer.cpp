#include "waitsee/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace waitsee {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kRayFar = 1e12;

struct StartResult {
  Eigen::VectorXd x;
  double value;
  double kkt;
  int iterations;
  bool converged;
};

StartResult descend(const Objective& obj, Eigen::VectorXd x, const MinimizerOptions& opt) {
  x = x.cwiseMax(0.0);
  double f = obj.value(x);
  Eigen::VectorXd g = obj.gradient(x);
  double alpha = 1.0;
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    if (projected_gradient_norm(x, g) <= opt.tolerance) return {x, f, projected_gradient_norm(x, g), it, true};

    bool accepted = false;
    Eigen::VectorXd xn;
    double fn = 0.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      xn = (x - alpha * g).cwiseMax(0.0);
      const Eigen::VectorXd step = xn - x;
      fn = obj.value(xn);
      // Slack of a few ulps lets the iteration keep following the gradient once
      // objective differences fall below rounding.
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(f);
      if (std::isfinite(fn) && fn <= f + kArmijo * g.dot(step) + slack) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd gn = obj.gradient(xn);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (s.squaredNorm() == 0.0) {
      x = xn;
      g = gn;
      break;
    }
    alpha = sy > 0 ? s.squaredNorm() / sy : 4.0 * alpha;
    alpha = std::clamp(alpha, 1e-14, 1e14);
    x = std::move(xn);
    f = fn;
    g = gn;
  }
  const double kkt = projected_gradient_norm(x, g);
  return {x, f, kkt, it, kkt <= opt.tolerance};
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double gi = x[i] > 0.0 ? g[i] : std::min(g[i], 0.0);
    acc += gi * gi;
  }
  return std::sqrt(acc);
}

Eigen::VectorXd central_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

MinimizeResult minimize_nonnegative(const Objective& objective, Eigen::Index n, double scale,
                                    const MinimizerOptions& options) {
  if (n <= 0) throw PollingError(ErrorKind::InvalidArgument, "minimiser dimension must be positive");
  if (!(options.tolerance > 0)) throw PollingError(ErrorKind::InvalidArgument, "tolerance must be positive");
  if (!(scale > 0)) scale = 1.0;

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(n));
  for (Eigen::Index i = 0; i < n; ++i) starts.push_back(scale * Eigen::VectorXd::Unit(n, i));
  starts.push_back(Eigen::VectorXd::Constant(n, scale));
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 5.0 * scale);
  for (int k = 0; k < options.multistart; ++k) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = unif(rng);
    starts.push_back(std::move(x));
  }

  StartResult best{Eigen::VectorXd(), std::numeric_limits<double>::infinity(), 0.0, 0, false};
  int total_iters = 0;
  for (const auto& s : starts) {
    StartResult r = descend(objective, s, options);
    total_iters += r.iterations;
    const double tie = 1e-14 * std::max(1.0, std::abs(best.value));
    const bool better = r.value < best.value - tie;
    const bool tied = std::abs(r.value - best.value) <= tie && lexicographically_less(r.x, best.x);
    if (best.x.size() == 0 || better || tied) best = std::move(r);
  }

  MinimizeResult out;
  out.x = best.x;
  out.value = best.value;
  out.kkt_residual = best.kkt;
  out.iterations = total_iters;
  if (!best.converged) out.flags |= Flag::DidNotConverge;

  const double norm = best.x.norm();
  const Eigen::VectorXd dir =
      norm > 0 ? Eigen::VectorXd(best.x / norm * scale)
               : Eigen::VectorXd(Eigen::VectorXd::Constant(n, scale / std::sqrt(static_cast<double>(n))));
  double prev = objective.value(dir);
  bool decreasing = true;
  for (double k : {10.0, 100.0, 1000.0}) {
    const double v = objective.value(k * dir);
    if (!(prev - v >= options.tolerance)) {
      decreasing = false;
      break;
    }
    prev = v;
  }
  if (decreasing) {
    const Eigen::VectorXd far = kRayFar * dir;
    const double limit = objective.value(far);
    if (limit < prev) {
      out.flags = Flag::Unbounded;
      if (limit < out.value) {
        out.value = limit;
        out.x = far;
      }
      out.kkt_residual = projected_gradient_norm(out.x, objective.gradient(out.x));
    }
  }
  return out;
}

}  // namespace waitsee
