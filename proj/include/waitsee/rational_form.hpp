#pragma once

// The wait-and-see delay as a function of the credit vector T has the shape
//
//   D(T) = c + (T' A T + b' T + a) / (r0 + 1' T)
//
// with A symmetric. Building A, b, a, c once makes the objective and its
// gradient cheap for the numerical optimiser.

#include "waitsee/model.hpp"

namespace waitsee {

template <typename Scalar>
struct RationalQuadraticForm {
  Scalar c{};
  Mat<Scalar> A;
  Vec<Scalar> b;
  Scalar a{};
  Scalar r0{};

  Scalar value(const Vec<Scalar>& T) const {
    const Scalar den = r0 + T.sum();
    if (!(den > 0)) return c;
    return c + (T.dot(A * T) + b.dot(T) + a) / den;
  }

  Vec<Scalar> gradient(const Vec<Scalar>& T) const {
    const Scalar den = r0 + T.sum();
    if (!(den > 0)) return Vec<Scalar>::Zero(T.size());
    const Scalar num = T.dot(A * T) + b.dot(T) + a;
    return (Scalar(2) * (A * T) + b) / den - Vec<Scalar>::Constant(T.size(), num / (den * den));
  }
};

template <typename Scalar>
RationalQuadraticForm<Scalar> rational_form(const ValidatedConfig<Scalar>& cfg) {
  const auto& d = cfg.loads();
  const auto& c = cfg.config();
  const auto n = static_cast<Eigen::Index>(cfg.size());
  const Scalar one(1), two(2);
  // Coefficient of (r0 + T0) in the idle-load term, which contributes K (r0 + T0)^2 to the numerator.
  const Scalar K = (d.rho0 * d.rho0 - d.rho.squaredNorm()) / (two * d.rho0 * (one - d.rho0));

  RationalQuadraticForm<Scalar> f;
  f.c = c.lambdas().dot(c.second_moments()) / (two * (one - d.rho0));
  f.r0 = d.r0;
  f.a = K * d.r0 * d.r0 + d.r0_2 / two;
  f.b.resize(n);
  f.A.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    f.b[i] = two * K * d.r0 + d.r0 * (d.rho0 - d.rho[i]) / d.rho0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j)
        f.A(i, i) = K + (one - two * d.rho[i]) * (d.rho0 - d.rho[i]) / (two * d.rho0 * (one - d.rho[i]));
      else
        f.A(i, j) = K + (d.rho0 - d.rho[i] - d.rho[j]) / (two * d.rho0);
    }
  }
  return f;
}

}  // namespace waitsee
