#pragma once

// Random configurations and plain-loop reference formulas shared by the tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "waitsee/model.hpp"

namespace testsupport {

using waitsee::Config;

struct RandomSpec {
  int n = 2;
  double rho0_min = 0.05;
  double rho0_max = 0.9;
  bool credits = true;
  bool deterministic_switch = false;
  bool allow_zero_switch = false;
};

inline Config random_config(std::mt19937_64& rng, const RandomSpec& spec) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rho0 = spec.rho0_min + (spec.rho0_max - spec.rho0_min) * u(rng);
  std::vector<double> w(static_cast<std::size_t>(spec.n));
  double wsum = 0.0;
  for (auto& x : w) wsum += (x = 0.05 + u(rng));
  Config cfg;
  for (int i = 0; i < spec.n; ++i) {
    const double b = 0.1 + 1.9 * u(rng);
    const double scv = u(rng) < 0.2 ? 0.0 : 3.0 * u(rng);
    const double rho = rho0 * w[static_cast<std::size_t>(i)] / wsum;
    const double T = spec.credits && u(rng) < 0.8 ? 3.0 * u(rng) : 0.0;
    cfg.stations.push_back({rho / b, b, b * b * (1.0 + scv), T});
    double r = 0.05 + 2.0 * u(rng);
    if (spec.allow_zero_switch && u(rng) < 0.2) r = 0.0;
    const double rscv = spec.deterministic_switch || u(rng) < 0.3 ? 0.0 : 3.0 * u(rng);
    cfg.switchovers.push_back(rscv == 0.0 ? waitsee::SwitchoverMoments<double>::fixed(r)
                                          : waitsee::SwitchoverMoments<double>::from_moments(r, r * r * (1.0 + rscv)));
  }
  return cfg;
}

inline Config two_station(double lambda1, double lambda2, double b, double b2, double r, double r2, double T1 = 0,
                          double T2 = 0) {
  Config cfg;
  cfg.stations = {{lambda1, b, b2, T1}, {lambda2, b, b2, T2}};
  cfg.switchovers = {waitsee::SwitchoverMoments<double>::from_moments(r, r2),
                     waitsee::SwitchoverMoments<double>::from_moments(r, r2)};
  return cfg;
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

// Exhaustive-service delay written out term by term.
inline double ref_exhaustive(const Config& c) {
  double rho0 = 0, sq = 0, lb2 = 0, r0 = 0, r2 = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double rho = c.stations[i].lambda * c.stations[i].b;
    rho0 += rho;
    sq += rho * rho;
    lb2 += c.stations[i].lambda * c.stations[i].b2;
    r0 += c.switchovers[i].r;
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    r2 += c.switchovers[i].r2;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (i != j) r2 += c.switchovers[i].r * c.switchovers[j].r;
  }
  double d = lb2 / (2 * (1 - rho0)) + r0 * (rho0 * rho0 - sq) / (2 * rho0 * (1 - rho0));
  if (r0 > 0) d += r2 / (2 * r0);
  return d;
}

// Wait-and-see delay written out with explicit double loops over station pairs.
inline double ref_wait_and_see(const Config& c) {
  const std::size_t n = c.size();
  std::vector<double> rho(n), T(n);
  double rho0 = 0, sq = 0, lb2 = 0, r0 = 0, r2 = 0, T0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = c.stations[i].lambda * c.stations[i].b;
    T[i] = c.stations[i].T;
    rho0 += rho[i];
    sq += rho[i] * rho[i];
    lb2 += c.stations[i].lambda * c.stations[i].b2;
    r0 += c.switchovers[i].r;
    T0 += T[i];
    r2 += c.switchovers[i].r2;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) r2 += c.switchovers[i].r * c.switchovers[j].r;
  const double x = r0 + T0;
  double d = lb2 / (2 * (1 - rho0)) + x * (rho0 * rho0 - sq) / (2 * rho0 * (1 - rho0));
  if (x <= 0) return d;
  double lin = 0.5 * rho0 * r2;
  for (std::size_t i = 0; i < n; ++i) lin += r0 * T[i] * (rho0 - rho[i]);
  d += lin / (rho0 * x);
  double quad = 0;
  for (std::size_t i = 0; i < n; ++i) quad += T[i] * T[i] * (1 - 2 * rho[i]) * (rho0 - rho[i]) / (2 * (1 - rho[i]));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) quad += T[i] * T[j] * (rho0 - rho[i] - rho[j]);
  return d + quad / (x * rho0);
}

}  // namespace testsupport
