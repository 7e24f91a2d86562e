#include "waitsee/distributions.hpp"

#include <cmath>
#include <string>

#include "waitsee/errors.hpp"
#include "waitsee/model.hpp"

namespace waitsee {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kScvTol = 1e-12;

}  // namespace

double mean(const DistributionSpec& d) {
  return std::visit(overloaded{[](const Deterministic& x) { return x.value; },
                               [](const Exponential& x) { return 1.0 / x.rate; },
                               [](const Erlang& x) { return x.k / x.rate; },
                               [](const HyperExponential2& x) { return x.p / x.mu1 + (1.0 - x.p) / x.mu2; },
                               [](const Gamma& x) { return x.shape * x.scale; }},
                    d);
}

double second_moment(const DistributionSpec& d) {
  return std::visit(
      overloaded{[](const Deterministic& x) { return x.value * x.value; },
                 [](const Exponential& x) { return 2.0 / (x.rate * x.rate); },
                 [](const Erlang& x) { return x.k * (x.k + 1.0) / (x.rate * x.rate); },
                 [](const HyperExponential2& x) { return 2.0 * (x.p / (x.mu1 * x.mu1) + (1.0 - x.p) / (x.mu2 * x.mu2)); },
                 [](const Gamma& x) { return x.shape * (x.shape + 1.0) * x.scale * x.scale; }},
      d);
}

std::string_view kind_name(const DistributionSpec& d) {
  return std::visit(overloaded{[](const Deterministic&) { return std::string_view("deterministic"); },
                               [](const Exponential&) { return std::string_view("exponential"); },
                               [](const Erlang&) { return std::string_view("erlang"); },
                               [](const HyperExponential2&) { return std::string_view("hyperexponential2"); },
                               [](const Gamma&) { return std::string_view("gamma"); }},
                    d);
}

void check_parameters(const DistributionSpec& d) {
  auto fail = [](const std::string& what) { throw PollingError(ErrorKind::InvalidArgument, what); };
  std::visit(overloaded{[&](const Deterministic& x) {
                          if (!(x.value >= 0) || !std::isfinite(x.value)) fail("deterministic value must be >= 0");
                        },
                        [&](const Exponential& x) {
                          if (!(x.rate > 0) || !std::isfinite(x.rate)) fail("exponential rate must be > 0");
                        },
                        [&](const Erlang& x) {
                          if (x.k < 1 || !(x.rate > 0)) fail("erlang needs k >= 1 and rate > 0");
                        },
                        [&](const HyperExponential2& x) {
                          if (!(x.p >= 0 && x.p <= 1) || !(x.mu1 > 0) || !(x.mu2 > 0))
                            fail("hyperexponential2 needs p in [0,1] and positive rates");
                        },
                        [&](const Gamma& x) {
                          if (!(x.shape > 0) || !(x.scale > 0)) fail("gamma needs positive shape and scale");
                        }},
             d);
}

DistributionSpec fit_two_moment(double m, double m2) {
  if (m == 0.0 && m2 == 0.0) return Deterministic{0.0};
  if (!(m > 0) || !std::isfinite(m) || !std::isfinite(m2))
    throw PollingError(ErrorKind::InvalidMoment, "fit needs a positive finite mean");
  if (m2 < m * m && !nearly_equal(m2, m * m))
    throw PollingError(ErrorKind::InvalidMoment, "second moment below squared mean");
  const double scv = m2 / (m * m) - 1.0;
  if (scv <= kScvTol) return Deterministic{m};
  if (std::abs(scv - 1.0) <= kScvTol) return Exponential{1.0 / m};
  if (scv < 1.0) {
    const double shape = 1.0 / scv;
    return Gamma{shape, m / shape};
  }
  // Balanced means: p1/mu1 = p2/mu2 = m/2.
  const double p = 0.5 * (1.0 + std::sqrt((scv - 1.0) / (scv + 1.0)));
  return HyperExponential2{p, 2.0 * p / m, 2.0 * (1.0 - p) / m};
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Sampler::Impl Sampler::make(const DistributionSpec& spec) {
  check_parameters(spec);
  return std::visit(
      overloaded{[](const Deterministic& x) -> Impl { return Fixed{x.value}; },
                 [](const Exponential& x) -> Impl { return std::exponential_distribution<double>(x.rate); },
                 [](const Erlang& x) -> Impl {
                   return std::gamma_distribution<double>(static_cast<double>(x.k), 1.0 / x.rate);
                 },
                 [](const HyperExponential2& x) -> Impl {
                   return Mixture{x.p, std::exponential_distribution<double>(x.mu1),
                                  std::exponential_distribution<double>(x.mu2)};
                 },
                 [](const Gamma& x) -> Impl { return std::gamma_distribution<double>(x.shape, x.scale); }},
      spec);
}

Sampler::Sampler(const DistributionSpec& spec) : impl_(make(spec)) {}

double Sampler::operator()(Rng& rng) {
  return std::visit(overloaded{[](Fixed& f) { return f.value; },
                               [&rng](std::exponential_distribution<double>& e) { return e(rng); },
                               [&rng](std::gamma_distribution<double>& g) { return g(rng); },
                               [&rng](Mixture& m) { return m.coin(rng) < m.p ? m.first(rng) : m.second(rng); }},
                    impl_);
}

}  // namespace waitsee
