#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <variant>

namespace waitsee {

struct Deterministic {
  double value = 0.0;
};
struct Exponential {
  double rate = 1.0;
};
struct Erlang {
  int k = 1;
  double rate = 1.0;
};
/// Mixture: with probability p an Exp(mu1) draw, otherwise Exp(mu2).
struct HyperExponential2 {
  double p = 0.5;
  double mu1 = 1.0;
  double mu2 = 1.0;
};
struct Gamma {
  double shape = 1.0;
  double scale = 1.0;
};

using DistributionSpec = std::variant<Deterministic, Exponential, Erlang, HyperExponential2, Gamma>;

double mean(const DistributionSpec& d);
double second_moment(const DistributionSpec& d);
std::string_view kind_name(const DistributionSpec& d);

/// Throws InvalidArgument on non-positive rates, shapes or probabilities outside [0, 1].
void check_parameters(const DistributionSpec& d);

/// A law with exactly the given first two moments. Zero variance gives a
/// point mass, squared coefficient of variation 1 an exponential, below 1 a
/// gamma with shape 1/scv and above 1 a balanced-means two-phase
/// hyperexponential. mean = m2 = 0 is accepted as the point mass at zero.
DistributionSpec fit_two_moment(double mean, double m2);

using Rng = std::mt19937_64;

/// Seed for stream `stream` derived from a master seed by a splitmix64 step,
/// so independent streams never share state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

class Sampler {
 public:
  explicit Sampler(const DistributionSpec& spec);
  double operator()(Rng& rng);

 private:
  struct Fixed {
    double value;
  };
  struct Mixture {
    double p;
    std::exponential_distribution<double> first;
    std::exponential_distribution<double> second;
    std::uniform_real_distribution<double> coin{0.0, 1.0};
  };
  using Impl = std::variant<Fixed, std::exponential_distribution<double>, std::gamma_distribution<double>, Mixture>;
  static Impl make(const DistributionSpec& spec);
  Impl impl_;
};

}  // namespace waitsee
