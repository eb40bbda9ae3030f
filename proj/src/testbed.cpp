#include "mlnet/testbed.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mlnet/error.hpp"

namespace mlnet {

Xorshift64Star::Xorshift64Star(std::uint64_t seed) : state_(seed == 0 ? kGoldenGamma : seed) {}

std::uint64_t Xorshift64Star::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

double Xorshift64Star::next_double() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xorshift64Star::next_normal() {
  const double u1 = 1.0 - next_double();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t layer_seed(std::uint64_t seed, std::size_t layer) {
  return seed ^ (static_cast<std::uint64_t>(layer + 1) * kGoldenGamma);
}

std::string generated_bank_id(std::size_t i, std::size_t n) {
  std::size_t width = 3;
  for (std::size_t m = n > 0 ? n - 1 : 0; m >= 1000; m /= 10) ++width;
  std::string digits = std::to_string(i);
  return "B" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

NetworkBundle generate_network(const GenSpec& spec) {
  auto valid_p = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (spec.n < 2 || spec.l < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 2 and l >= 1");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.mu) || !(spec.omega >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "need finite mu, sigma >= 0 and omega >= 0");
  }
  bool all_zero = false;
  if (const auto* er = std::get_if<ErdosRenyi>(&spec.model)) {
    if (!valid_p(er->p)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
    all_zero = er->p == 0.0;
  } else {
    const auto& cp = std::get<CorePeriphery>(spec.model);
    if (!valid_p(cp.p_core) || !valid_p(cp.p_cross) || !valid_p(cp.p_periph)) {
      throw Error(ErrorCode::InvalidArgument, "probabilities must lie in [0, 1]");
    }
    if (cp.core_size > spec.n) throw Error(ErrorCode::InvalidArgument, "core larger than n");
    all_zero = cp.p_core == 0.0 && cp.p_cross == 0.0 && cp.p_periph == 0.0;
  }
  auto edge_probability = [&](std::size_t i, std::size_t j) {
    if (const auto* er = std::get_if<ErdosRenyi>(&spec.model)) return er->p;
    const auto& cp = std::get<CorePeriphery>(spec.model);
    const bool ci = i < cp.core_size;
    const bool cj = j < cp.core_size;
    if (ci && cj) return cp.p_core;
    if (ci || cj) return cp.p_cross;
    return cp.p_periph;
  };

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < spec.n; ++i) ids.push_back(generated_bank_id(i, spec.n));
  NodeRegistry registry(ids);

  LayerRegistry names;
  auto canonical = LayerRegistry::canonical();
  for (std::size_t k = 0; k < spec.l; ++k) {
    names.add(k < kCanonicalLayerCount ? canonical.names()[k] : "LAYER_" + std::to_string(k));
  }

  std::vector<LayerMatrix> layers;
  std::vector<double> out_strength(spec.n, 0.0);
  for (std::size_t k = 0; k < spec.l; ++k) {
    Xorshift64Star rng(layer_seed(spec.seed, k));
    auto weight = [&] { return std::exp(spec.mu + spec.sigma * rng.next_normal()); };
    std::vector<Triplet> t;
    if (all_zero) {
      for (std::size_t i = 0; i < spec.n; ++i) t.push_back({i, (i + 1) % spec.n, weight()});
    } else {
      for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = 0; j < spec.n; ++j) {
          if (i == j) continue;
          if (rng.next_double() < edge_probability(i, j)) t.push_back({i, j, weight()});
        }
      }
    }
    for (const auto& e : t) out_strength[e.row] += e.value;
    layers.push_back({names.at(k), CsrMatrix(spec.n, spec.n, std::move(t))});
  }

  double positive_sum = 0.0;
  std::size_t positive = 0;
  for (double s : out_strength) {
    if (s > 0.0) {
      positive_sum += s;
      ++positive;
    }
  }
  const double fallback = positive > 0 ? positive_sum / static_cast<double>(positive) : 1.0 / 1.5;

  NetworkBundle b;
  b.period = spec.period;
  for (std::size_t i = 0; i < spec.n; ++i) {
    b.capitals.emplace_back(1.5 * (out_strength[i] > 0.0 ? out_strength[i] : fallback));
  }
  b.network = assemble_multilayer(std::move(registry), std::move(layers),
                                  MultiplexCoupling{spec.omega});
  return b;
}

}  // namespace mlnet
