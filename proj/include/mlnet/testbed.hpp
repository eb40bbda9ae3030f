#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "mlnet/ingest.hpp"

namespace mlnet {

/// xorshift64* (Vigna). State transition per draw:
///   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; output x * 0x2545F4914F6CDD1D.
/// A zero seed is replaced by 0x9E3779B97F4A7C15 (the state must be non-zero).
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);

  std::uint64_t next();
  /// Top 53 bits scaled to [0, 1).
  double next_double();
  /// Box-Muller cosine branch from two consecutive uniforms, u1 in (0, 1].
  double next_normal();

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Seed of the stream that draws layer k: seed ^ ((k + 1) * golden gamma).
std::uint64_t layer_seed(std::uint64_t seed, std::size_t layer);

struct ErdosRenyi {
  double p = 0.1;
};

/// Banks 0..core_size-1 form the core.
struct CorePeriphery {
  std::size_t core_size = 5;
  double p_core = 0.8;
  double p_cross = 0.2;
  double p_periph = 0.02;
};

struct GenSpec {
  std::variant<ErdosRenyi, CorePeriphery> model = ErdosRenyi{};
  std::size_t n = 10;
  std::size_t l = 1;
  double mu = 0.0;     // log-normal location
  double sigma = 1.0;  // log-normal scale
  double omega = 0.0;  // multiplex coupling
  std::uint64_t seed = 1;
  std::string period = "2013-06-30";
};

/// Per layer, visits ordered pairs (i, j), i != j, row-major; each pair draws
/// one uniform and, on success, one log-normal weight. When every edge
/// probability is zero each layer instead holds the cycle 0->1->...->n-1->0.
/// Capitals are 1.5 x total out-strength (banks without exposures get 1.5 x
/// the mean positive out-strength).
NetworkBundle generate_network(const GenSpec& spec);

/// Bank identifier used by the generator for index i of n banks.
std::string generated_bank_id(std::size_t i, std::size_t n);

}  // namespace mlnet
