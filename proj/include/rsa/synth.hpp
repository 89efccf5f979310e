#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rsa/ingest.hpp"
#include "rsa/orders.hpp"

namespace rsa::synth {

// RNG stream layout (see CounterRng):
//   base pattern of condition s           stream s,                 counter h
//   noise of condition s in layer l       stream (l + 1) << 32 | s, counter h
//   random difficulty                     stream kDifficultyStream, counter s
//   band-shifted pair values              stream kBandStream,       counter pair ordinal
inline constexpr std::uint64_t kDifficultyStream = 0xD1FF1C0175000000ULL;
inline constexpr std::uint64_t kBandStream = 0xBA4D5000000000ULL;

struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t conditions = 256;
  std::size_t dims = 32;
  std::size_t layers = 4;
  std::vector<double> difficulty;     // one value in [0, 1] per condition; empty: linear
  double noise_gain = 1.0;
  std::vector<double> drift_profile;  // one value >= 0 per layer; empty: ramp
  std::string model = "synth";

  // Copy with empty difficulty / drift replaced by their defaults.
  SynthSpec resolved() const;
  void validate() const;
};

struct SynthDataset {
  ConditionSet conditions;
  std::vector<ActivityMatrix> layers;
  FeatureVector difficulty;
};

// Layer l pattern of condition s:
//   base_s + noise_gain * difficulty[s] * drift_profile[l] * eps_{s,l}
// with base_s and eps_{s,l} standard normal vectors. Identical specs give
// bit-identical output.
SynthDataset generate(const SynthSpec& spec);

// Condition ids "s1" .. "sN".
std::vector<std::string> condition_ids(std::size_t count);

std::vector<double> linear_difficulty(std::size_t count);
// Drift l / L for layer l = 1..L.
std::vector<double> ramp_drift(std::size_t layers);
std::vector<double> random_difficulty(std::uint64_t seed, std::size_t count);

// One single-token record per (condition, layer), for the JSON-lines format.
std::vector<TokenActivations> to_token_records(const SynthDataset& dataset);

struct BandSpec {
  std::uint64_t seed = 0;
  int n_layers = 24;
  double base = 0.7;
  double middle_shift = 0.2;
  double noise_sd = 0.05;
  std::string model = "synth";
};

// One value per unordered layer pair (top-down numbering): base, plus the
// shift when the pair falls in the middle band, plus Gaussian noise.
std::vector<PairValue> band_values(const BandSpec& spec);

}  // namespace rsa::synth
