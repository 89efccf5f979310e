#include "rsa/synth.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rsa/counter_rng.hpp"
#include "rsa/error.hpp"
#include "rsa/parallel.hpp"

namespace rsa::synth {

SynthSpec SynthSpec::resolved() const {
  SynthSpec out = *this;
  if (out.difficulty.empty()) out.difficulty = linear_difficulty(conditions);
  if (out.drift_profile.empty()) out.drift_profile = ramp_drift(layers);
  return out;
}

void SynthSpec::validate() const {
  if (conditions < 8) throw ValidationError("synthetic data needs at least 8 conditions");
  if (dims < 4) throw ValidationError("synthetic data needs at least 4 dimensions");
  if (layers < 2) throw ValidationError("synthetic data needs at least 2 layers");
  if (difficulty.size() != conditions) throw ValidationError("difficulty length must equal condition count");
  if (!std::ranges::all_of(difficulty, [](double d) { return d >= 0.0 && d <= 1.0; })) {
    throw ValidationError("difficulty values must lie in [0, 1]");
  }
  if (!(noise_gain >= 0.0) || !std::isfinite(noise_gain)) throw ValidationError("noise gain must be >= 0");
  if (drift_profile.size() != layers) throw ValidationError("drift profile length must equal layer count");
  if (!std::ranges::all_of(drift_profile, [](double d) { return d >= 0.0 && std::isfinite(d); })) {
    throw ValidationError("drift profile values must be finite and >= 0");
  }
  if (model.empty() || model.find(':') != std::string::npos) throw ValidationError("invalid model tag");
}

std::vector<std::string> condition_ids(std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t s = 1; s <= count; ++s) ids.push_back(fmt::format("s{}", s));
  return ids;
}

std::vector<double> linear_difficulty(std::size_t count) {
  std::vector<double> out(count, 0.0);
  if (count < 2) return out;
  for (std::size_t s = 0; s < count; ++s) {
    out[s] = static_cast<double>(s) / static_cast<double>(count - 1);
  }
  return out;
}

std::vector<double> ramp_drift(std::size_t layers) {
  std::vector<double> out;
  out.reserve(layers);
  for (std::size_t l = 1; l <= layers; ++l) out.push_back(static_cast<double>(l) / static_cast<double>(layers));
  return out;
}

std::vector<double> random_difficulty(std::uint64_t seed, std::size_t count) {
  const CounterRng rng(seed, kDifficultyStream);
  std::vector<double> out(count);
  for (std::size_t s = 0; s < count; ++s) out[s] = rng.uniform(s);
  return out;
}

SynthDataset generate(const SynthSpec& requested) {
  const SynthSpec spec = requested.resolved();
  spec.validate();
  const std::size_t n = spec.conditions;
  const std::size_t h = spec.dims;
  ConditionSet conditions(condition_ids(n));

  std::vector<double> base(n * h);
  parallel::for_each_index(n, [&](std::size_t s) {
    const CounterRng rng(spec.seed, s);
    for (std::size_t d = 0; d < h; ++d) base[s * h + d] = rng.gaussian(d);
  });

  SynthDataset out{conditions, {}, FeatureVector{conditions, spec.difficulty, "difficulty"}};
  for (std::size_t layer = 0; layer < spec.layers; ++layer) {
    std::vector<double> data(base);
    parallel::for_each_index(n, [&](std::size_t s) {
      const double scale = spec.noise_gain * spec.difficulty[s] * spec.drift_profile[layer];
      if (scale == 0.0) return;
      const CounterRng rng(spec.seed, ((static_cast<std::uint64_t>(layer) + 1) << 32) | s);
      for (std::size_t d = 0; d < h; ++d) data[s * h + d] += scale * rng.gaussian(d);
    });
    out.layers.emplace_back(conditions, LayerId{spec.model, static_cast<int>(layer) + 1}, h,
                            std::move(data));
  }
  return out;
}

std::vector<TokenActivations> to_token_records(const SynthDataset& dataset) {
  std::vector<TokenActivations> records;
  for (const auto& layer : dataset.layers) {
    for (std::size_t s = 0; s < layer.rows(); ++s) {
      const auto row = layer.row(s);
      records.push_back(TokenActivations{dataset.conditions.id(s), layer.layer(), layer.cols(),
                                         std::vector<double>(row.begin(), row.end())});
    }
  }
  return records;
}

std::vector<PairValue> band_values(const BandSpec& spec) {
  const CounterRng rng(spec.seed, kBandStream);
  std::vector<PairValue> out;
  std::uint64_t ordinal = 0;
  for (int i = 1; i <= spec.n_layers; ++i) {
    for (int j = i + 1; j <= spec.n_layers; ++j) {
      auto pair = LayerPair::make(LayerId{spec.model, i}, LayerId{spec.model, j});
      double value = spec.base + spec.noise_sd * rng.gaussian(ordinal++);
      if (assign_layer_group(pair, spec.n_layers) == LayerGroup::middle) value += spec.middle_shift;
      out.push_back(PairValue{std::move(pair), value});
    }
  }
  return out;
}

}  // namespace rsa::synth
