#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "rsa/orders.hpp"
#include "rsa/parallel.hpp"
#include "rsa/rdm.hpp"
#include "rsa/synth.hpp"

using namespace rsa;

namespace {

struct ThreadLimit {
  explicit ThreadLimit(unsigned n) { parallel::set_thread_limit(n); }
  ~ThreadLimit() { parallel::set_thread_limit(0); }
};

}  // namespace

TEST(Parallel, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 3u, 8u}) {
    ThreadLimit limit(threads);
    for (std::size_t count : {0u, 1u, 7u, 1000u}) {
      std::vector<std::atomic<int>> hits(count);
      parallel::for_each_index(count, [&](std::size_t i) { hits[i].fetch_add(1); });
      EXPECT_TRUE(std::ranges::all_of(hits, [](const auto& h) { return h.load() == 1; }));
    }
  }
}

TEST(Parallel, PropagatesFirstChunkError) {
  ThreadLimit limit(4);
  try {
    parallel::for_each_index(100, [](std::size_t i) {
      if (i == 10) throw std::runtime_error("ten");
      if (i == 90) throw std::runtime_error("ninety");
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "ten");
  }
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  synth::SynthSpec spec;
  spec.conditions = 80;
  spec.dims = 12;
  spec.layers = 2;

  auto run = [&](unsigned threads) {
    ThreadLimit limit(threads);
    const auto data = synth::generate(spec);
    std::vector<double> out;
    for (auto measure : {Measure::correlation, Measure::euclidean, Measure::mahalanobis}) {
      std::optional<CovarianceEstimate> cov;
      if (measure == Measure::mahalanobis) cov = estimate_covariance(data.layers[0]);
      const auto a = build_rdm(data.layers[0], measure, cov);
      const auto b = build_rdm(data.layers[1], measure, cov);
      out.insert(out.end(), a.data().begin(), a.data().end());
      const auto v = per_condition_agreement(a, b);
      out.insert(out.end(), v.agreement.begin(), v.agreement.end());
    }
    return out;
  };

  const auto serial = run(1);
  EXPECT_EQ(run(2), serial);
  EXPECT_EQ(run(8), serial);
}
