#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "airysim/rng.hpp"

namespace airy {

/// Result of a Monte Carlo average.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

/// Streaming mean/variance (Welford), mergeable in a fixed order (Chan et al.).
struct RunningMoments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningMoments& o);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

/// Neumaier-compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  void merge(const CompensatedSum& o) {
    add(o.sum);
    add(o.c);
  }
  double value() const { return sum + c; }
};

/// Compensated power sums sum x^p for p = 1..max_power.
struct PowerSums {
  std::uint64_t n = 0;
  std::vector<CompensatedSum> sums;

  explicit PowerSums(int max_power = 0) : sums(static_cast<std::size_t>(max_power)) {}
  void add(double x);
  void merge(const PowerSums& o);
  /// Sample mean of x^p and its standard error.
  double moment(int p) const;
  double moment_std_error(int p) const;
};

/// Fixed partition of a sample budget into chunks. Chunk i draws from
/// RngStream(seed, substream(base_stream, i)) and the chunk count does not
/// depend on the worker count, so results are bit-identical for any number
/// of workers.
struct ChunkPlan {
  std::uint64_t seed = 0;
  std::uint64_t base_stream = 0;
  std::size_t n_chunks = 64;
  unsigned workers = 1;

  /// Samples in chunk i when n_total samples are split as evenly as possible.
  std::uint64_t chunk_size(std::uint64_t n_total, std::size_t i) const;
  RngStream chunk_stream(std::size_t i) const;
};

/// Mix a base stream id and an index into a new stream id (splitmix64 finalizer).
std::uint64_t substream(std::uint64_t base, std::uint64_t index);

/// Run body(chunk_index, RngStream&) for every chunk on plan.workers threads.
/// Chunks are claimed dynamically; callers store per-chunk results by index
/// and reduce them in chunk order.
void for_each_chunk(const ChunkPlan& plan, const std::function<void(std::size_t, RngStream&)>& body);

/// Average of `sample` over n_total draws under the chunk plan.
MCEstimate mc_mean(const ChunkPlan& plan, std::uint64_t n_total,
                   const std::function<double(RngStream&)>& sample);

/// Per-chunk accumulators of any mergeable type, reduced in chunk order.
template <typename Acc, typename Init, typename Body>
Acc mc_reduce(const ChunkPlan& plan, std::uint64_t n_total, Init init, Body body) {
  std::vector<Acc> parts(plan.n_chunks, init());
  for_each_chunk(plan, [&](std::size_t i, RngStream& s) {
    const std::uint64_t m = plan.chunk_size(n_total, i);
    for (std::uint64_t j = 0; j < m; ++j) body(parts[i], s);
  });
  Acc total = init();
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace airy
