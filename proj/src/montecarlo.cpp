#include "airysim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "airysim/error.hpp"

namespace airy {

void RunningMoments::merge(const RunningMoments& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
  const double d = o.mean - mean;
  const double tot = na + nb;
  mean += d * nb / tot;
  m2 += o.m2 + d * d * na * nb / tot;
  n += o.n;
}

void PowerSums::add(double x) {
  ++n;
  double xp = 1.0;
  for (auto& s : sums) {
    xp *= x;
    s.add(xp);
  }
}

void PowerSums::merge(const PowerSums& o) {
  if (sums.size() < o.sums.size()) sums.resize(o.sums.size());
  n += o.n;
  for (std::size_t p = 0; p < o.sums.size(); ++p) sums[p].merge(o.sums[p]);
}

double PowerSums::moment(int p) const {
  require(p >= 1 && static_cast<std::size_t>(p) <= sums.size(), ErrorCode::Domain, "moment order out of range");
  return n ? sums[static_cast<std::size_t>(p - 1)].value() / static_cast<double>(n) : 0.0;
}

double PowerSums::moment_std_error(int p) const {
  require(2 * p <= static_cast<int>(sums.size()), ErrorCode::Domain, "stderr needs the 2p-th power sum");
  if (n < 2) return 0.0;
  const double m = moment(p);
  const double var = (moment(2 * p) - m * m) * static_cast<double>(n) / static_cast<double>(n - 1);
  return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
}

std::uint64_t substream(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base * 0x9e3779b97f4a7c15ULL + index + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t ChunkPlan::chunk_size(std::uint64_t n_total, std::size_t i) const {
  const std::uint64_t c = n_chunks;
  return n_total / c + (i < n_total % c ? 1 : 0);
}

RngStream ChunkPlan::chunk_stream(std::size_t i) const { return RngStream(seed, substream(base_stream, i)); }

void for_each_chunk(const ChunkPlan& plan, const std::function<void(std::size_t, RngStream&)>& body) {
  require(plan.n_chunks >= 1, ErrorCode::Usage, "chunk plan needs at least one chunk");
  const unsigned workers = std::max(1u, std::min<unsigned>(plan.workers, static_cast<unsigned>(plan.n_chunks)));
  if (workers == 1) {
    for (std::size_t i = 0; i < plan.n_chunks; ++i) {
      RngStream s = plan.chunk_stream(i);
      body(i, s);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= plan.n_chunks) return;
        try {
          RngStream s = plan.chunk_stream(i);
          body(i, s);
        } catch (...) {
          std::lock_guard lk(err_mu);
          if (!first_error) first_error = std::current_exception();
          next.store(plan.n_chunks);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

MCEstimate mc_mean(const ChunkPlan& plan, std::uint64_t n_total, const std::function<double(RngStream&)>& sample) {
  require(n_total >= 1, ErrorCode::Domain, "need at least one sample");
  const auto acc = mc_reduce<RunningMoments>(
      plan, n_total, [] { return RunningMoments{}; }, [&](RunningMoments& a, RngStream& s) { a.add(sample(s)); });
  return MCEstimate{acc.mean, acc.std_error(), acc.n, plan.seed};
}

}  // namespace airy
