#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "quadrec/types.hpp"

namespace quadrec {

// Number of worker threads: QUADREC_THREADS env var if set, else the
// hardware count. Callers may also pass an explicit budget.
inline int thread_budget() {
  if (const char* env = std::getenv("QUADREC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count). Results must be written to per-index
// slots; the schedule is dynamic, so fn must not depend on ordering.
template <typename Fn>
void parallel_for(Index count, Fn&& fn, int threads = 0) {
  if (threads <= 0) threads = thread_budget();
  if (count <= 0) return;
  if (threads == 1 || count == 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (;;) {
      const Index i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<Index>(threads, count)) - 1;
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

// Fixed-lane sum decomposition. Index range [0, count) is split into
// kSumLanes contiguous blocks, partial results are produced per lane and
// combined in lane order. The floating-point result is therefore identical
// whether lanes run sequentially or on any number of threads.
inline constexpr int kSumLanes = 8;

struct LaneRange {
  Index begin = 0;
  Index end = 0;
};

inline LaneRange lane_range(Index count, int lane) {
  const Index base = count / kSumLanes;
  const Index extra = count % kSumLanes;
  const Index begin = lane * base + std::min<Index>(lane, extra);
  const Index len = base + (lane < extra ? 1 : 0);
  return {begin, begin + len};
}

// accumulate(lane_index, range) -> Partial; combine(acc, Partial) folds the
// per-lane partials in lane order. `parallel` only changes wall time.
template <typename Partial, typename Accumulate, typename Combine>
void lane_sum(Index count, Partial& acc, Accumulate&& accumulate,
              Combine&& combine, bool parallel) {
  std::vector<Partial> partials(kSumLanes);
  auto run = [&](Index lane) {
    partials[lane] = accumulate(static_cast<int>(lane), lane_range(count, static_cast<int>(lane)));
  };
  if (parallel) {
    parallel_for(kSumLanes, run);
  } else {
    for (Index lane = 0; lane < kSumLanes; ++lane) run(lane);
  }
  for (int lane = 0; lane < kSumLanes; ++lane) combine(acc, partials[lane]);
}

}  // namespace quadrec
