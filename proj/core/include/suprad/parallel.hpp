#ifndef SUPRAD_PARALLEL_HPP
#define SUPRAD_PARALLEL_HPP

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace suprad {

// Index-parallel loop over [0, n).  Work items must be independent; results
// keyed by index so the outcome does not depend on scheduling or job count.
inline void parallel_for(int n, int jobs,
                         const std::function<void(int)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
  };
  std::vector<std::thread> pool;
  const int nw = std::min(jobs, n);
  pool.reserve(static_cast<std::size_t>(nw));
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace suprad

#endif
