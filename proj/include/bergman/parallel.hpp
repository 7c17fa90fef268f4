#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bergman {

// Caps the number of threads used by integration and grid searches.
// Results never depend on this value.
struct Parallelism {
  unsigned workers = 1;
};

namespace detail {

// Runs body(i) for i in [0, count). Work items are handed out dynamically,
// so body must write only to slot i of any shared output. If several items
// throw, the exception of the lowest index is rethrown.
template <typename Body>
void parallel_for(std::size_t count, Parallelism par, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, par.workers), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Pairwise tree sum in a fixed order.
inline double pairwise_sum(std::vector<double> values) {
  if (values.empty()) return 0.0;
  while (values.size() > 1) {
    std::size_t half = (values.size() + 1) / 2;
    for (std::size_t i = 0; i < values.size() / 2; ++i) values[i] = values[2 * i] + values[2 * i + 1];
    if (values.size() % 2) values[half - 1] = values.back();
    values.resize(half);
  }
  return values.front();
}

}  // namespace detail

// Sums over [0, count) in fixed-size blocks: block_sum(lo, hi) must return the
// sequential sum of its range. Block sums are then combined pairwise. Block
// boundaries do not depend on the worker count, so the result is bit-identical
// for any Parallelism.
template <typename BlockSum>
double deterministic_block_sum(std::size_t count, BlockSum&& block_sum, Parallelism par = {}) {
  constexpr std::size_t block = 512;
  const std::size_t blocks = (count + block - 1) / block;
  std::vector<double> partial(blocks, 0.0);
  detail::parallel_for(blocks, par, [&](std::size_t b) {
    const std::size_t lo = b * block;
    partial[b] = block_sum(lo, std::min(count, lo + block));
  });
  return detail::pairwise_sum(std::move(partial));
}

template <typename Term>
double deterministic_sum(std::size_t count, Term&& term, Parallelism par = {}) {
  return deterministic_block_sum(
      count,
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        return s;
      },
      par);
}

}  // namespace bergman
