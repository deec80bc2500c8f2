#include "facet/reduce.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace facet {

namespace {

// Pairwise reduction of an already materialized buffer, in place logic kept
// simple: halve recursively down to runs of 8.
double pairwise(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise(data, half) + pairwise(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise(values.data(), values.size());
}

double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term,
                         int threads) {
  auto wrapped = [&term](std::size_t i, double* out) { out[0] = term(i); };
  return deterministic_sum_multi(n, 1, wrapped, threads)[0];
}

double deterministic_sum(std::span<const double> values, int threads) {
  return deterministic_sum(
      values.size(), [&values](std::size_t i) { return values[i]; }, threads);
}

std::vector<double> deterministic_sum_multi(
    std::size_t n, std::size_t m,
    const std::function<void(std::size_t, double*)>& term, int threads) {
  if (m == 0) return {};
  if (n == 0) return std::vector<double>(m, 0.0);

  const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  // partials[b*m + k]: block b, accumulator k.
  std::vector<double> partials(nblocks * m, 0.0);

  auto reduce_block = [&](std::size_t b) {
    const std::size_t begin = b * kReduceBlock;
    const std::size_t end = std::min(begin + kReduceBlock, n);
    const std::size_t len = end - begin;
    std::vector<double> terms(len * m);
    double slot[16];
    double* scratch = m <= 16 ? slot : new double[m];
    for (std::size_t i = 0; i < len; ++i) {
      term(begin + i, scratch);
      for (std::size_t k = 0; k < m; ++k) terms[k * len + i] = scratch[k];
    }
    if (scratch != slot) delete[] scratch;
    for (std::size_t k = 0; k < m; ++k)
      partials[b * m + k] = pairwise(terms.data() + k * len, len);
  };

  if (threads <= 1 || nblocks == 1) {
    for (std::size_t b = 0; b < nblocks; ++b) reduce_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        reduce_block(b);
      }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), nblocks);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Combine per-block partials, one fixed tree per accumulator.
  std::vector<double> out(m);
  std::vector<double> column(nblocks);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t b = 0; b < nblocks; ++b) column[b] = partials[b * m + k];
    out[k] = pairwise(column.data(), nblocks);
  }
  return out;
}

}  // namespace facet
