#include <algorithm>

#include "net_row.hpp"
#include "solarcast/kernels.hpp"

namespace solarcast::kernels {

namespace {

// Rows of J streamed per pass; keeps a chunk resident in cache while every
// thread sweeps its own rows of J^T J.
constexpr std::size_t kChunk = 64;

}  // namespace

void forward_batch_parallel(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> out) {
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    const auto u = static_cast<std::size_t>(k);
    out[u] = detail::forward_row(net, x.data() + u * net.inputs);
  }
}

void jacobian_parallel(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> jac,
                       std::span<double> y_hat) {
  const std::size_t p = net.parameter_count();
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < count; ++k) {
    const auto u = static_cast<std::size_t>(k);
    y_hat[u] = detail::jacobian_row(net, x.data() + u * net.inputs, jac.data() + u * p);
  }
}

void normal_equations_parallel(std::span<const double> jac, std::size_t n, std::size_t p, std::span<const double> e,
                               std::span<double> jtj, std::span<double> jte) {
  std::fill(jtj.begin(), jtj.end(), 0.0);
  std::fill(jte.begin(), jte.end(), 0.0);
  const auto rows = static_cast<long>(p);
#pragma omp parallel
  {
    for (std::size_t k0 = 0; k0 < n; k0 += kChunk) {
      const std::size_t k1 = std::min(n, k0 + kChunk);
      // Each output row i is owned by one thread for the whole chunk, and the
      // chunks are visited in order, so every entry accumulates samples in
      // ascending order exactly as the serial kernel does.
#pragma omp for schedule(static, 1)
      for (long il = 0; il < rows; ++il) {
        const auto i = static_cast<std::size_t>(il);
        double* dst = jtj.data() + i * p;
        double g = jte[i];
        for (std::size_t k = k0; k < k1; ++k) {
          const double* row = jac.data() + k * p;
          const double ri = row[i];
          for (std::size_t j = i; j < p; ++j) dst[j] += ri * row[j];
          g += ri * e[k];
        }
        jte[i] = g;
      }
    }
#pragma omp for schedule(static)
    for (long il = 0; il < rows; ++il) {
      const auto i = static_cast<std::size_t>(il);
      for (std::size_t j = 0; j < i; ++j) jtj[i * p + j] = jtj[j * p + i];
    }
  }
}

}  // namespace solarcast::kernels
