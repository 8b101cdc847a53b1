#include <algorithm>

#include "net_row.hpp"
#include "solarcast/kernels.hpp"

namespace solarcast::kernels {

void forward_batch_serial(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> out) {
  for (std::size_t k = 0; k < n; ++k) out[k] = detail::forward_row(net, x.data() + k * net.inputs);
}

void jacobian_serial(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> jac,
                     std::span<double> y_hat) {
  const std::size_t p = net.parameter_count();
  for (std::size_t k = 0; k < n; ++k)
    y_hat[k] = detail::jacobian_row(net, x.data() + k * net.inputs, jac.data() + k * p);
}

void normal_equations_serial(std::span<const double> jac, std::size_t n, std::size_t p, std::span<const double> e,
                             std::span<double> jtj, std::span<double> jte) {
  std::fill(jtj.begin(), jtj.end(), 0.0);
  std::fill(jte.begin(), jte.end(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = jac.data() + k * p;
    for (std::size_t i = 0; i < p; ++i) {
      const double ri = row[i];
      double* dst = jtj.data() + i * p;
      for (std::size_t j = i; j < p; ++j) dst[j] += ri * row[j];
      jte[i] += ri * e[k];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) jtj[i * p + j] = jtj[j * p + i];
}

}  // namespace solarcast::kernels
