#pragma once

#include <cmath>
#include <cstddef>

#include "solarcast/kernels.hpp"

namespace solarcast::kernels::detail {

inline double forward_row(const NetView& net, const double* x) noexcept {
  const std::size_t in = net.inputs, h = net.hidden;
  const double* w1 = net.params.data();
  const double* b1 = w1 + h * in;
  const double* w2 = b1 + h;
  double out = w2[h];
  for (std::size_t i = 0; i < h; ++i) {
    double a = b1[i];
    const double* row = w1 + i * in;
    for (std::size_t j = 0; j < in; ++j) a += row[j] * x[j];
    out += w2[i] * std::tanh(a);
  }
  return out;
}

// Writes d e / d params (e = y - y_hat) for one sample; returns y_hat.
inline double jacobian_row(const NetView& net, const double* x, double* jrow) noexcept {
  const std::size_t in = net.inputs, h = net.hidden;
  const double* w1 = net.params.data();
  const double* b1 = w1 + h * in;
  const double* w2 = b1 + h;
  double* d_w1 = jrow;
  double* d_b1 = jrow + h * in;
  double* d_w2 = d_b1 + h;
  double out = w2[h];
  for (std::size_t i = 0; i < h; ++i) {
    double a = b1[i];
    const double* row = w1 + i * in;
    for (std::size_t j = 0; j < in; ++j) a += row[j] * x[j];
    const double y = std::tanh(a);
    out += w2[i] * y;
    const double delta = -w2[i] * (1.0 - y * y);
    for (std::size_t j = 0; j < in; ++j) d_w1[i * in + j] = delta * x[j];
    d_b1[i] = delta;
    d_w2[i] = -y;
  }
  d_w2[h] = -1.0;
  return out;
}

}  // namespace solarcast::kernels::detail
