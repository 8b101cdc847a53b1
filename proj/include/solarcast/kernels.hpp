#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops of Levenberg-Marquardt training for a
// one-hidden-layer tanh network with a linear output.
//
// Packed parameter layout (P = H * In + 2 * H + 1):
//   [W1 row-major (H x In)] [b1 (H)] [w2 (H)] [b2]
//
// Every *_parallel kernel partitions output entries, never the reduction over
// samples, so it is bit-identical to its *_serial reference at any thread count.
namespace solarcast::kernels {

struct NetView {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::span<const double> params;

  std::size_t parameter_count() const noexcept { return hidden * inputs + 2 * hidden + 1; }
};

enum class Backend { serial, parallel };

// x is row-major (n x inputs); out receives n predictions.
void forward_batch_serial(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> out);
void forward_batch_parallel(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> out);

// Jacobian of e = y - y_hat with respect to the packed parameters, row-major
// (n x P), together with the predictions y_hat.
void jacobian_serial(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> jac,
                     std::span<double> y_hat);
void jacobian_parallel(const NetView& net, std::span<const double> x, std::size_t n, std::span<double> jac,
                       std::span<double> y_hat);

// jtj (P x P, full symmetric, row-major) = J^T J and jte (P) = J^T e.
void normal_equations_serial(std::span<const double> jac, std::size_t n, std::size_t p, std::span<const double> e,
                             std::span<double> jtj, std::span<double> jte);
void normal_equations_parallel(std::span<const double> jac, std::size_t n, std::size_t p, std::span<const double> e,
                               std::span<double> jtj, std::span<double> jte);

inline void forward_batch(Backend b, const NetView& net, std::span<const double> x, std::size_t n,
                          std::span<double> out) {
  b == Backend::serial ? forward_batch_serial(net, x, n, out) : forward_batch_parallel(net, x, n, out);
}

inline void jacobian(Backend b, const NetView& net, std::span<const double> x, std::size_t n, std::span<double> jac,
                     std::span<double> y_hat) {
  b == Backend::serial ? jacobian_serial(net, x, n, jac, y_hat) : jacobian_parallel(net, x, n, jac, y_hat);
}

inline void normal_equations(Backend b, std::span<const double> jac, std::size_t n, std::size_t p,
                             std::span<const double> e, std::span<double> jtj, std::span<double> jte) {
  b == Backend::serial ? normal_equations_serial(jac, n, p, e, jtj, jte)
                       : normal_equations_parallel(jac, n, p, e, jtj, jte);
}

}  // namespace solarcast::kernels
