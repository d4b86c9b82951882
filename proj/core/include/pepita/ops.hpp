#ifndef PEPITA_OPS_HPP
#define PEPITA_OPS_HPP

#include "pepita/rng.hpp"
#include "pepita/tensor.hpp"

namespace pepita {

// Elementwise max(0, z).
Tensor1 relu(const Tensor1& z);
Tensor2 relu(const Tensor2& z);

// 1 where z > 0, else 0. The tie at z == 0 maps to 0.
Tensor1 relu_deriv(const Tensor1& z);
Tensor2 relu_deriv(const Tensor2& z);

// Max-subtracted softmax. Output entries lie in (0, 1) and sum to 1.
Tensor1 softmax(const Tensor1& z);

// Column-at-a-time softmax over a batch matrix (each column is one sample).
Tensor2 softmax_cols(const Tensor2& z);

// J^T v for the softmax Jacobian J_ij = s_i (delta_ij - s_j), given the
// softmax output s. J is symmetric, so this is s .* (v - <s, v>).
Tensor1 softmax_jacobian_vp(const Tensor1& s, const Tensor1& v);

// Columnwise softmax_jacobian_vp over a batch.
Tensor2 softmax_jacobian_vp_cols(const Tensor2& s, const Tensor2& v);

// (1/n) * sum (h - y)^2.
double mse_loss(const Tensor1& h, const Tensor1& y_star);

// Mean over columns of the per-sample mse_loss.
double mse_loss_cols(const Tensor2& h, const Tensor2& y_star);

// Error signal e = h - y*. The 2/n factor of the MSE gradient is absorbed
// into the learning rate; both learning rules consume this same e.
Tensor1 mse_error(const Tensor1& h, const Tensor1& y_star);
Tensor2 mse_error(const Tensor2& h, const Tensor2& y_star);

// He-uniform initialization: entries i.i.d. uniform on [-b, b] with
// b = scale * sqrt(6 / fan_in), fan_in = cols. Weights use scale = 1;
// the feedback projection F uses scale = 0.05.
Tensor2 he_uniform(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0);

}  // namespace pepita

#endif
