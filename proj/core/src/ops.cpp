#include "pepita/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pepita {

Tensor1 relu(const Tensor1& z) {
    Tensor1 out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
    return out;
}

Tensor2 relu(const Tensor2& z) {
    Tensor2 out(z.rows, z.cols);
    for (std::size_t i = 0; i < z.v.size(); ++i) out.v[i] = z.v[i] > 0.0 ? z.v[i] : 0.0;
    return out;
}

Tensor1 relu_deriv(const Tensor1& z) {
    Tensor1 out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? 1.0 : 0.0;
    return out;
}

Tensor2 relu_deriv(const Tensor2& z) {
    Tensor2 out(z.rows, z.cols);
    for (std::size_t i = 0; i < z.v.size(); ++i) out.v[i] = z.v[i] > 0.0 ? 1.0 : 0.0;
    return out;
}

Tensor1 softmax(const Tensor1& z) {
    Tensor1 out(z.size());
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) zmax = std::max(zmax, z[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - zmax);
        sum += out[i];
    }
    for (std::size_t i = 0; i < z.size(); ++i) out[i] /= sum;
    return out;
}

Tensor2 softmax_cols(const Tensor2& z) {
    Tensor2 out(z.rows, z.cols);
    for (std::size_t j = 0; j < z.cols; ++j) {
        double zmax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < z.rows; ++i) zmax = std::max(zmax, z(i, j));
        double sum = 0.0;
        for (std::size_t i = 0; i < z.rows; ++i) {
            const double e = std::exp(z(i, j) - zmax);
            out(i, j) = e;
            sum += e;
        }
        for (std::size_t i = 0; i < z.rows; ++i) out(i, j) /= sum;
    }
    return out;
}

Tensor1 softmax_jacobian_vp(const Tensor1& s, const Tensor1& v) {
    require(s.size() == v.size(), "softmax_jacobian_vp: length mismatch");
    const double sv = dot(s, v);
    Tensor1 out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] * (v[i] - sv);
    return out;
}

Tensor2 softmax_jacobian_vp_cols(const Tensor2& s, const Tensor2& v) {
    require(s.rows == v.rows && s.cols == v.cols,
            "softmax_jacobian_vp_cols: shape mismatch");
    Tensor2 out(s.rows, s.cols);
    for (std::size_t j = 0; j < s.cols; ++j) {
        double sv = 0.0;
        for (std::size_t i = 0; i < s.rows; ++i) sv += s(i, j) * v(i, j);
        for (std::size_t i = 0; i < s.rows; ++i)
            out(i, j) = s(i, j) * (v(i, j) - sv);
    }
    return out;
}

double mse_loss(const Tensor1& h, const Tensor1& y_star) {
    require(h.size() == y_star.size(), "mse_loss: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double d = h[i] - y_star[i];
        acc += d * d;
    }
    return acc / static_cast<double>(h.size());
}

double mse_loss_cols(const Tensor2& h, const Tensor2& y_star) {
    require(h.rows == y_star.rows && h.cols == y_star.cols,
            "mse_loss_cols: shape mismatch");
    require(h.cols > 0, "mse_loss_cols: empty batch");
    double acc = 0.0;
    for (std::size_t i = 0; i < h.v.size(); ++i) {
        const double d = h.v[i] - y_star.v[i];
        acc += d * d;
    }
    return acc / static_cast<double>(h.rows) / static_cast<double>(h.cols);
}

Tensor1 mse_error(const Tensor1& h, const Tensor1& y_star) {
    require(h.size() == y_star.size(), "mse_error: length mismatch");
    Tensor1 e(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) e[i] = h[i] - y_star[i];
    return e;
}

Tensor2 mse_error(const Tensor2& h, const Tensor2& y_star) {
    require(h.rows == y_star.rows && h.cols == y_star.cols,
            "mse_error: shape mismatch");
    Tensor2 e(h.rows, h.cols);
    for (std::size_t i = 0; i < h.v.size(); ++i) e.v[i] = h.v[i] - y_star.v[i];
    return e;
}

Tensor2 he_uniform(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
    require(scale > 0.0, "he_uniform: scale must be positive");
    require(cols > 0, "he_uniform: fan_in must be positive");
    const double bound = scale * std::sqrt(6.0 / static_cast<double>(cols));
    Tensor2 w(rows, cols);
    for (double& x : w.v) x = rng.uniform(-bound, bound);
    return w;
}

}  // namespace pepita
