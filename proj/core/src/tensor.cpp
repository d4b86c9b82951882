#include "pepita/tensor.hpp"

#include <cmath>
#include <cstring>

namespace pepita {

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    require(a.cols == b.rows, "matmul: inner dimensions differ (" +
                                  std::to_string(a.cols) + " vs " +
                                  std::to_string(b.rows) + ")");
    Tensor2 c(a.rows, b.cols, 0.0);
    const std::size_t n = b.cols;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Tensor2 matmul_at_b(const Tensor2& a, const Tensor2& b) {
    require(a.rows == b.rows, "matmul_at_b: inner dimensions differ (" +
                                  std::to_string(a.rows) + " vs " +
                                  std::to_string(b.rows) + ")");
    Tensor2 c(a.cols, b.cols, 0.0);
    const std::size_t n = b.cols;
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            double* ci = c.row(i);
            const double aki = ak[i];
            for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b) {
    require(a.cols == b.cols, "matmul_a_bt: inner dimensions differ (" +
                                  std::to_string(a.cols) + " vs " +
                                  std::to_string(b.cols) + ")");
    Tensor2 c(a.rows, b.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
            ci[j] = acc;
        }
    }
    return c;
}

// Both vector kernels delegate to the matrix kernels on a one-column reshape.
// A hand-rolled dot-product loop compiles to a different FMA contraction than
// the matmul inner loop, breaking the bitwise equivalence these must keep.

Tensor1 matvec(const Tensor2& a, const Tensor1& x) {
    require(a.cols == x.size(), "matvec: dimension mismatch");
    const Tensor2 y = matmul(a, as_column(x));
    Tensor1 out(a.rows);
    std::memcpy(out.v.data(), y.v.data(), a.rows * sizeof(double));
    return out;
}

Tensor1 matvec_t(const Tensor2& a, const Tensor1& x) {
    require(a.rows == x.size(), "matvec_t: dimension mismatch");
    const Tensor2 y = matmul_at_b(a, as_column(x));
    Tensor1 out(a.cols);
    std::memcpy(out.v.data(), y.v.data(), a.cols * sizeof(double));
    return out;
}

Tensor2 transpose(const Tensor2& a) {
    Tensor2 t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

Tensor1 column(const Tensor2& a, std::size_t j) {
    require(j < a.cols, "column: index out of range");
    Tensor1 x(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) x[i] = a(i, j);
    return x;
}

Tensor2 as_column(const Tensor1& x) {
    Tensor2 a(x.size(), 1);
    std::memcpy(a.v.data(), x.data(), x.size() * sizeof(double));
    return a;
}

void set_column(Tensor2& a, std::size_t j, const Tensor1& x) {
    require(j < a.cols && x.size() == a.rows, "set_column: shape mismatch");
    for (std::size_t i = 0; i < a.rows; ++i) a(i, j) = x[i];
}

Tensor2 hconcat(const Tensor2& a, const Tensor2& b) {
    require(a.rows == b.rows, "hconcat: row count mismatch");
    Tensor2 c(a.rows, a.cols + b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* ci = c.row(i);
        std::memcpy(ci, a.row(i), a.cols * sizeof(double));
        std::memcpy(ci + a.cols, b.row(i), b.cols * sizeof(double));
    }
    return c;
}

void add_inplace(Tensor2& a, const Tensor2& b) {
    require(a.rows == b.rows && a.cols == b.cols, "add: shape mismatch");
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
}

void add_inplace(Tensor1& a, const Tensor1& b) {
    require(a.size() == b.size(), "add: length mismatch");
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
}

void scale_inplace(Tensor2& a, double s) {
    for (double& x : a.v) x *= s;
}

void scale_inplace(Tensor1& a, double s) {
    for (double& x : a.v) x *= s;
}

void axpy_inplace(Tensor2& y, double alpha, const Tensor2& x) {
    require(y.rows == x.rows && y.cols == x.cols, "axpy: shape mismatch");
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += alpha * x.v[i];
}

void axpy_inplace(Tensor1& y, double alpha, const Tensor1& x) {
    require(y.size() == x.size(), "axpy: length mismatch");
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += alpha * x.v[i];
}

double frobenius_norm(const Tensor2& a) {
    double acc = 0.0;
    for (double x : a.v) acc += x * x;
    return std::sqrt(acc);
}

double dot(const Tensor1& a, const Tensor1& b) {
    require(a.size() == b.size(), "dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

bool all_finite(const Tensor1& a) {
    for (double x : a.v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Tensor2& a) {
    for (double x : a.v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace pepita
