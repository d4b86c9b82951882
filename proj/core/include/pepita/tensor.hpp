#ifndef PEPITA_TENSOR_HPP
#define PEPITA_TENSOR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pepita {

// Thrown when an operation is called with incompatible shapes or otherwise
// violates its contract.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Dense vector of doubles.
struct Tensor1 {
    std::vector<double> v;

    Tensor1() = default;
    explicit Tensor1(std::size_t n, double fill = 0.0) : v(n, fill) {}
    Tensor1(std::initializer_list<double> init) : v(init) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }

    bool operator==(const Tensor1&) const = default;
};

// Dense row-major matrix of doubles.
struct Tensor2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;  // row-major, v[r*cols + c]

    Tensor2() = default;
    Tensor2(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), v(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    double* row(std::size_t r) { return v.data() + r * cols; }
    const double* row(std::size_t r) const { return v.data() + r * cols; }
    std::size_t size() const { return v.size(); }

    bool operator==(const Tensor2&) const = default;
};

// C = A * B. Each output entry accumulates over k in index order, so a column
// of a batched product is bit-identical to the matching single-column product.
Tensor2 matmul(const Tensor2& a, const Tensor2& b);

// C = A^T * B without materializing the transpose.
Tensor2 matmul_at_b(const Tensor2& a, const Tensor2& b);

// C = A * B^T without materializing the transpose.
Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b);

// y = A * x, same accumulation order as matmul on a one-column matrix.
Tensor1 matvec(const Tensor2& a, const Tensor1& x);

// y = A^T * x.
Tensor1 matvec_t(const Tensor2& a, const Tensor1& x);

Tensor2 transpose(const Tensor2& a);

// Column j of a matrix as a vector, and the reverse.
Tensor1 column(const Tensor2& a, std::size_t j);
Tensor2 as_column(const Tensor1& x);
void set_column(Tensor2& a, std::size_t j, const Tensor1& x);

// [a | b]: columns of a followed by columns of b.
Tensor2 hconcat(const Tensor2& a, const Tensor2& b);

// Elementwise helpers used across the training and attack code.
void add_inplace(Tensor2& a, const Tensor2& b);
void add_inplace(Tensor1& a, const Tensor1& b);
void scale_inplace(Tensor2& a, double s);
void scale_inplace(Tensor1& a, double s);
void axpy_inplace(Tensor2& y, double alpha, const Tensor2& x);  // y += alpha*x
void axpy_inplace(Tensor1& y, double alpha, const Tensor1& x);

double frobenius_norm(const Tensor2& a);
double dot(const Tensor1& a, const Tensor1& b);

bool all_finite(const Tensor1& a);
bool all_finite(const Tensor2& a);

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ShapeError(what);
}

}  // namespace pepita

#endif
