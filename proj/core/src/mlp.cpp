#include "pepita/mlp.hpp"

namespace pepita {

void Mlp::validate() const {
    require(!layers.empty(), "Mlp: no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        require(layer.b.size() == layer.W.rows, "Mlp: bias length != W rows");
        if (l > 0)
            require(layer.W.cols == layers[l - 1].W.rows,
                    "Mlp: layer dimension chain broken at layer " + std::to_string(l));
    }
    require(F.rows == input_dim() && F.cols == output_dim(),
            "Mlp: F must be input_dim x output_dim");
    require(dropout_rate >= 0.0 && dropout_rate < 1.0,
            "Mlp: dropout_rate must lie in [0, 1)");
}

Mlp Mlp::make(const std::vector<std::size_t>& dims, Rng& init_rng,
              double dropout_rate, double f_scale) {
    require(dims.size() >= 2, "Mlp::make: need at least input and output dims");
    Mlp m;
    m.dropout_rate = dropout_rate;
    for (std::size_t l = 1; l < dims.size(); ++l) {
        Layer layer;
        layer.W = he_uniform(init_rng, dims[l], dims[l - 1], 1.0);
        layer.b = Tensor1(dims[l], 0.0);
        layer.act = (l + 1 == dims.size()) ? Activation::Softmax : Activation::ReLU;
        m.layers.push_back(std::move(layer));
    }
    m.F = he_uniform(init_rng, dims.front(), dims.back(), f_scale);
    m.validate();
    return m;
}

namespace {

Tensor2 apply_activation(Activation act, const Tensor2& z) {
    switch (act) {
        case Activation::ReLU: return relu(z);
        case Activation::Softmax: return softmax_cols(z);
        case Activation::Identity: return z;
    }
    throw ShapeError("unknown activation");
}

// z = W*a + b with the bias broadcast across columns.
Tensor2 affine(const Layer& layer, const Tensor2& a) {
    Tensor2 z = matmul(layer.W, a);
    for (std::size_t i = 0; i < z.rows; ++i) {
        const double bi = layer.b[i];
        double* zi = z.row(i);
        for (std::size_t j = 0; j < z.cols; ++j) zi[j] += bi;
    }
    return z;
}

Tensor2 sample_mask(Rng& rng, std::size_t rows, std::size_t cols, double rate) {
    Tensor2 mask(rows, cols, 1.0);
    for (double& x : mask.v)
        if (rng.next_double() < rate) x = 0.0;
    return mask;
}

void apply_mask(Tensor2& h, const Tensor2& mask, double keep) {
    for (std::size_t i = 0; i < h.v.size(); ++i) h.v[i] *= mask.v[i] / keep;
}

}  // namespace

ForwardTrace forward(const Mlp& m, const Tensor2& x, const Mode& mode) {
    m.validate();
    require(x.rows == m.input_dim(), "forward: input dimension mismatch");
    const std::size_t L = m.depth();
    const bool dropping = mode.train && m.dropout_rate > 0.0;
    const double keep = 1.0 - m.dropout_rate;

    ForwardTrace t;
    t.train_mode = mode.train;
    t.x = x;
    if (dropping) {
        require(mode.dropout_rng != nullptr, "forward: train mode needs an rng");
        t.masks.assign(L, Tensor2{});
        if (m.dropout_input) {
            t.masks[0] = sample_mask(*mode.dropout_rng, x.rows, x.cols, m.dropout_rate);
            apply_mask(t.x, t.masks[0], keep);
        } else {
            t.masks[0] = Tensor2(x.rows, x.cols, 1.0);
        }
    }

    const Tensor2* a = &t.x;
    for (std::size_t l = 0; l < L; ++l) {
        t.z.push_back(affine(m.layers[l], *a));
        Tensor2 h = apply_activation(m.layers[l].act, t.z.back());
        if (l + 1 < L && dropping) {
            t.masks[l + 1] =
                sample_mask(*mode.dropout_rng, h.rows, h.cols, m.dropout_rate);
            apply_mask(h, t.masks[l + 1], keep);
        }
        t.h.push_back(std::move(h));
        a = &t.h.back();
    }
    return t;
}

ForwardTrace forward(const Mlp& m, const Tensor1& x, const Mode& mode) {
    return forward(m, as_column(x), mode);
}

ForwardTrace forward_frozen(const Mlp& m, const Tensor2& x) {
    return forward(m, x, Mode::eval());
}

ForwardTrace forward_frozen(const Mlp& m, const Tensor1& x) {
    return forward(m, as_column(x), Mode::eval());
}

ModulatedTrace forward_modulated(const Mlp& m, const Tensor2& x, const Tensor2& e,
                                 const ForwardTrace& paired) {
    m.validate();
    require(x.rows == m.input_dim(), "forward_modulated: input dimension mismatch");
    require(e.rows == m.output_dim() && e.cols == x.cols,
            "forward_modulated: error shape mismatch");
    const std::size_t L = m.depth();
    const bool masked = !paired.masks.empty();
    const double keep = 1.0 - m.dropout_rate;

    ModulatedTrace t;
    t.x_mod = matmul(m.F, e);
    add_inplace(t.x_mod, x);
    if (masked && m.dropout_input) apply_mask(t.x_mod, paired.masks[0], keep);

    const Tensor2* a = &t.x_mod;
    for (std::size_t l = 0; l < L; ++l) {
        t.z.push_back(affine(m.layers[l], *a));
        Tensor2 h = apply_activation(m.layers[l].act, t.z.back());
        if (l + 1 < L && masked) apply_mask(h, paired.masks[l + 1], keep);
        t.h.push_back(std::move(h));
        a = &t.h.back();
    }
    return t;
}

ModulatedTrace forward_modulated(const Mlp& m, const Tensor1& x, const Tensor1& e,
                                 const ForwardTrace& paired) {
    return forward_modulated(m, as_column(x), as_column(e), paired);
}

std::size_t argmax_lowest(const Tensor1& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return best;
}

std::size_t predict(const Mlp& m, const Tensor1& x) {
    return argmax_lowest(column(forward_frozen(m, x).output(), 0));
}

std::vector<std::size_t> predict(const Mlp& m, const Tensor2& x) {
    const ForwardTrace t = forward_frozen(m, x);
    const Tensor2& out = t.output();
    std::vector<std::size_t> labels(out.cols);
    for (std::size_t j = 0; j < out.cols; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < out.rows; ++i)
            if (out(i, j) > out(best, j)) best = i;
        labels[j] = best;
    }
    return labels;
}

}  // namespace pepita
