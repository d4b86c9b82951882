#ifndef PEPITA_MLP_HPP
#define PEPITA_MLP_HPP

#include <cstdint>
#include <vector>

#include "pepita/ops.hpp"
#include "pepita/rng.hpp"
#include "pepita/tensor.hpp"

namespace pepita {

// Identity exists for the linear-network diagnostics; normal models use ReLU
// hidden layers and a Softmax output.
enum class Activation : std::uint8_t { ReLU = 0, Softmax = 1, Identity = 2 };

struct Layer {
    Tensor2 W;       // out x in
    Tensor1 b;       // out
    Activation act = Activation::ReLU;
};

// Fully connected network plus the fixed random feedback projection F that
// maps the output error back onto the input for the modulated pass.
struct Mlp {
    std::vector<Layer> layers;
    Tensor2 F;                  // input_dim x output_dim
    double dropout_rate = 0.0;  // inverted dropout on hidden layers
    bool dropout_input = false; // optionally also mask the input layer

    std::size_t input_dim() const { return layers.front().W.cols; }
    std::size_t output_dim() const { return layers.back().W.rows; }
    std::size_t depth() const { return layers.size(); }
    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const Layer& l : layers) n += l.W.size() + l.b.size();
        return n;
    }

    // Checks the dimension chain, F's shape, and dropout_rate's range.
    void validate() const;

    // He-uniform weights (zero biases), softmax output, ReLU hidden layers,
    // F scaled by f_scale. `dims` runs input..output, e.g. {784, 1024, 10}.
    static Mlp make(const std::vector<std::size_t>& dims, Rng& init_rng,
                    double dropout_rate = 0.0, double f_scale = 0.05);
};

// Standard forward pass over a batch (columns are samples).
// When dropout is active, masks[l+1] multiplies the post-activation of hidden
// layer l and masks[0] the input (all-ones unless input dropout is on);
// entries are 0/1 and the surviving activations are rescaled by 1/keep at
// train time (inverted dropout), so Eval needs no rescale. The output layer
// is never masked. Outside of active dropout `masks` stays empty, which every
// consumer reads as all-ones.
struct ForwardTrace {
    Tensor2 x;                    // h_0 as propagated (input_dim x batch)
    std::vector<Tensor2> z;       // pre-activations per layer
    std::vector<Tensor2> h;       // post-activations per layer (masked)
    std::vector<Tensor2> masks;   // index 0 = input mask, then hidden layers
    bool train_mode = false;

    const Tensor2& output() const { return h.back(); }
    std::size_t batch() const { return x.cols; }
};

// Second PEPITA pass, run on x + F*e with the masks of the paired standard
// pass so the activation difference h - h_mod is attributable to the input
// modulation alone.
struct ModulatedTrace {
    Tensor2 x_mod;
    std::vector<Tensor2> z;
    std::vector<Tensor2> h;

    const Tensor2& output() const { return h.back(); }
};

struct Mode {
    bool train = false;
    Rng* dropout_rng = nullptr;

    static Mode eval() { return {}; }
    static Mode train_with(Rng& rng) { return {true, &rng}; }
};

ForwardTrace forward(const Mlp& m, const Tensor2& x, const Mode& mode);
ForwardTrace forward(const Mlp& m, const Tensor1& x, const Mode& mode);

// Eval-mode forward used at attack and evaluation time; deterministic.
ForwardTrace forward_frozen(const Mlp& m, const Tensor2& x);
ForwardTrace forward_frozen(const Mlp& m, const Tensor1& x);

ModulatedTrace forward_modulated(const Mlp& m, const Tensor2& x, const Tensor2& e,
                                 const ForwardTrace& paired);
ModulatedTrace forward_modulated(const Mlp& m, const Tensor1& x, const Tensor1& e,
                                 const ForwardTrace& paired);

// Argmax of the output probabilities; ties resolve to the lowest index.
std::size_t argmax_lowest(const Tensor1& p);
std::size_t predict(const Mlp& m, const Tensor1& x);
std::vector<std::size_t> predict(const Mlp& m, const Tensor2& x);

}  // namespace pepita

#endif
