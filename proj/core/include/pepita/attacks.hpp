#ifndef PEPITA_ATTACKS_HPP
#define PEPITA_ATTACKS_HPP

#include <string>
#include <vector>

#include "pepita/mlp.hpp"

namespace pepita {

enum class AttackKind : std::uint8_t { FGSM, PGD };

struct AttackConfig {
    AttackKind kind = AttackKind::PGD;
    double epsilon = 0.3;
    double step = 0.1;
    std::size_t iterations = 40;  // 1 for FGSM
    // Uniform start in the epsilon ball, then pixel-clipped. On by default
    // to match the advertorch PGD convention; off makes
    // pgd(iters=1, step=epsilon) bitwise-identical to fgsm.
    bool random_start = true;
    double pixel_min = 0.0;
    double pixel_max = 1.0;

    void validate() const;
    static AttackConfig fgsm_default();
    static AttackConfig pgd_default();
};

// d(loss)/dx through the frozen network: the transposed pathway
// W_1^T delta_1, with delta_L the softmax-Jacobian product of the output
// error. Depends only on the weights, not on how they were trained.
Tensor1 input_gradient(const Mlp& m, const Tensor1& x, const Tensor1& y_star);
// Batched: columns are independent samples; column j equals the
// single-sample gradient of column j bitwise.
Tensor2 input_gradient_cols(const Mlp& m, const Tensor2& x, const Tensor2& y_star);

// x + epsilon * sign(input gradient), clipped to the pixel box.
// sign(0) := 0 so dead-gradient pixels stay put.
Tensor1 fgsm(const Mlp& m, const Tensor1& x, const Tensor1& y_star,
             const AttackConfig& cfg);

// Iterated signed steps projected onto the epsilon ball around the
// original x intersected with the pixel box. rng feeds the random start
// only; it is untouched when random_start is off.
Tensor1 pgd(const Mlp& m, const Tensor1& x, const Tensor1& y_star,
            const AttackConfig& cfg, Rng& rng);

// Applies cfg to every column. Each sample draws from
// base.substream(sample_ids[j]), so the result for a sample depends only
// on (weights, sample, its id) and never on batch composition or order.
// Internally one batched run; columns match per-sample calls bitwise.
Tensor2 attack_batch(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                     const std::vector<std::size_t>& sample_ids,
                     const AttackConfig& cfg, const Rng& base);

// Audit dump: x_adv in the checkpoint binary family plus a JSON manifest
// {attack, epsilon, step, iterations, random_start, seed, model_hash}.
void save_adversarial_dump(const std::string& path, const Tensor2& x_adv,
                           const AttackConfig& cfg, std::uint64_t seed,
                           const Mlp& model);
Tensor2 load_adversarial_dump(const std::string& path);

}  // namespace pepita

#endif
