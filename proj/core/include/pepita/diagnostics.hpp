#ifndef PEPITA_DIAGNOSTICS_HPP
#define PEPITA_DIAGNOSTICS_HPP

#include <vector>

#include "pepita/train.hpp"

namespace pepita {

enum class FdTarget : std::uint8_t { BpWeights, InputGrad };

// Central-difference validation of the analytic gradients on a small net.
// The scalar objective is the half-sum-of-squares loss behind e = h - y*
// (mean over the batch for weights, sum for the input gradient, matching
// how each analytic gradient is normalized). Coordinates whose
// perturbation could cross a ReLU kink (any affected pre-activation with
// magnitude < 10h) are skipped. Returns the worst relative error,
// measured against max(1, |fd| + |analytic|).
double finite_diff_check(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         FdTarget which, double h = 1e-6);

// Same checks against a caller-supplied gradient instead of the analytic
// one, so a deliberately wrong candidate is shown to fail.
double finite_diff_weights(const Mlp& m, const Tensor2& x,
                           const Tensor2& y_star, const UpdateSet& candidate,
                           double h = 1e-6);
double finite_diff_input(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         const Tensor2& candidate, double h = 1e-6);

// Cosine between two update tensors flattened; NaN if either is zero.
double cosine(const Tensor2& a, const Tensor2& b);

struct LayerAlignment {
    bool defined = false;  // false when either norm <= 1e-12
    double cosine = 0.0;
    double angle_deg = 0.0;
    double bp_norm = 0.0;
    double pepita_norm = 0.0;
};

struct AlignmentReport {
    std::vector<LayerAlignment> layers;  // weight updates only, per layer
};

// Both rules' UpdateSets on the same batch with shared forward traces
// (and therefore shared dropout masks), compared layer by layer.
AlignmentReport alignment(const Mlp& m, const Tensor2& x,
                          const Tensor2& y_star,
                          const Mode& mode = Mode::eval());

// Output-layer updates as functions of a caller-supplied error at fixed
// traces; both are linear in e, which the scale-invariance property of
// the alignment cosine rests on.
Tensor2 bp_output_update(const Mlp& m, const ForwardTrace& t,
                         const Tensor2& e);
Tensor2 pepita_output_update(const ForwardTrace& t, const ModulatedTrace& mt,
                             const Tensor2& e);

// BP update plus isotropic noise of Frobenius norm noise_level * |dW_l|
// per parameter group (drawn from rng's kNoise substream). noise_level 0
// returns the BP update bitwise. The expected cosine to the clean update
// is about 1/sqrt(1 + noise_level^2), so noise_level_for_cosine gives the
// level matching a measured PEPITA-BP cosine.
UpdateSet noisy_bp_probe(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         double noise_level, Rng& rng);
double noise_level_for_cosine(double target_cosine);

}  // namespace pepita

#endif
