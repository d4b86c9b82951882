#include "pepita/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pepita {
namespace {

double half_sse(const Tensor2& out, const Tensor2& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const double d = out.v[i] - y.v[i];
        s += d * d;
    }
    return 0.5 * s;
}

double rel_err(double fd, double an) {
    return std::abs(fd - an) / std::max(1.0, std::abs(fd) + std::abs(an));
}

// Kink-guard flags from the unperturbed trace. A coordinate is skipped
// when a pre-activation it can move sits within 10h of a ReLU kink; the
// perturbed traces then risk landing on different sides of zero and the
// central difference stops meaning the derivative.
struct KinkGuard {
    double threshold;
    std::vector<std::vector<bool>> row_flag;  // [layer][row], ReLU layers
    std::vector<bool> layer_flag;             // any row of the layer
    std::vector<std::vector<bool>> col_flag;  // [layer][col]
    std::vector<bool> suffix_flag;            // any ReLU layer after l

    KinkGuard(const Mlp& m, const ForwardTrace& t, double h)
        : threshold(10.0 * h) {
        const std::size_t L = m.depth();
        row_flag.resize(L);
        layer_flag.assign(L, false);
        col_flag.resize(L);
        for (std::size_t l = 0; l < L; ++l) {
            const Tensor2& z = t.z[l];
            row_flag[l].assign(z.rows, false);
            col_flag[l].assign(z.cols, false);
            if (m.layers[l].act != Activation::ReLU) continue;
            for (std::size_t i = 0; i < z.rows; ++i)
                for (std::size_t j = 0; j < z.cols; ++j)
                    if (std::abs(z(i, j)) < threshold) {
                        row_flag[l][i] = true;
                        col_flag[l][j] = true;
                        layer_flag[l] = true;
                    }
        }
        suffix_flag.assign(L, false);
        for (std::size_t l = L; l-- > 1;)
            suffix_flag[l - 1] = suffix_flag[l] || layer_flag[l];
    }

    // Weight or bias coordinate in layer l, output row i: moves z[l] row i
    // and everything after layer l.
    bool skip_weight(std::size_t l, std::size_t i) const {
        return row_flag[l][i] || suffix_flag[l];
    }

    // Input coordinate in column j moves that column through every layer.
    bool skip_input(std::size_t j) const {
        for (const auto& flags : col_flag)
            if (flags[j]) return true;
        return false;
    }
};

}  // namespace

double finite_diff_weights(const Mlp& m, const Tensor2& x,
                           const Tensor2& y_star, const UpdateSet& candidate,
                           double h) {
    require(h >= 1e-8 && h <= 1e-4, "finite_diff_weights: h outside [1e-8, 1e-4]");
    require(m.parameter_count() <= 1000,
            "finite_diff_weights: net too large for finite differences");
    require(candidate.dW.size() == m.depth() &&
                candidate.db.size() == m.depth(),
            "finite_diff_weights: candidate depth mismatch");
    const ForwardTrace base = forward_frozen(m, x);
    const KinkGuard guard(m, base, h);
    const double inv_b = 1.0 / static_cast<double>(x.cols);
    double worst = 0.0;

    Mlp probe = m;
    const auto loss = [&] {
        return half_sse(forward_frozen(probe, x).output(), y_star) * inv_b;
    };
    for (std::size_t l = 0; l < m.depth(); ++l) {
        Tensor2& W = probe.layers[l].W;
        for (std::size_t i = 0; i < W.rows; ++i) {
            if (guard.skip_weight(l, i)) continue;
            for (std::size_t j = 0; j < W.cols; ++j) {
                const double saved = W(i, j);
                W(i, j) = saved + h;
                const double up = loss();
                W(i, j) = saved - h;
                const double down = loss();
                W(i, j) = saved;
                worst = std::max(worst, rel_err((up - down) / (2.0 * h),
                                                candidate.dW[l](i, j)));
            }
            Tensor1& b = probe.layers[l].b;
            const double saved = b[i];
            b[i] = saved + h;
            const double up = loss();
            b[i] = saved - h;
            const double down = loss();
            b[i] = saved;
            worst = std::max(
                worst, rel_err((up - down) / (2.0 * h), candidate.db[l][i]));
        }
    }
    return worst;
}

double finite_diff_input(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         const Tensor2& candidate, double h) {
    require(h >= 1e-8 && h <= 1e-4, "finite_diff_input: h outside [1e-8, 1e-4]");
    require(m.parameter_count() <= 1000,
            "finite_diff_input: net too large for finite differences");
    require(candidate.rows == x.rows && candidate.cols == x.cols,
            "finite_diff_input: candidate shape mismatch");
    const ForwardTrace base = forward_frozen(m, x);
    const KinkGuard guard(m, base, h);
    double worst = 0.0;

    Tensor2 probe = x;
    const auto loss = [&] {
        return half_sse(forward_frozen(m, probe).output(), y_star);
    };
    for (std::size_t j = 0; j < x.cols; ++j) {
        if (guard.skip_input(j)) continue;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double saved = probe(i, j);
            probe(i, j) = saved + h;
            const double up = loss();
            probe(i, j) = saved - h;
            const double down = loss();
            probe(i, j) = saved;
            worst = std::max(worst,
                             rel_err((up - down) / (2.0 * h), candidate(i, j)));
        }
    }
    return worst;
}

double finite_diff_check(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         FdTarget which, double h) {
    if (which == FdTarget::BpWeights)
        return finite_diff_weights(
            m, x, y_star, bp_updates_from_trace(m, forward_frozen(m, x), y_star),
            h);
    return finite_diff_input(m, x, y_star, input_gradient_cols(m, x, y_star), h);
}

double cosine(const Tensor2& a, const Tensor2& b) {
    require(a.rows == b.rows && a.cols == b.cols, "cosine: shape mismatch");
    double ab = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) ab += a.v[i] * b.v[i];
    const double na = frobenius_norm(a);
    const double nb = frobenius_norm(b);
    return ab / (na * nb);  // NaN when either side is zero
}

AlignmentReport alignment(const Mlp& m, const Tensor2& x,
                          const Tensor2& y_star, const Mode& mode) {
    const ForwardTrace t = forward(m, x, mode);
    const Tensor2 e = mse_error(t.output(), y_star);
    const ModulatedTrace mt = forward_modulated(m, x, e, t);
    const UpdateSet bp = bp_updates_from_trace(m, t, y_star);
    const UpdateSet pep = pepita_updates_from_traces(m, t, mt, y_star);

    AlignmentReport report;
    for (std::size_t l = 0; l < m.depth(); ++l) {
        LayerAlignment la;
        la.bp_norm = frobenius_norm(bp.dW[l]);
        la.pepita_norm = frobenius_norm(pep.dW[l]);
        la.defined = la.bp_norm > 1e-12 && la.pepita_norm > 1e-12;
        if (la.defined) {
            la.cosine = cosine(bp.dW[l], pep.dW[l]);
            la.angle_deg = std::acos(std::clamp(la.cosine, -1.0, 1.0)) *
                           180.0 / std::numbers::pi;
        }
        report.layers.push_back(la);
    }
    return report;
}

Tensor2 bp_output_update(const Mlp& m, const ForwardTrace& t,
                         const Tensor2& e) {
    const std::size_t L = m.depth();
    Tensor2 delta;
    switch (m.layers[L - 1].act) {
        case Activation::Softmax:
            delta = softmax_jacobian_vp_cols(t.output(), e);
            break;
        case Activation::ReLU: {
            delta = e;
            const Tensor2 d = relu_deriv(t.z[L - 1]);
            for (std::size_t i = 0; i < delta.v.size(); ++i)
                delta.v[i] *= d.v[i];
            break;
        }
        case Activation::Identity:
            delta = e;
            break;
    }
    const Tensor2& presyn = L >= 2 ? t.h[L - 2] : t.x;
    Tensor2 u = matmul_a_bt(delta, presyn);
    scale_inplace(u, 1.0 / static_cast<double>(e.cols));
    return u;
}

Tensor2 pepita_output_update(const ForwardTrace& t, const ModulatedTrace& mt,
                             const Tensor2& e) {
    const std::size_t L = t.h.size();
    const Tensor2& presyn = L >= 2 ? mt.h[L - 2] : mt.x_mod;
    Tensor2 u = matmul_a_bt(e, presyn);
    scale_inplace(u, 1.0 / static_cast<double>(e.cols));
    return u;
}

UpdateSet noisy_bp_probe(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         double noise_level, Rng& rng) {
    require(noise_level >= 0.0, "noisy_bp_probe: noise_level must be >= 0");
    UpdateSet u = bp_updates(m, x, y_star, Mode::eval());
    if (noise_level == 0.0) return u;
    Rng noise = rng.substream(Rng::kNoise);
    const auto perturb = [&](auto& target) {
        std::vector<double> g(target.v.size());
        double gn = 0.0;
        for (double& v : g) {
            v = noise.next_gaussian();
            gn += v * v;
        }
        gn = std::sqrt(gn);
        if (gn == 0.0) return;
        double tn = 0.0;
        for (double v : target.v) tn += v * v;
        tn = std::sqrt(tn);
        const double scale = noise_level * tn / gn;
        for (std::size_t i = 0; i < g.size(); ++i) target.v[i] += scale * g[i];
    };
    for (std::size_t l = 0; l < u.dW.size(); ++l) {
        perturb(u.dW[l]);
        perturb(u.db[l]);
    }
    return u;
}

double noise_level_for_cosine(double target_cosine) {
    require(target_cosine > 0.0 && target_cosine <= 1.0,
            "noise_level_for_cosine: cosine outside (0, 1]");
    return std::sqrt(1.0 / (target_cosine * target_cosine) - 1.0);
}

}  // namespace pepita
