#include "pepita/attacks.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pepita/checkpoint.hpp"
#include "pepita/train.hpp"

namespace pepita {
namespace {

double sign0(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;  // covers v == 0 and NaN
}

void clip_box(Tensor2& x, double lo, double hi) {
    for (double& v : x.v) v = std::min(std::max(v, lo), hi);
}

// Elementwise clamp to [x0 - eps, x0 + eps], then the pixel box.
void project(Tensor2& x, const Tensor2& x0, const AttackConfig& cfg) {
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        const double lo = x0.v[i] - cfg.epsilon;
        const double hi = x0.v[i] + cfg.epsilon;
        x.v[i] = std::min(std::max(x.v[i], lo), hi);
    }
    clip_box(x, cfg.pixel_min, cfg.pixel_max);
}

// One PGD run over all columns at once. Column j draws only from rngs[j],
// and every arithmetic step is per-column, so column j is bit-identical to
// a single-sample run with the same rng.
Tensor2 pgd_cols(const Mlp& m, const Tensor2& x0, const Tensor2& y,
                 const AttackConfig& cfg, std::vector<Rng>& rngs) {
    Tensor2 x = x0;
    if (cfg.random_start) {
        for (std::size_t j = 0; j < x.cols; ++j)
            for (std::size_t i = 0; i < x.rows; ++i)
                x(i, j) += rngs[j].uniform(-cfg.epsilon, cfg.epsilon);
        project(x, x0, cfg);
    }
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const Tensor2 g = input_gradient_cols(m, x, y);
        for (std::size_t i = 0; i < x.v.size(); ++i)
            x.v[i] += cfg.step * sign0(g.v[i]);
        project(x, x0, cfg);
    }
    return x;
}

}  // namespace

void AttackConfig::validate() const {
    // epsilon == 0 is the admissible no-op attack: x_adv == clip(x).
    require(epsilon >= 0.0, "AttackConfig: epsilon must be >= 0");
    require(step > 0.0, "AttackConfig: step must be > 0");
    require(iterations >= 1, "AttackConfig: iterations must be >= 1");
    require(pixel_min < pixel_max, "AttackConfig: empty pixel box");
    if (kind == AttackKind::FGSM)
        require(iterations == 1, "AttackConfig: FGSM is single-step");
}

AttackConfig AttackConfig::fgsm_default() {
    AttackConfig cfg;
    cfg.kind = AttackKind::FGSM;
    cfg.iterations = 1;
    cfg.random_start = false;
    return cfg;
}

AttackConfig AttackConfig::pgd_default() { return AttackConfig{}; }

Tensor2 input_gradient_cols(const Mlp& m, const Tensor2& x,
                            const Tensor2& y_star) {
    const ForwardTrace t = forward_frozen(m, x);
    const BackwardTrace bt = backward(m, t, y_star);
    return matmul_at_b(m.layers.front().W, bt.deltas.front());
}

Tensor1 input_gradient(const Mlp& m, const Tensor1& x, const Tensor1& y_star) {
    return column(input_gradient_cols(m, as_column(x), as_column(y_star)), 0);
}

Tensor1 fgsm(const Mlp& m, const Tensor1& x, const Tensor1& y_star,
             const AttackConfig& cfg) {
    cfg.validate();
    require(cfg.kind == AttackKind::FGSM, "fgsm: wrong attack kind");
    const Tensor1 g = input_gradient(m, x, y_star);
    Tensor1 out = x;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += cfg.epsilon * sign0(g[i]);
        out[i] = std::min(std::max(out[i], cfg.pixel_min), cfg.pixel_max);
    }
    return out;
}

Tensor1 pgd(const Mlp& m, const Tensor1& x, const Tensor1& y_star,
            const AttackConfig& cfg, Rng& rng) {
    cfg.validate();
    require(cfg.kind == AttackKind::PGD, "pgd: wrong attack kind");
    std::vector<Rng> rngs{rng};
    Tensor2 out =
        pgd_cols(m, as_column(x), as_column(y_star), cfg, rngs);
    rng = rngs[0];
    return column(out, 0);
}

Tensor2 attack_batch(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                     const std::vector<std::size_t>& sample_ids,
                     const AttackConfig& cfg, const Rng& base) {
    cfg.validate();
    require(sample_ids.size() == x.cols, "attack_batch: one id per column");
    require(y_star.cols == x.cols, "attack_batch: label column mismatch");
    std::vector<Rng> rngs;
    rngs.reserve(x.cols);
    for (std::size_t id : sample_ids) rngs.push_back(base.substream(id));
    if (cfg.kind == AttackKind::FGSM) {
        const Tensor2 g = input_gradient_cols(m, x, y_star);
        Tensor2 out = x;
        for (std::size_t i = 0; i < out.v.size(); ++i) {
            out.v[i] += cfg.epsilon * sign0(g.v[i]);
            out.v[i] = std::min(std::max(out.v[i], cfg.pixel_min), cfg.pixel_max);
        }
        return out;
    }
    return pgd_cols(m, x, y_star, cfg, rngs);
}

namespace {

constexpr char kDumpMagic[8] = {'P', 'E', 'P', 'I', 'T', 'A', 'D', '1'};

}  // namespace

void save_adversarial_dump(const std::string& path, const Tensor2& x_adv,
                           const AttackConfig& cfg, std::uint64_t seed,
                           const Mlp& model) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f.write(kDumpMagic, sizeof kDumpMagic);
    const std::uint32_t dims[2] = {static_cast<std::uint32_t>(x_adv.rows),
                                   static_cast<std::uint32_t>(x_adv.cols)};
    f.write(reinterpret_cast<const char*>(dims), sizeof dims);
    f.write(reinterpret_cast<const char*>(x_adv.v.data()),
            static_cast<std::streamsize>(x_adv.v.size() * sizeof(double)));
    if (!f) throw ParseError("short write to " + path);

    std::ostringstream hash;
    hash << std::hex << model_hash(model);
    nlohmann::json manifest{
        {"attack", cfg.kind == AttackKind::FGSM ? "fgsm" : "pgd"},
        {"epsilon", cfg.epsilon},
        {"step", cfg.step},
        {"iterations", cfg.iterations},
        {"random_start", cfg.random_start},
        {"seed", seed},
        {"model_hash", hash.str()},
    };
    std::ofstream mf(path + ".json", std::ios::trunc);
    if (!mf) throw ParseError("cannot open " + path + ".json");
    mf << manifest.dump(2) << '\n';
}

Tensor2 load_adversarial_dump(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    char magic[8];
    f.read(magic, sizeof magic);
    if (!f || std::memcmp(magic, kDumpMagic, sizeof kDumpMagic) != 0)
        throw ParseError(path + ": bad magic at offset 0");
    std::uint32_t dims[2];
    f.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!f) throw ParseError(path + ": truncated header at offset 8");
    Tensor2 x(dims[0], dims[1]);
    f.read(reinterpret_cast<char*>(x.v.data()),
           static_cast<std::streamsize>(x.v.size() * sizeof(double)));
    if (!f) throw ParseError(path + ": truncated payload at offset 16");
    return x;
}

}  // namespace pepita
