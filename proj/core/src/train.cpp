#include "pepita/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

namespace pepita {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start)
        .count();
}

// Derivative of layer `act` applied to upstream gradient g. For softmax
// the Jacobian needs the activation value; the caller passes it when the
// trace holds it unmasked, otherwise it is recomputed from z.
Tensor2 act_backward(Activation act, const Tensor2& z, const Tensor2* s,
                     Tensor2 g) {
    switch (act) {
        case Activation::ReLU: {
            const Tensor2 d = relu_deriv(z);
            for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] *= d.v[i];
            return g;
        }
        case Activation::Identity:
            return g;
        case Activation::Softmax:
            return s ? softmax_jacobian_vp_cols(*s, g)
                     : softmax_jacobian_vp_cols(softmax_cols(z), g);
    }
    throw ShapeError("unknown activation");
}

Tensor1 row_means(const Tensor2& a) {
    Tensor1 out(a.rows);
    const double inv = 1.0 / static_cast<double>(a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        const double* ai = a.row(i);
        for (std::size_t j = 0; j < a.cols; ++j) s += ai[j];
        out[i] = s * inv;
    }
    return out;
}

// dW = post * presyn^T / batch, db = row means of post.
void rank_update(UpdateSet& u, std::size_t l, const Tensor2& post,
                 const Tensor2& presyn) {
    u.dW[l] = matmul_a_bt(post, presyn);
    scale_inplace(u.dW[l], 1.0 / static_cast<double>(post.cols));
    u.db[l] = row_means(post);
}

std::vector<std::size_t> slice_ids(const std::vector<std::size_t>& idx,
                                   std::size_t begin, std::size_t count) {
    return {idx.begin() + static_cast<std::ptrdiff_t>(begin),
            idx.begin() + static_cast<std::ptrdiff_t>(begin + count)};
}

}  // namespace

void TrainConfig::validate() const {
    require(lr > 0.0, "TrainConfig: lr must be > 0");
    require(momentum >= 0.0 && momentum < 1.0,
            "TrainConfig: momentum outside [0, 1)");
    require(decay_factor > 0.0 && decay_factor <= 1.0,
            "TrainConfig: decay_factor outside (0, 1]");
    require(batch_size >= 1, "TrainConfig: batch_size must be >= 1");
    require(dropout >= 0.0 && dropout < 1.0,
            "TrainConfig: dropout outside [0, 1)");
    require(patience >= 1, "TrainConfig: patience must be >= 1");
}

UpdateSet UpdateSet::zeros_like(const Mlp& m) {
    UpdateSet u;
    for (const Layer& l : m.layers) {
        u.dW.emplace_back(l.W.rows, l.W.cols);
        u.db.emplace_back(l.b.size());
    }
    return u;
}

OptimizerState OptimizerState::zeros_like(const Mlp& m) {
    OptimizerState o;
    for (const Layer& l : m.layers) {
        o.vW.emplace_back(l.W.rows, l.W.cols);
        o.vb.emplace_back(l.b.size());
    }
    return o;
}

BackwardTrace backward(const Mlp& m, const ForwardTrace& t,
                       const Tensor2& y_star) {
    const std::size_t L = m.depth();
    require(t.h.size() == L, "backward: trace depth mismatch");
    require(y_star.rows == m.output_dim() && y_star.cols == t.output().cols,
            "backward: target shape mismatch");
    const bool masked = !t.masks.empty();
    const double keep = 1.0 - m.dropout_rate;

    BackwardTrace bt;
    bt.deltas.resize(L);
    const Tensor2 e = mse_error(t.output(), y_star);
    bt.deltas[L - 1] =
        act_backward(m.layers[L - 1].act, t.z[L - 1], &t.output(), e);
    for (std::size_t l = L - 1; l > 0; --l) {
        Tensor2 g = matmul_at_b(m.layers[l].W, bt.deltas[l]);
        if (masked) {
            const Tensor2& mask = t.masks[l];
            for (std::size_t i = 0; i < g.v.size(); ++i)
                g.v[i] *= mask.v[i] / keep;
        }
        bt.deltas[l - 1] =
            act_backward(m.layers[l - 1].act, t.z[l - 1], nullptr,
                         std::move(g));
    }
    return bt;
}

UpdateSet bp_updates_from_trace(const Mlp& m, const ForwardTrace& t,
                                const Tensor2& y_star) {
    const BackwardTrace bt = backward(m, t, y_star);
    UpdateSet u = UpdateSet::zeros_like(m);
    for (std::size_t l = 0; l < m.depth(); ++l)
        rank_update(u, l, bt.deltas[l], l == 0 ? t.x : t.h[l - 1]);
    return u;
}

UpdateSet bp_updates(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                     const Mode& mode) {
    return bp_updates_from_trace(m, forward(m, x, mode), y_star);
}

UpdateSet pepita_updates_from_traces(const Mlp& m, const ForwardTrace& t,
                                     const ModulatedTrace& mt,
                                     const Tensor2& y_star) {
    const std::size_t L = m.depth();
    require(t.h.size() == L && mt.h.size() == L,
            "pepita_updates: trace depth mismatch");
    const Tensor2 e = mse_error(t.output(), y_star);
    UpdateSet u = UpdateSet::zeros_like(m);
    for (std::size_t l = 0; l < L; ++l) {
        const Tensor2& presyn = l == 0 ? mt.x_mod : mt.h[l - 1];
        if (l + 1 == L) {
            rank_update(u, l, e, presyn);
        } else {
            Tensor2 diff = t.h[l];
            axpy_inplace(diff, -1.0, mt.h[l]);
            rank_update(u, l, diff, presyn);
        }
    }
    return u;
}

UpdateSet pepita_updates(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         const Mode& mode) {
    const ForwardTrace t = forward(m, x, mode);
    const Tensor2 e = mse_error(t.output(), y_star);
    const ModulatedTrace mt = forward_modulated(m, x, e, t);
    return pepita_updates_from_traces(m, t, mt, y_star);
}

void sgd_momentum_step(Mlp& m, OptimizerState& opt, const UpdateSet& u,
                       double lr, double momentum) {
    require(opt.vW.size() == m.layers.size() && u.dW.size() == m.layers.size(),
            "sgd_momentum_step: layer count mismatch");
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        scale_inplace(opt.vW[l], momentum);
        add_inplace(opt.vW[l], u.dW[l]);
        axpy_inplace(m.layers[l].W, -lr, opt.vW[l]);
        scale_inplace(opt.vb[l], momentum);
        add_inplace(opt.vb[l], u.db[l]);
        axpy_inplace(m.layers[l].b, -lr, opt.vb[l]);
    }
}

double lr_at_epoch(const TrainConfig& cfg, std::size_t epoch) {
    if (cfg.decay_mode == DecayMode::L2AtEpochs) return cfg.lr;
    double lr = cfg.lr;
    for (std::size_t e : cfg.decay_epochs)
        if (epoch >= e) lr *= cfg.decay_factor;
    return lr;
}

nlohmann::json to_json(const EpochRecord& r) {
    nlohmann::json j{{"epoch", r.epoch},
                     {"lr", r.lr},
                     {"train_loss", r.train_loss},
                     {"val_nat_acc", r.val_nat_acc},
                     {"wall_ms", r.wall_ms}};
    if (r.val_adv_acc) j["val_adv_acc"] = *r.val_adv_acc;
    return j;
}

nlohmann::json summary_json(const RunRecord& r) {
    return nlohmann::json{
        {"summary",
         {{"best_epoch", r.best_epoch},
          {"best_metric", r.best_metric},
          {"converged", r.converged},
          {"stop_reason", r.stop_reason},
          {"epochs_run", r.epochs.size()},
          {"total_wall_ms", r.total_wall_ms}}}};
}

void write_run_jsonl(const std::string& path, const RunRecord& r) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    for (const EpochRecord& er : r.epochs) f << to_json(er).dump() << '\n';
    f << summary_json(r).dump() << '\n';
}

double evaluate(const Mlp& m, const Dataset& d,
                const std::vector<std::size_t>& idx,
                const AttackConfig* attack, std::uint64_t attack_seed) {
    if (idx.empty()) return 0.0;
    const Rng base = Rng(attack_seed).substream(Rng::kAttack);
    const std::size_t chunk = 512;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < idx.size(); begin += chunk) {
        const std::size_t count = std::min(chunk, idx.size() - begin);
        Tensor2 x = gather_inputs(d, idx, begin, count);
        if (attack) {
            const Tensor2 y = gather_one_hot(d, idx, begin, count);
            x = attack_batch(m, x, y, slice_ids(idx, begin, count), *attack,
                             base);
        }
        const std::vector<std::size_t> pred = predict(m, x);
        for (std::size_t j = 0; j < count; ++j)
            if (pred[j] == d.labels[idx[begin + j]]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(idx.size());
}

TrainResult train(Mlp model, const Dataset& data, const TrainConfig& cfg,
                  const AttackConfig* augment, const AttackConfig* eval_attack,
                  const EpochHook& on_epoch) {
    cfg.validate();
    if (cfg.early_stop_metric == EarlyStopMetric::AdversarialVal)
        require(eval_attack != nullptr,
                "train: adversarial early stopping needs an eval attack");
    // The config owns the dropout hyperparameters; the model carries them
    // only so forward passes can see them.
    model.dropout_rate = cfg.dropout;
    model.dropout_input = cfg.dropout_input;
    model.validate();

    RunRecord rec;
    Mlp best = model;
    double best_metric = -std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t since_best = 0;
    OptimizerState opt = OptimizerState::zeros_like(model);
    const Rng master(cfg.seed);
    const auto run_start = Clock::now();
    const double chance = 1.0 / static_cast<double>(data.num_classes);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto epoch_start = Clock::now();
        if (cfg.decay_mode == DecayMode::L2AtEpochs &&
            std::find(cfg.decay_epochs.begin(), cfg.decay_epochs.end(),
                      epoch) != cfg.decay_epochs.end())
            for (Layer& l : model.layers)
                scale_inplace(l.W, 1.0 - cfg.decay_factor);
        const double lr = lr_at_epoch(cfg, epoch);

        Rng shuffle_rng = master.substream(Rng::kShuffle).substream(epoch);
        Rng dropout_rng = master.substream(Rng::kDropout).substream(epoch);
        const Rng attack_base =
            master.substream(Rng::kAttack).substream(epoch);
        std::vector<std::size_t> order = data.train_idx;
        shuffle_rng.shuffle(order);
        const Mode mode = cfg.dropout > 0.0 ? Mode::train_with(dropout_rng)
                                            : Mode::eval();

        double loss_sum = 0.0;
        std::size_t loss_n = 0;
        bool finite = true;
        for (std::size_t begin = 0; begin < order.size();
             begin += cfg.batch_size) {
            const std::size_t count =
                std::min(cfg.batch_size, order.size() - begin);
            Tensor2 x = gather_inputs(data, order, begin, count);
            Tensor2 y = gather_one_hot(data, order, begin, count);
            if (augment) {
                const Tensor2 x_adv = attack_batch(
                    model, x, y, slice_ids(order, begin, count), *augment,
                    attack_base);
                x = hconcat(x, x_adv);
                y = hconcat(y, y);
            }
            const ForwardTrace t = forward(model, x, mode);
            const double batch_loss = mse_loss_cols(t.output(), y);
            if (!std::isfinite(batch_loss)) {
                finite = false;
                break;
            }
            UpdateSet u;
            if (cfg.rule == Rule::BP) {
                u = bp_updates_from_trace(model, t, y);
            } else {
                const Tensor2 e = mse_error(t.output(), y);
                const ModulatedTrace mt = forward_modulated(model, x, e, t);
                u = pepita_updates_from_traces(model, t, mt, y);
            }
            sgd_momentum_step(model, opt, u, lr, cfg.momentum);
            loss_sum += batch_loss * static_cast<double>(x.cols);
            loss_n += x.cols;
        }
        if (!finite) {
            rec.converged = false;
            rec.stop_reason = "diverged";
            break;
        }

        EpochRecord er;
        er.epoch = epoch;
        er.lr = lr;
        er.train_loss = loss_n ? loss_sum / static_cast<double>(loss_n) : 0.0;
        er.val_nat_acc = evaluate(model, data, data.val_idx);
        if (eval_attack) {
            const std::vector<std::size_t>* vidx = &data.val_idx;
            std::vector<std::size_t> sub;
            if (cfg.val_adv_subsample > 0 &&
                cfg.val_adv_subsample < data.val_idx.size()) {
                // val_idx is already in seeded-shuffle order, so a prefix
                // is a random subsample.
                sub = slice_ids(data.val_idx, 0, cfg.val_adv_subsample);
                vidx = &sub;
            }
            er.val_adv_acc =
                evaluate(model, data, *vidx, eval_attack, cfg.seed);
        }
        er.wall_ms = ms_since(epoch_start);
        rec.epochs.push_back(er);
        if (on_epoch) on_epoch(model, er);

        const double metric =
            cfg.early_stop_metric == EarlyStopMetric::AdversarialVal
                ? *er.val_adv_acc
                : er.val_nat_acc;
        if (metric > best_metric) {
            best_metric = metric;
            best_epoch = epoch;
            best = model;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            rec.stop_reason = "early_stop";
            break;
        }
        if (epoch + 1 >= 20 && er.val_nat_acc <= 1.5 * chance) {
            rec.converged = false;
            rec.stop_reason = "non_convergent";
            break;
        }
    }

    rec.best_epoch = best_epoch;
    rec.best_metric = std::isfinite(best_metric) ? best_metric : 0.0;
    rec.total_wall_ms = ms_since(run_start);
    return {std::move(best), std::move(rec)};
}

}  // namespace pepita
