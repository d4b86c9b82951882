#ifndef PEPITA_TRAIN_HPP
#define PEPITA_TRAIN_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pepita/attacks.hpp"
#include "pepita/dataset.hpp"
#include "pepita/mlp.hpp"

#include "json.hpp"

namespace pepita {

enum class Rule : std::uint8_t { BP, PEPITA };
enum class EarlyStopMetric : std::uint8_t { NaturalVal, AdversarialVal };

// "Decay at epochs 60 and 90" is read as step learning-rate decay; the
// L2AtEpochs switch instead keeps the rate constant and shrinks the
// weight matrices once by (1 - decay_factor) on entering each listed
// epoch, for comparing the two readings.
enum class DecayMode : std::uint8_t { LrDecay, L2AtEpochs };

struct TrainConfig {
    Rule rule = Rule::BP;
    double lr = 0.1;
    double momentum = 0.9;
    std::size_t epochs = 100;
    std::size_t batch_size = 64;
    double dropout = 0.1;
    bool dropout_input = false;
    std::vector<std::size_t> decay_epochs = {60, 90};
    double decay_factor = 0.1;
    DecayMode decay_mode = DecayMode::LrDecay;
    EarlyStopMetric early_stop_metric = EarlyStopMetric::NaturalVal;
    std::size_t patience = 10;
    std::uint64_t seed = 1;
    // Adversarial validation accuracy is computed on at most this many
    // val samples (0 = all); only evaluated when an eval attack is set.
    std::size_t val_adv_subsample = 0;

    void validate() const;
};

struct BackwardTrace {
    // deltas[l] has layer l's rows; columns are batch samples.
    std::vector<Tensor2> deltas;
};

// Pre-optimizer updates averaged over the batch; shapes mirror the model.
struct UpdateSet {
    std::vector<Tensor2> dW;
    std::vector<Tensor1> db;

    static UpdateSet zeros_like(const Mlp& m);
};

// Per-parameter velocity buffers, zero-initialized.
struct OptimizerState {
    std::vector<Tensor2> vW;
    std::vector<Tensor1> vb;

    static OptimizerState zeros_like(const Mlp& m);
};

// Exact deltas for the half-sum-of-squares objective behind e = h - y*
// (the 2/n factor lives in the learning rate). Output layer applies the
// softmax Jacobian; hidden recursion multiplies W^T delta by the
// activation derivative and the trace's dropout masks.
BackwardTrace backward(const Mlp& m, const ForwardTrace& t,
                       const Tensor2& y_star);

UpdateSet bp_updates_from_trace(const Mlp& m, const ForwardTrace& t,
                                const Tensor2& y_star);
UpdateSet bp_updates(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                     const Mode& mode);

// Hidden layers: dW_i = (h_i - h_mod_i) (h_mod_{i-1})^T, db_i the same
// difference; output: dW_L = e (h_mod_{L-1})^T, db_L = e. Both passes
// share the trace's dropout masks.
UpdateSet pepita_updates_from_traces(const Mlp& m, const ForwardTrace& t,
                                     const ModulatedTrace& mt,
                                     const Tensor2& y_star);
UpdateSet pepita_updates(const Mlp& m, const Tensor2& x, const Tensor2& y_star,
                         const Mode& mode);

// Classical momentum: v <- momentum v + dW; W <- W - lr v.
void sgd_momentum_step(Mlp& m, OptimizerState& opt, const UpdateSet& u,
                       double lr, double momentum);

// lr * decay_factor^(count of decay epochs <= epoch); constant in
// L2AtEpochs mode.
double lr_at_epoch(const TrainConfig& cfg, std::size_t epoch);

struct EpochRecord {
    std::size_t epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double val_nat_acc = 0.0;
    std::optional<double> val_adv_acc;
    double wall_ms = 0.0;
};

struct RunRecord {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_metric = 0.0;
    bool converged = true;
    std::string stop_reason = "completed";  // early_stop | diverged | non_convergent
    double total_wall_ms = 0.0;
};

nlohmann::json to_json(const EpochRecord& r);
nlohmann::json summary_json(const RunRecord& r);
// One JSON line per epoch, then {"summary": ...}.
void write_run_jsonl(const std::string& path, const RunRecord& r);

struct TrainResult {
    Mlp model;  // best-epoch checkpoint by the early-stop metric
    RunRecord record;
};

// Observes the model right after each epoch's record is taken.
using EpochHook = std::function<void(const Mlp&, const EpochRecord&)>;

// Full epoch loop: seeded shuffle, mini-batches, optional on-the-fly
// adversarial augmentation (1:1 natural:adversarial against the current
// weights, original labels), rule updates, momentum step, per-epoch
// validation, early stopping with best-checkpoint restore, divergence
// guard. eval_attack switches on adversarial validation accuracy.
TrainResult train(Mlp model, const Dataset& data, const TrainConfig& cfg,
                  const AttackConfig* augment = nullptr,
                  const AttackConfig* eval_attack = nullptr,
                  const EpochHook& on_epoch = {});

// Fraction of correct predictions over idx; when attack is set each
// sample is perturbed against this model first (streams derived from
// attack_seed and the sample id).
double evaluate(const Mlp& m, const Dataset& d,
                const std::vector<std::size_t>& idx,
                const AttackConfig* attack = nullptr,
                std::uint64_t attack_seed = 0);

}  // namespace pepita

#endif
