#ifndef PEPITA_EXPERIMENTS_HPP
#define PEPITA_EXPERIMENTS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pepita/train.hpp"

namespace pepita {

enum class TrainAttackKind : std::uint8_t { None, FGSM, PGD };
enum class GridSpacing : std::uint8_t { Log, Linear };

// One experiment family: dataset + rule + training attack + evaluation
// attacks + grid/seed protocol. Loadable from JSON; the scale preset
// ("paper" or "desk") fills in width/epochs/subsets.
struct ExperimentConfig {
    std::string dataset = "mnist";
    Rule rule = Rule::BP;
    TrainAttackKind training_attack = TrainAttackKind::None;
    EarlyStopMetric selection = EarlyStopMetric::NaturalVal;

    std::size_t grid_count = 50;
    double grid_min = 0.001;
    double grid_max = 0.3;
    GridSpacing grid_spacing = GridSpacing::Log;

    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::uint64_t split_seed = 1;

    std::string scale = "desk";  // desk | paper
    std::vector<std::size_t> hidden_dims = {256};
    std::size_t subset = 10000;  // 0 = full training split
    double f_scale = 0.05;

    TrainConfig train;
    AttackConfig train_attack_cfg;  // used when training_attack != None
    AttackConfig eval_fgsm = AttackConfig::fgsm_default();
    AttackConfig eval_pgd = AttackConfig::pgd_default();
    bool eval_with_fgsm = true;
    bool eval_with_pgd = true;
    // Test-set evaluation subsample (0 = full test split); the subset is
    // a fixed seeded shuffle prefix so every run scores the same samples.
    std::size_t eval_subsample = 2000;
    // Per-epoch curve evaluation is the hot path of training_curves, so
    // it gets its own (smaller) subsample and PGD depth; 0 falls back to
    // eval_subsample / eval_pgd.iterations.
    std::size_t curve_subsample = 500;
    std::size_t curve_pgd_iters = 10;

    std::string data_dir = "data";
    std::string out_dir = "out";

    void validate() const;
};

// Fills scale-dependent fields: desk = hidden 256, 15 epochs, 10k subset,
// PGD-10 training augmentation, 1000-sample adversarial validation,
// 2000-sample test evaluation; paper = hidden 1024, 100 epochs, full
// data, PGD-40 everywhere, full evaluation.
void apply_scale(ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::string& path);
void save_experiment(const std::string& path, const ExperimentConfig& cfg);

// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Best-effort current commit hash, "unknown" outside a work tree.
std::string git_revision();

// {config_hash, git_revision, config, outputs}.
void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, n-1 denominator
    std::size_t n = 0;
};
MeanStd mean_std(const std::vector<double>& xs);

// load_raw + prepare + subset, honoring the config's scale.
Dataset load_prepared(const ExperimentConfig& cfg);

// Fresh model for one run: He-uniform layers, zero biases, F at f_scale.
Mlp build_model(const ExperimentConfig& cfg, const Dataset& d,
                std::uint64_t seed);

// One (eta, seed) training run wired up from the config: augmentation
// per training_attack, adversarial validation per selection.
TrainResult run_one(const ExperimentConfig& cfg, const Dataset& data,
                    double eta, std::uint64_t seed,
                    const EpochHook& on_epoch = {},
                    bool force_adv_val = false);

// Test accuracy in percent on the config's evaluation subsample; a null
// attack scores natural accuracy.
double test_accuracy(const ExperimentConfig& cfg, const Dataset& data,
                     const Mlp& m, const AttackConfig* attack = nullptr,
                     std::uint64_t attack_seed = 0);

std::vector<double> lr_grid(const ExperimentConfig& cfg);

struct GridRun {
    double eta = 0.0;
    double score = 0.0;  // selection metric at the best epoch; 0 if non-convergent
    bool converged = false;
    double val_nat = 0.0;
    std::optional<double> val_adv;
};

struct GridResult {
    double best_eta = 0.0;
    std::vector<GridRun> runs;
};

// Argmax of score, ties to the smaller eta. runs must be eta-ascending.
double best_eta(const std::vector<GridRun>& runs);

// Trains every grid eta on one tuning seed (seeds.front()) and scores by
// the selection criterion; with_adv_val forces per-epoch adversarial
// validation so tradeoff_sweep can read val_adv off the runs.
GridResult grid_search(const ExperimentConfig& cfg, const Dataset& data,
                       bool with_adv_val = false);

// One CSV row; accuracies are percentages.
struct TableRow {
    std::string rule;
    std::string dataset;
    std::string metric;  // natural | fgsm | pgd
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
    double eta = 0.0;
};
using SummaryTable = std::vector<TableRow>;

// Trains eta on every seed and aggregates test accuracies.
SummaryTable run_table(const ExperimentConfig& cfg, const Dataset& data,
                       double eta);

void write_table_csv(const std::string& path, const SummaryTable& table);

struct TradeoffPoint {
    double target = 0.0;  // natural validation accuracy target, percent
    double eta = 0.0;
    bool achieved = false;
    MeanStd natural;  // test accuracies, percent
    MeanStd adversarial;
};

struct TradeoffCurve {
    std::vector<TradeoffPoint> points;
    // Mean of (natural - adversarial) over achieved points, percent.
    double mean_gap = 0.0;
};

// 13 evenly spaced natural-accuracy targets, 96 to 99 percent.
std::vector<double> default_tradeoff_targets();

// For each target: among tuning-seed grid runs with natural validation
// accuracy within window percentage points, picks the best adversarial
// performer, then retrains that eta on all seeds. Targets with no
// candidate are reported unachieved.
TradeoffCurve tradeoff_sweep(const ExperimentConfig& cfg, const Dataset& data,
                             const std::vector<double>& targets,
                             double window = 0.5);

void write_tradeoff_csv(const std::string& path, const ExperimentConfig& cfg,
                        const TradeoffCurve& curve);

struct CurvePoint {
    std::size_t epoch = 0;
    MeanStd natural;      // test accuracy, percent
    MeanStd adversarial;  // PGD test accuracy, percent
};

// Trains each seed for extended_epochs (early stopping disabled) and
// records per-epoch natural and PGD test accuracy.
std::vector<CurvePoint> training_curves(const ExperimentConfig& cfg,
                                        const Dataset& data, double eta,
                                        std::size_t extended_epochs);

void write_curves_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::vector<CurvePoint>& curve);

std::string rule_name(Rule r);

}  // namespace pepita

#endif
