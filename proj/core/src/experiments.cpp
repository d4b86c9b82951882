#include "pepita/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pepita/parallel.hpp"

namespace pepita {
namespace {

constexpr std::uint64_t kEvalSubsetSeed = 0x5eed5;

std::string train_attack_name(TrainAttackKind k) {
    switch (k) {
        case TrainAttackKind::None: return "none";
        case TrainAttackKind::FGSM: return "fgsm";
        case TrainAttackKind::PGD: return "pgd";
    }
    throw ShapeError("unknown training attack kind");
}

TrainAttackKind train_attack_from_name(const std::string& s) {
    if (s == "none") return TrainAttackKind::None;
    if (s == "fgsm") return TrainAttackKind::FGSM;
    if (s == "pgd") return TrainAttackKind::PGD;
    throw ParseError("unknown training attack \"" + s + "\"");
}

std::string selection_name(EarlyStopMetric m) {
    return m == EarlyStopMetric::AdversarialVal ? "adversarial" : "natural";
}

EarlyStopMetric selection_from_name(const std::string& s) {
    if (s == "natural") return EarlyStopMetric::NaturalVal;
    if (s == "adversarial") return EarlyStopMetric::AdversarialVal;
    throw ParseError("unknown selection \"" + s + "\"");
}

nlohmann::json to_json(const AttackConfig& a) {
    return {{"kind", a.kind == AttackKind::FGSM ? "fgsm" : "pgd"},
            {"epsilon", a.epsilon},
            {"step", a.step},
            {"iterations", a.iterations},
            {"random_start", a.random_start},
            {"pixel_min", a.pixel_min},
            {"pixel_max", a.pixel_max}};
}

AttackConfig attack_from_json(const nlohmann::json& j, AttackConfig a) {
    const std::string kind = j.value("kind", a.kind == AttackKind::FGSM
                                                 ? std::string("fgsm")
                                                 : std::string("pgd"));
    if (kind == "fgsm")
        a.kind = AttackKind::FGSM;
    else if (kind == "pgd")
        a.kind = AttackKind::PGD;
    else
        throw ParseError("unknown attack kind \"" + kind + "\"");
    a.epsilon = j.value("epsilon", a.epsilon);
    a.step = j.value("step", a.step);
    a.iterations = j.value("iterations", a.iterations);
    a.random_start = j.value("random_start", a.random_start);
    a.pixel_min = j.value("pixel_min", a.pixel_min);
    a.pixel_max = j.value("pixel_max", a.pixel_max);
    return a;
}

nlohmann::json to_json(const TrainConfig& t) {
    return {{"lr", t.lr},
            {"momentum", t.momentum},
            {"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"dropout", t.dropout},
            {"dropout_input", t.dropout_input},
            {"decay_epochs", t.decay_epochs},
            {"decay_factor", t.decay_factor},
            {"decay_mode", t.decay_mode == DecayMode::LrDecay ? "lr-decay"
                                                              : "l2-at-epochs"},
            {"patience", t.patience},
            {"val_adv_subsample", t.val_adv_subsample}};
}

TrainConfig train_from_json(const nlohmann::json& j, TrainConfig t) {
    t.lr = j.value("lr", t.lr);
    t.momentum = j.value("momentum", t.momentum);
    t.epochs = j.value("epochs", t.epochs);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.dropout = j.value("dropout", t.dropout);
    t.dropout_input = j.value("dropout_input", t.dropout_input);
    t.decay_epochs =
        j.value("decay_epochs", t.decay_epochs);
    t.decay_factor = j.value("decay_factor", t.decay_factor);
    const std::string mode = j.value(
        "decay_mode", t.decay_mode == DecayMode::LrDecay ? "lr-decay"
                                                         : "l2-at-epochs");
    if (mode == "lr-decay")
        t.decay_mode = DecayMode::LrDecay;
    else if (mode == "l2-at-epochs")
        t.decay_mode = DecayMode::L2AtEpochs;
    else
        throw ParseError("unknown decay mode \"" + mode + "\"");
    t.patience = j.value("patience", t.patience);
    t.val_adv_subsample = j.value("val_adv_subsample", t.val_adv_subsample);
    return t;
}

// The fixed seeded-shuffle prefix every run is scored on.
std::vector<std::size_t> eval_test_idx(const ExperimentConfig& cfg,
                                       const Dataset& d) {
    std::vector<std::size_t> idx = d.test_idx;
    if (cfg.eval_subsample > 0 && cfg.eval_subsample < idx.size()) {
        Rng r = Rng(kEvalSubsetSeed).substream(Rng::kShuffle);
        r.shuffle(idx);
        idx.resize(cfg.eval_subsample);
    }
    return idx;
}

}  // namespace

std::string rule_name(Rule r) { return r == Rule::BP ? "bp" : "pepita"; }

void ExperimentConfig::validate() const {
    require(grid_count >= 1, "ExperimentConfig: empty grid");
    // A one-point grid may pin min == max; larger grids need a real span.
    require(grid_min > 0.0 &&
                (grid_count == 1 ? grid_min <= grid_max
                                 : grid_min < grid_max),
            "ExperimentConfig: grid bounds must satisfy 0 < min < max");
    require(!seeds.empty(), "ExperimentConfig: seeds must be non-empty");
    require(!hidden_dims.empty(), "ExperimentConfig: no hidden layers");
    require(scale == "desk" || scale == "paper",
            "ExperimentConfig: scale must be desk or paper");
    train.validate();
    if (training_attack != TrainAttackKind::None) train_attack_cfg.validate();
    eval_fgsm.validate();
    eval_pgd.validate();
}

void apply_scale(ExperimentConfig& cfg) {
    if (cfg.scale == "paper") {
        cfg.hidden_dims = {1024};
        cfg.subset = 0;
        cfg.train.epochs = 100;
        cfg.train.val_adv_subsample = 0;
        cfg.eval_subsample = 0;
        cfg.curve_subsample = 0;
        cfg.curve_pgd_iters = 0;
        cfg.train_attack_cfg = AttackConfig::pgd_default();
    } else {
        cfg.hidden_dims = {256};
        cfg.subset = 10000;
        cfg.train.epochs = 15;
        cfg.train.val_adv_subsample = 1000;
        cfg.eval_subsample = 2000;
        cfg.curve_subsample = 500;
        cfg.curve_pgd_iters = 10;
        cfg.train_attack_cfg = AttackConfig::pgd_default();
        cfg.train_attack_cfg.iterations = 10;
    }
    if (cfg.training_attack == TrainAttackKind::FGSM) {
        cfg.train_attack_cfg = AttackConfig::fgsm_default();
    }
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    return {{"dataset", cfg.dataset},
            {"rule", rule_name(cfg.rule)},
            {"training_attack", train_attack_name(cfg.training_attack)},
            {"selection", selection_name(cfg.selection)},
            {"grid",
             {{"count", cfg.grid_count},
              {"min", cfg.grid_min},
              {"max", cfg.grid_max},
              {"spacing",
               cfg.grid_spacing == GridSpacing::Log ? "log" : "linear"}}},
            {"seeds", cfg.seeds},
            {"split_seed", cfg.split_seed},
            {"scale", cfg.scale},
            {"hidden_dims", cfg.hidden_dims},
            {"subset", cfg.subset},
            {"f_scale", cfg.f_scale},
            {"train", to_json(cfg.train)},
            {"train_attack", to_json(cfg.train_attack_cfg)},
            {"eval_fgsm", to_json(cfg.eval_fgsm)},
            {"eval_pgd", to_json(cfg.eval_pgd)},
            {"eval_with_fgsm", cfg.eval_with_fgsm},
            {"eval_with_pgd", cfg.eval_with_pgd},
            {"eval_subsample", cfg.eval_subsample},
            {"curve_subsample", cfg.curve_subsample},
            {"curve_pgd_iters", cfg.curve_pgd_iters},
            {"data_dir", cfg.data_dir},
            {"out_dir", cfg.out_dir}};
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.dataset = j.value("dataset", cfg.dataset);
    const std::string rule = j.value("rule", rule_name(cfg.rule));
    if (rule == "bp")
        cfg.rule = Rule::BP;
    else if (rule == "pepita")
        cfg.rule = Rule::PEPITA;
    else
        throw ParseError("unknown rule \"" + rule + "\"");
    cfg.training_attack = train_attack_from_name(
        j.value("training_attack", train_attack_name(cfg.training_attack)));
    cfg.selection =
        selection_from_name(j.value("selection", selection_name(cfg.selection)));
    if (j.contains("grid")) {
        const nlohmann::json& g = j.at("grid");
        cfg.grid_count = g.value("count", cfg.grid_count);
        cfg.grid_min = g.value("min", cfg.grid_min);
        cfg.grid_max = g.value("max", cfg.grid_max);
        const std::string spacing = g.value(
            "spacing",
            cfg.grid_spacing == GridSpacing::Log ? "log" : "linear");
        if (spacing == "log")
            cfg.grid_spacing = GridSpacing::Log;
        else if (spacing == "linear")
            cfg.grid_spacing = GridSpacing::Linear;
        else
            throw ParseError("unknown grid spacing \"" + spacing + "\"");
    }
    cfg.seeds = j.value("seeds", cfg.seeds);
    cfg.split_seed = j.value("split_seed", cfg.split_seed);
    cfg.scale = j.value("scale", cfg.scale);
    cfg.hidden_dims = j.value("hidden_dims", cfg.hidden_dims);
    cfg.subset = j.value("subset", cfg.subset);
    cfg.f_scale = j.value("f_scale", cfg.f_scale);
    if (j.contains("train")) cfg.train = train_from_json(j.at("train"), cfg.train);
    if (j.contains("train_attack"))
        cfg.train_attack_cfg =
            attack_from_json(j.at("train_attack"), cfg.train_attack_cfg);
    if (j.contains("eval_fgsm"))
        cfg.eval_fgsm = attack_from_json(j.at("eval_fgsm"), cfg.eval_fgsm);
    if (j.contains("eval_pgd"))
        cfg.eval_pgd = attack_from_json(j.at("eval_pgd"), cfg.eval_pgd);
    cfg.eval_with_fgsm = j.value("eval_with_fgsm", cfg.eval_with_fgsm);
    cfg.eval_with_pgd = j.value("eval_with_pgd", cfg.eval_with_pgd);
    cfg.eval_subsample = j.value("eval_subsample", cfg.eval_subsample);
    cfg.curve_subsample = j.value("curve_subsample", cfg.curve_subsample);
    cfg.curve_pgd_iters = j.value("curve_pgd_iters", cfg.curve_pgd_iters);
    cfg.data_dir = j.value("data_dir", cfg.data_dir);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    nlohmann::json j;
    f >> j;
    return experiment_from_json(j);
}

void save_experiment(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f << to_json(cfg).dump(2) << '\n';
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string dump = to_json(cfg).dump();
    return fnv1a64(dump.data(), dump.size());
}

std::string git_revision() {
    namespace fs = std::filesystem;
    fs::path dir = fs::current_path();
    for (int depth = 0; depth < 8; ++depth) {
        const fs::path head = dir / ".git" / "HEAD";
        std::ifstream hf(head);
        if (hf) {
            std::string line;
            std::getline(hf, line);
            if (line.rfind("ref: ", 0) != 0) return line;
            const std::string ref = line.substr(5);
            std::ifstream rf(dir / ".git" / ref);
            if (rf) {
                std::string hash;
                std::getline(rf, hash);
                return hash;
            }
            std::ifstream pf(dir / ".git" / "packed-refs");
            std::string packed;
            while (std::getline(pf, packed))
                if (packed.size() > 41 && packed.substr(41) == ref)
                    return packed.substr(0, 40);
            return "unknown";
        }
        if (!dir.has_parent_path() || dir.parent_path() == dir) break;
        dir = dir.parent_path();
    }
    return "unknown";
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs) {
    std::ostringstream hash;
    hash << std::hex << config_hash(cfg);
    const nlohmann::json j{{"config_hash", hash.str()},
                           {"git_revision", git_revision()},
                           {"config", to_json(cfg)},
                           {"outputs", outputs}};
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return r;
}

Dataset load_prepared(const ExperimentConfig& cfg) {
    const RawData raw = load_raw(cfg.dataset, cfg.data_dir);
    Dataset d =
        prepare(raw, cfg.split_seed, default_val_fraction(cfg.dataset));
    if (cfg.subset > 0) apply_subset(d, cfg.subset);
    return d;
}

Mlp build_model(const ExperimentConfig& cfg, const Dataset& d,
                std::uint64_t seed) {
    std::vector<std::size_t> dims;
    dims.push_back(d.input_dim);
    dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
    dims.push_back(d.num_classes);
    Rng init = Rng(seed).substream(Rng::kInit);
    Mlp m = Mlp::make(dims, init, cfg.train.dropout, cfg.f_scale);
    m.dropout_input = cfg.train.dropout_input;
    return m;
}

TrainResult run_one(const ExperimentConfig& cfg, const Dataset& data,
                    double eta, std::uint64_t seed, const EpochHook& on_epoch,
                    bool force_adv_val) {
    TrainConfig tc = cfg.train;
    tc.rule = cfg.rule;
    tc.lr = eta;
    tc.seed = seed;
    tc.early_stop_metric = cfg.selection;

    AttackConfig aug;
    const AttackConfig* augment = nullptr;
    if (cfg.training_attack != TrainAttackKind::None) {
        aug = cfg.train_attack_cfg;
        if (cfg.training_attack == TrainAttackKind::FGSM) {
            aug.kind = AttackKind::FGSM;
            aug.iterations = 1;
            aug.random_start = false;
        } else {
            aug.kind = AttackKind::PGD;
        }
        augment = &aug;
    }
    const AttackConfig* eval_attack = nullptr;
    if (cfg.selection == EarlyStopMetric::AdversarialVal || force_adv_val)
        eval_attack = &cfg.eval_pgd;

    Mlp model = build_model(cfg, data, seed);
    return train(std::move(model), data, tc, augment, eval_attack, on_epoch);
}

std::vector<double> lr_grid(const ExperimentConfig& cfg) {
    std::vector<double> grid;
    grid.reserve(cfg.grid_count);
    if (cfg.grid_count == 1) {
        grid.push_back(cfg.grid_min);
        return grid;
    }
    const double n1 = static_cast<double>(cfg.grid_count - 1);
    for (std::size_t i = 0; i < cfg.grid_count; ++i) {
        const double f = static_cast<double>(i) / n1;
        if (cfg.grid_spacing == GridSpacing::Log)
            grid.push_back(std::exp(std::log(cfg.grid_min) +
                                    f * (std::log(cfg.grid_max) -
                                         std::log(cfg.grid_min))));
        else
            grid.push_back(cfg.grid_min + f * (cfg.grid_max - cfg.grid_min));
    }
    grid.back() = cfg.grid_max;
    return grid;
}

double best_eta(const std::vector<GridRun>& runs) {
    require(!runs.empty(), "best_eta: no runs");
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].score > runs[best].score) best = i;
    return runs[best].eta;
}

GridResult grid_search(const ExperimentConfig& cfg, const Dataset& data,
                       bool with_adv_val) {
    cfg.validate();
    const std::vector<double> grid = lr_grid(cfg);
    const std::uint64_t tuning_seed = cfg.seeds.front();
    GridResult result;
    result.runs.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const TrainResult res =
            run_one(cfg, data, grid[i], tuning_seed, {}, with_adv_val);
        GridRun& run = result.runs[i];
        run.eta = grid[i];
        run.converged = res.record.converged;
        run.score = res.record.converged ? res.record.best_metric : 0.0;
        if (res.record.best_epoch < res.record.epochs.size()) {
            const EpochRecord& er = res.record.epochs[res.record.best_epoch];
            run.val_nat = er.val_nat_acc;
            run.val_adv = er.val_adv_acc;
        }
    });
    result.best_eta = best_eta(result.runs);
    return result;
}

double test_accuracy(const ExperimentConfig& cfg, const Dataset& data,
                     const Mlp& m, const AttackConfig* attack,
                     std::uint64_t attack_seed) {
    return 100.0 *
           evaluate(m, data, eval_test_idx(cfg, data), attack, attack_seed);
}

SummaryTable run_table(const ExperimentConfig& cfg, const Dataset& data,
                       double eta) {
    cfg.validate();
    const std::vector<std::size_t> test_idx = eval_test_idx(cfg, data);
    std::vector<double> nat(cfg.seeds.size());
    std::vector<double> fgsm_acc(cfg.seeds.size());
    std::vector<double> pgd_acc(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        const TrainResult res = run_one(cfg, data, eta, seed);
        nat[i] = 100.0 * evaluate(res.model, data, test_idx);
        if (cfg.eval_with_fgsm)
            fgsm_acc[i] = 100.0 * evaluate(res.model, data, test_idx,
                                           &cfg.eval_fgsm, seed);
        if (cfg.eval_with_pgd)
            pgd_acc[i] = 100.0 * evaluate(res.model, data, test_idx,
                                          &cfg.eval_pgd, seed);
    });

    SummaryTable table;
    const auto push = [&](const std::string& metric, const MeanStd& ms) {
        table.push_back({rule_name(cfg.rule), cfg.dataset, metric, ms.mean,
                         ms.std, ms.n, eta});
    };
    push("natural", mean_std(nat));
    if (cfg.eval_with_fgsm) push("fgsm", mean_std(fgsm_acc));
    if (cfg.eval_with_pgd) push("pgd", mean_std(pgd_acc));
    return table;
}

void write_table_csv(const std::string& path, const SummaryTable& table) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f << "rule,dataset,metric,mean,std,n,eta\n";
    for (const TableRow& r : table) {
        std::ostringstream line;
        line.precision(6);
        line << r.rule << ',' << r.dataset << ',' << r.metric << ','
             << std::fixed << r.mean << ',' << r.std << ','
             << r.n << ',' << std::defaultfloat << r.eta;
        f << line.str() << '\n';
    }
}

std::vector<double> default_tradeoff_targets() {
    std::vector<double> targets;
    for (int i = 0; i < 13; ++i)
        targets.push_back(96.0 + 3.0 * i / 12.0);
    return targets;
}

TradeoffCurve tradeoff_sweep(const ExperimentConfig& cfg, const Dataset& data,
                             const std::vector<double>& targets,
                             double window) {
    cfg.validate();
    const GridResult grid = grid_search(cfg, data, /*with_adv_val=*/true);
    const std::vector<std::size_t> test_idx = eval_test_idx(cfg, data);

    // Several targets often land on the same eta; train each eta once.
    std::map<double, std::pair<MeanStd, MeanStd>> by_eta;
    const auto table_for = [&](double eta) {
        const auto it = by_eta.find(eta);
        if (it != by_eta.end()) return it->second;
        std::vector<double> nat(cfg.seeds.size());
        std::vector<double> adv(cfg.seeds.size());
        parallel_for(cfg.seeds.size(), [&](std::size_t i) {
            const std::uint64_t seed = cfg.seeds[i];
            const TrainResult res = run_one(cfg, data, eta, seed);
            nat[i] = 100.0 * evaluate(res.model, data, test_idx);
            adv[i] = 100.0 * evaluate(res.model, data, test_idx,
                                      &cfg.eval_pgd, seed);
        });
        const auto entry = std::make_pair(mean_std(nat), mean_std(adv));
        by_eta.emplace(eta, entry);
        return entry;
    };

    TradeoffCurve curve;
    double gap_sum = 0.0;
    std::size_t gap_n = 0;
    for (double target : targets) {
        TradeoffPoint p;
        p.target = target;
        const GridRun* chosen = nullptr;
        for (const GridRun& run : grid.runs) {
            if (!run.converged || !run.val_adv) continue;
            if (std::abs(100.0 * run.val_nat - target) > window) continue;
            if (!chosen || *run.val_adv > *chosen->val_adv) chosen = &run;
        }
        if (chosen) {
            p.achieved = true;
            p.eta = chosen->eta;
            const auto [nat, adv] = table_for(chosen->eta);
            p.natural = nat;
            p.adversarial = adv;
            gap_sum += nat.mean - adv.mean;
            ++gap_n;
        }
        curve.points.push_back(p);
    }
    curve.mean_gap = gap_n ? gap_sum / static_cast<double>(gap_n) : 0.0;
    return curve;
}

void write_tradeoff_csv(const std::string& path, const ExperimentConfig& cfg,
                        const TradeoffCurve& curve) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f << "rule,dataset,target,eta,achieved,natural_mean,natural_std,"
         "adversarial_mean,adversarial_std,n\n";
    for (const TradeoffPoint& p : curve.points) {
        if (!p.achieved) {
            f << rule_name(cfg.rule) << ',' << cfg.dataset << ',' << p.target
              << ",,skipped,,,,,\n";
            continue;
        }
        std::ostringstream line;
        line.precision(6);
        line << rule_name(cfg.rule) << ',' << cfg.dataset << ',' << p.target
             << ',' << p.eta << ",achieved," << std::fixed << p.natural.mean
             << ',' << p.natural.std << ',' << p.adversarial.mean << ','
             << p.adversarial.std << ',' << std::defaultfloat << p.natural.n;
        f << line.str() << '\n';
    }
}

std::vector<CurvePoint> training_curves(const ExperimentConfig& cfg,
                                        const Dataset& data, double eta,
                                        std::size_t extended_epochs) {
    cfg.validate();
    ExperimentConfig run_cfg = cfg;
    run_cfg.train.epochs = extended_epochs;
    run_cfg.train.patience = extended_epochs + 1;  // disables early stopping

    std::vector<std::size_t> test_idx = eval_test_idx(cfg, data);
    if (cfg.curve_subsample > 0 && cfg.curve_subsample < test_idx.size())
        test_idx.resize(cfg.curve_subsample);
    AttackConfig pgd = cfg.eval_pgd;
    if (cfg.curve_pgd_iters > 0) pgd.iterations = cfg.curve_pgd_iters;

    std::vector<std::vector<std::pair<double, double>>> per_seed(
        cfg.seeds.size());
    parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        auto& series = per_seed[i];
        series.reserve(extended_epochs);
        const EpochHook hook = [&](const Mlp& m, const EpochRecord&) {
            const double nat = 100.0 * evaluate(m, data, test_idx);
            const double adv =
                100.0 * evaluate(m, data, test_idx, &pgd, seed);
            series.emplace_back(nat, adv);
        };
        run_one(run_cfg, data, eta, seed, hook);
    });

    std::vector<CurvePoint> curve;
    for (std::size_t e = 0; e < extended_epochs; ++e) {
        std::vector<double> nat;
        std::vector<double> adv;
        for (const auto& series : per_seed)
            if (e < series.size()) {
                nat.push_back(series[e].first);
                adv.push_back(series[e].second);
            }
        if (nat.empty()) break;
        CurvePoint p;
        p.epoch = e;
        p.natural = mean_std(nat);
        p.adversarial = mean_std(adv);
        curve.push_back(p);
    }
    return curve;
}

void write_curves_csv(const std::string& path, const ExperimentConfig& cfg,
                      const std::vector<CurvePoint>& curve) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f << "rule,dataset,epoch,natural_mean,natural_std,adversarial_mean,"
         "adversarial_std,n\n";
    for (const CurvePoint& p : curve) {
        std::ostringstream line;
        line.precision(6);
        line << rule_name(cfg.rule) << ',' << cfg.dataset << ',' << p.epoch
             << ',' << std::fixed << p.natural.mean << ',' << p.natural.std
             << ',' << p.adversarial.mean << ',' << p.adversarial.std << ','
             << std::defaultfloat << p.natural.n;
        f << line.str() << '\n';
    }
}

}  // namespace pepita
