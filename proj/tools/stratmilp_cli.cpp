// Command-line pipeline: generate -> label -> prune -> train -> eval, plus
// one-shot solve, bench, and an oracle self-check.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "stratmilp/bnb.hpp"
#include "stratmilp/families.hpp"
#include "stratmilp/inference.hpp"
#include "stratmilp/learner.hpp"
#include "stratmilp/mps.hpp"
#include "stratmilp/persist.hpp"
#include "stratmilp/pruning.hpp"
#include "stratmilp/random_milp.hpp"

using namespace stratmilp;

namespace {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    json cfg = json::parse(read_file(path));
    if (!cfg.is_object()) throw ValidationError("config root must be an object");
    return cfg;
}

template <typename T>
T jget(const json& j, const char* key, T fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

ParameterizedFamily family_from_config(const json& cfg) {
    if (!cfg.contains("family")) throw ValidationError("config missing 'family'");
    const json& f = cfg.at("family");
    double r = jget<double>(f, "radius", 0.0);
    std::string builtin = jget<std::string>(f, "builtin", "");
    if (builtin == "fuel-cell") {
        FuelCellParams p;
        p.horizon = jget<int>(f, "horizon", p.horizon);
        p.beta = jget<double>(f, "beta", p.beta);
        p.gamma = jget<double>(f, "gamma", p.gamma);
        p.e_max = jget<double>(f, "e_max", p.e_max);
        p.e_init = jget<double>(f, "e_init", p.e_init);
        p.p_max = jget<double>(f, "p_max", p.p_max);
        p.n_switch = jget<int>(f, "n_switch", p.n_switch);
        return build_fuel_cell_family(p, r);
    }
    if (builtin == "inventory") {
        InventoryParams p;
        p.items = jget<int>(f, "items", p.items);
        p.periods = jget<int>(f, "periods", p.periods);
        return build_inventory_family(p, r);
    }
    if (!builtin.empty())
        throw ValidationError("unknown builtin family '" + builtin + "'");
    if (f.contains("family_json"))
        return family_from_json(
            json::parse(read_file(f.at("family_json").get<std::string>())));
    throw ValidationError("family needs 'builtin' or 'family_json'");
}

TrainConfig train_config_from_json(const json& cfg) {
    TrainConfig tc;
    if (!cfg.contains("train")) return tc;
    const json& t = cfg.at("train");
    tc.lambda1 = jget<double>(t, "lambda1", tc.lambda1);
    tc.lambda2 = jget<double>(t, "lambda2", tc.lambda2);
    tc.learning_rate = jget<double>(t, "learning_rate", tc.learning_rate);
    tc.lr_decay = jget<double>(t, "lr_decay", tc.lr_decay);
    tc.lr_decay_period = jget<int>(t, "lr_decay_period", tc.lr_decay_period);
    tc.epochs = jget<int>(t, "epochs", tc.epochs);
    tc.batch_size = jget<int>(t, "batch_size", tc.batch_size);
    tc.weight_decay = jget<double>(t, "weight_decay", tc.weight_decay);
    tc.nr_pair_budget = jget<int>(t, "nr_pair_budget", tc.nr_pair_budget);
    tc.n_layers = jget<int>(t, "n_layers", tc.n_layers);
    tc.seed = jget<uint64_t>(t, "seed", tc.seed);
    std::string lm = jget<std::string>(t, "loss_mode", "PREFERENCE");
    tc.loss_mode = lm == "REWARD_FIT" ? LossMode::REWARD_FIT : LossMode::PREFERENCE;
    std::string sm = jget<std::string>(t, "sampling_mode", "RANKED");
    tc.sampling_mode = sm == "NR" ? SamplingMode::NR : SamplingMode::RANKED;
    return tc;
}

DatagenConfig datagen_config_from_json(const json& cfg) {
    DatagenConfig dc;
    if (!cfg.contains("datagen")) return dc;
    const json& d = cfg.at("datagen");
    dc.gt_threshold = jget<double>(d, "gt_threshold", dc.gt_threshold);
    dc.min_n = jget<int>(d, "min_n", dc.min_n);
    dc.max_n = jget<int>(d, "max_n", dc.max_n);
    dc.base_seed = jget<uint64_t>(d, "base_seed", dc.base_seed);
    return dc;
}

int cmd_generate(const json& cfg, const std::string& out, uint64_t seed_override,
                 bool has_seed) {
    ParameterizedFamily fam = family_from_config(cfg);
    DatagenConfig dc = datagen_config_from_json(cfg);
    if (has_seed) dc.base_seed = seed_override;
    Dataset ds = generate_dataset(fam, dc);
    save_dataset(ds, out);
    std::printf("N=%d, M=%d, good_turing=%.6f\n", ds.num_instances(),
                ds.library.size(), ds.final_good_turing);
    return 0;
}

int cmd_label(const std::string& dir) {
    Dataset ds = load_dataset(dir);
    fill_reward_table(ds);
    save_dataset(ds, dir);
    std::printf("labeled %d x %d reward table\n", ds.num_instances(),
                ds.library.size());
    return 0;
}

int cmd_prune(const json& cfg, const std::string& dir, double eps_p, double eps_d,
              const std::string& out, bool eps_p_set, bool eps_d_set) {
    const json pj = cfg.value("pruning", json::object());
    if (!eps_p_set) eps_p = jget<double>(pj, "eps_p", eps_p);
    if (!eps_d_set) eps_d = jget<double>(pj, "eps_d", eps_d);
    Dataset ds = load_dataset(dir);
    if (!ds.reward_table_complete())
        throw ValidationError("reward table incomplete");
    BipartiteGraph g = build_bipartite(ds, eps_p, eps_d);
    if (!g.uncovered_instances.empty())
        throw ValidationError(std::to_string(g.uncovered_instances.size()) +
                              " instances have no covering strategy");
    PruneResult pr = greedy_set_cover(g, ds.library);
    json j = library_to_json(pr.library);
    j["selected"] = pr.selected;
    atomic_write(out, j.dump(2) + "\n");
    std::printf("M=%d -> M^P=%d\n", ds.library.size(), pr.library.size());
    return 0;
}

int cmd_train(const json& cfg, const std::string& dir, const std::string& pruned_path,
              const std::string& out, uint64_t seed_override, bool has_seed,
              const std::string& loss_mode) {
    Dataset ds = load_dataset(dir);
    json pj = json::parse(read_file(pruned_path));
    StrategyLibrary pruned = library_from_json(pj);
    std::vector<int> selected = pj.at("selected").get<std::vector<int>>();

    TrainConfig tc = train_config_from_json(cfg);
    if (has_seed) tc.seed = seed_override;
    if (loss_mode == "REWARD_FIT") tc.loss_mode = LossMode::REWARD_FIT;
    else if (loss_mode == "PREFERENCE") tc.loss_mode = LossMode::PREFERENCE;
    else if (!loss_mode.empty()) throw ValidationError("unknown loss mode");

    TrainingSet ts = make_training_set(ds, pruned, selected);
    TrainResult tr = train(ts, tc);
    tr.model.input_coords = ds.family.varying;
    tr.model.m_mat = ts.m_mat;
    tr.model.n_int = ts.n_int;
    save_model(tr.model, out);
    std::printf("trained %zu epochs, final loss %.6f\n", tr.epoch_loss.size(),
                tr.epoch_loss.empty() ? 0.0 : tr.epoch_loss.back());
    return 0;
}

int cmd_eval(const json& cfg, const std::string& dir, const std::string& model_path,
             const std::string& lib_path, int k, const std::string& metrics_out,
             uint64_t seed_override, bool has_seed) {
    Dataset ds = load_dataset(dir);
    RewardModel model = load_model(model_path);
    StrategyLibrary lib = load_library(lib_path);

    const json inf = cfg.value("inference", json::object());
    int n_test = jget<int>(inf, "n_test", 200);
    uint64_t test_seed = jget<uint64_t>(inf, "test_seed", 1000001);
    if (has_seed) test_seed = seed_override;
    if (k <= 0) k = jget<int>(inf, "k", 3);
    double eps1 = jget<double>(inf, "eps1", 1e-4);
    double eps2 = jget<double>(inf, "eps2", 1e-4);

    auto split = make_test_split(ds.family, n_test, test_seed);
    Metrics mt = evaluate(model, split, lib, k, eps1, eps2);
    if (!metrics_out.empty()) save_metrics(mt, metrics_out);
    std::printf("accuracy=%.4f, mean_p=%.3e, mean_d=%.3e, speedup=%.2f\n",
                mt.accuracy, mt.mean_infeasibility, mt.mean_suboptimality,
                mt.speedup_ratio);
    return 0;
}

int cmd_solve(const std::string& inst_path, const std::string& model_path,
              const std::string& lib_path, int k) {
    MILPInstance inst = parse_mps(read_file(inst_path));
    auto rep = validate_instance(inst);
    if (!rep.ok()) throw ValidationError("invalid instance: " + rep.issues[0]);
    RewardModel model = load_model(model_path);
    StrategyLibrary lib = load_library(lib_path);

    VectorXd varying(model.input_coords.size());
    for (size_t i = 0; i < model.input_coords.size(); ++i)
        varying(static_cast<Eigen::Index>(i)) = get_coord(inst, model.input_coords[i]);

    // f_star is only needed to report the suboptimality of the answer.
    Solution ref = solve_milp(inst);
    if (ref.status != SolStatus::OPTIMAL)
        throw std::runtime_error("reference solve did not reach OPTIMAL");

    auto t0 = std::chrono::steady_clock::now();
    MatrixXd tokens = encode_batch(varying, lib, model.m_mat, model.n_int, model.norm);
    VectorXd r_hat = forward(model, tokens);
    auto cands = top_k(r_hat, std::min<int>(k, lib.size()));
    SelectionResult sel = select_strategy(inst, cands, lib, ref.objective);
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

    json out{{"objective", sel.solution.objective},
             {"p", sel.record.infeasibility},
             {"d", sel.record.suboptimality},
             {"strategy_index", sel.strategy_index},
             {"time_ms", ms}};
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_bench(const json& cfg, const std::string& model_path,
              const std::string& lib_path, int n_test, int k,
              uint64_t seed_override, bool has_seed) {
    ParameterizedFamily fam = family_from_config(cfg);
    RewardModel model = load_model(model_path);
    StrategyLibrary lib = load_library(lib_path);
    uint64_t seed = has_seed ? seed_override : 2000001;
    auto split = make_test_split(fam, n_test, seed);
    Metrics mt = evaluate(model, split, lib, k);
    std::printf("median_inference_s=%.6f, median_bnb_s=%.6f, speedup_ratio=%.2f, "
                "accuracy=%.4f\n",
                mt.median_inference_s, mt.median_bnb_s, mt.speedup_ratio,
                mt.accuracy);
    return 0;
}

int cmd_oracle_check(int count, uint64_t seed) {
    int mismatches = 0;
    for (int t = 0; t < count; ++t) {
        MILPInstance inst = make_random_milp(seed + t);
        Solution a = solve_milp(inst);
        Solution b = solve_milp_exhaustive(inst);
        bool ok = a.status == b.status &&
                  (a.status != SolStatus::OPTIMAL ||
                   std::abs(a.objective - b.objective) <= 1e-6);
        if (!ok) {
            ++mismatches;
            std::printf("mismatch at seed %llu\n",
                        static_cast<unsigned long long>(seed + t));
        }
    }
    std::printf("oracle-check: %d/%d matched\n", count - mismatches, count);
    return mismatches == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MILP strategy-learning pipeline"};
    app.require_subcommand(1);

    std::string config_path, dataset_dir = "out/dataset", out_path, inst_path;
    std::string model_path, lib_path, metrics_out, loss_mode;
    uint64_t seed = 0;
    bool has_seed = false;
    int k = 0, n_test = 50, count = 50;
    double eps_p = 1e-4, eps_d = 1e-4;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "pipeline config JSON");
        sub->add_option("--seed", seed, "seed override")
            ->each([&](const std::string&) { has_seed = true; });
    };

    auto* gen = app.add_subcommand("generate", "sample and label a dataset");
    add_common(gen);
    gen->add_option("--out", dataset_dir, "dataset directory");

    auto* lab = app.add_subcommand("label", "fill the reward table");
    add_common(lab);
    lab->add_option("--dataset", dataset_dir, "dataset directory");

    auto* pru = app.add_subcommand("prune", "SetCover-prune the library");
    add_common(pru);
    pru->add_option("--dataset", dataset_dir, "dataset directory");
    auto* opt_eps_p = pru->add_option("--eps-p", eps_p, "infeasibility threshold");
    auto* opt_eps_d = pru->add_option("--eps-d", eps_d, "suboptimality threshold");
    out_path = "out/pruned.json";
    pru->add_option("--out", out_path, "pruned library path");

    auto* trn = app.add_subcommand("train", "train the reward model");
    add_common(trn);
    trn->add_option("--dataset", dataset_dir, "dataset directory");
    std::string pruned_path = "out/pruned.json";
    trn->add_option("--library", pruned_path, "pruned library path");
    std::string model_out = "out/model.ckpt";
    trn->add_option("--out", model_out, "checkpoint path");
    trn->add_option("--loss-mode", loss_mode, "PREFERENCE or REWARD_FIT");

    auto* evl = app.add_subcommand("eval", "evaluate on a fresh test split");
    add_common(evl);
    evl->add_option("--dataset", dataset_dir, "dataset directory");
    evl->add_option("--model", model_path, "checkpoint path")->required();
    evl->add_option("--library", lib_path, "pruned library path")->required();
    evl->add_option("--k", k, "candidate count");
    evl->add_option("--metrics-out", metrics_out, "metrics CSV path");

    auto* slv = app.add_subcommand("solve", "solve one MPS instance");
    slv->add_option("--instance", inst_path, "MPS file")->required();
    slv->add_option("--model", model_path, "checkpoint path")->required();
    slv->add_option("--library", lib_path, "strategy library path")->required();
    slv->add_option("--k", k, "candidate count")->default_val(5);

    auto* ben = app.add_subcommand("bench", "time reduced path vs branch-and-bound");
    add_common(ben);
    ben->add_option("--model", model_path, "checkpoint path")->required();
    ben->add_option("--library", lib_path, "strategy library path")->required();
    ben->add_option("--n", n_test, "test instances");
    ben->add_option("--k", k, "candidate count")->default_val(3);

    auto* orc = app.add_subcommand("oracle-check", "exhaustive-oracle suite");
    add_common(orc);
    orc->add_option("--count", count, "number of random problems");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config(config_path);
        if (gen->parsed()) return cmd_generate(cfg, dataset_dir, seed, has_seed);
        if (lab->parsed()) return cmd_label(dataset_dir);
        if (pru->parsed())
            return cmd_prune(cfg, dataset_dir, eps_p, eps_d, out_path,
                             opt_eps_p->count() > 0, opt_eps_d->count() > 0);
        if (trn->parsed())
            return cmd_train(cfg, dataset_dir, pruned_path, model_out, seed,
                             has_seed, loss_mode);
        if (evl->parsed())
            return cmd_eval(cfg, dataset_dir, model_path, lib_path, k, metrics_out,
                            seed, has_seed);
        if (slv->parsed()) return cmd_solve(inst_path, model_path, lib_path, k);
        if (ben->parsed())
            return cmd_bench(cfg, model_path, lib_path, n_test, k, seed, has_seed);
        if (orc->parsed()) return cmd_oracle_check(count, has_seed ? seed : 42);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
