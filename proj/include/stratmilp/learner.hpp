#ifndef STRATMILP_LEARNER_HPP
#define STRATMILP_LEARNER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stratmilp/datagen.hpp"
#include "stratmilp/model.hpp"

namespace stratmilp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct NormStats {
    VectorXd mean, stddev;  // per token feature; stddev guarded at 1e-8
};

/// Affine transform applied to raw rewards before they become targets.
struct RewardTransform {
    double mean = 0.0;
    double stddev = 1.0;
    double apply(double r) const { return (r - mean) / stddev; }
};

struct AttentionLayer {
    MatrixXd Wq, Wk, Wv;  // F x F, row-wise shared across tokens
};

/// Single-head scaled dot-product attention stack with an affine readout;
/// predicts one reward per instance-strategy token.
struct RewardModel {
    int feature_dim = 0;
    std::vector<AttentionLayer> layers;
    VectorXd w_out;     // F
    double b_out = 0.0;
    NormStats norm;
    RewardTransform reward_transform;
    // Input layout, recorded at train time so a bare instance can be
    // encoded later: which theta-coordinates vary, plus the materialized
    // row count and integer count of the family.
    std::vector<ParamCoord> input_coords;
    int m_mat = 0;
    int n_int = 0;
    int version = 1;
};

struct ModelGrads {
    std::vector<AttentionLayer> layers;
    VectorXd w_out;
    double b_out = 0.0;
};

RewardModel init_model(int feature_dim, int n_layers, uint64_t seed);

ModelGrads zero_grads(const RewardModel& m);

VectorXd flatten_params(const RewardModel& m);
void set_params(RewardModel& m, const VectorXd& theta);
VectorXd flatten_grads(const RewardModel& m, const ModelGrads& g);

/// Raw (un-normalized) token features for every strategy in the library:
/// [varying theta-coordinates | tight-row indicator | integer values].
/// m_mat is the bound-materialized row count of the family.
MatrixXd encode_tokens_raw(const VectorXd& varying, const StrategyLibrary& lib,
                           int m_mat, int n_int);

NormStats fit_norm_stats(const std::vector<MatrixXd>& raw_token_mats);

MatrixXd apply_norm(const MatrixXd& raw, const NormStats& norm);

/// Standardized token matrix (M x F) for one instance.
MatrixXd encode_batch(const VectorXd& varying, const StrategyLibrary& lib,
                      int m_mat, int n_int, const NormStats& norm);

/// One attention layer: softmax(X Wq (X Wk)^T / sqrt(F)) X Wv.
MatrixXd attention_layer(const MatrixXd& X, const AttentionLayer& w);

struct ForwardCache {
    std::vector<MatrixXd> X;  // inputs per layer (layers + 1 entries)
    std::vector<MatrixXd> Q, K, V, P;
};

/// Predicted reward per token.
VectorXd forward(const RewardModel& m, const MatrixXd& tokens,
                 ForwardCache* cache = nullptr);

/// Accumulates parameter gradients given dLoss/dOutputs.
void backward(const RewardModel& m, const ForwardCache& cache,
              const VectorXd& d_out, ModelGrads& grads);

struct PreferenceSet {
    std::vector<int> sigma;    // permutation, descending true reward
    std::vector<double> mu;    // length M-1; 1 or 0.5
    std::vector<double> delta; // length M-1; >= 0
};

PreferenceSet build_preference_set(const VectorXd& reward_row, double tie_tol = 1e-9);

/// Each loss returns its value and writes dLoss/dr_hat into grad.
double loss_preference(const VectorXd& r_hat, const PreferenceSet& pref,
                       VectorXd* grad = nullptr);
double loss_diff(const VectorXd& r_hat, const PreferenceSet& pref,
                 VectorXd* grad = nullptr);
double loss_total(double l_p, double l_d, double lambda1, double lambda2);
double loss_reward_fit(const VectorXd& r_hat, const VectorXd& r_true,
                       VectorXd* grad = nullptr);

enum class LossMode { PREFERENCE, REWARD_FIT };
enum class SamplingMode { RANKED, NR };

struct TrainConfig {
    double lambda1 = 0.85;
    double lambda2 = 0.15;
    double learning_rate = 5e-4;
    double lr_decay = 0.9;
    int lr_decay_period = 10;  // epochs
    int epochs = 100;
    int batch_size = 128;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double weight_decay = 1e-4;
    LossMode loss_mode = LossMode::PREFERENCE;
    SamplingMode sampling_mode = SamplingMode::RANKED;
    int nr_pair_budget = 8;
    int n_layers = 2;
    double tie_tol = 1e-9;
    uint64_t seed = 7;
};

/// NR-mode pair: (preferred index, other index, label mu).
struct NRPair {
    int a, b;
    double mu;
};

struct TrainInstance {
    MatrixXd tokens;    // M x F, standardized
    VectorXd rewards;   // standardized true rewards
    PreferenceSet pref;
    std::vector<NRPair> nr_pairs;
};

/// Training view of a labeled + pruned dataset: per-instance varying
/// vectors and the reward-table columns of the pruned library.
struct TrainingSet {
    MatrixXd varying;  // N x nv
    MatrixXd rewards;  // N x M^P, raw
    const StrategyLibrary* library = nullptr;
    int m_mat = 0;
    int n_int = 0;
};

/// selected_old maps pruned strategy j to its reward-table column.
TrainingSet make_training_set(const Dataset& ds, const StrategyLibrary& pruned,
                              const std::vector<int>& selected_old);

/// Batch loss (per the configured mode) plus parameter gradients.
double loss_and_grad(const RewardModel& m,
                     const std::vector<const TrainInstance*>& batch,
                     const TrainConfig& cfg, ModelGrads* grads);

struct TrainResult {
    RewardModel model;
    std::vector<double> epoch_loss;
};

/// Mini-batch AdamW over the configured loss; deterministic for a fixed
/// seed. Aborts on non-finite loss.
TrainResult train(const TrainingSet& ts, const TrainConfig& cfg);

}  // namespace stratmilp

#endif
