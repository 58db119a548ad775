#include "stratmilp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace stratmilp {

namespace {

constexpr double kStdGuard = 1e-8;

double softplus(double t) {
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

RewardModel init_model(int feature_dim, int n_layers, uint64_t seed) {
    RewardModel m;
    m.feature_dim = feature_dim;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double scale = 0.3 / std::sqrt(static_cast<double>(feature_dim));
    auto randm = [&](int r, int c) {
        MatrixXd w(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) w(i, j) = scale * gauss(rng);
        return w;
    };
    m.layers.resize(n_layers);
    for (auto& l : m.layers) {
        l.Wq = randm(feature_dim, feature_dim);
        l.Wk = randm(feature_dim, feature_dim);
        l.Wv = randm(feature_dim, feature_dim);
    }
    m.w_out = VectorXd::Zero(feature_dim);
    for (int i = 0; i < feature_dim; ++i) m.w_out(i) = scale * gauss(rng);
    m.b_out = 0.0;
    m.norm.mean = VectorXd::Zero(feature_dim);
    m.norm.stddev = VectorXd::Ones(feature_dim);
    return m;
}

ModelGrads zero_grads(const RewardModel& m) {
    ModelGrads g;
    g.layers.resize(m.layers.size());
    for (auto& l : g.layers) {
        l.Wq = MatrixXd::Zero(m.feature_dim, m.feature_dim);
        l.Wk = MatrixXd::Zero(m.feature_dim, m.feature_dim);
        l.Wv = MatrixXd::Zero(m.feature_dim, m.feature_dim);
    }
    g.w_out = VectorXd::Zero(m.feature_dim);
    g.b_out = 0.0;
    return g;
}

namespace {

long param_count(const RewardModel& m) {
    long f = m.feature_dim;
    return static_cast<long>(m.layers.size()) * 3 * f * f + f + 1;
}

}  // namespace

VectorXd flatten_params(const RewardModel& m) {
    VectorXd v(param_count(m));
    long at = 0;
    auto put = [&](const MatrixXd& w) {
        std::copy(w.data(), w.data() + w.size(), v.data() + at);
        at += w.size();
    };
    for (const auto& l : m.layers) {
        put(l.Wq);
        put(l.Wk);
        put(l.Wv);
    }
    std::copy(m.w_out.data(), m.w_out.data() + m.w_out.size(), v.data() + at);
    at += m.w_out.size();
    v(at++) = m.b_out;
    return v;
}

void set_params(RewardModel& m, const VectorXd& theta) {
    if (theta.size() != param_count(m))
        throw std::invalid_argument("set_params: size mismatch");
    long at = 0;
    auto take = [&](MatrixXd& w) {
        std::copy(theta.data() + at, theta.data() + at + w.size(), w.data());
        at += w.size();
    };
    for (auto& l : m.layers) {
        take(l.Wq);
        take(l.Wk);
        take(l.Wv);
    }
    std::copy(theta.data() + at, theta.data() + at + m.w_out.size(), m.w_out.data());
    at += m.w_out.size();
    m.b_out = theta(at++);
}

VectorXd flatten_grads(const RewardModel& m, const ModelGrads& g) {
    VectorXd v(param_count(m));
    long at = 0;
    auto put = [&](const MatrixXd& w) {
        std::copy(w.data(), w.data() + w.size(), v.data() + at);
        at += w.size();
    };
    for (const auto& l : g.layers) {
        put(l.Wq);
        put(l.Wk);
        put(l.Wv);
    }
    std::copy(g.w_out.data(), g.w_out.data() + g.w_out.size(), v.data() + at);
    at += g.w_out.size();
    v(at++) = g.b_out;
    return v;
}

MatrixXd encode_tokens_raw(const VectorXd& varying, const StrategyLibrary& lib,
                           int m_mat, int n_int) {
    const int nv = static_cast<int>(varying.size());
    const int F = nv + m_mat + n_int;
    MatrixXd X = MatrixXd::Zero(lib.size(), F);
    for (int j = 0; j < lib.size(); ++j) {
        const Strategy& s = lib.strategies[j];
        X.row(j).head(nv) = varying.transpose();
        for (int row : s.tight_set) {
            if (row < 0 || row >= m_mat)
                throw std::invalid_argument("encode_tokens_raw: tight index beyond m");
            X(j, nv + row) = 1.0;
        }
        if (static_cast<int>(s.integer_values.size()) != n_int)
            throw std::invalid_argument("encode_tokens_raw: integer count mismatch");
        for (int k = 0; k < n_int; ++k)
            X(j, nv + m_mat + k) = static_cast<double>(s.integer_values[k]);
    }
    return X;
}

NormStats fit_norm_stats(const std::vector<MatrixXd>& raw_token_mats) {
    if (raw_token_mats.empty())
        throw std::invalid_argument("fit_norm_stats: no data");
    const int F = static_cast<int>(raw_token_mats.front().cols());
    long count = 0;
    VectorXd sum = VectorXd::Zero(F), sq = VectorXd::Zero(F);
    for (const auto& X : raw_token_mats) {
        sum += X.colwise().sum().transpose();
        sq += X.array().square().colwise().sum().matrix().transpose();
        count += X.rows();
    }
    NormStats ns;
    ns.mean = sum / static_cast<double>(count);
    VectorXd var = sq / static_cast<double>(count) - ns.mean.array().square().matrix();
    ns.stddev = var.array().max(0.0).sqrt().max(kStdGuard).matrix();
    return ns;
}

MatrixXd apply_norm(const MatrixXd& raw, const NormStats& norm) {
    return (raw.rowwise() - norm.mean.transpose()).array().rowwise() /
           norm.stddev.transpose().array();
}

MatrixXd encode_batch(const VectorXd& varying, const StrategyLibrary& lib,
                      int m_mat, int n_int, const NormStats& norm) {
    return apply_norm(encode_tokens_raw(varying, lib, m_mat, n_int), norm);
}

MatrixXd attention_layer(const MatrixXd& X, const AttentionLayer& w) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(X.cols()));
    MatrixXd Q = X * w.Wq, K = X * w.Wk, V = X * w.Wv;
    MatrixXd S = scale * (Q * K.transpose());
    // Row-wise stable softmax.
    for (int i = 0; i < S.rows(); ++i) {
        double mx = S.row(i).maxCoeff();
        S.row(i) = (S.row(i).array() - mx).exp();
        S.row(i) /= S.row(i).sum();
    }
    return S * V;
}

VectorXd forward(const RewardModel& m, const MatrixXd& tokens, ForwardCache* cache) {
    if (tokens.cols() != m.feature_dim)
        throw std::invalid_argument("forward: feature dimension mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(m.feature_dim));
    MatrixXd X = tokens;
    if (cache) {
        cache->X.clear();
        cache->Q.clear();
        cache->K.clear();
        cache->V.clear();
        cache->P.clear();
    }
    for (const auto& l : m.layers) {
        MatrixXd Q = X * l.Wq, K = X * l.Wk, V = X * l.Wv;
        MatrixXd P = scale * (Q * K.transpose());
        for (int i = 0; i < P.rows(); ++i) {
            double mx = P.row(i).maxCoeff();
            P.row(i) = (P.row(i).array() - mx).exp();
            P.row(i) /= P.row(i).sum();
        }
        if (cache) {
            cache->X.push_back(X);
            cache->Q.push_back(Q);
            cache->K.push_back(K);
            cache->V.push_back(V);
            cache->P.push_back(P);
        }
        X = P * V;
    }
    if (cache) cache->X.push_back(X);
    return (X * m.w_out).array() + m.b_out;
}

void backward(const RewardModel& m, const ForwardCache& cache, const VectorXd& d_out,
              ModelGrads& grads) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m.feature_dim));
    const int L = static_cast<int>(m.layers.size());
    const MatrixXd& XL = cache.X[L];
    grads.w_out += XL.transpose() * d_out;
    grads.b_out += d_out.sum();
    MatrixXd dX = d_out * m.w_out.transpose();
    for (int l = L - 1; l >= 0; --l) {
        const MatrixXd &X = cache.X[l], &Q = cache.Q[l], &K = cache.K[l],
                       &V = cache.V[l], &P = cache.P[l];
        MatrixXd dP = dX * V.transpose();
        MatrixXd dV = P.transpose() * dX;
        MatrixXd dS(P.rows(), P.cols());
        for (int i = 0; i < P.rows(); ++i) {
            double dot = dP.row(i).dot(P.row(i));
            dS.row(i) = P.row(i).array() * (dP.row(i).array() - dot);
        }
        MatrixXd dQ = scale * (dS * K);
        MatrixXd dK = scale * (dS.transpose() * Q);
        grads.layers[l].Wq += X.transpose() * dQ;
        grads.layers[l].Wk += X.transpose() * dK;
        grads.layers[l].Wv += X.transpose() * dV;
        dX = dQ * m.layers[l].Wq.transpose() + dK * m.layers[l].Wk.transpose() +
             dV * m.layers[l].Wv.transpose();
    }
}

PreferenceSet build_preference_set(const VectorXd& reward_row, double tie_tol) {
    const int mp = static_cast<int>(reward_row.size());
    PreferenceSet ps;
    ps.sigma.resize(mp);
    std::iota(ps.sigma.begin(), ps.sigma.end(), 0);
    std::stable_sort(ps.sigma.begin(), ps.sigma.end(),
                     [&](int a, int b) { return reward_row(a) > reward_row(b); });
    ps.mu.reserve(std::max(mp - 1, 0));
    ps.delta.reserve(std::max(mp - 1, 0));
    for (int j = 0; j + 1 < mp; ++j) {
        double d = reward_row(ps.sigma[j]) - reward_row(ps.sigma[j + 1]);
        d = std::max(d, 0.0);
        ps.delta.push_back(d);
        ps.mu.push_back(d <= tie_tol ? 0.5 : 1.0);
    }
    return ps;
}

double loss_preference(const VectorXd& r_hat, const PreferenceSet& pref,
                       VectorXd* grad) {
    if (grad) grad->setZero(r_hat.size());
    double loss = 0.0;
    for (size_t j = 0; j < pref.mu.size(); ++j) {
        int a = pref.sigma[j], b = pref.sigma[j + 1];
        double z = r_hat(a) - r_hat(b);
        double mu = pref.mu[j];
        // -[mu log sigmoid(z) + (1-mu) log sigmoid(-z)]
        loss += mu * softplus(-z) + (1.0 - mu) * softplus(z);
        if (grad) {
            double g = sigmoid(z) - mu;
            (*grad)(a) += g;
            (*grad)(b) -= g;
        }
    }
    return loss;
}

double loss_diff(const VectorXd& r_hat, const PreferenceSet& pref, VectorXd* grad) {
    if (grad) grad->setZero(r_hat.size());
    double loss = 0.0;
    for (size_t j = 0; j < pref.delta.size(); ++j) {
        int a = pref.sigma[j], b = pref.sigma[j + 1];
        double e = r_hat(a) - r_hat(b) - pref.delta[j];
        loss += e * e;
        if (grad) {
            (*grad)(a) += 2.0 * e;
            (*grad)(b) -= 2.0 * e;
        }
    }
    return loss;
}

double loss_total(double l_p, double l_d, double lambda1, double lambda2) {
    return lambda1 * l_p + lambda2 * l_d;
}

double loss_reward_fit(const VectorXd& r_hat, const VectorXd& r_true, VectorXd* grad) {
    const double inv_m = 1.0 / static_cast<double>(r_hat.size());
    VectorXd e = r_true - r_hat;
    if (grad) *grad = -2.0 * inv_m * e;
    return inv_m * e.squaredNorm();
}

TrainingSet make_training_set(const Dataset& ds, const StrategyLibrary& pruned,
                              const std::vector<int>& selected_old) {
    if (!ds.reward_table_complete())
        throw std::invalid_argument("make_training_set: reward table incomplete");
    if (static_cast<int>(selected_old.size()) != pruned.size())
        throw std::invalid_argument("make_training_set: selection size mismatch");
    TrainingSet ts;
    ts.library = &pruned;
    ts.m_mat = materialized_row_count(ds.family.base_instance);
    ts.n_int = static_cast<int>(ds.family.base_instance.integer_index_set.size());
    const int n = ds.num_instances();
    const int mp = pruned.size();
    ts.varying.resize(n, static_cast<int>(ds.family.varying.size()));
    ts.rewards.resize(n, mp);
    for (int i = 0; i < n; ++i) {
        for (size_t k = 0; k < ds.records[i].varying.size(); ++k)
            ts.varying(i, static_cast<int>(k)) = ds.records[i].varying[k];
        for (int j = 0; j < mp; ++j)
            ts.rewards(i, j) = ds.reward_table[i][selected_old[j]].reward;
    }
    return ts;
}

namespace {

std::vector<NRPair> sample_nr_pairs(const VectorXd& rewards, int budget, double tie_tol,
                                    std::mt19937_64& rng) {
    const int mp = static_cast<int>(rewards.size());
    std::vector<NRPair> pairs;
    if (mp < 2) return pairs;
    auto make_pair = [&](int a, int b) {
        double diff = rewards(a) - rewards(b);
        NRPair p;
        if (std::abs(diff) <= tie_tol) {
            p = {a, b, 0.5};
        } else if (diff > 0.0) {
            p = {a, b, 1.0};
        } else {
            p = {b, a, 1.0};
        }
        pairs.push_back(p);
    };
    // A random matching first so every strategy appears at least once.
    std::vector<int> perm(mp);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int t = 0; t + 1 < mp; t += 2) make_pair(perm[t], perm[t + 1]);
    if (mp % 2 == 1) make_pair(perm[mp - 1], perm[0]);
    std::uniform_int_distribution<int> pick(0, mp - 1);
    while (static_cast<int>(pairs.size()) < budget) {
        int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        make_pair(a, b);
    }
    return pairs;
}

}  // namespace

double loss_and_grad(const RewardModel& m,
                     const std::vector<const TrainInstance*>& batch,
                     const TrainConfig& cfg, ModelGrads* grads) {
    if (batch.empty()) return 0.0;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    ForwardCache cache;
    VectorXd g1, g2;
    for (const TrainInstance* ti : batch) {
        VectorXd r_hat = forward(m, ti->tokens, grads ? &cache : nullptr);
        VectorXd d_rhat = VectorXd::Zero(r_hat.size());
        double inst_loss = 0.0;
        if (cfg.loss_mode == LossMode::REWARD_FIT) {
            inst_loss = loss_reward_fit(r_hat, ti->rewards, grads ? &g1 : nullptr);
            if (grads) d_rhat = g1;
        } else if (cfg.sampling_mode == SamplingMode::NR) {
            double z_loss = 0.0;
            for (const NRPair& p : ti->nr_pairs) {
                double z = r_hat(p.a) - r_hat(p.b);
                z_loss += p.mu * softplus(-z) + (1.0 - p.mu) * softplus(z);
                if (grads) {
                    double g = sigmoid(z) - p.mu;
                    d_rhat(p.a) += g;
                    d_rhat(p.b) -= g;
                }
            }
            inst_loss = z_loss;
        } else {
            double lp = loss_preference(r_hat, ti->pref, grads ? &g1 : nullptr);
            double ld = loss_diff(r_hat, ti->pref, grads ? &g2 : nullptr);
            inst_loss = loss_total(lp, ld, cfg.lambda1, cfg.lambda2);
            if (grads) d_rhat = cfg.lambda1 * g1 + cfg.lambda2 * g2;
        }
        total += inst_loss;
        if (grads) backward(m, cache, inv_n * d_rhat, *grads);
    }
    return total * inv_n;
}

TrainResult train(const TrainingSet& ts, const TrainConfig& cfg) {
    if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0 || cfg.learning_rate < 0.0)
        throw std::invalid_argument("train: invalid config");
    const int n = static_cast<int>(ts.varying.rows());
    const int mp = ts.library->size();
    const int nv = static_cast<int>(ts.varying.cols());
    const int F = nv + ts.m_mat + ts.n_int;

    // Feature and reward standardization, fitted on the training set.
    std::vector<MatrixXd> raw(n);
    for (int i = 0; i < n; ++i)
        raw[i] = encode_tokens_raw(ts.varying.row(i).transpose(), *ts.library,
                                   ts.m_mat, ts.n_int);
    NormStats norm = fit_norm_stats(raw);
    RewardTransform rt;
    rt.mean = ts.rewards.mean();
    double var = (ts.rewards.array() - rt.mean).square().mean();
    rt.stddev = std::max(std::sqrt(var), kStdGuard);

    std::mt19937_64 rng(cfg.seed);
    std::vector<TrainInstance> data(n);
    for (int i = 0; i < n; ++i) {
        data[i].tokens = apply_norm(raw[i], norm);
        data[i].rewards = ((ts.rewards.row(i).transpose().array() - rt.mean) /
                           rt.stddev)
                              .matrix();
        data[i].pref = build_preference_set(data[i].rewards, cfg.tie_tol);
        if (cfg.sampling_mode == SamplingMode::NR)
            data[i].nr_pairs =
                sample_nr_pairs(data[i].rewards, cfg.nr_pair_budget, cfg.tie_tol, rng);
    }

    RewardModel model = init_model(F, cfg.n_layers, cfg.seed);
    model.norm = norm;
    model.reward_transform = rt;

    VectorXd theta = flatten_params(model);
    VectorXd m1 = VectorXd::Zero(theta.size()), m2 = VectorXd::Zero(theta.size());
    long step = 0;
    double lr = cfg.learning_rate;
    const int batch_size = std::max(1, std::min(cfg.batch_size, n));

    TrainResult out;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (epoch > 0 && cfg.lr_decay_period > 0 && epoch % cfg.lr_decay_period == 0)
            lr *= cfg.lr_decay;
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        int n_batches = 0;
        for (int start = 0; start < n; start += batch_size) {
            std::vector<const TrainInstance*> batch;
            for (int k = start; k < std::min(start + batch_size, n); ++k)
                batch.push_back(&data[order[k]]);
            ModelGrads grads = zero_grads(model);
            double loss = loss_and_grad(model, batch, cfg, &grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(n_batches));
            epoch_loss += loss;
            ++n_batches;

            VectorXd g = flatten_grads(model, grads);
            ++step;
            m1 = cfg.adam_beta1 * m1 + (1.0 - cfg.adam_beta1) * g;
            m2 = cfg.adam_beta2 * m2.array().matrix() +
                 (1.0 - cfg.adam_beta2) * g.array().square().matrix();
            double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
            VectorXd update =
                (m1 / bc1).array() / ((m2 / bc2).array().sqrt() + 1e-8) +
                cfg.weight_decay * theta.array();
            theta -= lr * update.matrix();
            set_params(model, theta);
        }
        out.epoch_loss.push_back(epoch_loss / std::max(n_batches, 1));
    }
    out.model = std::move(model);
    return out;
}

}  // namespace stratmilp
