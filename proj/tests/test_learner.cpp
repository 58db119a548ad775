#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stratmilp/learner.hpp"

using namespace stratmilp;

namespace {

StrategyLibrary two_strategies(int m_mat, int n_int) {
    StrategyLibrary lib;
    Strategy a;
    a.tight_set = {0, 2};
    a.integer_values.assign(n_int, 1);
    lib.add(std::move(a));
    Strategy b;
    b.tight_set = {0, 3};
    b.integer_values.assign(n_int, 1);
    lib.add(std::move(b));
    (void)m_mat;
    return lib;
}

RewardModel random_model(int F, int L, uint64_t seed) {
    auto m = init_model(F, L, seed);
    return m;
}

MatrixXd random_tokens(int M, int F, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    MatrixXd X(M, F);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < F; ++j) X(i, j) = nd(rng);
    return X;
}

// Straight-line re-derivation of one attention layer for the oracle checks.
MatrixXd attention_oracle(const MatrixXd& X, const AttentionLayer& w) {
    MatrixXd Q = X * w.Wq, K = X * w.Wk, V = X * w.Wv;
    MatrixXd S = Q * K.transpose() / std::sqrt(static_cast<double>(X.cols()));
    MatrixXd P(S.rows(), S.cols());
    for (int i = 0; i < S.rows(); ++i) {
        double mx = S.row(i).maxCoeff();
        VectorXd e = (S.row(i).transpose().array() - mx).exp();
        P.row(i) = (e / e.sum()).transpose();
    }
    return P * V;
}

}  // namespace

TEST_CASE("token encoding: strategies differing in one tight index differ in "
          "exactly one indicator coordinate") {
    const int m_mat = 6, n_int = 2, nv = 3;
    auto lib = two_strategies(m_mat, n_int);
    VectorXd varying(nv);
    varying << 0.5, -1.0, 2.0;
    auto X = encode_tokens_raw(varying, lib, m_mat, n_int);
    REQUIRE(X.rows() == 2);
    REQUIRE(X.cols() == nv + m_mat + n_int);
    int ndiff = 0;
    for (int j = 0; j < X.cols(); ++j)
        if (X(0, j) != X(1, j)) ++ndiff;
    CHECK(ndiff == 2);  // indicator flips at rows 2 and 3
    // The varying block is shared.
    for (int j = 0; j < nv; ++j) {
        CHECK(X(0, j) == varying(j));
        CHECK(X(1, j) == varying(j));
    }
}

TEST_CASE("zero-variance feature normalizes to zero through the std guard") {
    MatrixXd X(2, 2);
    X << 3.0, 1.0, 3.0, 2.0;
    auto norm = fit_norm_stats({X});
    auto Y = apply_norm(X, norm);
    CHECK(Y(0, 0) == 0.0);
    CHECK(Y(1, 0) == 0.0);
    CHECK(Y(0, 1) != Y(1, 1));
}

TEST_CASE("fitted normalization gives mean 0, std 1 per feature") {
    std::vector<MatrixXd> mats;
    for (uint64_t s = 0; s < 5; ++s) mats.push_back(random_tokens(4, 3, s + 10));
    auto norm = fit_norm_stats(mats);
    VectorXd sum = VectorXd::Zero(3), sumsq = VectorXd::Zero(3);
    int count = 0;
    for (const auto& m : mats) {
        auto y = apply_norm(m, norm);
        for (int i = 0; i < y.rows(); ++i) {
            sum += y.row(i).transpose();
            sumsq += y.row(i).transpose().array().square().matrix();
            ++count;
        }
    }
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(sum(j) / count) < 1e-6);
        CHECK(std::abs(sumsq(j) / count - 1.0) < 1e-6);
    }
}

TEST_CASE("attention with a single token is exactly X Wv") {
    auto X = random_tokens(1, 4, 3);
    AttentionLayer w{random_tokens(4, 4, 4), random_tokens(4, 4, 5),
                     random_tokens(4, 4, 6)};
    MatrixXd out = attention_layer(X, w);
    MatrixXd expect = X * w.Wv;
    CHECK((out - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero query/key weights give uniform attention (mean pooling)") {
    auto X = random_tokens(5, 3, 7);
    AttentionLayer w{MatrixXd::Zero(3, 3), MatrixXd::Zero(3, 3),
                     random_tokens(3, 3, 8)};
    MatrixXd out = attention_layer(X, w);
    MatrixXd V = X * w.Wv;
    Eigen::RowVectorXd mean = V.colwise().mean();
    for (int i = 0; i < out.rows(); ++i)
        CHECK((out.row(i) - mean).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("attention matches an independent dense recomputation") {
    auto X = random_tokens(3, 5, 11);
    AttentionLayer w{random_tokens(5, 5, 12), random_tokens(5, 5, 13),
                     random_tokens(5, 5, 14)};
    MatrixXd out = attention_layer(X, w);
    MatrixXd expect = attention_oracle(X, w);
    CHECK((out - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero-layer model is a pure affine readout") {
    auto m = init_model(4, 0, 1);
    auto X = random_tokens(3, 4, 2);
    VectorXd out = forward(m, X);
    for (int i = 0; i < 3; ++i)
        CHECK(out(i) == doctest::Approx(X.row(i).dot(m.w_out) + m.b_out)
                            .epsilon(1e-12));
}

TEST_CASE("forward is equivariant under token permutation") {
    auto m = init_model(5, 2, 21);
    auto X = random_tokens(6, 5, 22);
    std::vector<int> perm = {3, 0, 5, 1, 4, 2};
    MatrixXd Xp(6, 5);
    for (int i = 0; i < 6; ++i) Xp.row(i) = X.row(perm[i]);
    VectorXd a = forward(m, X), b = forward(m, Xp);
    for (int i = 0; i < 6; ++i)
        CHECK(b(i) == doctest::Approx(a(perm[i])).epsilon(1e-10));
}

TEST_CASE("all-zero weights map everything to the output bias") {
    auto m = init_model(4, 2, 1);
    for (auto& l : m.layers) {
        l.Wq.setZero();
        l.Wk.setZero();
        l.Wv.setZero();
    }
    m.w_out.setZero();
    m.b_out = 0.37;
    auto X = random_tokens(3, 4, 9);
    VectorXd out = forward(m, X);
    for (int i = 0; i < 3; ++i) CHECK(out(i) == doctest::Approx(0.37));
}

TEST_CASE("preference set for rewards [3,1,2]") {
    VectorXd r(3);
    r << 3.0, 1.0, 2.0;
    auto pref = build_preference_set(r);
    CHECK(pref.sigma == std::vector<int>{0, 2, 1});
    REQUIRE(pref.mu.size() == 2);
    CHECK(pref.mu[0] == 1.0);
    CHECK(pref.mu[1] == 1.0);
    CHECK(pref.delta[0] == doctest::Approx(1.0));
    CHECK(pref.delta[1] == doctest::Approx(1.0));
}

TEST_CASE("all-equal rewards: every adjacent pair is a tie") {
    VectorXd r = VectorXd::Constant(4, 2.5);
    auto pref = build_preference_set(r);
    REQUIRE(pref.mu.size() == 3);
    for (double mu : pref.mu) CHECK(mu == 0.5);
    for (double d : pref.delta) CHECK(d == 0.0);
}

TEST_CASE("ranked sampling emits exactly M-1 adjacent pairs") {
    for (int m : {2, 10, 100}) {
        VectorXd r(m);
        for (int i = 0; i < m; ++i) r(i) = std::sin(0.7 * i) * 10.0;
        auto pref = build_preference_set(r);
        CHECK(static_cast<int>(pref.mu.size()) == m - 1);
        CHECK(static_cast<int>(pref.delta.size()) == m - 1);
        CHECK(static_cast<int>(pref.sigma.size()) == m);
    }
}

TEST_CASE("preference loss: equal logits give ln 2 per pair at mu = 1") {
    VectorXd r_true(2);
    r_true << 2.0, 1.0;
    auto pref = build_preference_set(r_true);
    VectorXd r_hat = VectorXd::Zero(2);
    double l = loss_preference(r_hat, pref);
    CHECK(l == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("preference loss: +10 logit difference is nearly free") {
    VectorXd r_true(2);
    r_true << 2.0, 1.0;
    auto pref = build_preference_set(r_true);
    VectorXd r_hat(2);
    r_hat << 10.0, 0.0;
    double l = loss_preference(r_hat, pref);
    CHECK(l == doctest::Approx(std::log1p(std::exp(-10.0))).epsilon(1e-9));
    CHECK(l < 1e-4);
}

TEST_CASE("preference loss matches a straight-line recomputation") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd(0.0, 1.0);
    VectorXd r_true(5), r_hat(5);
    for (int i = 0; i < 5; ++i) {
        r_true(i) = nd(rng);
        r_hat(i) = nd(rng);
    }
    auto pref = build_preference_set(r_true);
    double l = loss_preference(r_hat, pref);
    double expect = 0.0;
    for (size_t j = 0; j + 1 < pref.sigma.size(); ++j) {
        double z = r_hat(pref.sigma[j]) - r_hat(pref.sigma[j + 1]);
        double p = 1.0 / (1.0 + std::exp(-z));
        expect += -pref.mu[j] * std::log(p) - (1.0 - pref.mu[j]) * std::log(1.0 - p);
    }
    CHECK(l == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("difference loss basics and oracle") {
    VectorXd r_true(2);
    r_true << 2.0, 1.0;
    auto pref = build_preference_set(r_true);

    VectorXd perfect(2);
    perfect << 5.0, 4.0;  // difference exactly delta = 1
    CHECK(loss_diff(perfect, pref) == doctest::Approx(0.0));

    VectorXd flat = VectorXd::Zero(2);
    CHECK(loss_diff(flat, pref) == doctest::Approx(1.0));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    VectorXd rt(6), rh(6);
    for (int i = 0; i < 6; ++i) {
        rt(i) = nd(rng);
        rh(i) = nd(rng);
    }
    auto p6 = build_preference_set(rt);
    double expect = 0.0;
    for (size_t j = 0; j + 1 < p6.sigma.size(); ++j) {
        double z = rh(p6.sigma[j]) - rh(p6.sigma[j + 1]);
        expect += (z - p6.delta[j]) * (z - p6.delta[j]);
    }
    CHECK(loss_diff(rh, p6) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("total loss is the weighted sum") {
    CHECK(loss_total(2.0, 4.0, 0.85, 0.15) == doctest::Approx(2.3));
    CHECK(loss_total(7.0, 4.0, 1.0, 0.0) == doctest::Approx(7.0));
    CHECK(loss_total(7.0, 4.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("reward-fit loss: perfect fit, single-entry case, oracle") {
    VectorXd a(3);
    a << 1.0, -2.0, 0.5;
    CHECK(loss_reward_fit(a, a) == doctest::Approx(0.0));

    VectorXd rh = VectorXd::Zero(1), rt = VectorXd::Ones(1);
    CHECK(loss_reward_fit(rh, rt) == doctest::Approx(1.0));

    VectorXd rh2(4), rt2(4);
    rh2 << 0.0, 1.0, 2.0, 3.0;
    rt2 << 1.0, 1.0, 0.0, -1.0;
    double expect = (1.0 + 0.0 + 4.0 + 16.0) / 4.0;
    CHECK(loss_reward_fit(rh2, rt2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences on random small models") {
    // h = 1e-5, relative error <= 1e-4, over 10 random cases with 2 layers.
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        CAPTURE(trial);
        const int M = 2 + static_cast<int>(rng() % 7);   // <= 8 strategies
        const int F = 4 + static_cast<int>(rng() % 17);  // <= 20 features
        auto model = init_model(F, 2, 1000 + trial);
        TrainInstance ti;
        ti.tokens = random_tokens(M, F, 2000 + trial);
        ti.rewards = random_tokens(M, 1, 3000 + trial).col(0);
        ti.pref = build_preference_set(ti.rewards);
        TrainConfig cfg;
        std::vector<const TrainInstance*> batch = {&ti};

        auto grads = zero_grads(model);
        loss_and_grad(model, batch, cfg, &grads);
        VectorXd g = flatten_grads(model, grads);
        VectorXd theta = flatten_params(model);

        const double h = 1e-5;
        for (int k = 0; k < theta.size(); ++k) {
            VectorXd tp = theta, tm = theta;
            tp(k) += h;
            tm(k) -= h;
            RewardModel mp = model, mm = model;
            set_params(mp, tp);
            set_params(mm, tm);
            double lp = loss_and_grad(mp, batch, cfg, nullptr);
            double lm = loss_and_grad(mm, batch, cfg, nullptr);
            double fd = (lp - lm) / (2.0 * h);
            // Central differences run out of digits below ~1e-5, hence the
            // denominator floor.
            double denom = std::max({std::abs(fd), std::abs(g(k)), 1e-5});
            CHECK(std::abs(fd - g(k)) / denom <= 1e-4);
        }
    }
}

TEST_CASE("training with zero learning rate leaves the model unchanged") {
    const int N = 8, nv = 2;
    TrainingSet ts;
    ts.varying = random_tokens(N, nv, 50);
    ts.rewards = random_tokens(N, 2, 51);
    auto lib = two_strategies(6, 1);
    ts.library = &lib;
    ts.m_mat = 6;
    ts.n_int = 1;
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 1;
    cfg.n_layers = 1;
    auto res = train(ts, cfg);
    auto fresh = init_model(nv + 6 + 1, 1, cfg.seed);
    CHECK((flatten_params(res.model) - flatten_params(fresh)).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("separable toy problem trains to perfect argmax accuracy") {
    // Strategy 0 beats strategy 1 by at least 5 on every instance.
    const int N = 60;
    TrainingSet ts;
    ts.varying.resize(N, 1);
    ts.rewards.resize(N, 2);
    for (int i = 0; i < N; ++i) {
        ts.varying(i, 0) = 0.05 * i - 1.5;
        ts.rewards(i, 0) = 10.0 + 0.02 * i;
        ts.rewards(i, 1) = 2.0 + 0.03 * i;
    }
    auto lib = two_strategies(6, 1);
    ts.library = &lib;
    ts.m_mat = 6;
    ts.n_int = 1;
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 16;
    cfg.n_layers = 2;
    cfg.learning_rate = 2e-3;
    auto res = train(ts, cfg);
    // Loss decreases over the first 10 epochs.
    CHECK(res.epoch_loss[9] < res.epoch_loss[0]);
    // And the trained model ranks the winning strategy first everywhere.
    NormStats norm = res.model.norm;
    int correct = 0;
    for (int i = 0; i < N; ++i) {
        auto X = encode_batch(ts.varying.row(i).transpose(), lib, 6, 1, norm);
        VectorXd r = forward(res.model, X);
        if (r(0) > r(1)) ++correct;
    }
    CHECK(correct == N);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const int N = 12;
    TrainingSet ts;
    ts.varying = random_tokens(N, 2, 80);
    ts.rewards = random_tokens(N, 2, 81);
    auto lib = two_strategies(6, 1);
    ts.library = &lib;
    ts.m_mat = 6;
    ts.n_int = 1;
    TrainConfig cfg;
    cfg.epochs = 5;
    auto a = train(ts, cfg);
    auto b = train(ts, cfg);
    CHECK((flatten_params(a.model) - flatten_params(b.model)).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(a.epoch_loss == b.epoch_loss);
}
