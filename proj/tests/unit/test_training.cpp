#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rnntc/errors.hpp"
#include "rnntc/metrics.hpp"
#include "rnntc/network.hpp"
#include "rnntc/training.hpp"
#include "synthetic_fixture.hpp"

using namespace rnntc;

TEST_CASE("adam_update examples") {
    AdamHyperparams hyper;
    CHECK(hyper.learning_rate == 0.001);
    CHECK(hyper.beta1 == 0.9);
    CHECK(hyper.beta2 == 0.999);
    CHECK(hyper.epsilon == 1e-8);

    std::vector<double> theta{0.0};
    auto state = AdamState::zeros(1, hyper);
    adam_update(theta, std::vector<double>{1.0}, state);
    // One step from a fresh state: m_hat = g, v_hat = g^2.
    CHECK(theta[0] == doctest::Approx(-0.000999999990).epsilon(1e-12));
    CHECK(theta[0] == -0.001 * (1.0 / (1.0 + 1e-8)));
    CHECK(state.step == 1);

    std::vector<double> p{0.3, -1.7, 2.5};
    const auto before = p;
    auto fresh = AdamState::zeros(3, hyper);
    for (int i = 0; i < 3; ++i) {
        adam_update(p, std::vector<double>(3, 0.0), fresh);
        CHECK(p == before);
    }
    CHECK(fresh.step == 3);

    // After a nonzero step the first moment keeps moving parameters.
    adam_update(p, std::vector<double>{1.0, 1.0, 1.0}, fresh);
    const auto after_real = p;
    adam_update(p, std::vector<double>(3, 0.0), fresh);
    CHECK(p != after_real);

    auto small = AdamState::zeros(2, hyper);
    CHECK_THROWS_AS(adam_update(p, std::vector<double>(3, 0.0), small), ShapeError);
}

TEST_CASE("adam_update matches a hand-rolled reference over several steps") {
    AdamHyperparams h;
    h.learning_rate = 0.05;
    std::vector<double> theta{1.0, -2.0};
    auto state = AdamState::zeros(2, h);
    double m[2]{}, v[2]{}, ref[2]{1.0, -2.0};
    const double grads[4][2] = {{0.5, -1.0}, {0.1, 0.0}, {-2.0, 3.0}, {0.0, 0.25}};
    for (int t = 1; t <= 4; ++t) {
        adam_update(theta, std::vector<double>{grads[t - 1][0], grads[t - 1][1]}, state);
        for (int k = 0; k < 2; ++k) {
            const double g = grads[t - 1][k];
            m[k] = 0.9 * m[k] + 0.1 * g;
            v[k] = 0.999 * v[k] + 0.001 * g * g;
            const double mh = m[k] / (1.0 - std::pow(0.9, t));
            const double vh = v[k] / (1.0 - std::pow(0.999, t));
            ref[k] -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
            CHECK(theta[k] == doctest::Approx(ref[k]).epsilon(1e-14));
        }
    }
}

TEST_CASE("TrainConfig rejects zero epochs and batch size") {
    TrainConfig c;
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.epochs = 1;
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("training is deterministic and records one history row per epoch") {
    const auto f = rnntc::testing::make_synthetic_fixture(3, 8, 2, 2, 16, 100);
    auto cfg = rnntc::testing::desk_config(CellKind::Gru, f);
    cfg.hidden_dim = 6;
    cfg.embed_dim = 4;
    TrainConfig tc;
    tc.epochs = 4;
    tc.batch_size = 5;
    tc.seed = 9;
    const auto a = train(f.data, f.split, cfg, tc);
    const auto b = train(f.data, f.split, cfg, tc);
    CHECK(a.model == b.model);
    CHECK(a.history == b.history);
    CHECK(a.history.size() == 4);
    for (const auto& r : a.history) {
        CHECK(r.train_loss >= 0.0);
        CHECK(r.val_loss >= 0.0);
        CHECK((r.val_accuracy >= 0.0 && r.val_accuracy <= 1.0));
    }
    tc.seed = 10;
    CHECK_FALSE(train(f.data, f.split, cfg, tc).model == a.model);

    const auto csv = history_csv(a.history);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "epoch,train_loss,val_loss,val_accuracy");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
    }
    CHECK(rows == 4);

    std::size_t seen = 0;
    train(f.data, f.split, cfg, tc, [&](const EpochRecord& r, const Model&) {
        seen = r.epoch;
        return r.epoch < 2;
    });
    CHECK(seen == 2);
}

TEST_CASE("training rejects empty splits and bad labels") {
    auto f = rnntc::testing::make_synthetic_fixture(3, 4, 1, 1, 8, 50);
    const auto cfg = rnntc::testing::desk_config(CellKind::Srnn, f);
    TrainConfig tc;
    tc.epochs = 1;
    auto split = f.split;
    split.validation.clear();
    CHECK_THROWS_AS(train(f.data, split, cfg, tc), InputError);
    f.data.labels[f.split.train[0]] = 7;
    CHECK_THROWS_AS(train(f.data, f.split, cfg, tc), InputError);
}

TEST_CASE("a diverging run aborts with epoch and batch coordinates") {
    const auto f = rnntc::testing::make_synthetic_fixture(3, 8, 2, 2, 8, 50);
    auto cfg = rnntc::testing::desk_config(CellKind::Srnn, f);
    TrainConfig tc;
    tc.epochs = 3;
    tc.adam.learning_rate = 1e308;
    try {
        train(f.data, f.split, cfg, tc);
        FAIL("expected a numeric failure");
    } catch (const NumericError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch") != std::string::npos);
        CHECK(msg.find("batch") != std::string::npos);
    }
}

TEST_CASE("property: training lowers the train loss on the synthetic corpus") {
    const auto f = rnntc::testing::make_synthetic_fixture(1, 12, 2, 2);
    for (const auto kind : kAllCellKinds) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            CAPTURE(to_string(kind));
            CAPTURE(seed);
            const auto cfg = rnntc::testing::desk_config(kind, f);
            TrainConfig tc;
            tc.epochs = 3;
            tc.seed = seed;
            tc.adam.learning_rate = 0.01;
            const double initial = evaluate_split(Model::initialized(cfg, seed), f.data, f.split.train).mean_loss;
            const auto result = train(f.data, f.split, cfg, tc);
            CHECK(evaluate_split(result.model, f.data, f.split.train).mean_loss < initial);
        }
    }
}

TEST_CASE("evaluate_split examples") {
    const auto f = rnntc::testing::make_synthetic_fixture(2, 10, 1, 10, 8, 50);
    const auto cfg = rnntc::testing::desk_config(CellKind::Lstm, f);

    const Model uniform(cfg);  // all-zero parameters give uniform probabilities
    const auto s = evaluate_split(uniform, f.data, f.split.test);
    CHECK(s.accuracy == 0.25);
    CHECK(s.mean_loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate_split(uniform, f.data, std::vector<std::size_t>{}), InputError);

    // Output bias alone makes a confident constant classifier; on records of
    // that class it is perfect.
    Model confident(cfg);
    const auto slot = confident.params().find("output.b").value();
    confident.params().vector(slot)[3] = 1000.0;
    std::vector<std::size_t> destroyed;
    for (const auto i : f.split.test) {
        if (f.data.labels[i] == 3) {
            destroyed.push_back(i);
        }
    }
    const auto p = evaluate_split(confident, f.data, destroyed);
    CHECK(p.accuracy == 1.0);
    CHECK(p.mean_loss == 0.0);

    const Model trained = Model::initialized(cfg, 4);
    const auto preds = predict_classes(trained, f.data, f.split.test);
    std::vector<std::size_t> truths;
    for (const auto i : f.split.test) {
        truths.push_back(f.data.labels[i]);
    }
    const auto report = make_report(confusion_matrix(truths, preds, 4), default_class_names());
    CHECK(evaluate_split(trained, f.data, f.split.test).accuracy == report.accuracy);
}
