#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qaoa/ppn.hpp"

using namespace qaoa;

namespace {

Tensor3 random_param_tensor(int width, Rng& rng) {
    Tensor3 t(1, 2, width);
    for (double& v : t.data) v = rng.uniform(0.05, 0.75);
    return t;
}

std::vector<TrainingExample> synthetic_dataset(int n, int horizon, Rng& rng) {
    std::vector<TrainingExample> out;
    for (int i = 0; i < n; ++i) {
        TrainingExample ex;
        ex.start = random_param_tensor(1, rng);
        for (int t = 1; t <= horizon; ++t) ex.targets.push_back(random_param_tensor(1 + t, rng));
        out.push_back(std::move(ex));
    }
    return out;
}

bool models_identical(const PpnModel& a, const PpnModel& b) {
    if (a.up1.weights != b.up1.weights || a.up1.bias != b.up1.bias) return false;
    if (a.up2.weights != b.up2.weights || a.up2.bias != b.up2.bias) return false;
    if (a.n_blocks() != b.n_blocks()) return false;
    for (int i = 0; i < a.n_blocks(); ++i) {
        if (a.blocks[i].conv1.weights != b.blocks[i].conv1.weights) return false;
        if (a.blocks[i].conv2.weights != b.blocks[i].conv2.weights) return false;
        if (a.blocks[i].conv1.bias != b.blocks[i].conv1.bias) return false;
        if (a.blocks[i].conv2.bias != b.blocks[i].conv2.bias) return false;
    }
    return a.down.weights == b.down.weights && a.down.bias == b.down.bias;
}

}  // namespace

TEST_CASE("zero learning rate leaves the weights bitwise unchanged") {
    Rng rng(71);
    PpnModel model = PpnModel::randomized(2, rng);
    const PpnModel before = model;
    TrainConfig cfg;
    cfg.epochs_phase1 = 3;
    cfg.epochs_phase2 = 2;
    cfg.lr_phase1 = 0.0;
    cfg.lr_phase2 = 0.0;
    cfg.batch_phase1 = 2;
    cfg.batch_phase2 = 1;
    cfg.horizon = 2;
    const auto history = train_ppn(model, synthetic_dataset(4, 2, rng), cfg);
    CHECK(history.size() == 5);
    CHECK(models_identical(model, before));
}

TEST_CASE("a single instance can be overfit") {
    Rng rng(72);
    PpnModel model = PpnModel::randomized(2, rng);
    const auto dataset = synthetic_dataset(1, 1, rng);
    TrainConfig cfg;
    cfg.epochs_phase1 = 5000;
    cfg.epochs_phase2 = 0;
    cfg.lr_phase1 = 1e-3;
    cfg.batch_phase1 = 1;
    cfg.horizon = 1;
    const auto history = train_ppn(model, dataset, cfg);
    CHECK(history.back() < 1e-4);
    CHECK(history.back() < history.front());
}

TEST_CASE("training reduces the loss on a small dataset") {
    Rng rng(73);
    PpnModel model = PpnModel::randomized(2, rng);
    const auto dataset = synthetic_dataset(8, 3, rng);
    TrainConfig cfg;
    cfg.epochs_phase1 = 60;
    cfg.epochs_phase2 = 20;
    cfg.lr_phase1 = 1e-4;
    cfg.lr_phase2 = 1e-5;
    cfg.batch_phase1 = 4;
    cfg.batch_phase2 = 2;
    cfg.horizon = 3;
    const auto history = train_ppn(model, dataset, cfg);
    REQUIRE(history.size() == 80);
    CHECK(history.back() < history.front());
}

TEST_CASE("training is deterministic for a fixed seed and any thread count") {
    Rng rng(74);
    const PpnModel init = PpnModel::randomized(2, rng);
    const auto dataset = synthetic_dataset(6, 2, rng);
    TrainConfig cfg;
    cfg.epochs_phase1 = 10;
    cfg.epochs_phase2 = 5;
    cfg.lr_phase1 = 1e-4;
    cfg.lr_phase2 = 1e-5;
    cfg.batch_phase1 = 3;
    cfg.batch_phase2 = 2;
    cfg.horizon = 2;
    cfg.seed = 99;

    PpnModel a = init;
    cfg.n_threads = 1;
    const auto history_a = train_ppn(a, dataset, cfg);

    PpnModel b = init;
    cfg.n_threads = 4;
    const auto history_b = train_ppn(b, dataset, cfg);

    CHECK(history_a == history_b);
    CHECK(models_identical(a, b));

    PpnModel c = init;
    cfg.seed = 100;
    const auto history_c = train_ppn(c, dataset, cfg);
    CHECK(history_a != history_c);  // the shuffle order must actually depend on the seed
}

TEST_CASE("non-finite loss aborts with a diagnostic") {
    Rng rng(75);
    PpnModel model = PpnModel::randomized(1, rng);
    for (double& w : model.up1.weights) w = 1e200;  // forces overflow in the loss
    auto dataset = synthetic_dataset(1, 1, rng);
    TrainConfig cfg;
    cfg.epochs_phase1 = 1;
    cfg.epochs_phase2 = 0;
    cfg.batch_phase1 = 1;
    cfg.horizon = 1;
    CHECK_THROWS_AS(train_ppn(model, dataset, cfg), std::runtime_error);
}
