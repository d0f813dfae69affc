#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "tsxb/synth.hpp"

using namespace tsxb;

TEST_CASE("default config matches the published dimensions", "[synth]") {
    SynthConfig cfg;
    cfg.seed = 42;
    auto data = generate(cfg);

    CHECK(data.train.n() == 7500);
    CHECK(data.train.d() == 8);
    CHECK(data.train.l() == 500);
    CHECK(data.test.n() == 1000);
    CHECK(data.test.d() == 8);
    CHECK(data.test.l() == 500);

    auto balance = class_balance(data.test);
    REQUIRE(balance.size() == 2);
    CHECK(balance[0] == 500);
    CHECK(balance[1] == 500);

    auto train_balance = class_balance(data.train);
    CHECK(train_balance[0] > 0);
    CHECK(train_balance[1] > 0);

    // two 100-point windows per instance
    for (int i = 0; i < data.test.n(); ++i) {
        int ones = 0;
        for (auto b : data.gt_test.instance(i)) ones += b;
        REQUIRE(ones == 200);
    }
    CHECK(validate(data.train).empty());
    CHECK(validate(data.test).empty());
}

TEST_CASE("discriminative content stays on eligible channels", "[synth]") {
    SynthConfig cfg;
    cfg.n_channels = 5;
    cfg.extra_nondisc_channels = 2;
    cfg.length = 80;
    cfg.window_len = 20;
    cfg.n_train = 60;
    cfg.n_test = 20;
    cfg.seed = 3;
    auto data = generate(cfg);

    auto check_split = [&](const MtsDataset& ds, const GroundTruthMask& gt,
                           const std::vector<SynthInstanceMeta>& meta) {
        for (int i = 0; i < ds.n(); ++i) {
            const auto& m = meta[static_cast<std::size_t>(i)];
            CHECK(m.channel_a != m.channel_b);
            CHECK(m.channel_a < 3); // eligible = 5 - 2
            CHECK(m.channel_b < 3);
            // ground truth nonzero exactly on the two window stripes
            for (int c = 0; c < ds.d(); ++c) {
                for (int t = 0; t < ds.l(); ++t) {
                    const bool in_window = (c == m.channel_a || c == m.channel_b) &&
                                           t >= m.window_start &&
                                           t < m.window_start + cfg.window_len;
                    CHECK(gt.at(i, c, t) == (in_window ? 1 : 0));
                }
            }
        }
    };
    check_split(data.train, data.gt_train, data.meta_train);
    check_split(data.test, data.gt_test, data.meta_test);
}

TEST_CASE("labels equal the threshold predicate on stored frequencies", "[synth]") {
    SynthConfig cfg;
    cfg.n_train = 200;
    cfg.n_test = 50;
    cfg.length = 120;
    cfg.window_len = 30;
    cfg.seed = 11;
    auto data = generate(cfg);
    for (int i = 0; i < data.train.n(); ++i) {
        const auto& m = data.meta_train[static_cast<std::size_t>(i)];
        const int expected = (m.f1 + m.f2 > cfg.label_threshold) ? 1 : 0;
        REQUIRE(data.train.labels[static_cast<std::size_t>(i)] == expected);
        REQUIRE(m.label == expected);
    }
}

TEST_CASE("same seed reproduces tensors, different seeds move the windows", "[synth]") {
    SynthConfig cfg;
    cfg.n_train = 40;
    cfg.n_test = 10;
    cfg.length = 100;
    cfg.window_len = 25;
    cfg.seed = 5;

    auto a = generate(cfg);
    auto b = generate(cfg);
    CHECK(a.train.data.v == b.train.data.v);
    CHECK(a.test.data.v == b.test.data.v);
    CHECK(a.train.labels == b.train.labels);

    cfg.seed = 6;
    auto c = generate(cfg);
    bool any_window_differs = false;
    for (std::size_t i = 0; i < a.meta_train.size(); ++i) {
        if (a.meta_train[i].window_start != c.meta_train[i].window_start) {
            any_window_differs = true;
            break;
        }
    }
    CHECK(any_window_differs);
}

TEST_CASE("parallel generation matches sequential", "[synth]") {
    SynthConfig cfg;
    cfg.n_train = 30;
    cfg.n_test = 10;
    cfg.length = 64;
    cfg.window_len = 16;
    cfg.seed = 9;
    auto seq = generate(cfg, 1);
    auto par = generate(cfg, 4);
    CHECK(seq.train.data.v == par.train.data.v);
    CHECK(seq.test.data.v == par.test.data.v);
}

TEST_CASE("infeasible configs are rejected", "[synth]") {
    SynthConfig cfg;
    cfg.window_len = 600; // > length 500
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    SynthConfig odd;
    odd.n_test = 11;
    CHECK_THROWS_AS(generate(odd), ConfigError);

    SynthConfig few;
    few.n_channels = 3;
    few.extra_nondisc_channels = 2; // only 1 eligible channel
    CHECK_THROWS_AS(generate(few), ConfigError);
}

TEST_CASE("class_balance sums to N", "[synth]") {
    MtsDataset ds;
    ds.data = Tensor3(1, 1, 4);
    ds.labels = {0};
    ds.n_classes = 2;
    auto counts = class_balance(ds);
    CHECK(counts == std::vector<int>{1, 0});
}
