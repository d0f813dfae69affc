#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "helpers.hpp"
#include "tsxb/channels.hpp"
#include "tsxb/rng.hpp"

using namespace tsxb;

namespace {

MtsDataset random_dataset(int n, int d, int l, std::uint64_t seed) {
    MtsDataset ds;
    ds.data = Tensor3(n, d, l);
    ds.labels.resize(static_cast<std::size_t>(n));
    ds.n_classes = 2;
    ds.name = "rand";
    Rng rng(seed);
    for (auto& v : ds.data.v) v = rng.next_uniform(-2.0, 2.0);
    for (int i = 0; i < n; ++i) ds.labels[static_cast<std::size_t>(i)] = i % 2;
    return ds;
}

Saliency normalized_saliency(Tensor3 t) {
    Saliency s;
    s.values = std::move(t);
    s.method = "test";
    return normalize_saliency(s);
}

} // namespace

TEST_CASE("channel importance averages attribution mass per channel", "[channels]") {
    auto ds = random_dataset(3, 4, 5, 1);

    SECTION("all mass on channel 0") {
        Tensor3 t(3, 4, 5);
        for (int i = 0; i < 3; ++i) {
            for (int time = 0; time < 5; ++time) t.at(i, 0, time) = 1.0;
        }
        auto imp = channel_importance(normalized_saliency(std::move(t)), ds);
        CHECK(imp.r == std::vector<double>{1.0, 0.0, 0.0, 0.0});
    }
    SECTION("uniform 0.5 after normalization scales to 1") {
        // max-normalization maps a constant 0.5 map to constant 1
        Tensor3 t(3, 4, 5, 0.5);
        auto imp = channel_importance(normalized_saliency(std::move(t)), ds);
        for (double v : imp.r) CHECK(v == 1.0);
    }
    SECTION("raw mode keeps the 0.5") {
        Saliency s;
        s.values = Tensor3(3, 4, 5, 0.5);
        s.normalized = false;
        CHECK_THROWS_AS(channel_importance(s, ds), ValidationError);
        auto imp = channel_importance(s, ds, /*allow_raw=*/true);
        for (double v : imp.r) CHECK(v == 0.5);
    }
}

TEST_CASE("importance is positively homogeneous and rank-invariant", "[channels]") {
    auto ds = random_dataset(4, 3, 6, 2);
    Tensor3 t(4, 3, 6);
    Rng rng(3);
    for (auto& v : t.v) v = rng.next_double();

    Saliency s;
    s.values = t;
    s.normalized = true; // treat as already scaled
    auto base = channel_importance(s, ds);

    Saliency doubled;
    doubled.values = t;
    for (auto& v : doubled.values.v) v *= 2.0;
    doubled.normalized = true;
    auto scaled = channel_importance(doubled, ds);
    for (std::size_t c = 0; c < base.r.size(); ++c) {
        CHECK(scaled.r[c] == 2.0 * base.r[c]);
    }
    CHECK(rank_channels(base.r) == rank_channels(scaled.r));
}

TEST_CASE("rank_channels is a stable descending order", "[channels]") {
    std::vector<double> r{0.3, 0.9, 0.9};
    CHECK(rank_channels(r) == std::vector<int>{1, 2, 0});

    std::vector<double> flat{0.5, 0.5, 0.5};
    CHECK(rank_channels(flat) == std::vector<int>{0, 1, 2});
}

TEST_CASE("select_top returns the leading ranks", "[channels]") {
    std::vector<double> r{1.0, 0.0};
    CHECK(select_top(r, 1) == std::vector<int>{0});
    CHECK(select_top(r, 2) == std::vector<int>{0, 1});
    CHECK_THROWS_AS(select_top(r, 0), ConfigError);
    CHECK_THROWS_AS(select_top(r, 3), ConfigError);
}

TEST_CASE("subset_dataset preserves channel values bit-exactly", "[channels]") {
    auto ds = random_dataset(5, 4, 7, 9);

    std::vector<int> all{0, 1, 2, 3};
    auto same = subset_dataset(ds, all);
    CHECK(std::memcmp(same.data.v.data(), ds.data.v.data(),
                      ds.data.v.size() * sizeof(double)) == 0);

    std::vector<int> one{2};
    auto sub = subset_dataset(ds, one);
    CHECK(sub.d() == 1);
    CHECK(sub.n() == 5);
    CHECK(sub.l() == 7);
    for (int i = 0; i < 5; ++i) {
        for (int t = 0; t < 7; ++t) CHECK(sub.data.at(i, 0, t) == ds.data.at(i, 2, t));
    }
    CHECK(sub.labels == ds.labels);

    // order preserved as given
    std::vector<int> reversed{3, 0};
    auto rev = subset_dataset(ds, reversed);
    CHECK(rev.data.at(0, 0, 0) == ds.data.at(0, 3, 0));
    CHECK(rev.data.at(0, 1, 0) == ds.data.at(0, 0, 0));

    std::vector<int> dup{1, 1};
    CHECK_THROWS_AS(subset_dataset(ds, dup), ConfigError);
    std::vector<int> oob{4};
    CHECK_THROWS_AS(subset_dataset(ds, oob), ConfigError);
    CHECK_THROWS_AS(subset_dataset(ds, std::vector<int>{}), ConfigError);
}

TEST_CASE("selection_study with k=d reproduces the baseline exactly", "[channels]") {
    auto train = random_dataset(24, 3, 5, 11);
    auto test = random_dataset(12, 3, 5, 12);
    // make the task learnable: shift channel 1 by the label
    for (auto* ds : {&train, &test}) {
        for (int i = 0; i < ds->n(); ++i) {
            for (int t = 0; t < ds->l(); ++t) {
                ds->data.at(i, 1, t) += ds->labels[static_cast<std::size_t>(i)] == 1 ? 2.0 : -2.0;
            }
        }
    }
    TrainerFn trainer = [](const MtsDataset& ds) -> std::unique_ptr<Classifier> {
        return std::make_unique<TabularRidgeModel>(train_tabular(ds, 1.0));
    };

    std::vector<double> r{0.2, 0.9, 0.1};
    std::vector<int> ks{3, 1};
    auto report = selection_study(train, test, r, ks, trainer);
    REQUIRE(report.entries.size() == 2);
    CHECK(report.ranking == std::vector<int>{1, 0, 2});
    CHECK(report.entries[0].k == 3);
    CHECK(report.entries[0].accuracy == report.baseline_accuracy);
    CHECK(report.entries[1].channels == std::vector<int>{1});
    CHECK(report.entries[1].accuracy >= 0.9); // channel 1 carries the signal
}
