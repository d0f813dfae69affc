#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "tsxb/masks.hpp"
#include "tsxb/rng.hpp"

using namespace tsxb;

namespace {

MtsDataset two_instance_dataset() {
    // instance 0 all 1s except cell (0,1)=0; instance 1 all 3s except (0,1)=2
    MtsDataset ds;
    ds.data = Tensor3(2, 1, 3);
    ds.labels = {0, 1};
    ds.n_classes = 2;
    ds.name = "two";
    for (int t = 0; t < 3; ++t) {
        ds.data.at(0, 0, t) = 1.0;
        ds.data.at(1, 0, t) = 3.0;
    }
    ds.data.at(0, 0, 1) = 0.0;
    ds.data.at(1, 0, 1) = 2.0;
    return ds;
}

} // namespace

TEST_CASE("fit_stats computes the published formulas", "[masks]") {
    auto ds = two_instance_dataset();
    auto stats = fit_stats(ds);

    // cell values {1,3}: mean 2, std sqrt(((1-2)^2+(3-2)^2)/1) = sqrt(2)
    CHECK(stats.mu(0, 0) == 2.0);
    CHECK(stats.sigma(0, 0) == Catch::Approx(std::sqrt(2.0)).margin(1e-15));
    // cell values {0,2}: mean 1, std sqrt(2)
    CHECK(stats.mu(0, 1) == 1.0);
    CHECK(stats.sigma(0, 1) == Catch::Approx(std::sqrt(2.0)).margin(1e-15));
}

TEST_CASE("all-ones dataset has unit mean and zero spread", "[masks]") {
    MtsDataset ds;
    ds.data = Tensor3(4, 2, 5, 1.0);
    ds.labels = {0, 0, 0, 0};
    ds.n_classes = 1;
    auto stats = fit_stats(ds);
    CHECK(stats.global_mean == 1.0);
    CHECK(stats.global_std == 0.0);
    Rng rng(1);
    CHECK(replacement_value(MaskKind::GlobalMean, stats, 1, 3, rng) == 1.0);
    CHECK(replacement_value(MaskKind::GlobalGaussian, stats, 1, 3, rng) == 1.0);
}

TEST_CASE("replacement values per kind", "[masks]") {
    auto stats = fit_stats(two_instance_dataset());
    Rng rng(9);

    CHECK(replacement_value(MaskKind::Zeros, stats, 0, 0, rng) == 0.0);
    CHECK(replacement_value(MaskKind::LocalMean, stats, 0, 1, rng) == 1.0);
    CHECK(replacement_value(MaskKind::GlobalMean, stats, 0, 2, rng) ==
          Catch::Approx(5.0 / 3.0).margin(1e-15));

    // degenerate local gaussian collapses to the mean exactly
    MaskStats degen = stats;
    std::fill(degen.local_std.begin(), degen.local_std.end(), 0.0);
    CHECK(replacement_value(MaskKind::LocalGaussian, degen, 0, 1, rng) == 1.0);
}

TEST_CASE("stats-dependent masks require a fit", "[masks]") {
    MaskStats unfitted;
    Rng rng(2);
    CHECK_THROWS_AS(replacement_value(MaskKind::LocalMean, unfitted, 0, 0, rng), ConfigError);
    CHECK_THROWS_AS(replacement_value(MaskKind::GlobalGaussian, unfitted, 0, 0, rng), ConfigError);
    CHECK(replacement_value(MaskKind::Zeros, unfitted, 0, 0, rng) == 0.0);
    CHECK(std::isfinite(replacement_value(MaskKind::StdNormal, unfitted, 0, 0, rng)));
}

TEST_CASE("deterministic masks leave the rng stream untouched", "[masks]") {
    auto stats = fit_stats(two_instance_dataset());
    for (MaskKind kind : {MaskKind::Zeros, MaskKind::LocalMean, MaskKind::GlobalMean}) {
        Rng used(77);
        replacement_value(kind, stats, 0, 0, used);
        Rng fresh(77);
        CHECK(used.next_u64() == fresh.next_u64());
    }
    // a gaussian mask consumes the stream
    Rng used(77);
    replacement_value(MaskKind::LocalGaussian, stats, 0, 0, used);
    Rng fresh(77);
    CHECK(used.next_u64() != fresh.next_u64());
}

TEST_CASE("local gaussian draws center on the fitted mean", "[masks]") {
    auto stats = fit_stats(two_instance_dataset());
    const double mu = stats.mu(0, 0);
    const double sigma = stats.sigma(0, 0);
    Rng rng(5);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += replacement_value(MaskKind::LocalGaussian, stats, 0, 0, rng);
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - mu) <= 4.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fit_stats is invariant to instance order", "[masks]") {
    // power-of-two instance count keeps means and squared deviations exactly
    // representable, so reordering cannot move a single bit
    MtsDataset ds;
    ds.data = Tensor3(4, 2, 4);
    ds.labels.assign(4, 0);
    ds.n_classes = 1;
    Rng rng(3);
    for (auto& v : ds.data.v) v = static_cast<double>(rng.next_below(9));

    MtsDataset shuffled = ds;
    std::vector<int> order{3, 0, 1, 2};
    for (int i = 0; i < 4; ++i) {
        auto src = ds.data.instance(order[static_cast<std::size_t>(i)]);
        auto dst = shuffled.data.instance(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }

    auto a = fit_stats(ds);
    auto b = fit_stats(shuffled);
    CHECK(a.local_mean == b.local_mean);
    CHECK(a.local_std == b.local_std);
    CHECK(a.global_mean == b.global_mean);
    CHECK(a.global_std == b.global_std);
}

TEST_CASE("single-instance fit leaves stds at zero", "[masks]") {
    MtsDataset ds;
    ds.data = Tensor3(1, 1, 3);
    ds.data.at(0, 0, 0) = 4.0;
    ds.labels = {0};
    ds.n_classes = 1;
    auto stats = fit_stats(ds);
    CHECK(stats.sigma(0, 0) == 0.0);
    CHECK(stats.global_std == 0.0);
    CHECK(stats.mu(0, 0) == 4.0);
}

TEST_CASE("mask names round-trip", "[masks]") {
    for (MaskKind kind : kAllMasks) {
        auto parsed = mask_from_name(mask_name(kind));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == kind);
    }
    CHECK_FALSE(mask_from_name("nonsense").has_value());
}
