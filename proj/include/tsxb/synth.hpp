#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"
#include "tsxb/parallel.hpp"
#include "tsxb/rng.hpp"

namespace tsxb {

/// Synthetic benchmark: background sines on every channel, two randomly
/// chosen channels carry a higher-frequency wave in a shared window of
/// window_len consecutive points, and the binary label is whether the two
/// discriminative frequencies sum above label_threshold. The trailing
/// extra_nondisc_channels never receive discriminative content.
struct SynthConfig {
    int n_channels = 8;
    int length = 500;
    int window_len = 100;
    int n_train = 7500;
    int n_test = 1000; // exactly balanced, must be even
    double base_freq_min = 1.0; // cycles over the full series
    double base_freq_max = 3.0;
    double disc_freq_min = 4.0;
    double disc_freq_max = 8.0;
    double label_threshold = 12.0;
    double square_wave_prob = 0.5;
    int extra_nondisc_channels = 2;
    std::uint64_t seed = 0;
};

struct SynthInstanceMeta {
    int channel_a = 0;
    int channel_b = 0;
    int window_start = 0;
    double f1 = 0.0;
    double f2 = 0.0;
    int label = 0;
};

struct SynthData {
    MtsDataset train;
    MtsDataset test;
    GroundTruthMask gt_train;
    GroundTruthMask gt_test;
    std::vector<SynthInstanceMeta> meta_train;
    std::vector<SynthInstanceMeta> meta_test;
};

inline void validate_config(const SynthConfig& cfg) {
    if (cfg.window_len > cfg.length) {
        throw ConfigError("window_len " + std::to_string(cfg.window_len) +
                          " exceeds series length " + std::to_string(cfg.length));
    }
    if (cfg.window_len < 1 || cfg.length < 1) throw ConfigError("window_len and length must be >= 1");
    if (cfg.n_channels < 3) throw ConfigError("n_channels must be >= 3");
    if (cfg.extra_nondisc_channels < 0 || cfg.n_channels - cfg.extra_nondisc_channels < 2) {
        throw ConfigError("need at least 2 channels eligible for the discriminative pair");
    }
    if (!(cfg.disc_freq_min > cfg.base_freq_max)) {
        throw ConfigError("disc_freq_range must lie strictly above base_freq_range");
    }
    if (cfg.square_wave_prob < 0.0 || cfg.square_wave_prob > 1.0) {
        throw ConfigError("square_wave_prob must be in [0,1]");
    }
    if (cfg.n_train < 1) throw ConfigError("n_train must be >= 1");
    if (cfg.n_test < 2 || cfg.n_test % 2 != 0) {
        throw ConfigError("n_test must be even and >= 2 for exact class balance");
    }
}

namespace detail {

constexpr std::uint64_t kSynthTrainTag = 0x7261696eULL; // "rain"
constexpr std::uint64_t kSynthTestTag = 0x74657374ULL;  // "test"

/// Fills one instance (row i of data/gt) from its own rng stream.
inline SynthInstanceMeta synth_instance(const SynthConfig& cfg, Rng rng,
                                        std::span<double> out, std::uint8_t* gt_out) {
    const int d = cfg.n_channels;
    const int l = cfg.length;
    const int eligible = cfg.n_channels - cfg.extra_nondisc_channels;
    constexpr double two_pi = 2.0 * std::numbers::pi;

    SynthInstanceMeta meta;
    meta.channel_a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(eligible)));
    meta.channel_b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(eligible - 1)));
    if (meta.channel_b >= meta.channel_a) ++meta.channel_b;
    meta.window_start =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(l - cfg.window_len + 1)));
    meta.f1 = rng.next_uniform(cfg.disc_freq_min, cfg.disc_freq_max);
    meta.f2 = rng.next_uniform(cfg.disc_freq_min, cfg.disc_freq_max);
    meta.label = (meta.f1 + meta.f2 > cfg.label_threshold) ? 1 : 0;

    for (int c = 0; c < d; ++c) {
        const double freq = rng.next_uniform(cfg.base_freq_min, cfg.base_freq_max);
        const double phase = rng.next_uniform(0.0, two_pi);
        double* ch = out.data() + static_cast<std::size_t>(c) * l;
        for (int t = 0; t < l; ++t) {
            ch[t] = std::sin(two_pi * freq * t / l + phase);
        }
        const bool discriminative = (c == meta.channel_a || c == meta.channel_b);
        if (!discriminative && rng.next_bernoulli(cfg.square_wave_prob)) {
            // additive square wave, amplitude 1, two cycles over the series
            const double sq_phase = rng.next_uniform(0.0, two_pi);
            for (int t = 0; t < l; ++t) {
                ch[t] += std::sin(two_pi * 2.0 * t / l + sq_phase) >= 0.0 ? 1.0 : -1.0;
            }
        }
        if (discriminative) {
            const double f = (c == meta.channel_a) ? meta.f1 : meta.f2;
            const double disc_phase = rng.next_uniform(0.0, two_pi);
            for (int t = meta.window_start; t < meta.window_start + cfg.window_len; ++t) {
                ch[t] = std::sin(two_pi * f * t / l + disc_phase);
            }
            if (gt_out != nullptr) {
                for (int t = meta.window_start; t < meta.window_start + cfg.window_len; ++t) {
                    gt_out[static_cast<std::size_t>(c) * l + t] = 1;
                }
            }
        }
    }
    return meta;
}

} // namespace detail

inline SynthData generate(const SynthConfig& cfg, int threads = 1) {
    validate_config(cfg);
    Rng master(cfg.seed);

    SynthData out;
    out.train.data = Tensor3(cfg.n_train, cfg.n_channels, cfg.length);
    out.train.labels.resize(static_cast<std::size_t>(cfg.n_train));
    out.train.n_classes = 2;
    out.train.name = "synthetic";
    out.train.split = Split::Train;
    out.gt_train = GroundTruthMask(cfg.n_train, cfg.n_channels, cfg.length);
    out.meta_train.resize(static_cast<std::size_t>(cfg.n_train));

    parallel_for(static_cast<std::size_t>(cfg.n_train), threads, [&](std::size_t i) {
        Rng rng = master.derive(detail::kSynthTrainTag, i);
        auto meta = detail::synth_instance(
            cfg, rng, out.train.data.instance(static_cast<int>(i)),
            out.gt_train.values.data() + i * out.gt_train.instance_size());
        out.meta_train[i] = meta;
        out.train.labels[i] = static_cast<std::int32_t>(meta.label);
    });

    // Test split: exactly n_test/2 per class, filled by scanning candidate
    // streams in order and keeping what each class still needs.
    out.test.data = Tensor3(cfg.n_test, cfg.n_channels, cfg.length);
    out.test.labels.resize(static_cast<std::size_t>(cfg.n_test));
    out.test.n_classes = 2;
    out.test.name = "synthetic";
    out.test.split = Split::Test;
    out.gt_test = GroundTruthMask(cfg.n_test, cfg.n_channels, cfg.length);
    out.meta_test.resize(static_cast<std::size_t>(cfg.n_test));

    const int per_class = cfg.n_test / 2;
    int counts[2] = {0, 0};
    int written = 0;
    std::vector<double> scratch(out.test.data.instance_size());
    std::vector<std::uint8_t> gt_scratch(out.gt_test.instance_size());
    for (std::uint64_t attempt = 0; written < cfg.n_test; ++attempt) {
        Rng rng = master.derive(detail::kSynthTestTag, attempt);
        std::fill(gt_scratch.begin(), gt_scratch.end(), 0);
        auto meta = detail::synth_instance(cfg, rng, scratch, gt_scratch.data());
        if (counts[meta.label] >= per_class) continue;
        ++counts[meta.label];
        auto dst = out.test.data.instance(written);
        std::copy(scratch.begin(), scratch.end(), dst.begin());
        std::copy(gt_scratch.begin(), gt_scratch.end(),
                  out.gt_test.values.begin() +
                      static_cast<std::ptrdiff_t>(written * out.gt_test.instance_size()));
        out.meta_test[static_cast<std::size_t>(written)] = meta;
        out.test.labels[static_cast<std::size_t>(written)] = static_cast<std::int32_t>(meta.label);
        ++written;
    }
    return out;
}

/// Per-class instance counts (length n_classes, sums to N).
inline std::vector<int> class_balance(const MtsDataset& ds) {
    std::vector<int> counts(static_cast<std::size_t>(ds.n_classes), 0);
    for (auto label : ds.labels) {
        if (label >= 0 && label < ds.n_classes) ++counts[static_cast<std::size_t>(label)];
    }
    return counts;
}

} // namespace tsxb
