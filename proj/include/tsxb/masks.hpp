#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"
#include "tsxb/rng.hpp"

namespace tsxb {

/// The six replacement distributions used to overwrite perturbed points.
enum class MaskKind { Zeros, StdNormal, LocalMean, LocalGaussian, GlobalMean, GlobalGaussian };

inline constexpr MaskKind kAllMasks[] = {MaskKind::Zeros,      MaskKind::StdNormal,
                                         MaskKind::LocalMean,  MaskKind::LocalGaussian,
                                         MaskKind::GlobalMean, MaskKind::GlobalGaussian};

inline const char* mask_name(MaskKind kind) {
    switch (kind) {
        case MaskKind::Zeros: return "zeros";
        case MaskKind::StdNormal: return "std_normal";
        case MaskKind::LocalMean: return "local_mean";
        case MaskKind::LocalGaussian: return "local_gaussian";
        case MaskKind::GlobalMean: return "global_mean";
        case MaskKind::GlobalGaussian: return "global_gaussian";
    }
    return "?";
}

inline std::optional<MaskKind> mask_from_name(std::string_view name) {
    for (MaskKind kind : kAllMasks) {
        if (name == mask_name(kind)) return kind;
    }
    return std::nullopt;
}

/// True for masks that need fitted statistics (everything except Zeros and
/// StdNormal).
inline bool mask_needs_stats(MaskKind kind) {
    return kind != MaskKind::Zeros && kind != MaskKind::StdNormal;
}

/// True for masks that draw from the rng stream.
inline bool mask_is_stochastic(MaskKind kind) {
    return kind == MaskKind::StdNormal || kind == MaskKind::LocalGaussian ||
           kind == MaskKind::GlobalGaussian;
}

/// Per-(channel, time) and pooled means/standard deviations backing the
/// local/global replacement distributions.
struct MaskStats {
    int d = 0;
    int l = 0;
    std::vector<double> local_mean; // d x L
    std::vector<double> local_std;  // d x L
    double global_mean = 0.0;
    double global_std = 0.0;
    std::string fitted_on;
    bool fitted = false;

    double mu(int c, int t) const { return local_mean[static_cast<std::size_t>(c) * l + t]; }
    double sigma(int c, int t) const { return local_std[static_cast<std::size_t>(c) * l + t]; }
};

/// local_mean[c][t] = mean over instances; local_std the matching sample
/// standard deviation (N-1 denominator). Global stats pool all N*d*L values.
inline MaskStats fit_stats(const MtsDataset& ds) {
    const int n = ds.n(), d = ds.d(), l = ds.l();
    MaskStats stats;
    stats.d = d;
    stats.l = l;
    stats.fitted_on = ds.name + ":" + split_name(ds.split);
    stats.fitted = true;
    const std::size_t cells = ds.data.instance_size();
    stats.local_mean.assign(cells, 0.0);
    stats.local_std.assign(cells, 0.0);

    if (n < 2) {
        std::fprintf(stderr, "warning: fitting mask stats on a single instance, stds set to 0\n");
    }

    for (int i = 0; i < n; ++i) {
        auto x = ds.data.instance(i);
        for (std::size_t j = 0; j < cells; ++j) stats.local_mean[j] += x[j];
    }
    for (std::size_t j = 0; j < cells; ++j) stats.local_mean[j] /= n;

    if (n >= 2) {
        for (int i = 0; i < n; ++i) {
            auto x = ds.data.instance(i);
            for (std::size_t j = 0; j < cells; ++j) {
                const double dev = x[j] - stats.local_mean[j];
                stats.local_std[j] += dev * dev;
            }
        }
        for (std::size_t j = 0; j < cells; ++j) {
            stats.local_std[j] = std::sqrt(stats.local_std[j] / (n - 1));
        }
    }

    const std::size_t total = ds.data.size();
    double sum = 0.0;
    for (double v : ds.data.v) sum += v;
    stats.global_mean = sum / static_cast<double>(total);
    if (n >= 2 && total >= 2) {
        double sq = 0.0;
        for (double v : ds.data.v) {
            const double dev = v - stats.global_mean;
            sq += dev * dev;
        }
        stats.global_std = std::sqrt(sq / static_cast<double>(total - 1));
    }
    return stats;
}

/// The replacement value r for coordinate (c, t). Stochastic kinds consume
/// exactly one normal draw from the supplied stream; the deterministic kinds
/// leave it untouched.
inline double replacement_value(MaskKind kind, const MaskStats& stats, int c, int t, Rng& rng) {
    if (mask_needs_stats(kind) && !stats.fitted) {
        throw ConfigError(std::string("mask '") + mask_name(kind) +
                          "' requires fitted statistics");
    }
    switch (kind) {
        case MaskKind::Zeros: return 0.0;
        case MaskKind::StdNormal: return rng.next_normal();
        case MaskKind::LocalMean: return stats.mu(c, t);
        case MaskKind::LocalGaussian: return stats.mu(c, t) + stats.sigma(c, t) * rng.next_normal();
        case MaskKind::GlobalMean: return stats.global_mean;
        case MaskKind::GlobalGaussian: return stats.global_mean + stats.global_std * rng.next_normal();
    }
    throw ConfigError("unknown mask kind");
}

} // namespace tsxb
