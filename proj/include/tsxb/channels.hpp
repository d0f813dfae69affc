#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"
#include "tsxb/models.hpp"

namespace tsxb {

/// Per-channel importance: mean normalized attribution over instances and time.
struct ChannelImportance {
    std::vector<double> r;
    std::string method;
    std::string dataset;
};

inline ChannelImportance channel_importance(const Saliency& saliency, const MtsDataset& ds,
                                            bool allow_raw = false) {
    if (!saliency.values.same_shape(ds.data)) {
        throw ValidationError("saliency shape does not match dataset");
    }
    if (!saliency.normalized && !allow_raw) {
        throw ValidationError("channel_importance expects a normalized saliency");
    }
    ChannelImportance out;
    out.method = saliency.method;
    out.dataset = ds.name;
    out.r.assign(static_cast<std::size_t>(ds.d()), 0.0);
    for (int i = 0; i < ds.n(); ++i) {
        for (int c = 0; c < ds.d(); ++c) {
            double sum = 0.0;
            for (int t = 0; t < ds.l(); ++t) sum += saliency.values.at(i, c, t);
            out.r[static_cast<std::size_t>(c)] += sum;
        }
    }
    const double scale = static_cast<double>(ds.n()) * ds.l();
    for (auto& v : out.r) v /= scale;
    return out;
}

/// Channel indices by descending importance, ties by ascending index.
inline std::vector<int> rank_channels(std::span<const double> r) {
    std::vector<int> order(r.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return r[static_cast<std::size_t>(a)] > r[static_cast<std::size_t>(b)];
    });
    return order;
}

inline std::vector<int> select_top(std::span<const double> r, int k) {
    if (k < 1 || k > static_cast<int>(r.size())) {
        throw ConfigError("selection size " + std::to_string(k) + " outside [1, " +
                          std::to_string(r.size()) + "]");
    }
    auto ranking = rank_channels(r);
    ranking.resize(static_cast<std::size_t>(k));
    return ranking;
}

/// New dataset restricted to the given channels, order preserved as given.
inline MtsDataset subset_dataset(const MtsDataset& ds, std::span<const int> channels) {
    if (channels.empty()) throw ConfigError("channel subset is empty");
    std::vector<bool> seen(static_cast<std::size_t>(ds.d()), false);
    for (int c : channels) {
        if (c < 0 || c >= ds.d()) {
            throw ConfigError("channel index " + std::to_string(c) + " outside [0, " +
                              std::to_string(ds.d()) + ")");
        }
        if (seen[static_cast<std::size_t>(c)]) {
            throw ConfigError("duplicate channel index " + std::to_string(c));
        }
        seen[static_cast<std::size_t>(c)] = true;
    }
    MtsDataset out;
    out.data = Tensor3(ds.n(), static_cast<int>(channels.size()), ds.l());
    out.labels = ds.labels;
    out.n_classes = ds.n_classes;
    out.name = ds.name;
    out.split = ds.split;
    for (int i = 0; i < ds.n(); ++i) {
        auto src_row = ds.data.instance(i);
        auto dst_row = out.data.instance(i);
        for (std::size_t ci = 0; ci < channels.size(); ++ci) {
            std::copy_n(src_row.data() + static_cast<std::size_t>(channels[ci]) * ds.l(), ds.l(),
                        dst_row.data() + ci * static_cast<std::size_t>(ds.l()));
        }
    }
    return out;
}

using TrainerFn = std::function<std::unique_ptr<Classifier>(const MtsDataset&)>;

struct SelectionEntry {
    int k = 0;
    std::vector<int> channels;
    double accuracy = 0.0;
};

struct SelectionReport {
    std::vector<int> ranking;
    double baseline_accuracy = 0.0; // all channels
    std::vector<SelectionEntry> entries;
};

/// Retrains on top-k channel subsets and measures test accuracy for each k.
inline SelectionReport selection_study(const MtsDataset& train, const MtsDataset& test,
                                       std::span<const double> r, std::span<const int> ks,
                                       const TrainerFn& trainer) {
    if (static_cast<int>(r.size()) != train.d() || train.d() != test.d()) {
        throw ValidationError("importance vector length does not match dataset channels");
    }
    SelectionReport report;
    report.ranking = rank_channels(r);
    {
        auto model = trainer(train);
        report.baseline_accuracy = accuracy(*model, test);
    }
    for (int k : ks) {
        SelectionEntry entry;
        entry.k = k;
        entry.channels = select_top(r, k);
        auto sub_train = subset_dataset(train, entry.channels);
        auto sub_test = subset_dataset(test, entry.channels);
        auto model = trainer(sub_train);
        entry.accuracy = accuracy(*model, sub_test);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace tsxb
