#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tsxb/common.hpp"
#include "tsxb/tensor.hpp"

namespace tsxb {

enum class Split { Train, Test };

inline const char* split_name(Split s) { return s == Split::Train ? "train" : "test"; }

/// Fixed-shape multivariate time series dataset: N instances of d channels
/// by L time points, with integer class labels in [0, n_classes).
struct MtsDataset {
    Tensor3 data;
    std::vector<std::int32_t> labels;
    int n_classes = 0;
    std::string name;
    Split split = Split::Train;

    int n() const { return data.n; }
    int d() const { return data.d; }
    int l() const { return data.l; }
};

/// Per-instance attribution matrices W, same shape as the dataset explained.
/// `normalized` means every instance is max(0,W)/max already.
struct Saliency {
    Tensor3 values;
    std::string method;
    bool normalized = false;
};

/// Binary matrix marking the truly discriminative coordinates (the ideal
/// saliency map for synthetic data).
struct GroundTruthMask {
    int n = 0;
    int d = 0;
    int l = 0;
    std::vector<std::uint8_t> values;

    GroundTruthMask() = default;
    GroundTruthMask(int n_, int d_, int l_)
        : n(n_), d(d_), l(l_),
          values(static_cast<std::size_t>(n_) * static_cast<std::size_t>(d_) * static_cast<std::size_t>(l_),
                 0) {}

    std::uint8_t& at(int i, int c, int t) {
        return values[(static_cast<std::size_t>(i) * d + c) * l + t];
    }
    std::uint8_t at(int i, int c, int t) const {
        return values[(static_cast<std::size_t>(i) * d + c) * l + t];
    }
    std::size_t instance_size() const {
        return static_cast<std::size_t>(d) * static_cast<std::size_t>(l);
    }
    std::span<const std::uint8_t> instance(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * instance_size(), instance_size()};
    }
};

/// Report-only invariant check; returns one message per violation.
inline std::vector<std::string> validate(const MtsDataset& ds) {
    std::vector<std::string> report;
    if (ds.data.n < 1 || ds.data.d < 1 || ds.data.l < 1) {
        report.push_back("empty dataset: requires N >= 1, d >= 1, L >= 1, got N=" +
                         std::to_string(ds.data.n) + " d=" + std::to_string(ds.data.d) +
                         " L=" + std::to_string(ds.data.l));
    }
    if (ds.data.v.size() != static_cast<std::size_t>(ds.data.n) * ds.data.instance_size()) {
        report.push_back("data storage size does not match N*d*L");
    }
    if (ds.labels.size() != static_cast<std::size_t>(ds.data.n)) {
        report.push_back("label count " + std::to_string(ds.labels.size()) +
                         " does not match N=" + std::to_string(ds.data.n));
    }
    if (ds.n_classes < 1) report.push_back("n_classes must be >= 1");
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        if (ds.labels[i] < 0 || ds.labels[i] >= ds.n_classes) {
            report.push_back("label " + std::to_string(ds.labels[i]) + " at instance " +
                             std::to_string(i) + " outside [0, " + std::to_string(ds.n_classes) + ")");
        }
    }
    for (int i = 0; i < ds.data.n; ++i) {
        for (int c = 0; c < ds.data.d; ++c) {
            for (int t = 0; t < ds.data.l; ++t) {
                if (!std::isfinite(ds.data.at(i, c, t))) {
                    report.push_back("non-finite value at (instance=" + std::to_string(i) +
                                     ", channel=" + std::to_string(c) + ", time=" + std::to_string(t) + ")");
                }
            }
        }
    }
    return report;
}

/// Per-instance rescaling to [0,1]: clip negatives, divide by the instance
/// maximum. Instances with no positive attribution become all-zero. Idempotent.
inline Saliency normalize_saliency(const Saliency& s) {
    Saliency out;
    out.values = Tensor3(s.values.n, s.values.d, s.values.l);
    out.method = s.method;
    out.normalized = true;
    for (int i = 0; i < s.values.n; ++i) {
        auto src = s.values.instance(i);
        auto dst = out.values.instance(i);
        double max_pos = 0.0;
        for (std::size_t j = 0; j < src.size(); ++j) {
            if (!std::isfinite(src[j])) {
                throw ValidationError("saliency contains non-finite value in instance " +
                                      std::to_string(i));
            }
            max_pos = std::max(max_pos, src[j]);
        }
        if (max_pos <= 0.0) continue; // all-nonpositive: stays all-zero
        for (std::size_t j = 0; j < src.size(); ++j) {
            dst[j] = std::max(0.0, src[j]) / max_pos;
        }
    }
    return out;
}

/// First `count` instances (shapes and labels preserved).
inline MtsDataset slice_dataset(const MtsDataset& ds, int count) {
    if (count < 1 || count > ds.n()) {
        throw ConfigError("slice count " + std::to_string(count) + " outside [1, " +
                          std::to_string(ds.n()) + "]");
    }
    MtsDataset out;
    out.data = Tensor3(count, ds.d(), ds.l());
    std::copy_n(ds.data.v.begin(), out.data.v.size(), out.data.v.begin());
    out.labels.assign(ds.labels.begin(), ds.labels.begin() + count);
    out.n_classes = ds.n_classes;
    out.name = ds.name;
    out.split = ds.split;
    return out;
}

inline GroundTruthMask slice_mask(const GroundTruthMask& gt, int count) {
    GroundTruthMask out(count, gt.d, gt.l);
    std::copy_n(gt.values.begin(), out.values.size(), out.values.begin());
    return out;
}

} // namespace tsxb
