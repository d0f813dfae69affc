#pragma once

// Independent brute-force oracles for the rank metrics and Shapley values.
// These deliberately avoid the library's computation paths.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace tsxb::testing {

/// ROC-AUC by O(n^2) pair counting, ties worth half.
inline double brute_force_roc_auc(std::span<const double> scores,
                                  std::span<const std::uint8_t> labels) {
    double wins = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        ++n_pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            if (scores[i] > scores[j]) {
                wins += 1.0;
            } else if (scores[i] == scores[j]) {
                wins += 0.5;
            }
        }
    }
    for (std::size_t j = 0; j < scores.size(); ++j) n_neg += labels[j] ? 0 : 1;
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Average precision by recomputing precision/recall at every distinct
/// threshold from scratch.
inline double brute_force_average_precision(std::span<const double> scores,
                                            std::span<const std::uint8_t> labels) {
    std::vector<double> thresholds(scores.begin(), scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    int total_pos = 0;
    for (auto b : labels) total_pos += b;

    double ap = 0.0;
    double prev_recall = 0.0;
    for (double thr : thresholds) {
        int tp = 0, predicted = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= thr) {
                ++predicted;
                tp += labels[i];
            }
        }
        const double recall = static_cast<double>(tp) / total_pos;
        const double precision = static_cast<double>(tp) / predicted;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

/// Shapley values by direct enumeration of all orderings, averaging each
/// group's marginal contribution (the textbook definition).
template <typename ValueFn>
std::vector<double> brute_force_shapley(int n_groups, ValueFn&& value_of_set) {
    std::vector<int> order(static_cast<std::size_t>(n_groups));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(static_cast<std::size_t>(n_groups), 0.0);
    std::size_t count = 0;
    do {
        std::vector<int> coalition;
        double prev = value_of_set(coalition);
        for (int g : order) {
            coalition.push_back(g);
            const double cur = value_of_set(coalition);
            phi[static_cast<std::size_t>(g)] += cur - prev;
            prev = cur;
        }
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& p : phi) p /= static_cast<double>(count);
    return phi;
}

} // namespace tsxb::testing
