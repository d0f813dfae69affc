#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tsxb/attrib.hpp"
#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"
#include "tsxb/masks.hpp"
#include "tsxb/models.hpp"
#include "tsxb/parallel.hpp"
#include "tsxb/rng.hpp"

namespace tsxb {

// ---------------------------------------------------------------------------
// Quantile schedule and perturbation primitives
// ---------------------------------------------------------------------------

struct QuantileSchedule {
    std::vector<double> k;

    static QuantileSchedule default_schedule() {
        return {{0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95, 1.0}};
    }
};

inline void validate_schedule(const QuantileSchedule& schedule) {
    if (schedule.k.empty()) throw ConfigError("quantile schedule is empty");
    double prev = 0.0;
    for (double k : schedule.k) {
        if (!(k > prev) || k > 1.0) {
            throw ConfigError("schedule thresholds must be strictly increasing in (0, 1]");
        }
        prev = k;
    }
}

namespace detail {

/// Positive-attribution coordinates sorted by descending value, ties by
/// ascending flat coordinate (channel index, then time index).
inline std::vector<int> positive_coords_sorted(std::span<const double> sal) {
    std::vector<int> coords;
    for (int j = 0; j < static_cast<int>(sal.size()); ++j) {
        if (sal[static_cast<std::size_t>(j)] > 0.0) coords.push_back(j);
    }
    std::stable_sort(coords.begin(), coords.end(), [&](int a, int b) {
        return sal[static_cast<std::size_t>(a)] > sal[static_cast<std::size_t>(b)];
    });
    return coords;
}

/// ceil(k * p) with a guard against representation noise (0.05 * 20 is a hair
/// above 1 in binary).
inline int top_count(double k, std::size_t p) {
    return static_cast<int>(std::ceil(k * static_cast<double>(p) - 1e-9));
}

inline void replace_coords(std::span<double> x, std::span<const int> coords, int l, MaskKind kind,
                           const MaskStats& stats, Rng& rng) {
    // draw order: ascending coordinate, independent of attribution rank
    thread_local std::vector<int> sorted;
    sorted.assign(coords.begin(), coords.end());
    std::sort(sorted.begin(), sorted.end());
    for (int coord : sorted) {
        x[static_cast<std::size_t>(coord)] = replacement_value(kind, stats, coord / l, coord % l, rng);
    }
}

} // namespace detail

/// Replaces the ceil(k * |P|) highest-attribution positive coordinates.
/// Returns the perturbed copy and the replaced fraction of the d*L grid.
inline std::pair<std::vector<double>, double> perturb_top(std::span<const double> x,
                                                          std::span<const double> sal, int l,
                                                          double k, MaskKind kind,
                                                          const MaskStats& stats, Rng& rng) {
    std::vector<double> out(x.begin(), x.end());
    const auto coords = detail::positive_coords_sorted(sal);
    const int m = detail::top_count(k, coords.size());
    detail::replace_coords(out, {coords.data(), static_cast<std::size_t>(m)}, l, kind, stats, rng);
    return {std::move(out), static_cast<double>(m) / static_cast<double>(x.size())};
}

/// Replaces the complement of the top set within the positive coordinates
/// (the |P| - ceil(k * |P|) lowest-attribution positive points).
inline std::pair<std::vector<double>, double> perturb_bottom(std::span<const double> x,
                                                             std::span<const double> sal, int l,
                                                             double k, MaskKind kind,
                                                             const MaskStats& stats, Rng& rng) {
    std::vector<double> out(x.begin(), x.end());
    const auto coords = detail::positive_coords_sorted(sal);
    const int m = detail::top_count(k, coords.size());
    const int count = static_cast<int>(coords.size()) - m;
    detail::replace_coords(out, {coords.data() + m, static_cast<std::size_t>(count)}, l, kind,
                           stats, rng);
    return {std::move(out), static_cast<double>(count) / static_cast<double>(x.size())};
}

// ---------------------------------------------------------------------------
// Perturbation curves and their integrals
// ---------------------------------------------------------------------------

struct CurveSample {
    double k = 0.0;
    double n_top = 0.0;    // mean replaced fraction, top perturbation
    double n_bottom = 0.0; // mean replaced fraction, bottom perturbation
    double s_top = 0.0;
    double s_bottom = 0.0;
    double accuracy = 0.0; // on the top-perturbed batch
};

struct PerturbationCurve {
    std::string method;
    MaskKind mask = MaskKind::Zeros;
    std::vector<CurveSample> samples; // one per k, ascending
    double clean_accuracy = 0.0;      // the implicit (n=0, s=0) origin
    int skipped_instances = 0;        // clean score <= epsilon
};

constexpr double kScoreEpsilon = 1e-6;

/// Sweeps the schedule over the test set for one (saliency, mask) pair.
/// S-bar averages skip instances whose clean score is <= 1e-6 (counted);
/// replaced fractions and accuracy average over all instances.
inline PerturbationCurve build_curve(const Classifier& model, const MtsDataset& ds,
                                     const Saliency& saliency, MaskKind mask,
                                     const MaskStats& stats, const QuantileSchedule& schedule,
                                     std::uint64_t seed,
                                     ScoreTarget target = ScoreTarget::PredictedClass,
                                     int threads = 1) {
    validate_schedule(schedule);
    if (!saliency.values.same_shape(ds.data)) {
        throw ValidationError("saliency shape does not match dataset");
    }
    if (!saliency.normalized) {
        throw ValidationError("build_curve expects a normalized saliency");
    }

    const int n = ds.n();
    Matrix clean_probs = model.predict_proba(ds.data);
    std::vector<double> clean_score(static_cast<std::size_t>(n));
    std::vector<int> tracked_class(static_cast<std::size_t>(n));
    int correct = 0;
    int skipped = 0;
    for (int i = 0; i < n; ++i) {
        const int cls = target == ScoreTarget::TrueClass
                            ? ds.labels[static_cast<std::size_t>(i)]
                            : argmax(clean_probs.row(i));
        tracked_class[static_cast<std::size_t>(i)] = cls;
        clean_score[static_cast<std::size_t>(i)] = clean_probs.at(i, cls);
        if (clean_score[static_cast<std::size_t>(i)] <= kScoreEpsilon) ++skipped;
        if (argmax(clean_probs.row(i)) == ds.labels[static_cast<std::size_t>(i)]) ++correct;
    }
    if (skipped == n) throw std::runtime_error("degenerate scores: every clean score <= 1e-6");

    PerturbationCurve curve;
    curve.method = saliency.method;
    curve.mask = mask;
    curve.clean_accuracy = static_cast<double>(correct) / n;
    curve.skipped_instances = skipped;
    curve.samples.resize(schedule.k.size());

    const auto mask_id = static_cast<std::uint64_t>(mask);
    Rng master(seed);
    for (std::size_t ki = 0; ki < schedule.k.size(); ++ki) {
        const double k = schedule.k[ki];
        std::vector<double> stop(static_cast<std::size_t>(n)), sbot(static_cast<std::size_t>(n));
        std::vector<double> ntop(static_cast<std::size_t>(n)), nbot(static_cast<std::size_t>(n));
        std::vector<std::uint8_t> top_correct(static_cast<std::size_t>(n));
        parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
            auto x = ds.data.instance(static_cast<int>(i));
            auto sal = saliency.values.instance(static_cast<int>(i));
            thread_local std::vector<double> probs;
            probs.resize(static_cast<std::size_t>(model.n_classes()));

            Rng rng_top = master.derive(mask_id, i, 2 * ki);
            auto [x_top, n_top] = perturb_top(x, sal, ds.l(), k, mask, stats, rng_top);
            model.predict_proba_one(x_top, probs);
            ntop[i] = n_top;
            top_correct[i] = argmax(probs) == ds.labels[i] ? 1 : 0;
            const double cls_prob = probs[static_cast<std::size_t>(tracked_class[i])];
            stop[i] = (clean_score[i] - cls_prob) / clean_score[i];

            Rng rng_bot = master.derive(mask_id, i, 2 * ki + 1);
            auto [x_bot, n_bot] = perturb_bottom(x, sal, ds.l(), k, mask, stats, rng_bot);
            model.predict_proba_one(x_bot, probs);
            nbot[i] = n_bot;
            sbot[i] = (clean_score[i] - probs[static_cast<std::size_t>(tracked_class[i])]) /
                      clean_score[i];
        });

        CurveSample& s = curve.samples[ki];
        s.k = k;
        int kept = 0;
        for (int i = 0; i < n; ++i) {
            s.n_top += ntop[static_cast<std::size_t>(i)];
            s.n_bottom += nbot[static_cast<std::size_t>(i)];
            s.accuracy += top_correct[static_cast<std::size_t>(i)];
            if (clean_score[static_cast<std::size_t>(i)] > kScoreEpsilon) {
                s.s_top += stop[static_cast<std::size_t>(i)];
                s.s_bottom += sbot[static_cast<std::size_t>(i)];
                ++kept;
            }
        }
        s.n_top /= n;
        s.n_bottom /= n;
        s.accuracy /= n;
        s.s_top /= kept;
        s.s_bottom /= kept;
    }
    return curve;
}

enum class AucMode { ExtendToOne, NormalizeToMaxN };

namespace detail {

inline double trapezoid_auc(std::vector<std::pair<double, double>> pts, AucMode mode,
                            bool clip_sbar) {
    if (clip_sbar) {
        for (auto& [x, y] : pts) y = std::max(0.0, y);
    }
    double auc = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        auc += 0.5 * (pts[i].second + pts[i - 1].second) * (pts[i].first - pts[i - 1].first);
    }
    const double max_n = pts.back().first;
    if (mode == AucMode::ExtendToOne) {
        if (max_n < 1.0) auc += pts.back().second * (1.0 - max_n);
        return auc;
    }
    return max_n > 0.0 ? auc / max_n : 0.0;
}

} // namespace detail

/// Integral of s_top over the replaced fraction: origin (0,0) prepended, then
/// extended horizontally to n=1 (or normalized by the max fraction reached).
inline double auc_top(const PerturbationCurve& curve, AucMode mode = AucMode::ExtendToOne,
                      bool clip_sbar = false) {
    if (curve.samples.empty()) throw ValidationError("empty perturbation curve");
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (const auto& s : curve.samples) pts.emplace_back(s.n_top, s.s_top);
    return detail::trapezoid_auc(std::move(pts), mode, clip_sbar);
}

/// Same integral for the bottom perturbation, whose replaced fraction grows
/// as k decreases.
inline double auc_bottom(const PerturbationCurve& curve, AucMode mode = AucMode::ExtendToOne,
                         bool clip_sbar = false) {
    if (curve.samples.empty()) throw ValidationError("empty perturbation curve");
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (auto it = curve.samples.rbegin(); it != curve.samples.rend(); ++it) {
        pts.emplace_back(it->n_bottom, it->s_bottom);
    }
    return detail::trapezoid_auc(std::move(pts), mode, clip_sbar);
}

/// Harmonic mean of auc_top and (1 - auc_bottom), both clipped to [0,1].
inline double f1s(double auc_top_value, double auc_bottom_value) {
    const double a = std::clamp(auc_top_value, 0.0, 1.0);
    const double b = 1.0 - std::clamp(auc_bottom_value, 0.0, 1.0);
    if (a + b <= 0.0) return 0.0;
    return 2.0 * a * b / (a + b);
}

// ---------------------------------------------------------------------------
// Ground-truth assessment
// ---------------------------------------------------------------------------

struct GtScore {
    double ap = 0.0;
    double roc_auc = 0.0;
    int skipped_instances = 0;
};

namespace detail {

/// Average precision over distinct score thresholds (step-wise PR-AUC).
inline double average_precision(std::span<const double> scores,
                                std::span<const std::uint8_t> labels, int n_positive) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });
    double ap = 0.0;
    int tp = 0, seen = 0, prev_tp = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        tp += labels[static_cast<std::size_t>(order[i])];
        ++seen;
        const bool boundary = i + 1 == order.size() ||
                              scores[static_cast<std::size_t>(order[i + 1])] !=
                                  scores[static_cast<std::size_t>(order[i])];
        if (boundary && tp > prev_tp) {
            const double precision = static_cast<double>(tp) / seen;
            ap += precision * (tp - prev_tp) / static_cast<double>(n_positive);
            prev_tp = tp;
        }
    }
    return ap;
}

/// Rank-based ROC-AUC with midranks for ties.
inline double roc_auc_rank(std::span<const double> scores, std::span<const std::uint8_t> labels,
                           int n_positive) {
    const std::size_t n = scores.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
    });
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[static_cast<std::size_t>(order[j + 1])] ==
                                scores[static_cast<std::size_t>(order[i])]) {
            ++j;
        }
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0; // ranks are 1-based
        for (std::size_t t = i; t <= j; ++t) {
            if (labels[static_cast<std::size_t>(order[t])]) pos_rank_sum += midrank;
        }
        i = j + 1;
    }
    const double p = n_positive;
    const double m = static_cast<double>(n) - p;
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * m);
}

} // namespace detail

/// Treats each instance's attribution values as scores against the binary
/// ground truth over all d*L coordinates; returns instance means. Instances
/// whose mask is all-0 or all-1 are skipped and counted.
inline GtScore gt_metrics(const Saliency& saliency, const GroundTruthMask& gt) {
    if (saliency.values.n != gt.n || saliency.values.d != gt.d || saliency.values.l != gt.l) {
        throw ValidationError("saliency and ground-truth shapes differ");
    }
    if (!saliency.normalized) throw ValidationError("gt_metrics expects a normalized saliency");
    GtScore out;
    int used = 0;
    for (int i = 0; i < gt.n; ++i) {
        auto labels = gt.instance(i);
        int n_positive = 0;
        for (auto b : labels) n_positive += b;
        if (n_positive == 0 || n_positive == static_cast<int>(labels.size())) {
            ++out.skipped_instances;
            continue;
        }
        auto scores = saliency.values.instance(i);
        out.ap += detail::average_precision(scores, labels, n_positive);
        out.roc_auc += detail::roc_auc_rank(scores, labels, n_positive);
        ++used;
    }
    if (used == 0) throw ValidationError("every ground-truth instance is degenerate");
    out.ap /= used;
    out.roc_auc /= used;
    return out;
}

// ---------------------------------------------------------------------------
// Mask filtering and aggregation
// ---------------------------------------------------------------------------

struct MaskScore {
    double auc_top = 0.0;
    double auc_bottom = 0.0;
    double f1s = 0.0;
};

struct MaskFilterEntry {
    MaskKind mask = MaskKind::Zeros;
    double best_auc_top = 0.0;
    double random_auc_top = 0.0;
    bool kept = false;
};

struct MaskFilterReport {
    std::vector<MaskFilterEntry> entries;
    double margin = 0.15;
    bool flat_rank = false; // every mask discarded

    std::set<MaskKind> kept() const {
        std::set<MaskKind> out;
        for (const auto& e : entries) {
            if (e.kept) out.insert(e.mask);
        }
        return out;
    }
};

/// A mask is kept when the best method beats the random baseline's auc_top
/// under that mask by the relative margin (default 15%).
inline MaskFilterReport filter_masks(
    const std::map<std::string, std::map<MaskKind, MaskScore>>& method_scores,
    const std::map<MaskKind, MaskScore>& random_scores, double margin = 0.15) {
    MaskFilterReport report;
    report.margin = margin;
    for (const auto& [mask, random_score] : random_scores) {
        MaskFilterEntry entry;
        entry.mask = mask;
        entry.random_auc_top = random_score.auc_top;
        bool any = false;
        for (const auto& [method, scores] : method_scores) {
            auto it = scores.find(mask);
            if (it == scores.end()) continue;
            if (!any || it->second.auc_top > entry.best_auc_top) {
                entry.best_auc_top = it->second.auc_top;
            }
            any = true;
        }
        if (!any) throw ConfigError("no method scores for mask " + std::string(mask_name(mask)));
        entry.kept = entry.best_auc_top >= (1.0 + margin) * entry.random_auc_top;
        report.entries.push_back(entry);
    }
    report.flat_rank = report.kept().empty();
    return report;
}

struct ItScore {
    double auc_top = 0.0;
    double auc_bottom = 0.0;
    double f1s = 0.0;
    double auc_top_stddev = 0.0; // spread across kept masks
    std::map<MaskKind, MaskScore> per_mask;
    std::set<MaskKind> kept_masks;
};

/// Arithmetic mean of the per-mask scores over the kept set.
inline ItScore aggregate(const std::map<MaskKind, MaskScore>& per_mask,
                         const std::set<MaskKind>& kept) {
    if (kept.empty()) throw std::runtime_error("flat rank: no masks kept, aggregate undefined");
    ItScore out;
    out.per_mask = per_mask;
    out.kept_masks = kept;
    for (MaskKind mask : kept) {
        const MaskScore& s = per_mask.at(mask);
        out.auc_top += s.auc_top;
        out.auc_bottom += s.auc_bottom;
        out.f1s += s.f1s;
    }
    const double n = static_cast<double>(kept.size());
    out.auc_top /= n;
    out.auc_bottom /= n;
    out.f1s /= n;
    double sq = 0.0;
    for (MaskKind mask : kept) {
        const double dev = per_mask.at(mask).auc_top - out.auc_top;
        sq += dev * dev;
    }
    out.auc_top_stddev = std::sqrt(sq / n);
    return out;
}

} // namespace tsxb
