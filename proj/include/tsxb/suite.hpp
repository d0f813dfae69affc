#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsxb/attrib.hpp"
#include "tsxb/eval.hpp"

namespace tsxb {

struct EvalOptions {
    double margin = 0.15;
    std::uint64_t seed = 0;
    int threads = 1;
    MaskKind attribution_baseline = MaskKind::Zeros;
    int n_permutations = 25;
    int n_samples = 0; // kernel_shap; 0 -> 2G + 2048
    ScoreTarget target = ScoreTarget::PredictedClass;
    AucMode auc_mode = AucMode::ExtendToOne;
    bool clip_sbar = false;
    bool per_method_filter = false; // each method keeps its own mask set
};

inline std::string chunk_label(const ChunkSpec& spec, int l) {
    if (spec.grouping == Grouping::ChannelWise && spec.n_chunks == l) return "pw";
    return (spec.grouping == Grouping::ChannelWise ? "cw" : "cc") + std::to_string(spec.n_chunks);
}

struct SuiteRow {
    std::string method;
    std::string chunk; // label: pw / cw<n> / cc<n>
    std::map<MaskKind, MaskScore> per_mask;
    std::vector<PerturbationCurve> curves; // one per evaluated mask
    std::optional<ItScore> aggregate;      // absent on flat rank
    std::optional<GtScore> gt;
    double runtime_s = 0.0; // attribution wall time
};

struct ChunkFilter {
    std::string chunk;
    MaskFilterReport filter;
};

struct SuiteReport {
    std::vector<SuiteRow> rows;       // one per (method, chunk spec)
    std::vector<ChunkFilter> filters; // one per chunk spec
    std::vector<std::string> mask_names;
    double clean_accuracy = 0.0;
    int n_instances = 0;
    double margin = 0.15;
    std::uint64_t seed = 0;
    std::string auc_mode = "extend";
    bool clip_sbar = false;
    bool flat_rank = false; // any chunk spec ended with an empty kept set

    const SuiteRow* find(const std::string& method, const std::string& chunk) const {
        for (const auto& row : rows) {
            if (row.method == method && row.chunk == chunk) return &row;
        }
        return nullptr;
    }
};

/// Full evaluation protocol: one saliency per (method, chunk spec), curves
/// under every mask, per-chunk mask filtering against the random baseline,
/// aggregation over kept masks, plus ground-truth scores when available.
/// The random baseline is appended to the method list if missing. Mask
/// statistics are fitted on the evaluated set unless stats_override points at
/// a fit from elsewhere (e.g. the training split).
inline SuiteReport evaluate_suite(const Classifier& model, const MtsDataset& ds,
                                  const GroundTruthMask* gt,
                                  std::vector<AttributionMethod> methods,
                                  const std::vector<MaskKind>& masks,
                                  const std::vector<ChunkSpec>& chunk_specs,
                                  const QuantileSchedule& schedule, const EvalOptions& opt,
                                  const MaskStats* stats_override = nullptr) {
    validate_schedule(schedule);
    if (masks.empty()) throw ConfigError("mask list is empty");
    if (chunk_specs.empty()) throw ConfigError("chunk spec list is empty");
    if (std::find(methods.begin(), methods.end(), AttributionMethod::Random) == methods.end()) {
        methods.push_back(AttributionMethod::Random);
    }

    bool need_stats = false;
    for (MaskKind mask : masks) need_stats |= mask_needs_stats(mask);
    need_stats |= mask_needs_stats(opt.attribution_baseline);
    MaskStats stats;
    if (stats_override != nullptr) {
        if (stats_override->d != ds.d() || stats_override->l != ds.l()) {
            throw ValidationError("mask statistics shape does not match the evaluated dataset");
        }
        stats = *stats_override;
    } else if (need_stats) {
        stats = fit_stats(ds);
    }

    SuiteReport report;
    report.margin = opt.margin;
    report.seed = opt.seed;
    report.n_instances = ds.n();
    report.auc_mode = opt.auc_mode == AucMode::ExtendToOne ? "extend" : "normalize";
    report.clip_sbar = opt.clip_sbar;
    for (MaskKind mask : masks) report.mask_names.emplace_back(mask_name(mask));

    Rng master(opt.seed);
    for (std::size_t si = 0; si < chunk_specs.size(); ++si) {
        const ChunkSpec& spec = chunk_specs[si];
        const FeatureGrouping grouping = make_grouping(ds.d(), ds.l(), spec);
        const std::string label = chunk_label(spec, ds.l());

        std::map<std::string, std::map<MaskKind, MaskScore>> scores_by_method;
        std::vector<SuiteRow> chunk_rows;
        for (AttributionMethod method : methods) {
            SuiteRow row;
            row.method = method_name(method);
            row.chunk = label;

            AttributionConfig acfg;
            acfg.method = method;
            acfg.baseline = opt.attribution_baseline;
            acfg.n_permutations = opt.n_permutations;
            acfg.n_samples = opt.n_samples;
            acfg.seed = master.derive(static_cast<std::uint64_t>(method), si).seed();
            acfg.target = opt.target;
            acfg.threads = opt.threads;

            const auto t0 = std::chrono::steady_clock::now();
            Saliency saliency = attribute_dataset(model, ds, grouping, acfg, stats);
            const auto t1 = std::chrono::steady_clock::now();
            row.runtime_s = std::chrono::duration<double>(t1 - t0).count();

            Saliency normalized = normalize_saliency(saliency);
            if (gt != nullptr) row.gt = gt_metrics(normalized, *gt);

            for (MaskKind mask : masks) {
                const std::uint64_t curve_seed =
                    master.derive(static_cast<std::uint64_t>(method), si, 0x63757276ULL).seed();
                PerturbationCurve curve = build_curve(model, ds, normalized, mask, stats, schedule,
                                                      curve_seed, opt.target, opt.threads);
                MaskScore score;
                score.auc_top = auc_top(curve, opt.auc_mode, opt.clip_sbar);
                score.auc_bottom = auc_bottom(curve, opt.auc_mode, opt.clip_sbar);
                score.f1s = f1s(score.auc_top, score.auc_bottom);
                row.per_mask[mask] = score;
                row.curves.push_back(std::move(curve));
                report.clean_accuracy = row.curves.back().clean_accuracy;
            }
            scores_by_method[row.method] = row.per_mask;
            chunk_rows.push_back(std::move(row));
        }

        const auto& random_scores = scores_by_method.at(method_name(AttributionMethod::Random));
        std::map<std::string, std::map<MaskKind, MaskScore>> non_random = scores_by_method;
        non_random.erase(method_name(AttributionMethod::Random));
        MaskFilterReport filter = filter_masks(non_random, random_scores, opt.margin);
        report.filters.push_back({label, filter});
        if (filter.flat_rank) report.flat_rank = true;

        for (auto& row : chunk_rows) {
            std::set<MaskKind> kept;
            if (opt.per_method_filter && row.method != method_name(AttributionMethod::Random)) {
                for (const auto& [mask, score] : row.per_mask) {
                    if (score.auc_top >= (1.0 + opt.margin) * random_scores.at(mask).auc_top) {
                        kept.insert(mask);
                    }
                }
            } else {
                kept = filter.kept();
            }
            if (!kept.empty()) row.aggregate = aggregate(row.per_mask, kept);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

} // namespace tsxb
