#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"
#include "tsxb/masks.hpp"
#include "tsxb/models.hpp"
#include "tsxb/parallel.hpp"
#include "tsxb/rng.hpp"

namespace tsxb {

// ---------------------------------------------------------------------------
// Feature groupings (chunking)
// ---------------------------------------------------------------------------

enum class Grouping { ChannelWise, CrossChannel };

/// n_chunks equal-sized chunks per channel (ChannelWise) or spanning all
/// channels (CrossChannel). n_chunks == L with ChannelWise is point-wise.
struct ChunkSpec {
    int n_chunks = 1;
    Grouping grouping = Grouping::ChannelWise;
};

/// Partition of the d x L coordinate grid into attribution groups. Groups
/// hold flat coordinate indices (channel * L + time).
struct FeatureGrouping {
    int d = 0;
    int l = 0;
    std::vector<std::vector<int>> groups;

    int n_groups() const { return static_cast<int>(groups.size()); }
};

namespace detail {

/// Chunk boundaries over [0, l): the first (l mod n) chunks get the extra point.
inline std::vector<std::pair<int, int>> chunk_intervals(int l, int n) {
    std::vector<std::pair<int, int>> spans;
    spans.reserve(static_cast<std::size_t>(n));
    const int base = l / n;
    const int extra = l % n;
    int start = 0;
    for (int i = 0; i < n; ++i) {
        const int len = base + (i < extra ? 1 : 0);
        spans.emplace_back(start, start + len);
        start += len;
    }
    return spans;
}

} // namespace detail

inline FeatureGrouping make_grouping(int d, int l, const ChunkSpec& spec) {
    if (spec.n_chunks < 1) throw ConfigError("n_chunks must be >= 1");
    if (spec.n_chunks > l) {
        throw ConfigError("n_chunks " + std::to_string(spec.n_chunks) + " exceeds series length " +
                          std::to_string(l));
    }
    FeatureGrouping g;
    g.d = d;
    g.l = l;
    const auto spans = detail::chunk_intervals(l, spec.n_chunks);
    if (spec.grouping == Grouping::ChannelWise) {
        g.groups.reserve(static_cast<std::size_t>(d) * spans.size());
        for (int c = 0; c < d; ++c) {
            for (const auto& [lo, hi] : spans) {
                std::vector<int> coords;
                coords.reserve(static_cast<std::size_t>(hi - lo));
                for (int t = lo; t < hi; ++t) coords.push_back(c * l + t);
                g.groups.push_back(std::move(coords));
            }
        }
    } else {
        g.groups.reserve(spans.size());
        for (const auto& [lo, hi] : spans) {
            std::vector<int> coords;
            coords.reserve(static_cast<std::size_t>(d) * (hi - lo));
            for (int c = 0; c < d; ++c) {
                for (int t = lo; t < hi; ++t) coords.push_back(c * l + t);
            }
            g.groups.push_back(std::move(coords));
        }
    }
    return g;
}

/// Every coordinate its own group (no chunking).
inline FeatureGrouping pointwise_grouping(int d, int l) {
    return make_grouping(d, l, ChunkSpec{l, Grouping::ChannelWise});
}

/// Per-coordinate replacement values, drawn once so every coalition of one
/// attribution run shares the same baseline.
inline std::vector<double> make_baseline(int d, int l, MaskKind kind, const MaskStats& stats,
                                         Rng& rng) {
    std::vector<double> base(static_cast<std::size_t>(d) * l);
    for (int c = 0; c < d; ++c) {
        for (int t = 0; t < l; ++t) {
            base[static_cast<std::size_t>(c) * l + t] = replacement_value(kind, stats, c, t, rng);
        }
    }
    return base;
}

inline void expand_group_values(const FeatureGrouping& grouping, std::span<const double> values,
                                std::span<double> out) {
    for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
        for (int coord : grouping.groups[g]) out[static_cast<std::size_t>(coord)] = values[g];
    }
}

/// Single-instance saliency with each coordinate carrying its group's value.
inline Saliency expand_to_saliency(std::span<const double> values, const FeatureGrouping& grouping,
                                   const std::string& method = "") {
    if (static_cast<int>(values.size()) != grouping.n_groups()) {
        throw ValidationError("group value count does not match grouping");
    }
    Saliency s;
    s.values = Tensor3(1, grouping.d, grouping.l);
    s.method = method;
    expand_group_values(grouping, values, s.values.instance(0));
    return s;
}

// ---------------------------------------------------------------------------
// Attribution methods (single instance, per-group outputs)
// ---------------------------------------------------------------------------

/// attribution(g) = S(x) - S(x with group g at baseline).
inline std::vector<double> feature_ablation(const ScoreFn& score, std::span<const double> x,
                                            const FeatureGrouping& grouping,
                                            std::span<const double> baseline) {
    std::vector<double> work(x.begin(), x.end());
    const double s_clean = score(x);
    std::vector<double> attr(grouping.groups.size());
    for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
        for (int coord : grouping.groups[g]) work[static_cast<std::size_t>(coord)] = baseline[static_cast<std::size_t>(coord)];
        attr[g] = s_clean - score(work);
        for (int coord : grouping.groups[g]) work[static_cast<std::size_t>(coord)] = x[static_cast<std::size_t>(coord)];
    }
    return attr;
}

namespace detail {

/// One pass along a group ordering: start all-baseline, restore groups in
/// order, accumulate marginal score gains.
inline void shapley_walk(const ScoreFn& score, std::span<const double> x,
                         const FeatureGrouping& grouping, std::span<const double> baseline,
                         std::span<const int> order, double v_empty, std::vector<double>& work,
                         std::span<double> attr_accum) {
    work.assign(baseline.begin(), baseline.end());
    double prev = v_empty;
    for (int g : order) {
        for (int coord : grouping.groups[static_cast<std::size_t>(g)]) {
            work[static_cast<std::size_t>(coord)] = x[static_cast<std::size_t>(coord)];
        }
        const double cur = score(work);
        attr_accum[static_cast<std::size_t>(g)] += cur - prev;
        prev = cur;
    }
}

} // namespace detail

/// Unbiased Shapley estimate: average marginal contributions over sampled
/// group orderings of the game v(S) = S(x with the complement at baseline).
inline std::vector<double> shapley_sampling(const ScoreFn& score, std::span<const double> x,
                                            const FeatureGrouping& grouping,
                                            std::span<const double> baseline, int n_permutations,
                                            Rng& rng) {
    if (n_permutations < 1) throw ConfigError("n_permutations must be >= 1");
    const int n_groups = grouping.n_groups();
    std::vector<double> attr(static_cast<std::size_t>(n_groups), 0.0);
    std::vector<int> order(static_cast<std::size_t>(n_groups));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> work;
    const double v_empty = score(baseline);
    for (int p = 0; p < n_permutations; ++p) {
        rng.shuffle(std::span<int>(order));
        detail::shapley_walk(score, x, grouping, baseline, order, v_empty, work, attr);
    }
    for (auto& a : attr) a /= n_permutations;
    return attr;
}

/// Exact Shapley values via the full G! ordering enumeration (testing aid).
inline std::vector<double> shapley_sampling_exhaustive(const ScoreFn& score,
                                                       std::span<const double> x,
                                                       const FeatureGrouping& grouping,
                                                       std::span<const double> baseline) {
    const int n_groups = grouping.n_groups();
    if (n_groups > 8) {
        throw ConfigError("permutation enumeration limited to 8 groups, got " +
                          std::to_string(n_groups));
    }
    std::vector<double> attr(static_cast<std::size_t>(n_groups), 0.0);
    std::vector<int> order(static_cast<std::size_t>(n_groups));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> work;
    const double v_empty = score(baseline);
    std::size_t count = 0;
    do {
        detail::shapley_walk(score, x, grouping, baseline, order, v_empty, work, attr);
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& a : attr) a /= static_cast<double>(count);
    return attr;
}

/// Exact Shapley values by coalition enumeration (2^G model evaluations).
inline std::vector<double> exact_shapley(const ScoreFn& score, std::span<const double> x,
                                         const FeatureGrouping& grouping,
                                         std::span<const double> baseline) {
    const int n_groups = grouping.n_groups();
    if (n_groups > 20) {
        throw ConfigError("exact Shapley enumeration limited to 20 groups, got " +
                          std::to_string(n_groups));
    }
    const std::size_t n_coalitions = std::size_t{1} << n_groups;
    std::vector<double> v(n_coalitions);
    std::vector<double> work(x.size());
    for (std::size_t m = 0; m < n_coalitions; ++m) {
        work.assign(baseline.begin(), baseline.end());
        for (int g = 0; g < n_groups; ++g) {
            if (m & (std::size_t{1} << g)) {
                for (int coord : grouping.groups[static_cast<std::size_t>(g)]) {
                    work[static_cast<std::size_t>(coord)] = x[static_cast<std::size_t>(coord)];
                }
            }
        }
        v[m] = score(work);
    }

    // weight for |S| = s: 1 / (G * C(G-1, s))
    std::vector<double> weight(static_cast<std::size_t>(n_groups), 0.0);
    double binom = 1.0; // C(G-1, s)
    for (int s = 0; s < n_groups; ++s) {
        weight[static_cast<std::size_t>(s)] = 1.0 / (n_groups * binom);
        binom = binom * (n_groups - 1 - s) / (s + 1);
    }

    std::vector<double> attr(static_cast<std::size_t>(n_groups), 0.0);
    for (std::size_t m = 0; m < n_coalitions; ++m) {
        const int size = std::popcount(m);
        for (int g = 0; g < n_groups; ++g) {
            const std::size_t bit = std::size_t{1} << g;
            if (m & bit) continue;
            attr[static_cast<std::size_t>(g)] += weight[static_cast<std::size_t>(size)] * (v[m | bit] - v[m]);
        }
    }
    return attr;
}

// ---------------------------------------------------------------------------
// KernelSHAP: weighted least squares over binary coalitions with the Shapley
// kernel, intercept pinned to v(empty) and efficiency enforced by eliminating
// the last coefficient.
// ---------------------------------------------------------------------------

namespace detail {

struct CoalitionRow {
    std::vector<std::uint8_t> z;
    double value = 0.0; // v(S)
    double weight = 1.0;
};

/// Solves the constrained regression; nullopt when the design is singular.
inline std::optional<std::vector<double>> solve_kernel_shap(
    const std::vector<CoalitionRow>& rows, int n_groups, double v_empty, double v_full) {
    const double delta = v_full - v_empty;
    if (n_groups == 1) return std::vector<double>{delta};

    const int cols = n_groups - 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(cols, cols);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd a(cols);
    for (const auto& row : rows) {
        const double z_last = row.z[static_cast<std::size_t>(n_groups - 1)];
        for (int j = 0; j < cols; ++j) a[j] = row.z[static_cast<std::size_t>(j)] - z_last;
        const double u = row.value - v_empty - z_last * delta;
        m.selfadjointView<Eigen::Lower>().rankUpdate(a, row.weight);
        b.noalias() += (row.weight * u) * a;
    }
    m.triangularView<Eigen::Upper>() = m.transpose();

    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    // rank-deficient designs are consistent but underdetermined; reject them
    // via the factor pivots
    const Eigen::VectorXd dvec = ldlt.vectorD();
    const double dmax = dvec.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || (dvec.array().abs() <= 1e-10 * dmax).any()) return std::nullopt;
    Eigen::VectorXd phi = ldlt.solve(b);
    if (!phi.allFinite()) return std::nullopt;

    std::vector<double> attr(static_cast<std::size_t>(n_groups));
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
        attr[static_cast<std::size_t>(j)] = phi[j];
        sum += phi[j];
    }
    attr[static_cast<std::size_t>(n_groups - 1)] = delta - sum;
    return attr;
}

inline double shapley_kernel_weight(int n_groups, int size) {
    // (G-1) / (C(G,s) * s * (G-s))
    double binom = 1.0;
    for (int i = 1; i <= size; ++i) binom = binom * (n_groups - i + 1) / i;
    return (n_groups - 1.0) / (binom * size * (n_groups - size));
}

} // namespace detail

inline std::vector<double> kernel_shap(const ScoreFn& score, std::span<const double> x,
                                       const FeatureGrouping& grouping,
                                       std::span<const double> baseline, int n_samples, Rng& rng) {
    const int n_groups = grouping.n_groups();
    if (n_samples < n_groups + 2) {
        throw ConfigError("kernel_shap needs n_samples >= G+2 = " + std::to_string(n_groups + 2) +
                          ", got " + std::to_string(n_samples));
    }
    std::vector<double> work(x.size());
    auto eval_coalition = [&](const std::vector<std::uint8_t>& z) {
        work.assign(baseline.begin(), baseline.end());
        for (int g = 0; g < n_groups; ++g) {
            if (!z[static_cast<std::size_t>(g)]) continue;
            for (int coord : grouping.groups[static_cast<std::size_t>(g)]) {
                work[static_cast<std::size_t>(coord)] = x[static_cast<std::size_t>(coord)];
            }
        }
        return score(work);
    };

    const double v_empty = score(baseline);
    const double v_full = score(x);
    if (n_groups == 1) return {v_full - v_empty};

    const bool exhaustive =
        n_groups <= 26 && (std::size_t{1} << n_groups) - 2 <= static_cast<std::size_t>(n_samples);

    auto build_rows = [&](int budget) {
        std::vector<detail::CoalitionRow> rows;
        if (exhaustive) {
            const std::size_t total = std::size_t{1} << n_groups;
            for (std::size_t m = 1; m + 1 < total; ++m) {
                detail::CoalitionRow row;
                row.z.resize(static_cast<std::size_t>(n_groups));
                int size = 0;
                for (int g = 0; g < n_groups; ++g) {
                    row.z[static_cast<std::size_t>(g)] = (m >> g) & 1;
                    size += row.z[static_cast<std::size_t>(g)];
                }
                row.weight = detail::shapley_kernel_weight(n_groups, size);
                row.value = eval_coalition(row.z);
                rows.push_back(std::move(row));
            }
        } else {
            // sample sizes proportionally to the kernel so rows carry weight 1
            std::vector<double> cum(static_cast<std::size_t>(n_groups - 1));
            double total_p = 0.0;
            for (int s = 1; s < n_groups; ++s) {
                total_p += 1.0 / (static_cast<double>(s) * (n_groups - s));
                cum[static_cast<std::size_t>(s - 1)] = total_p;
            }
            for (int i = 0; i < budget; ++i) {
                const double u = rng.next_double() * total_p;
                int size = n_groups - 1;
                for (int s = 1; s < n_groups; ++s) {
                    if (u <= cum[static_cast<std::size_t>(s - 1)]) {
                        size = s;
                        break;
                    }
                }
                detail::CoalitionRow row;
                row.z.assign(static_cast<std::size_t>(n_groups), 0);
                for (int g : sample_without_replacement(n_groups, size, rng)) {
                    row.z[static_cast<std::size_t>(g)] = 1;
                }
                row.value = eval_coalition(row.z);
                rows.push_back(std::move(row));
            }
        }
        // the full coalition is always part of the system (it anchors delta
        // and is fit exactly by the efficiency substitution)
        detail::CoalitionRow full;
        full.z.assign(static_cast<std::size_t>(n_groups), 1);
        full.value = v_full;
        rows.push_back(std::move(full));
        return rows;
    };

    auto rows = build_rows(n_samples);
    auto attr = detail::solve_kernel_shap(rows, n_groups, v_empty, v_full);
    if (!attr && !exhaustive) {
        rows = build_rows(2 * n_samples);
        attr = detail::solve_kernel_shap(rows, n_groups, v_empty, v_full);
    }
    if (!attr) {
        throw std::runtime_error("kernel_shap: singular design after resampling");
    }
    return *attr;
}

// ---------------------------------------------------------------------------
// Batch methods
// ---------------------------------------------------------------------------

/// Per-group batch-shuffle importance: every group gets one shared donor
/// permutation of the batch; attribution is each instance's score drop when
/// that group is taken from its donor.
inline Saliency feature_permutation(const Classifier& model, const MtsDataset& ds,
                                    const FeatureGrouping& grouping, std::uint64_t seed,
                                    ScoreTarget target = ScoreTarget::PredictedClass,
                                    int threads = 1) {
    if (ds.n() < 2) throw ValidationError("feature_permutation undefined for N=1");
    if (ds.d() != grouping.d || ds.l() != grouping.l) {
        throw ValidationError("grouping shape does not match dataset");
    }
    Rng master(seed);
    const std::size_t n_groups = grouping.groups.size();
    std::vector<std::vector<int>> donors(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) {
        std::vector<int> perm(static_cast<std::size_t>(ds.n()));
        std::iota(perm.begin(), perm.end(), 0);
        Rng rng = master.derive(g);
        rng.shuffle(std::span<int>(perm));
        donors[g] = std::move(perm);
    }

    Saliency out;
    out.values = Tensor3(ds.n(), ds.d(), ds.l());
    out.method = "feature_permutation";
    parallel_for(static_cast<std::size_t>(ds.n()), threads, [&](std::size_t i) {
        auto x = ds.data.instance(static_cast<int>(i));
        ScoreFn score = make_class_scorer(model, x, target, ds.labels[i]);
        const double s_clean = score(x);
        std::vector<double> work(x.begin(), x.end());
        std::vector<double> attr(n_groups);
        for (std::size_t g = 0; g < n_groups; ++g) {
            auto donor = ds.data.instance(donors[g][i]);
            for (int coord : grouping.groups[g]) {
                work[static_cast<std::size_t>(coord)] = donor[static_cast<std::size_t>(coord)];
            }
            attr[g] = s_clean - score(work);
            for (int coord : grouping.groups[g]) {
                work[static_cast<std::size_t>(coord)] = x[static_cast<std::size_t>(coord)];
            }
        }
        expand_group_values(grouping, attr, out.values.instance(static_cast<int>(i)));
    });
    return out;
}

/// i.i.d. uniform [0,1) attribution tensor (the random baseline).
inline Saliency random_attribution(int n, int d, int l, std::uint64_t seed) {
    Saliency s;
    s.values = Tensor3(n, d, l);
    s.method = "random";
    Rng master(seed);
    for (int i = 0; i < n; ++i) {
        Rng rng = master.derive(static_cast<std::uint64_t>(i));
        auto row = s.values.instance(i);
        for (auto& v : row) v = rng.next_double();
    }
    return s;
}

// ---------------------------------------------------------------------------
// Dataset-level driver
// ---------------------------------------------------------------------------

enum class AttributionMethod { FeatureAblation, FeaturePermutation, ShapleySampling, KernelShap, Random };

inline constexpr AttributionMethod kAllMethods[] = {
    AttributionMethod::FeatureAblation, AttributionMethod::FeaturePermutation,
    AttributionMethod::ShapleySampling, AttributionMethod::KernelShap, AttributionMethod::Random};

inline const char* method_name(AttributionMethod m) {
    switch (m) {
        case AttributionMethod::FeatureAblation: return "feature_ablation";
        case AttributionMethod::FeaturePermutation: return "feature_permutation";
        case AttributionMethod::ShapleySampling: return "shap_sampling";
        case AttributionMethod::KernelShap: return "kernel_shap";
        case AttributionMethod::Random: return "random";
    }
    return "?";
}

inline std::optional<AttributionMethod> method_from_name(std::string_view name) {
    for (AttributionMethod m : kAllMethods) {
        if (name == method_name(m)) return m;
    }
    return std::nullopt;
}

inline std::string method_name_list() {
    std::string out;
    for (AttributionMethod m : kAllMethods) {
        if (!out.empty()) out += ", ";
        out += method_name(m);
    }
    return out;
}

struct AttributionConfig {
    AttributionMethod method = AttributionMethod::FeatureAblation;
    MaskKind baseline = MaskKind::Zeros; // replacement during attribution
    int n_permutations = 25;             // shap_sampling
    int n_samples = 0;                   // kernel_shap; 0 -> 2G + 2048
    std::uint64_t seed = 0;
    ScoreTarget target = ScoreTarget::PredictedClass;
    int threads = 1;
};

/// Runs one attribution method over a whole dataset, one rng substream per
/// instance (thread-count independent). Group values are expanded so the
/// saliency has the dataset's shape.
inline Saliency attribute_dataset(const Classifier& model, const MtsDataset& ds,
                                  const FeatureGrouping& grouping, const AttributionConfig& cfg,
                                  const MaskStats& stats) {
    if (ds.d() != grouping.d || ds.l() != grouping.l) {
        throw ValidationError("grouping shape does not match dataset");
    }
    if (cfg.method == AttributionMethod::FeaturePermutation) {
        return feature_permutation(model, ds, grouping, cfg.seed, cfg.target, cfg.threads);
    }

    Saliency out;
    out.values = Tensor3(ds.n(), ds.d(), ds.l());
    out.method = method_name(cfg.method);

    if (cfg.method == AttributionMethod::Random) {
        // one uniform value per group, repeated across the group
        Rng master(cfg.seed);
        for (int i = 0; i < ds.n(); ++i) {
            Rng rng = master.derive(static_cast<std::uint64_t>(i));
            std::vector<double> vals(grouping.groups.size());
            for (auto& v : vals) v = rng.next_double();
            expand_group_values(grouping, vals, out.values.instance(i));
        }
        return out;
    }

    const int n_samples =
        cfg.n_samples > 0 ? cfg.n_samples : 2 * grouping.n_groups() + 2048;
    Rng master(cfg.seed);
    parallel_for(static_cast<std::size_t>(ds.n()), cfg.threads, [&](std::size_t i) {
        Rng rng = master.derive(i);
        auto x = ds.data.instance(static_cast<int>(i));
        std::vector<double> baseline = make_baseline(ds.d(), ds.l(), cfg.baseline, stats, rng);
        ScoreFn score = make_class_scorer(model, x, cfg.target, ds.labels[i]);
        std::vector<double> attr;
        switch (cfg.method) {
            case AttributionMethod::FeatureAblation:
                attr = feature_ablation(score, x, grouping, baseline);
                break;
            case AttributionMethod::ShapleySampling:
                attr = shapley_sampling(score, x, grouping, baseline, cfg.n_permutations, rng);
                break;
            case AttributionMethod::KernelShap:
                attr = kernel_shap(score, x, grouping, baseline, n_samples, rng);
                break;
            default:
                throw ConfigError("unsupported method in attribute_dataset");
        }
        expand_group_values(grouping, attr, out.values.instance(static_cast<int>(i)));
    });
    return out;
}

} // namespace tsxb
