// Acceptance suite: runs the ten headline checks end to end and prints one
// [PASS]/[FAIL] line per criterion. Exit code is the number of failures.
//
// Usage: acceptance [--cli <tsxb binary>] [--only 1,2,...] [--workdir <dir>]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "tsxb/tsxb.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report_line(const std::string& label, bool ok, const std::string& detail) {
    std::printf("[%s] %s -- %s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    report_line("criterion " + std::to_string(id) + ": " + name, ok, detail);
}

std::string fmt(const char* pattern, ...) {
    char buf[1024];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

// Shared artifacts, built lazily so --only subsets still work.
struct Artifacts {
    std::optional<tsxb::SynthData> synth;
    std::optional<tsxb::TabularRidgeModel> tabular;
    std::optional<tsxb::RandomKernelModel> kernel;
    double tabular_train_s = 0.0;
    double kernel_train_s = 0.0;
    double kernel_accuracy = -1.0;
    std::optional<tsxb::SuiteReport> separation_report; // criterion 6 suite
    double separation_s = 0.0;
    std::optional<tsxb::MtsDataset> ds100; // shared 100-instance slice
    std::optional<tsxb::GroundTruthMask> gt100;
    std::optional<tsxb::Saliency> fa100; // normalized FA saliency on the slice

    const tsxb::SynthData& data() {
        if (!synth) {
            tsxb::SynthConfig cfg;
            cfg.seed = 42;
            synth = tsxb::generate(cfg);
        }
        return *synth;
    }
    const tsxb::TabularRidgeModel& tabular_model() {
        if (!tabular) {
            const auto t0 = Clock::now();
            tabular = tsxb::train_tabular(data().train, 1.0);
            tabular_train_s = secs_since(t0);
        }
        return *tabular;
    }
    const tsxb::RandomKernelModel& kernel_model() {
        if (!kernel) {
            const auto t0 = Clock::now();
            kernel = tsxb::train_random_kernel(data().train, 2000, 7);
            kernel_train_s = secs_since(t0);
            kernel_accuracy = tsxb::accuracy(*kernel, data().test);
        }
        return *kernel;
    }
    const tsxb::MtsDataset& slice100() {
        if (!ds100) {
            ds100 = tsxb::slice_dataset(data().test, 100);
            gt100 = tsxb::slice_mask(data().gt_test, 100);
        }
        return *ds100;
    }
    const tsxb::Saliency& fa_saliency_100() {
        if (!fa100) {
            const auto& ds = slice100();
            auto grouping = tsxb::make_grouping(ds.d(), ds.l(), {10, tsxb::Grouping::ChannelWise});
            tsxb::MaskStats stats = tsxb::fit_stats(ds);
            tsxb::AttributionConfig cfg;
            cfg.method = tsxb::AttributionMethod::FeatureAblation;
            cfg.seed = 23;
            fa100 = tsxb::normalize_saliency(
                tsxb::attribute_dataset(kernel_model(), ds, grouping, cfg, stats));
        }
        return *fa100;
    }
    const tsxb::SuiteReport& separation() {
        if (!separation_report) {
            const auto& model = kernel_model();
            auto ds = tsxb::slice_dataset(data().test, 200);
            auto gt = tsxb::slice_mask(data().gt_test, 200);
            tsxb::EvalOptions opt;
            opt.seed = 11;
            const auto t0 = Clock::now();
            separation_report = tsxb::evaluate_suite(
                model, ds, &gt, {tsxb::AttributionMethod::FeatureAblation},
                {std::begin(tsxb::kAllMasks), std::end(tsxb::kAllMasks)},
                {{10, tsxb::Grouping::ChannelWise}}, tsxb::QuantileSchedule::default_schedule(),
                opt);
            separation_s = secs_since(t0);
        }
        return *separation_report;
    }
};

// random nonlinear score used by the Shapley criteria
tsxb::ScoreFn make_stub_score(int n_coords, std::uint64_t seed) {
    tsxb::Rng rng(seed);
    std::vector<double> w(static_cast<std::size_t>(n_coords));
    std::vector<double> q(static_cast<std::size_t>(n_coords) * n_coords);
    for (auto& v : w) v = rng.next_normal();
    for (auto& v : q) v = 0.4 * rng.next_normal();
    return [w, q, n_coords](std::span<const double> x) {
        double acc = 0.0;
        for (int i = 0; i < n_coords; ++i) acc += w[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        for (int i = 0; i < n_coords; ++i) {
            for (int j = 0; j < n_coords; ++j) {
                acc += q[static_cast<std::size_t>(i) * n_coords + j] * x[static_cast<std::size_t>(i)] *
                       x[static_cast<std::size_t>(j)];
            }
        }
        return 0.5 + 0.4 * std::tanh(acc);
    };
}

void criterion_1_and_2(Artifacts&) {
    const auto t0 = Clock::now();
    double worst_sv = 0.0, worst_ks = 0.0, worst_eff = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        tsxb::Rng rng(500 + static_cast<std::uint64_t>(trial));
        const int n_groups = 2 + static_cast<int>(rng.next_below(4)); // 2..5
        const bool chunked = trial % 2 == 1;
        const int n_coords = chunked ? 2 * n_groups : n_groups;
        tsxb::FeatureGrouping grouping =
            chunked ? tsxb::make_grouping(1, n_coords, {n_groups, tsxb::Grouping::ChannelWise})
                    : tsxb::pointwise_grouping(1, n_coords);

        auto score = make_stub_score(n_coords, 900 + static_cast<std::uint64_t>(trial));
        std::vector<double> x(static_cast<std::size_t>(n_coords));
        std::vector<double> baseline(static_cast<std::size_t>(n_coords), 0.0);
        for (auto& v : x) v = rng.next_uniform(-1.0, 1.0);
        if (trial % 3 == 0) {
            for (auto& v : baseline) v = rng.next_uniform(-0.5, 0.5);
        }

        auto exact = tsxb::exact_shapley(score, x, grouping, baseline);
        auto sv = tsxb::shapley_sampling_exhaustive(score, x, grouping, baseline);
        tsxb::Rng ks_rng(3);
        auto ks = tsxb::kernel_shap(score, x, grouping, baseline, (1 << n_groups) + 4, ks_rng);

        const double delta = score(x) - score(baseline);
        double sv_sum = std::accumulate(sv.begin(), sv.end(), 0.0);
        double ks_sum = std::accumulate(ks.begin(), ks.end(), 0.0);
        worst_eff = std::max({worst_eff, std::abs(sv_sum - delta), std::abs(ks_sum - delta)});
        for (int g = 0; g < n_groups; ++g) {
            worst_sv = std::max(worst_sv,
                                std::abs(sv[static_cast<std::size_t>(g)] - exact[static_cast<std::size_t>(g)]));
            worst_ks = std::max(worst_ks,
                                std::abs(ks[static_cast<std::size_t>(g)] - exact[static_cast<std::size_t>(g)]));
        }
    }
    const double elapsed = secs_since(t0);
    report(1, "Shapley oracle equivalence",
           worst_sv <= 1e-12 && worst_ks <= 1e-6 && elapsed < 10.0,
           fmt("max |sampling-exact|=%.3g (tol 1e-12), max |kernelshap-exact|=%.3g (tol 1e-6), "
               "%.2fs (limit 10s)",
               worst_sv, worst_ks, elapsed));
    report(2, "efficiency axiom", worst_eff <= 1e-9,
           fmt("max |sum(attr) - (S(X)-S(baseline))|=%.3g (tol 1e-9)", worst_eff));
}

void criterion_3(Artifacts&) {
    double worst_roc = 0.0, worst_ap = 0.0;
    tsxb::Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng.next_below(4));
        const int max_l = 200 / d;
        const int l = 3 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_l - 3)));

        tsxb::GroundTruthMask gt(1, d, l);
        int ones = 0;
        for (auto& b : gt.values) {
            b = rng.next_bernoulli(0.25) ? 1 : 0;
            ones += b;
        }
        if (ones == 0) gt.values[0] = 1;
        if (ones == static_cast<int>(gt.values.size())) gt.values[0] = 0;

        tsxb::Saliency s;
        s.values = tsxb::Tensor3(1, d, l);
        const bool with_ties = trial % 2 == 0;
        for (auto& v : s.values.v) {
            v = with_ties ? static_cast<double>(rng.next_below(5)) / 4.0 : rng.next_double();
        }
        auto normalized = tsxb::normalize_saliency(s);

        auto fast = tsxb::gt_metrics(normalized, gt);
        auto scores = normalized.values.instance(0);
        auto labels = gt.instance(0);
        worst_roc = std::max(worst_roc, std::abs(fast.roc_auc -
                                                 tsxb::testing::brute_force_roc_auc(scores, labels)));
        worst_ap = std::max(
            worst_ap,
            std::abs(fast.ap - tsxb::testing::brute_force_average_precision(scores, labels)));
    }
    report(3, "ground-truth metric correctness", worst_roc <= 1e-12 && worst_ap <= 1e-12,
           fmt("max |roc-oracle|=%.3g, max |ap-oracle|=%.3g (tol 1e-12, 100 instances)",
               worst_roc, worst_ap));
}

void criterion_4(Artifacts& art) {
    const auto t0 = Clock::now();
    const auto& data = art.data();
    auto random = tsxb::random_attribution(data.test.n(), data.test.d(), data.test.l(), 1234);
    auto normalized = tsxb::normalize_saliency(random);
    auto score = tsxb::gt_metrics(normalized, data.gt_test);
    const double elapsed = secs_since(t0);
    const bool ok = std::abs(score.ap - 0.05) <= 0.01 && std::abs(score.roc_auc - 0.5) <= 0.02 &&
                    elapsed < 60.0;
    report(4, "random baseline reproduces the published row", ok,
           fmt("ap=%.4f (0.05 +/- 0.01), roc=%.4f (0.50 +/- 0.02), %.1fs (limit 60s)", score.ap,
               score.roc_auc, elapsed));
}

void criterion_5(Artifacts& art) {
    const auto& tabular = art.tabular_model();
    const double tab_acc = tsxb::accuracy(tabular, art.data().test);
    art.kernel_model();
    const double kern_acc = art.kernel_accuracy;
    const double total = art.tabular_train_s + art.kernel_train_s;
    const bool ok = tab_acc >= 0.45 && tab_acc <= 0.60 && kern_acc >= 0.80 && total < 600.0;
    report(5, "classifier accuracy tiers", ok,
           fmt("tabular=%.4f (need [0.45,0.60]), kernel=%.4f (need >=0.80), train %.0fs (limit "
               "600s)",
               tab_acc, kern_acc, total));
}

void criterion_6(Artifacts& art, const fs::path& workdir) {
    const auto& rep = art.separation();
    tsxb::write_all_outputs(rep, workdir / "separation");
    const auto* fa = rep.find("feature_ablation", "cw10");
    const auto* rnd = rep.find("random", "cw10");
    if (fa == nullptr || rnd == nullptr || !fa->gt || !rnd->gt || !fa->aggregate ||
        !rnd->aggregate) {
        report(6, "explainer separation", false, "missing rows or degenerate aggregation");
        return;
    }
    const bool roc_ok = fa->gt->roc_auc >= rnd->gt->roc_auc + 0.05;
    const bool auc_ok = fa->aggregate->auc_top >= 1.15 * rnd->aggregate->auc_top;
    const bool time_ok = art.separation_s < 1800.0;
    report(6, "explainer separation", roc_ok && auc_ok && time_ok,
           fmt("FA roc=%.4f vs random+0.05=%.4f; FA agg auc_top=%.4f vs 1.15*random=%.4f; %.0fs "
               "(limit 1800s)",
               fa->gt->roc_auc, rnd->gt->roc_auc + 0.05, fa->aggregate->auc_top,
               1.15 * rnd->aggregate->auc_top, art.separation_s));
}

void criterion_7(Artifacts& art) {
    const auto& rep = art.separation();
    bool preferred_kept = false;
    std::string filter_log;
    for (const auto& cf : rep.filters) {
        for (const auto& e : cf.filter.entries) {
            filter_log += fmt("%s:%s ", tsxb::mask_name(e.mask), e.kept ? "kept" : "drop");
            if (e.kept && (e.mask == tsxb::MaskKind::Zeros || e.mask == tsxb::MaskKind::LocalMean ||
                           e.mask == tsxb::MaskKind::GlobalMean)) {
                preferred_kept = true;
            }
        }
    }

    // single std_normal mask: the pipeline must complete and report the
    // flat-rank outcome either way
    bool completed = false;
    bool flat = false;
    try {
        auto ds = tsxb::slice_dataset(art.data().test, 100);
        auto gt = tsxb::slice_mask(art.data().gt_test, 100);
        tsxb::EvalOptions opt;
        opt.seed = 19;
        auto single = tsxb::evaluate_suite(art.kernel_model(), ds, &gt,
                                           {tsxb::AttributionMethod::FeatureAblation},
                                           {tsxb::MaskKind::StdNormal},
                                           {{10, tsxb::Grouping::ChannelWise}},
                                           tsxb::QuantileSchedule::default_schedule(), opt);
        completed = true;
        flat = single.flat_rank;
    } catch (const std::exception& e) {
        filter_log += fmt("(std_normal-only run failed: %s)", e.what());
    }
    report(7, "mask filter behavior", preferred_kept && completed,
           fmt("filter: %s| std_normal-only run completed=%d flat_rank=%s", filter_log.c_str(),
               completed, completed ? (flat ? "triggered" : "not triggered") : "n/a"));
}

void criterion_8(Artifacts& art) {
    const auto& model = art.tabular_model();
    auto ds = tsxb::slice_dataset(art.data().test, 50);
    tsxb::MaskStats stats; // zeros baseline needs no stats

    tsxb::AttributionConfig cfg;
    cfg.method = tsxb::AttributionMethod::ShapleySampling;
    cfg.n_permutations = 3;
    cfg.seed = 31;

    auto grouping_pw = tsxb::pointwise_grouping(ds.d(), ds.l());
    const auto t0 = Clock::now();
    auto pw = tsxb::attribute_dataset(model, ds, grouping_pw, cfg, stats);
    const double pointwise_s = secs_since(t0);

    auto grouping_c = tsxb::make_grouping(ds.d(), ds.l(), {10, tsxb::Grouping::ChannelWise});
    const auto t1 = Clock::now();
    auto cw = tsxb::attribute_dataset(model, ds, grouping_c, cfg, stats);
    const double chunked_s = secs_since(t1);
    (void)pw;
    (void)cw;

    const double ratio = pointwise_s / std::max(1e-9, chunked_s);
    report(8, "chunking speedup", ratio >= 10.0,
           fmt("point-wise %.2fs vs 10-chunk %.2fs -> %.1fx (need >=10x, 50 instances)",
               pointwise_s, chunked_s, ratio));
}

void criterion_9(Artifacts& art) {
    const auto& model = art.kernel_model();
    const auto& data = art.data();
    auto grouping = tsxb::make_grouping(data.test.d(), data.test.l(),
                                        {10, tsxb::Grouping::ChannelWise});

    auto bottom_two = [&](const tsxb::Saliency& saliency, const tsxb::MtsDataset& ds) {
        auto ranking = tsxb::rank_channels(tsxb::channel_importance(saliency, ds).r);
        std::set<int> last{ranking[ranking.size() - 1], ranking[ranking.size() - 2]};
        return last;
    };

    const auto fa_last = bottom_two(art.fa_saliency_100(), art.slice100());

    auto ds_sv = tsxb::slice_dataset(data.test, 50);
    tsxb::MaskStats stats_sv = tsxb::fit_stats(ds_sv);
    tsxb::AttributionConfig sv_cfg;
    sv_cfg.method = tsxb::AttributionMethod::ShapleySampling;
    sv_cfg.n_permutations = 8;
    sv_cfg.seed = 29;
    auto sv_sal = tsxb::normalize_saliency(
        tsxb::attribute_dataset(model, ds_sv, grouping, sv_cfg, stats_sv));
    const auto sv_last = bottom_two(sv_sal, ds_sv);

    const std::set<int> expected{6, 7};
    const bool rank_ok = fa_last == expected && sv_last == expected;

    // retrain without the two injected channels
    std::vector<int> keep{0, 1, 2, 3, 4, 5};
    auto sub_train = tsxb::subset_dataset(data.train, keep);
    auto sub_test = tsxb::subset_dataset(data.test, keep);
    auto retrained = tsxb::train_random_kernel(sub_train, 2000, 7);
    const double sub_acc = tsxb::accuracy(retrained, sub_test);
    const double delta = std::abs(sub_acc - art.kernel_accuracy);

    report(9, "channel actionability", rank_ok && delta <= 0.03,
           fmt("FA bottom-two={%d,%d}, shap bottom-two={%d,%d} (expect {6,7}); accuracy "
               "%.4f -> %.4f, |delta|=%.4f (tol 0.03)",
               *fa_last.begin(), *std::next(fa_last.begin()), *sv_last.begin(),
               *std::next(sv_last.begin()), art.kernel_accuracy, sub_acc, delta));
}

// Documented empirical examples that need the trained classifier; reported
// alongside the numbered criteria.
void supplements(Artifacts& art) {
    const auto& model = art.kernel_model();
    const auto& ds = art.slice100();
    const auto& gt = *art.gt100;

    // the ideal (ground-truth) saliency at k=1 must beat random saliency at
    // the same replaced fraction
    {
        tsxb::Saliency ideal;
        ideal.values = tsxb::Tensor3(gt.n, gt.d, gt.l);
        for (std::size_t j = 0; j < gt.values.size(); ++j) {
            ideal.values.v[j] = static_cast<double>(gt.values[j]);
        }
        auto ideal_norm = tsxb::normalize_saliency(ideal);
        tsxb::MaskStats stats = tsxb::fit_stats(ds);

        tsxb::QuantileSchedule at_full{{1.0}};
        auto gt_curve = tsxb::build_curve(model, ds, ideal_norm, tsxb::MaskKind::Zeros, stats,
                                          at_full, 41);
        // ground truth marks 200 of 4000 points, so k=1 replaces a 0.05
        // fraction; random saliency reaches the same fraction at k=0.05
        tsxb::QuantileSchedule at_k05{{0.05}};
        auto rnd = tsxb::normalize_saliency(
            tsxb::random_attribution(ds.n(), ds.d(), ds.l(), 43));
        auto rnd_curve = tsxb::build_curve(model, ds, rnd, tsxb::MaskKind::Zeros, stats, at_k05,
                                           41);
        const double s_gt = gt_curve.samples[0].s_top;
        const double s_rnd = rnd_curve.samples[0].s_top;
        report_line("supplement: ideal saliency dominates random at matched fraction",
               s_gt > s_rnd,
               fmt("s_top(ideal, n=%.3f)=%.4f vs s_top(random, n=%.3f)=%.4f",
                   gt_curve.samples[0].n_top, s_gt, rnd_curve.samples[0].n_top, s_rnd));
    }

    // feature ablation concentrates attribution inside the true windows
    {
        const auto& sal = art.fa_saliency_100();
        double inside = 0.0, outside = 0.0;
        std::size_t n_inside = 0, n_outside = 0;
        for (std::size_t j = 0; j < gt.values.size(); ++j) {
            if (gt.values[j]) {
                inside += sal.values.v[j];
                ++n_inside;
            } else {
                outside += sal.values.v[j];
                ++n_outside;
            }
        }
        inside /= static_cast<double>(n_inside);
        outside /= static_cast<double>(n_outside);
        report_line("supplement: ablation mass concentrates in the true windows",
               inside > outside,
               fmt("mean attribution in-window %.4f vs out-of-window %.4f (100 instances)",
                   inside, outside));
    }

    // keeping only the two injected channels leaves no signal to learn
    {
        std::vector<int> noise_pair{6, 7};
        auto sub_train = tsxb::subset_dataset(art.data().train, noise_pair);
        auto sub_test = tsxb::subset_dataset(art.data().test, noise_pair);
        auto model_noise = tsxb::train_random_kernel(sub_train, 500, 7);
        const double acc = tsxb::accuracy(model_noise, sub_test);
        report_line("supplement: the injected channels alone are unlearnable",
               std::abs(acc - 0.5) <= 0.08,
               fmt("accuracy on channels {6,7} only = %.4f (majority rate 0.5 +/- 0.08)", acc));
    }
}

int run_cmd(const std::string& cmd) {
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe) return -1;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe)) {
    }
    const int status = pclose(pipe);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_10(const std::string& cli, const fs::path& workdir) {
    if (cli.empty()) {
        report(10, "thread-count determinism", false, "no --cli binary given");
        return;
    }
    const fs::path wd = workdir / "determinism";
    fs::create_directories(wd);
    const std::string W = wd.string();

    int rc = run_cmd(cli + " gen-synth --out " + W + "/synth --n-train 300 --n-test 120 --seed 5");
    rc |= run_cmd(cli + " train --train " + W + "/synth/train --model tabular --lambda 1 --out " +
                  W + "/tab.tsxb");
    const std::string eval_cmd = cli + " evaluate --model " + W + "/tab.tsxb --dataset " + W +
                                 "/synth/test --methods feature_ablation,feature_permutation"
                                 " --chunks 10 --limit 60 --seed 9";
    rc |= run_cmd(eval_cmd + " --threads 1 --out " + W + "/ev1");
    rc |= run_cmd(eval_cmd + " --threads 3 --out " + W + "/ev2");

    const std::string a = slurp(wd / "ev1/scores.csv");
    const std::string b = slurp(wd / "ev2/scores.csv");
    const bool ok = rc == 0 && !a.empty() && a == b;
    report(10, "thread-count determinism", ok,
           fmt("cli rc=%d, scores.csv %zu bytes, threads 1 vs 3 identical=%d", rc, a.size(),
               a == b));
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::set<int> only;
    fs::path workdir = fs::temp_directory_path() / "tsxb_acceptance";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::string list = argv[++i];
            for (std::size_t pos = 0; pos < list.size();) {
                std::size_t comma = list.find(',', pos);
                if (comma == std::string::npos) comma = list.size();
                only.insert(std::stoi(list.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        } else if (arg == "--workdir" && i + 1 < argc) {
            workdir = argv[++i];
        }
    }
    fs::create_directories(workdir);
    auto enabled = [&](int id) { return only.empty() || only.contains(id); };

    Artifacts art;
    const auto t0 = Clock::now();
    try {
        if (enabled(1) || enabled(2)) criterion_1_and_2(art);
        if (enabled(3)) criterion_3(art);
        if (enabled(4)) criterion_4(art);
        if (enabled(5)) criterion_5(art);
        if (enabled(6)) criterion_6(art, workdir);
        if (enabled(7)) criterion_7(art);
        if (enabled(8)) criterion_8(art);
        if (enabled(9)) criterion_9(art);
        if (enabled(10)) criterion_10(cli, workdir);
        if (only.empty()) supplements(art);
    } catch (const std::exception& e) {
        std::printf("[FAIL] unexpected exception: %s\n", e.what());
        ++g_failures;
    }
    std::printf("acceptance: %d failure(s), %.0fs total\n", g_failures, secs_since(t0));
    return g_failures;
}
