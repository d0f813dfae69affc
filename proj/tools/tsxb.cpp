// tsxb command line: synthetic data generation, training, attribution,
// evaluation, and channel selection. Every command is deterministic given its
// flags and seed; --threads never changes outputs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsxb/tsxb.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --config file values fill in for flags the user did not pass. Keys mirror
// the long flag names without the leading dashes.
struct ConfigFile {
    json j = json::object();

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw tsxb::ConfigError("cannot open config file: " + path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw tsxb::ConfigError("invalid config JSON: " + std::string(e.what()));
        }
    }

    template <typename T>
    void apply(const CLI::App* cmd, const std::string& flag, T& value) const {
        if (cmd->count("--" + flag) > 0) return;
        if (j.contains(flag)) {
            try {
                value = j.at(flag).get<T>();
            } catch (const json::exception&) {
                throw tsxb::ConfigError("config key '" + flag + "' has the wrong type");
            }
        }
    }
};

std::uint64_t resolve_seed(const CLI::App* cmd, const ConfigFile& cfg, std::uint64_t cli_value) {
    if (cmd->count("--seed") > 0) return cli_value;
    if (cfg.j.contains("seed")) return cfg.j.at("seed").get<std::uint64_t>();
    if (const char* env = std::getenv("TSXB_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return cli_value;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<tsxb::AttributionMethod> parse_methods(const std::string& csv) {
    std::vector<tsxb::AttributionMethod> out;
    for (const auto& name : split_csv(csv)) {
        auto m = tsxb::method_from_name(name);
        if (!m) {
            throw tsxb::ConfigError("unknown method '" + name + "'; valid names: " +
                                    tsxb::method_name_list());
        }
        out.push_back(*m);
    }
    if (out.empty()) throw tsxb::ConfigError("empty method list");
    return out;
}

std::vector<tsxb::MaskKind> parse_masks(const std::string& csv) {
    std::vector<tsxb::MaskKind> out;
    for (const auto& name : split_csv(csv)) {
        auto m = tsxb::mask_from_name(name);
        if (!m) {
            std::string valid;
            for (auto kind : tsxb::kAllMasks) {
                if (!valid.empty()) valid += ", ";
                valid += tsxb::mask_name(kind);
            }
            throw tsxb::ConfigError("unknown mask '" + name + "'; valid names: " + valid);
        }
        out.push_back(*m);
    }
    if (out.empty()) throw tsxb::ConfigError("empty mask list");
    return out;
}

tsxb::MaskKind parse_one_mask(const std::string& name) {
    auto masks = parse_masks(name);
    if (masks.size() != 1) throw tsxb::ConfigError("expected a single mask name");
    return masks[0];
}

std::vector<tsxb::ChunkSpec> build_chunk_specs(std::vector<int> chunks, bool pointwise,
                                               bool cross_channel, int l) {
    if (chunks.empty() && !pointwise) chunks.push_back(10);
    std::vector<tsxb::ChunkSpec> specs;
    const auto grouping = cross_channel ? tsxb::Grouping::CrossChannel
                                        : tsxb::Grouping::ChannelWise;
    for (int n : chunks) {
        if (n < 1) throw tsxb::ConfigError("chunk count must be >= 1");
        specs.push_back({n, grouping});
    }
    if (pointwise) specs.push_back({l, tsxb::Grouping::ChannelWise});
    return specs;
}

tsxb::ScoreTarget parse_target(const std::string& name) {
    if (name == "predicted") return tsxb::ScoreTarget::PredictedClass;
    if (name == "true") return tsxb::ScoreTarget::TrueClass;
    throw tsxb::ConfigError("score target must be 'predicted' or 'true'");
}

std::pair<tsxb::MtsDataset, std::optional<tsxb::GroundTruthMask>> load_sliced(
    const std::string& dir, int limit) {
    auto [ds, gt] = tsxb::load_dataset(dir);
    if (limit > 0 && limit < ds.n()) {
        auto sliced = tsxb::slice_dataset(ds, limit);
        std::optional<tsxb::GroundTruthMask> sliced_gt;
        if (gt) sliced_gt = tsxb::slice_mask(*gt, limit);
        return {std::move(sliced), std::move(sliced_gt)};
    }
    return {std::move(ds), std::move(gt)};
}

json synth_meta_json(const std::vector<tsxb::SynthInstanceMeta>& meta) {
    json arr = json::array();
    for (const auto& m : meta) {
        arr.push_back({{"channel_a", m.channel_a},
                       {"channel_b", m.channel_b},
                       {"window_start", m.window_start},
                       {"f1", m.f1},
                       {"f2", m.f2},
                       {"label", m.label}});
    }
    return arr;
}

// ---------------------------------------------------------------------------

int cmd_gen_synth(const CLI::App* cmd, const ConfigFile& cfg, std::string out_dir,
                  tsxb::SynthConfig synth, std::uint64_t seed, int threads) {
    cfg.apply(cmd, "out", out_dir);
    cfg.apply(cmd, "n-train", synth.n_train);
    cfg.apply(cmd, "n-test", synth.n_test);
    cfg.apply(cmd, "threshold", synth.label_threshold);
    cfg.apply(cmd, "n-channels", synth.n_channels);
    cfg.apply(cmd, "length", synth.length);
    cfg.apply(cmd, "window-len", synth.window_len);
    cfg.apply(cmd, "square-prob", synth.square_wave_prob);
    cfg.apply(cmd, "extra-channels", synth.extra_nondisc_channels);
    cfg.apply(cmd, "threads", threads);
    synth.seed = resolve_seed(cmd, cfg, seed);

    auto data = tsxb::generate(synth, threads);
    tsxb::save_dataset(data.train, &data.gt_train, fs::path(out_dir) / "train");
    tsxb::save_dataset(data.test, &data.gt_test, fs::path(out_dir) / "test");
    {
        std::ofstream meta(fs::path(out_dir) / "train" / "meta.json");
        meta << synth_meta_json(data.meta_train).dump() << "\n";
    }
    {
        std::ofstream meta(fs::path(out_dir) / "test" / "meta.json");
        meta << synth_meta_json(data.meta_test).dump() << "\n";
    }
    auto balance = tsxb::class_balance(data.test);
    std::printf("wrote %s: train %dx%dx%d, test %dx%dx%d (balance %d/%d), seed %llu\n",
                out_dir.c_str(), data.train.n(), data.train.d(), data.train.l(), data.test.n(),
                data.test.d(), data.test.l(), balance[0], balance[1],
                static_cast<unsigned long long>(synth.seed));
    return 0;
}

int cmd_train(const CLI::App* cmd, const ConfigFile& cfg, std::string train_dir,
              std::string test_dir, std::string model_kind, std::string out_path, double lambda,
              int kernels, std::uint64_t seed, int threads) {
    cfg.apply(cmd, "train", train_dir);
    cfg.apply(cmd, "test", test_dir);
    cfg.apply(cmd, "model", model_kind);
    cfg.apply(cmd, "out", out_path);
    cfg.apply(cmd, "lambda", lambda);
    cfg.apply(cmd, "kernels", kernels);
    cfg.apply(cmd, "threads", threads);
    seed = resolve_seed(cmd, cfg, seed);

    if (train_dir.empty()) throw tsxb::ConfigError("--train dataset directory is required");
    if (!fs::exists(fs::path(train_dir) / "manifest.json")) {
        throw tsxb::ConfigError("dataset not found: " + train_dir);
    }
    auto [train, gt_unused] = tsxb::load_dataset(train_dir);
    (void)gt_unused;

    std::unique_ptr<tsxb::Classifier> model;
    if (model_kind == "tabular") {
        auto m = tsxb::train_tabular(train, lambda);
        tsxb::save_model(m, out_path);
        model = std::make_unique<tsxb::TabularRidgeModel>(std::move(m));
    } else if (model_kind == "kernel") {
        auto m = tsxb::train_random_kernel(train, kernels, seed, threads);
        tsxb::save_model(m, out_path);
        model = std::make_unique<tsxb::RandomKernelModel>(std::move(m));
    } else {
        throw tsxb::ConfigError("unknown model '" + model_kind + "'; valid: tabular, kernel");
    }

    std::printf("model=%s train_accuracy=%.4f", model_kind.c_str(),
                tsxb::accuracy(*model, train));
    if (!test_dir.empty()) {
        auto [test, g2] = tsxb::load_dataset(test_dir);
        (void)g2;
        std::printf(" test_accuracy=%.4f", tsxb::accuracy(*model, test));
    }
    std::printf(" saved=%s\n", out_path.c_str());
    return 0;
}

int cmd_explain(const CLI::App* cmd, const ConfigFile& cfg, std::string model_path,
                std::string dataset_dir, std::string method_name, std::vector<int> chunks,
                bool pointwise, bool cross_channel, std::string baseline_name, int permutations,
                int samples, int limit, std::uint64_t seed, int threads, std::string out_dir) {
    cfg.apply(cmd, "model", model_path);
    cfg.apply(cmd, "dataset", dataset_dir);
    cfg.apply(cmd, "method", method_name);
    cfg.apply(cmd, "chunks", chunks);
    cfg.apply(cmd, "baseline", baseline_name);
    cfg.apply(cmd, "permutations", permutations);
    cfg.apply(cmd, "samples", samples);
    cfg.apply(cmd, "limit", limit);
    cfg.apply(cmd, "threads", threads);
    cfg.apply(cmd, "out", out_dir);
    seed = resolve_seed(cmd, cfg, seed);

    auto method = tsxb::method_from_name(method_name);
    if (!method) {
        throw tsxb::ConfigError("unknown method '" + method_name + "'; valid names: " +
                                tsxb::method_name_list());
    }
    auto model = tsxb::load_model(model_path);
    auto [ds, gt] = load_sliced(dataset_dir, limit);
    (void)gt;

    tsxb::AttributionConfig acfg;
    acfg.method = *method;
    acfg.baseline = parse_one_mask(baseline_name);
    acfg.n_permutations = permutations;
    acfg.n_samples = samples;
    acfg.seed = seed;
    acfg.threads = threads;

    tsxb::MaskStats stats;
    if (tsxb::mask_needs_stats(acfg.baseline)) stats = tsxb::fit_stats(ds);

    fs::create_directories(out_dir);
    json runtimes = json::object();
    for (const auto& spec : build_chunk_specs(chunks, pointwise, cross_channel, ds.l())) {
        auto grouping = tsxb::make_grouping(ds.d(), ds.l(), spec);
        const std::string label = tsxb::chunk_label(spec, ds.l());
        const auto t0 = std::chrono::steady_clock::now();
        auto saliency = tsxb::attribute_dataset(*model, ds, grouping, acfg, stats);
        const auto t1 = std::chrono::steady_clock::now();
        const double secs = std::chrono::duration<double>(t1 - t0).count();
        const auto dir = fs::path(out_dir) / (method_name + "_" + label);
        tsxb::save_saliency(saliency, dir);
        runtimes[label] = secs;
        std::printf("%s %s: %d groups, %.2fs -> %s\n", method_name.c_str(), label.c_str(),
                    grouping.n_groups(), secs, dir.c_str());
    }
    std::ofstream rt(fs::path(out_dir) / "runtime.json");
    rt << json{{"method", method_name}, {"seconds", runtimes}}.dump(2) << "\n";
    return 0;
}

int cmd_evaluate(const CLI::App* cmd, const ConfigFile& cfg, std::string model_path,
                 std::string dataset_dir, std::string methods_csv, std::string masks_csv,
                 std::vector<int> chunks, bool pointwise, bool cross_channel, double margin,
                 std::string schedule_csv, std::string baseline_name, int permutations,
                 int samples, std::string target_name, std::string auc_mode, bool clip_sbar,
                 bool per_method_filter, std::string fit_stats_on, std::string train_dir,
                 int limit, std::uint64_t seed, int threads, std::string out_dir) {
    cfg.apply(cmd, "model", model_path);
    cfg.apply(cmd, "dataset", dataset_dir);
    cfg.apply(cmd, "methods", methods_csv);
    cfg.apply(cmd, "masks", masks_csv);
    cfg.apply(cmd, "chunks", chunks);
    cfg.apply(cmd, "margin", margin);
    cfg.apply(cmd, "schedule", schedule_csv);
    cfg.apply(cmd, "baseline", baseline_name);
    cfg.apply(cmd, "permutations", permutations);
    cfg.apply(cmd, "samples", samples);
    cfg.apply(cmd, "score-target", target_name);
    cfg.apply(cmd, "auc-mode", auc_mode);
    cfg.apply(cmd, "fit-stats-on", fit_stats_on);
    cfg.apply(cmd, "train", train_dir);
    cfg.apply(cmd, "limit", limit);
    cfg.apply(cmd, "threads", threads);
    cfg.apply(cmd, "out", out_dir);
    seed = resolve_seed(cmd, cfg, seed);

    auto model = tsxb::load_model(model_path);
    auto [ds, gt] = load_sliced(dataset_dir, limit);

    std::optional<tsxb::MaskStats> stats_override;
    if (fit_stats_on == "train") {
        if (train_dir.empty()) {
            throw tsxb::ConfigError("--fit-stats-on train requires --train dataset directory");
        }
        auto [train, g2] = tsxb::load_dataset(train_dir);
        (void)g2;
        stats_override = tsxb::fit_stats(train);
    } else if (fit_stats_on != "test") {
        throw tsxb::ConfigError("--fit-stats-on must be 'test' or 'train'");
    }

    tsxb::QuantileSchedule schedule = tsxb::QuantileSchedule::default_schedule();
    if (!schedule_csv.empty()) {
        schedule.k.clear();
        for (const auto& tok : split_csv(schedule_csv)) schedule.k.push_back(std::stod(tok));
    }

    tsxb::EvalOptions opt;
    opt.margin = margin;
    opt.seed = seed;
    opt.threads = threads;
    opt.attribution_baseline = parse_one_mask(baseline_name);
    opt.n_permutations = permutations;
    opt.n_samples = samples;
    opt.target = parse_target(target_name);
    opt.clip_sbar = clip_sbar;
    opt.per_method_filter = per_method_filter;
    if (auc_mode == "extend") {
        opt.auc_mode = tsxb::AucMode::ExtendToOne;
    } else if (auc_mode == "normalize") {
        opt.auc_mode = tsxb::AucMode::NormalizeToMaxN;
    } else {
        throw tsxb::ConfigError("auc-mode must be 'extend' or 'normalize'");
    }

    auto report = tsxb::evaluate_suite(*model, ds, gt ? &*gt : nullptr,
                                       parse_methods(methods_csv), parse_masks(masks_csv),
                                       build_chunk_specs(chunks, pointwise, cross_channel, ds.l()),
                                       schedule, opt,
                                       stats_override ? &*stats_override : nullptr);
    tsxb::write_all_outputs(report, out_dir);

    std::printf("clean accuracy %.4f over %d instances\n", report.clean_accuracy,
                report.n_instances);
    for (const auto& cf : report.filters) {
        for (const auto& e : cf.filter.entries) {
            std::printf("mask %-16s (%s): best %.4f vs random*%.2f %.4f -> %s\n",
                        tsxb::mask_name(e.mask), cf.chunk.c_str(), e.best_auc_top, 1.0 + margin,
                        (1.0 + margin) * e.random_auc_top, e.kept ? "kept" : "discarded");
        }
        if (cf.filter.flat_rank) {
            std::printf("flat rank for chunk %s: every mask discarded\n", cf.chunk.c_str());
        }
    }
    for (const auto& row : report.rows) {
        std::printf("%-20s %-5s", row.method.c_str(), row.chunk.c_str());
        if (row.aggregate) {
            std::printf(" auc_top=%.4f f1s=%.4f", row.aggregate->auc_top, row.aggregate->f1s);
        } else {
            std::printf(" auc_top=  n/a f1s=  n/a");
        }
        if (row.gt) std::printf(" ap=%.4f roc=%.4f", row.gt->ap, row.gt->roc_auc);
        std::printf(" runtime=%.2fs\n", row.runtime_s);
    }
    std::printf("outputs in %s\n", out_dir.c_str());
    return 0;
}

int cmd_gt_eval(const CLI::App* cmd, const ConfigFile& cfg, std::string dataset_dir,
                std::vector<std::string> saliency_dirs, int limit, std::string out_path) {
    cfg.apply(cmd, "dataset", dataset_dir);
    cfg.apply(cmd, "saliency", saliency_dirs);
    cfg.apply(cmd, "limit", limit);
    cfg.apply(cmd, "out", out_path);

    auto [ds, gt] = load_sliced(dataset_dir, limit);
    if (!gt) throw tsxb::ConfigError("dataset has no ground_truth payload: " + dataset_dir);

    std::ofstream out;
    if (!out_path.empty()) {
        out.open(out_path, std::ios::trunc);
        out << "method,ap,roc,skipped\n";
    }
    for (const auto& dir : saliency_dirs) {
        auto saliency = tsxb::load_saliency(dir);
        if (saliency.values.n > ds.n()) {
            saliency.values = [&] {
                tsxb::Tensor3 t(ds.n(), saliency.values.d, saliency.values.l);
                std::copy_n(saliency.values.v.begin(), t.v.size(), t.v.begin());
                return t;
            }();
        }
        auto normalized = tsxb::normalize_saliency(saliency);
        auto score = tsxb::gt_metrics(normalized, *gt);
        std::printf("%s ap=%.6f roc=%.6f skipped=%d\n", saliency.method.c_str(), score.ap,
                    score.roc_auc, score.skipped_instances);
        if (out.is_open()) {
            out << saliency.method << "," << score.ap << "," << score.roc_auc << ","
                << score.skipped_instances << "\n";
        }
    }
    return 0;
}

int cmd_channels(const CLI::App* cmd, const ConfigFile& cfg, std::string dataset_dir,
                 std::vector<std::string> saliency_dirs, int select_k, bool retrain, bool raw,
                 std::string train_dir, std::string model_kind, int kernels, double lambda,
                 int limit, std::uint64_t seed, int threads, std::string out_dir) {
    cfg.apply(cmd, "dataset", dataset_dir);
    cfg.apply(cmd, "saliency", saliency_dirs);
    cfg.apply(cmd, "select", select_k);
    cfg.apply(cmd, "train", train_dir);
    cfg.apply(cmd, "model", model_kind);
    cfg.apply(cmd, "kernels", kernels);
    cfg.apply(cmd, "lambda", lambda);
    cfg.apply(cmd, "limit", limit);
    cfg.apply(cmd, "threads", threads);
    cfg.apply(cmd, "out", out_dir);
    seed = resolve_seed(cmd, cfg, seed);

    auto [ds, gt] = load_sliced(dataset_dir, limit);
    (void)gt;
    if (saliency_dirs.empty()) throw tsxb::ConfigError("at least one --saliency is required");

    std::vector<tsxb::ChannelImportance> importances;
    for (const auto& dir : saliency_dirs) {
        auto saliency = tsxb::load_saliency(dir);
        if (saliency.values.n > ds.n()) {
            tsxb::Tensor3 t(ds.n(), saliency.values.d, saliency.values.l);
            std::copy_n(saliency.values.v.begin(), t.v.size(), t.v.begin());
            saliency.values = std::move(t);
        }
        if (raw) {
            importances.push_back(tsxb::channel_importance(saliency, ds, /*allow_raw=*/true));
        } else {
            auto normalized = tsxb::normalize_saliency(saliency);
            importances.push_back(tsxb::channel_importance(normalized, ds));
        }
    }

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "channels.csv");
        out << "channel";
        for (const auto& imp : importances) out << ",r_" << imp.method << ",rank_" << imp.method;
        out << "\n";
        std::vector<std::vector<int>> positions;
        for (const auto& imp : importances) {
            auto ranking = tsxb::rank_channels(imp.r);
            std::vector<int> pos(imp.r.size());
            for (std::size_t rank = 0; rank < ranking.size(); ++rank) {
                pos[static_cast<std::size_t>(ranking[rank])] = static_cast<int>(rank);
            }
            positions.push_back(std::move(pos));
        }
        for (int c = 0; c < ds.d(); ++c) {
            out << c;
            for (std::size_t m = 0; m < importances.size(); ++m) {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.9g", importances[m].r[static_cast<std::size_t>(c)]);
                out << "," << buf << "," << positions[m][static_cast<std::size_t>(c)];
            }
            out << "\n";
        }
    }
    for (const auto& imp : importances) {
        std::printf("%s ranking:", imp.method.c_str());
        for (int c : tsxb::rank_channels(imp.r)) std::printf(" %d", c);
        std::printf("\n");
    }

    if (select_k > 0 || retrain) {
        if (select_k < 1 || select_k > ds.d()) {
            throw tsxb::ConfigError("--select must be in [1, " + std::to_string(ds.d()) + "]");
        }
        const auto& imp = importances.front();
        json selection{{"method", imp.method},
                       {"ranking", tsxb::rank_channels(imp.r)},
                       {"selected", tsxb::select_top(imp.r, select_k)}};
        if (retrain) {
            if (train_dir.empty()) {
                throw tsxb::ConfigError("--retrain requires --train dataset directory");
            }
            auto [train, g2] = tsxb::load_dataset(train_dir);
            (void)g2;
            tsxb::TrainerFn trainer = [&](const tsxb::MtsDataset& sub) {
                std::unique_ptr<tsxb::Classifier> m;
                if (model_kind == "tabular") {
                    m = std::make_unique<tsxb::TabularRidgeModel>(tsxb::train_tabular(sub, lambda));
                } else if (model_kind == "kernel") {
                    m = std::make_unique<tsxb::RandomKernelModel>(
                        tsxb::train_random_kernel(sub, kernels, seed, threads));
                } else {
                    throw tsxb::ConfigError("unknown model '" + model_kind + "'");
                }
                return m;
            };
            std::vector<int> ks{select_k};
            auto study = tsxb::selection_study(train, ds, imp.r, ks, trainer);
            selection["accuracy_before"] = study.baseline_accuracy;
            selection["accuracy_after"] = study.entries[0].accuracy;
            std::printf("accuracy before=%.4f after(top-%d)=%.4f\n", study.baseline_accuracy,
                        select_k, study.entries[0].accuracy);
        }
        std::ofstream sel(fs::path(out_dir) / "selection.json");
        sel << selection.dump(2) << "\n";
    }
    return 0;
}

int cmd_report(const CLI::App* cmd, const ConfigFile& cfg, std::string report_path,
               std::string out_dir) {
    cfg.apply(cmd, "report", report_path);
    cfg.apply(cmd, "out", out_dir);
    auto report = tsxb::load_report_json(report_path);
    tsxb::write_all_outputs(report, out_dir);
    std::printf("re-emitted %zu rows into %s\n", report.rows.size(), out_dir.c_str());
    return 0;
}

int cmd_import_csv(const CLI::App* cmd, const ConfigFile& cfg, std::string csv_path,
                   std::string out_dir, std::string name, std::string split) {
    cfg.apply(cmd, "csv", csv_path);
    cfg.apply(cmd, "out", out_dir);
    cfg.apply(cmd, "name", name);
    cfg.apply(cmd, "split", split);
    if (csv_path.empty()) throw tsxb::ConfigError("--csv path is required");
    auto ds = tsxb::import_csv(csv_path, name);
    if (split == "test") {
        ds.split = tsxb::Split::Test;
    } else if (split != "train") {
        throw tsxb::ConfigError("--split must be 'train' or 'test'");
    }
    auto violations = tsxb::validate(ds);
    for (const auto& v : violations) std::fprintf(stderr, "warning: %s\n", v.c_str());
    tsxb::save_dataset(ds, nullptr, out_dir);
    std::printf("imported %dx%dx%d (%d classes) -> %s\n", ds.n(), ds.d(), ds.l(), ds.n_classes,
                out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"perturbation-based saliency maps for time series classifiers: "
                 "generation, attribution, evaluation, channel selection"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");

    // gen-synth ------------------------------------------------------------
    auto* gen = app.add_subcommand("gen-synth", "generate the synthetic benchmark dataset");
    std::string gen_out = "synth";
    tsxb::SynthConfig synth;
    std::uint64_t gen_seed = 0;
    int gen_threads = 1;
    gen->add_option("--out", gen_out, "output directory (train/ and test/ inside)");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--n-train", synth.n_train, "training instances");
    gen->add_option("--n-test", synth.n_test, "test instances (balanced, even)");
    gen->add_option("--threshold", synth.label_threshold, "label threshold on f1+f2");
    gen->add_option("--n-channels", synth.n_channels, "total channels");
    gen->add_option("--length", synth.length, "series length");
    gen->add_option("--window-len", synth.window_len, "discriminative window length");
    gen->add_option("--square-prob", synth.square_wave_prob, "square wave probability");
    gen->add_option("--extra-channels", synth.extra_nondisc_channels,
                    "trailing channels excluded from the discriminative pair");
    gen->add_option("--threads", gen_threads, "worker threads");

    // train ------------------------------------------------------------------
    auto* train = app.add_subcommand("train", "train a classifier on a dataset directory");
    std::string train_dir, train_test_dir, train_model = "kernel", train_out = "model.tsxb";
    double train_lambda = 1.0;
    int train_kernels = 2000;
    std::uint64_t train_seed = 0;
    int train_threads = 1;
    train->add_option("--train", train_dir, "training dataset directory");
    train->add_option("--test", train_test_dir, "optional test dataset directory");
    train->add_option("--model", train_model, "tabular | kernel");
    train->add_option("--lambda", train_lambda, "ridge penalty (tabular)");
    train->add_option("--kernels", train_kernels, "kernel count (kernel model)");
    train->add_option("--seed", train_seed, "rng seed");
    train->add_option("--threads", train_threads, "worker threads");
    train->add_option("--out", train_out, "model file path");

    // explain ----------------------------------------------------------------
    auto* explain = app.add_subcommand("explain", "compute saliency maps for a dataset");
    std::string ex_model, ex_dataset, ex_method = "feature_ablation", ex_baseline = "zeros";
    std::string ex_out = "saliency";
    std::vector<int> ex_chunks;
    bool ex_pointwise = false, ex_cross = false;
    int ex_perms = 25, ex_samples = 0, ex_limit = 0, ex_threads = 1;
    std::uint64_t ex_seed = 0;
    explain->add_option("--model", ex_model, "model file");
    explain->add_option("--dataset", ex_dataset, "dataset directory");
    explain->add_option("--method", ex_method, tsxb::method_name_list());
    explain->add_option("--chunks", ex_chunks, "chunk counts per channel (e.g. 5 10 15 20)");
    explain->add_flag("--pointwise", ex_pointwise, "also run point-wise (every point a group)");
    explain->add_flag("--cross-channel", ex_cross, "chunks span all channels");
    explain->add_option("--baseline", ex_baseline, "replacement mask during attribution");
    explain->add_option("--permutations", ex_perms, "shap_sampling permutations");
    explain->add_option("--samples", ex_samples, "kernel_shap coalition samples (0 = auto)");
    explain->add_option("--limit", ex_limit, "use only the first N instances");
    explain->add_option("--seed", ex_seed, "rng seed");
    explain->add_option("--threads", ex_threads, "worker threads");
    explain->add_option("--out", ex_out, "output directory");

    // evaluate -----------------------------------------------------------------
    auto* eval = app.add_subcommand("evaluate", "run the multi-mask evaluation suite");
    std::string ev_model, ev_dataset, ev_methods = "feature_ablation";
    std::string ev_masks = "zeros,std_normal,local_mean,local_gaussian,global_mean,global_gaussian";
    std::string ev_schedule, ev_baseline = "zeros", ev_target = "predicted", ev_auc = "extend";
    std::string ev_out = "eval_out";
    std::vector<int> ev_chunks;
    bool ev_pointwise = false, ev_cross = false, ev_clip = false, ev_per_method = false;
    double ev_margin = 0.15;
    int ev_perms = 25, ev_samples = 0, ev_limit = 0, ev_threads = 1;
    std::uint64_t ev_seed = 0;
    eval->add_option("--model", ev_model, "model file");
    eval->add_option("--dataset", ev_dataset, "dataset directory");
    eval->add_option("--methods", ev_methods, "comma list; random is always added");
    eval->add_option("--masks", ev_masks, "comma list of replacement masks");
    eval->add_option("--chunks", ev_chunks, "chunk counts per channel");
    eval->add_flag("--pointwise", ev_pointwise, "also evaluate point-wise");
    eval->add_flag("--cross-channel", ev_cross, "chunks span all channels");
    eval->add_option("--margin", ev_margin, "relative mask-filter margin (0.15 = 15%)");
    eval->add_option("--schedule", ev_schedule, "comma list of quantile thresholds");
    eval->add_option("--baseline", ev_baseline, "attribution-time replacement mask");
    eval->add_option("--permutations", ev_perms, "shap_sampling permutations");
    eval->add_option("--samples", ev_samples, "kernel_shap coalition samples (0 = auto)");
    eval->add_option("--score-target", ev_target, "predicted | true");
    eval->add_option("--auc-mode", ev_auc, "extend | normalize");
    eval->add_flag("--clip-sbar", ev_clip, "clip S-bar at 0 before integrating");
    eval->add_flag("--per-method-filter", ev_per_method, "each method keeps its own mask set");
    std::string ev_fit_on = "test", ev_train;
    eval->add_option("--fit-stats-on", ev_fit_on, "fit mask statistics on: test | train");
    eval->add_option("--train", ev_train, "training dataset directory (for --fit-stats-on train)");
    eval->add_option("--limit", ev_limit, "use only the first N instances");
    eval->add_option("--seed", ev_seed, "rng seed");
    eval->add_option("--threads", ev_threads, "worker threads");
    eval->add_option("--out", ev_out, "output directory");

    // gt-eval ------------------------------------------------------------------
    auto* gte = app.add_subcommand("gt-eval", "score saliency maps against ground truth");
    std::string gte_dataset, gte_out;
    std::vector<std::string> gte_saliency;
    int gte_limit = 0;
    gte->add_option("--dataset", gte_dataset, "dataset directory with ground_truth payload");
    gte->add_option("--saliency", gte_saliency, "saliency directories")->take_all();
    gte->add_option("--limit", gte_limit, "use only the first N instances");
    gte->add_option("--out", gte_out, "optional CSV output path");

    // channels -------------------------------------------------------------------
    auto* chan = app.add_subcommand("channels", "channel importance, ranking and selection");
    std::string ch_dataset, ch_train, ch_model = "kernel", ch_out = "channels_out";
    std::vector<std::string> ch_saliency;
    int ch_select = 0, ch_kernels = 2000, ch_limit = 0, ch_threads = 1;
    double ch_lambda = 1.0;
    bool ch_retrain = false;
    std::uint64_t ch_seed = 0;
    chan->add_option("--dataset", ch_dataset, "dataset the saliency explains");
    chan->add_option("--saliency", ch_saliency, "saliency directories")->take_all();
    chan->add_option("--select", ch_select, "keep the top-k channels");
    chan->add_flag("--retrain", ch_retrain, "retrain on the selected channels");
    bool ch_raw = false;
    chan->add_flag("--raw", ch_raw, "use raw saliency values instead of normalizing");
    chan->add_option("--train", ch_train, "training dataset directory (for --retrain)");
    chan->add_option("--model", ch_model, "tabular | kernel (for --retrain)");
    chan->add_option("--kernels", ch_kernels, "kernel count (for --retrain)");
    chan->add_option("--lambda", ch_lambda, "ridge penalty (for --retrain)");
    chan->add_option("--limit", ch_limit, "use only the first N instances");
    chan->add_option("--seed", ch_seed, "rng seed");
    chan->add_option("--threads", ch_threads, "worker threads");
    chan->add_option("--out", ch_out, "output directory");

    // report ------------------------------------------------------------------
    auto* rep = app.add_subcommand("report", "re-emit CSV/curves/plots from a report.json");
    std::string rep_path = "report.json", rep_out = "report_out";
    rep->add_option("--report", rep_path, "existing report.json");
    rep->add_option("--out", rep_out, "output directory");

    // import-csv ----------------------------------------------------------------
    auto* imp = app.add_subcommand("import-csv", "convert a wide CSV into a dataset directory");
    std::string imp_csv, imp_out = "imported", imp_name = "csv", imp_split = "train";
    imp->add_option("--csv", imp_csv, "rows: instance,channel,label,v0,...,v{L-1}");
    imp->add_option("--out", imp_out, "output dataset directory");
    imp->add_option("--name", imp_name, "dataset name stored in the manifest");
    imp->add_option("--split", imp_split, "train | test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        ConfigFile cfg;
        if (!config_path.empty()) cfg.load(config_path);
        if (gen->parsed()) {
            return cmd_gen_synth(gen, cfg, gen_out, synth, gen_seed, gen_threads);
        }
        if (train->parsed()) {
            return cmd_train(train, cfg, train_dir, train_test_dir, train_model, train_out,
                             train_lambda, train_kernels, train_seed, train_threads);
        }
        if (explain->parsed()) {
            return cmd_explain(explain, cfg, ex_model, ex_dataset, ex_method, ex_chunks,
                               ex_pointwise, ex_cross, ex_baseline, ex_perms, ex_samples, ex_limit,
                               ex_seed, ex_threads, ex_out);
        }
        if (eval->parsed()) {
            return cmd_evaluate(eval, cfg, ev_model, ev_dataset, ev_methods, ev_masks, ev_chunks,
                                ev_pointwise, ev_cross, ev_margin, ev_schedule, ev_baseline,
                                ev_perms, ev_samples, ev_target, ev_auc, ev_clip, ev_per_method,
                                ev_fit_on, ev_train, ev_limit, ev_seed, ev_threads, ev_out);
        }
        if (gte->parsed()) {
            return cmd_gt_eval(gte, cfg, gte_dataset, gte_saliency, gte_limit, gte_out);
        }
        if (chan->parsed()) {
            return cmd_channels(chan, cfg, ch_dataset, ch_saliency, ch_select, ch_retrain, ch_raw,
                                ch_train, ch_model, ch_kernels, ch_lambda, ch_limit, ch_seed,
                                ch_threads, ch_out);
        }
        if (rep->parsed()) {
            return cmd_report(rep, cfg, rep_path, rep_out);
        }
        if (imp->parsed()) {
            return cmd_import_csv(imp, cfg, imp_csv, imp_out, imp_name, imp_split);
        }
    } catch (const tsxb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
