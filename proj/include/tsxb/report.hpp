#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "tsxb/common.hpp"
#include "tsxb/suite.hpp"
#include "tsxb/svg.hpp"

namespace tsxb {

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Runtime in the deterministic outputs is floored to whole seconds; the
/// full-precision wall time goes to timings.json, which is diagnostic and
/// allowed to vary between runs.
inline double runtime_floor(double seconds) { return std::floor(seconds); }

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

} // namespace detail

/// scores.csv: one row per (method, chunk, mask) plus an aggregate row per
/// (method, chunk). ap/roc are blank when no ground truth was supplied,
/// kept is 0/1 per mask and the kept-mask count on aggregate rows.
inline void write_scores_csv(const SuiteReport& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "method,chunk,mask,auc_top,auc_bottom,f1s,ap,roc,runtime_s,kept\n";
    for (const auto& row : report.rows) {
        const std::string ap = row.gt ? detail::fmt_g(row.gt->ap) : "";
        const std::string roc = row.gt ? detail::fmt_g(row.gt->roc_auc) : "";
        for (const auto& name : report.mask_names) {
            const MaskKind mask = *mask_from_name(name);
            const auto it = row.per_mask.find(mask);
            if (it == row.per_mask.end()) continue;
            const bool kept = row.aggregate && row.aggregate->kept_masks.contains(mask);
            out << row.method << "," << row.chunk << "," << name << ","
                << detail::fmt_g(it->second.auc_top) << "," << detail::fmt_g(it->second.auc_bottom)
                << "," << detail::fmt_g(it->second.f1s) << "," << ap << "," << roc << ","
                << detail::fmt_g(detail::runtime_floor(row.runtime_s)) << "," << (kept ? 1 : 0) << "\n";
        }
        if (row.aggregate) {
            out << row.method << "," << row.chunk << ",aggregate,"
                << detail::fmt_g(row.aggregate->auc_top) << ","
                << detail::fmt_g(row.aggregate->auc_bottom) << ","
                << detail::fmt_g(row.aggregate->f1s) << "," << ap << "," << roc << ","
                << detail::fmt_g(detail::runtime_floor(row.runtime_s)) << "," << row.aggregate->kept_masks.size() << "\n";
        } else {
            out << row.method << "," << row.chunk << ",aggregate,,,," << ap << "," << roc << ","
                << detail::fmt_g(detail::runtime_floor(row.runtime_s)) << ",0\n";
        }
    }
}

namespace detail {

inline nlohmann::json curve_to_json(const PerturbationCurve& curve) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : curve.samples) {
        samples.push_back({{"k", s.k},
                           {"n_top", s.n_top},
                           {"n_bottom", s.n_bottom},
                           {"s_top", s.s_top},
                           {"s_bottom", s.s_bottom},
                           {"accuracy", s.accuracy}});
    }
    return {{"mask", mask_name(curve.mask)},
            {"clean_accuracy", curve.clean_accuracy},
            {"skipped_instances", curve.skipped_instances},
            {"samples", std::move(samples)}};
}

inline PerturbationCurve curve_from_json(const nlohmann::json& j, const std::string& method) {
    PerturbationCurve curve;
    curve.method = method;
    curve.mask = *mask_from_name(j.at("mask").get<std::string>());
    curve.clean_accuracy = j.at("clean_accuracy").get<double>();
    curve.skipped_instances = j.at("skipped_instances").get<int>();
    for (const auto& js : j.at("samples")) {
        CurveSample s;
        s.k = js.at("k").get<double>();
        s.n_top = js.at("n_top").get<double>();
        s.n_bottom = js.at("n_bottom").get<double>();
        s.s_top = js.at("s_top").get<double>();
        s.s_bottom = js.at("s_bottom").get<double>();
        s.accuracy = js.at("accuracy").get<double>();
        curve.samples.push_back(s);
    }
    return curve;
}

} // namespace detail

inline nlohmann::json report_to_json(const SuiteReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json per_mask = nlohmann::json::object();
        for (const auto& [mask, score] : row.per_mask) {
            per_mask[mask_name(mask)] = {{"auc_top", score.auc_top},
                                         {"auc_bottom", score.auc_bottom},
                                         {"f1s", score.f1s}};
        }
        nlohmann::json curves = nlohmann::json::array();
        for (const auto& curve : row.curves) curves.push_back(detail::curve_to_json(curve));
        nlohmann::json jrow{{"method", row.method},
                            {"chunk", row.chunk},
                            {"runtime_s", detail::runtime_floor(row.runtime_s)},
                            {"per_mask", std::move(per_mask)},
                            {"curves", std::move(curves)}};
        if (row.gt) {
            jrow["gt"] = {{"ap", row.gt->ap},
                          {"roc_auc", row.gt->roc_auc},
                          {"skipped_instances", row.gt->skipped_instances}};
        }
        if (row.aggregate) {
            nlohmann::json kept = nlohmann::json::array();
            for (MaskKind mask : row.aggregate->kept_masks) kept.push_back(mask_name(mask));
            jrow["aggregate"] = {{"auc_top", row.aggregate->auc_top},
                                 {"auc_bottom", row.aggregate->auc_bottom},
                                 {"f1s", row.aggregate->f1s},
                                 {"auc_top_stddev", row.aggregate->auc_top_stddev},
                                 {"kept_masks", std::move(kept)}};
        }
        rows.push_back(std::move(jrow));
    }

    nlohmann::json filters = nlohmann::json::array();
    for (const auto& cf : report.filters) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& e : cf.filter.entries) {
            entries.push_back({{"mask", mask_name(e.mask)},
                               {"best_auc_top", e.best_auc_top},
                               {"random_auc_top", e.random_auc_top},
                               {"kept", e.kept}});
        }
        filters.push_back({{"chunk", cf.chunk},
                           {"margin", cf.filter.margin},
                           {"flat_rank", cf.filter.flat_rank},
                           {"entries", std::move(entries)}});
    }

    return {{"schema_version", 1},
            {"clean_accuracy", report.clean_accuracy},
            {"n_instances", report.n_instances},
            {"margin", report.margin},
            {"seed", report.seed},
            {"auc_mode", report.auc_mode},
            {"clip_sbar", report.clip_sbar},
            {"flat_rank", report.flat_rank},
            {"masks", report.mask_names},
            {"filters", std::move(filters)},
            {"rows", std::move(rows)}};
}

inline void write_report_json(const SuiteReport& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << report_to_json(report).dump(2) << "\n";
}

inline SuiteReport load_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("invalid report json: " + std::string(e.what()));
    }
    if (j.value("schema_version", -1) != 1) throw IoError("unknown report schema_version");

    SuiteReport report;
    report.clean_accuracy = j.at("clean_accuracy").get<double>();
    report.n_instances = j.at("n_instances").get<int>();
    report.margin = j.at("margin").get<double>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.auc_mode = j.at("auc_mode").get<std::string>();
    report.clip_sbar = j.at("clip_sbar").get<bool>();
    report.flat_rank = j.at("flat_rank").get<bool>();
    report.mask_names = j.at("masks").get<std::vector<std::string>>();

    for (const auto& jf : j.at("filters")) {
        ChunkFilter cf;
        cf.chunk = jf.at("chunk").get<std::string>();
        cf.filter.margin = jf.at("margin").get<double>();
        cf.filter.flat_rank = jf.at("flat_rank").get<bool>();
        for (const auto& je : jf.at("entries")) {
            MaskFilterEntry e;
            e.mask = *mask_from_name(je.at("mask").get<std::string>());
            e.best_auc_top = je.at("best_auc_top").get<double>();
            e.random_auc_top = je.at("random_auc_top").get<double>();
            e.kept = je.at("kept").get<bool>();
            cf.filter.entries.push_back(e);
        }
        report.filters.push_back(std::move(cf));
    }

    for (const auto& jr : j.at("rows")) {
        SuiteRow row;
        row.method = jr.at("method").get<std::string>();
        row.chunk = jr.at("chunk").get<std::string>();
        row.runtime_s = jr.at("runtime_s").get<double>();
        for (const auto& [name, js] : jr.at("per_mask").items()) {
            MaskScore score;
            score.auc_top = js.at("auc_top").get<double>();
            score.auc_bottom = js.at("auc_bottom").get<double>();
            score.f1s = js.at("f1s").get<double>();
            row.per_mask[*mask_from_name(name)] = score;
        }
        for (const auto& jc : jr.at("curves")) {
            row.curves.push_back(detail::curve_from_json(jc, row.method));
        }
        if (jr.contains("gt")) {
            GtScore gt;
            gt.ap = jr.at("gt").at("ap").get<double>();
            gt.roc_auc = jr.at("gt").at("roc_auc").get<double>();
            gt.skipped_instances = jr.at("gt").at("skipped_instances").get<int>();
            row.gt = gt;
        }
        if (jr.contains("aggregate")) {
            ItScore agg;
            agg.auc_top = jr.at("aggregate").at("auc_top").get<double>();
            agg.auc_bottom = jr.at("aggregate").at("auc_bottom").get<double>();
            agg.f1s = jr.at("aggregate").at("f1s").get<double>();
            agg.auc_top_stddev = jr.at("aggregate").at("auc_top_stddev").get<double>();
            for (const auto& name : jr.at("aggregate").at("kept_masks")) {
                agg.kept_masks.insert(*mask_from_name(name.get<std::string>()));
            }
            agg.per_mask = row.per_mask;
            row.aggregate = std::move(agg);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

/// curves/<method>_<chunk>_<mask>.csv, one line per threshold.
inline void write_curves(const SuiteReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& row : report.rows) {
        for (const auto& curve : row.curves) {
            const auto path =
                dir / (row.method + "_" + row.chunk + "_" + mask_name(curve.mask) + ".csv");
            auto out = detail::open_out(path);
            out << "k,n_tilde,s_top,s_bottom,accuracy,n_tilde_bottom\n";
            for (const auto& s : curve.samples) {
                out << detail::fmt_g(s.k) << "," << detail::fmt_g(s.n_top) << ","
                    << detail::fmt_g(s.s_top) << "," << detail::fmt_g(s.s_bottom) << ","
                    << detail::fmt_g(s.accuracy) << "," << detail::fmt_g(s.n_bottom) << "\n";
            }
        }
    }
}

/// plots/accuracy_vs_n_<chunk>_<mask>.svg, one line per method.
inline void write_svg_plots(const SuiteReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::set<std::string> chunks;
    for (const auto& row : report.rows) chunks.insert(row.chunk);
    for (const auto& chunk : chunks) {
        for (const auto& name : report.mask_names) {
            SvgChart chart;
            chart.title = "accuracy vs corrupted fraction (" + name + ", " + chunk + ")";
            chart.x_label = "replaced fraction of points";
            chart.y_label = "accuracy";
            for (const auto& row : report.rows) {
                if (row.chunk != chunk) continue;
                for (const auto& curve : row.curves) {
                    if (std::string(mask_name(curve.mask)) != name) continue;
                    SvgSeries series;
                    series.label = row.method;
                    series.points.emplace_back(0.0, curve.clean_accuracy);
                    for (const auto& s : curve.samples) {
                        series.points.emplace_back(s.n_top, s.accuracy);
                    }
                    chart.series.push_back(std::move(series));
                }
            }
            if (chart.series.empty()) continue;
            write_svg_chart(chart, dir / ("accuracy_vs_n_" + chunk + "_" + name + ".svg"));
        }
    }
}

/// Full-precision wall times; unlike the other outputs this file is expected
/// to differ between runs.
inline void write_timings_json(const SuiteReport& report, const std::filesystem::path& path) {
    nlohmann::json timings = nlohmann::json::array();
    for (const auto& row : report.rows) {
        timings.push_back({{"method", row.method},
                           {"chunk", row.chunk},
                           {"attribution_seconds", row.runtime_s}});
    }
    auto out = detail::open_out(path);
    out << nlohmann::json{{"note", "diagnostic wall-clock times, not reproducible"},
                          {"timings", std::move(timings)}}
               .dump(2)
        << "\n";
}

/// Emits the full report bundle into out_dir.
inline void write_all_outputs(const SuiteReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_scores_csv(report, out_dir / "scores.csv");
    write_report_json(report, out_dir / "report.json");
    write_timings_json(report, out_dir / "timings.json");
    write_curves(report, out_dir / "curves");
    write_svg_plots(report, out_dir / "plots");
}

} // namespace tsxb
