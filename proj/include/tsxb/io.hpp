#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"

namespace tsxb {

constexpr int kSchemaVersion = 1;

/// Directory layout: manifest.json + raw little-endian payloads.
///   data.f64le        N*d*L float64, row-major [instance][channel][time]
///   labels.i32le      N int32 (datasets only)
///   ground_truth.u8   N*d*L uint8 (optional)
struct DatasetManifest {
    int schema_version = kSchemaVersion;
    std::string kind = "dataset"; // "dataset" | "saliency"
    int n = 0, d = 0, l = 0;
    int n_classes = 0;
    std::string byte_order = "little-endian";
    std::string dtype = "float64";
    std::string name;
    std::string split = "train";
    std::string method;     // saliency only
    bool normalized = false; // saliency only
    std::map<std::string, std::string> payload_files;
};

namespace detail {

inline void require_little_endian_host() {
    if constexpr (std::endian::native != std::endian::little) {
        throw IoError("byte-order mismatch: this build only supports little-endian hosts");
    }
}

inline void write_bytes(const std::filesystem::path& path, const void* data, std::size_t bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<char> read_bytes(const std::filesystem::path& path, std::size_t expected,
                                    const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() != expected) {
        throw IoError("payload size mismatch for " + what + ": manifest implies " +
                      std::to_string(expected) + " bytes, file " + path.string() + " holds " +
                      std::to_string(buf.size()));
    }
    return buf;
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
    nlohmann::json j{
        {"schema_version", m.schema_version},
        {"kind", m.kind},
        {"n", m.n},
        {"d", m.d},
        {"l", m.l},
        {"byte_order", m.byte_order},
        {"dtype", m.dtype},
        {"name", m.name},
        {"payload_files", m.payload_files},
    };
    if (m.kind == "dataset") {
        j["n_classes"] = m.n_classes;
        j["split"] = m.split;
    } else {
        j["method"] = m.method;
        j["normalized"] = m.normalized;
    }
    return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kSchemaVersion) {
        throw IoError("unknown schema_version " + std::to_string(m.schema_version) +
                      " (this build reads version " + std::to_string(kSchemaVersion) + ")");
    }
    m.kind = j.value("kind", "dataset");
    m.n = j.at("n").get<int>();
    m.d = j.at("d").get<int>();
    m.l = j.at("l").get<int>();
    m.byte_order = j.at("byte_order").get<std::string>();
    if (m.byte_order != "little-endian") {
        throw IoError("byte-order mismatch: manifest declares '" + m.byte_order +
                      "', expected 'little-endian'");
    }
    m.dtype = j.at("dtype").get<std::string>();
    if (m.dtype != "float64") throw IoError("unsupported dtype '" + m.dtype + "'");
    m.name = j.value("name", "");
    m.n_classes = j.value("n_classes", 0);
    m.split = j.value("split", "train");
    m.method = j.value("method", "");
    m.normalized = j.value("normalized", false);
    if (j.contains("payload_files")) {
        m.payload_files = j.at("payload_files").get<std::map<std::string, std::string>>();
    }
    return m;
}

inline nlohmann::json load_manifest_json(const std::filesystem::path& dir) {
    auto path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("invalid manifest " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace detail

inline void save_dataset(const MtsDataset& ds, const GroundTruthMask* gt,
                         const std::filesystem::path& dir) {
    detail::require_little_endian_host();
    if (gt != nullptr && (gt->n != ds.n() || gt->d != ds.d() || gt->l != ds.l())) {
        throw ValidationError("ground-truth mask shape does not match dataset");
    }
    std::filesystem::create_directories(dir);

    DatasetManifest m;
    m.kind = "dataset";
    m.n = ds.n();
    m.d = ds.d();
    m.l = ds.l();
    m.n_classes = ds.n_classes;
    m.name = ds.name;
    m.split = split_name(ds.split);
    m.payload_files["data"] = "data.f64le";
    m.payload_files["labels"] = "labels.i32le";
    if (gt != nullptr) m.payload_files["ground_truth"] = "ground_truth.u8";

    detail::write_bytes(dir / "data.f64le", ds.data.v.data(), ds.data.v.size() * sizeof(double));
    detail::write_bytes(dir / "labels.i32le", ds.labels.data(),
                        ds.labels.size() * sizeof(std::int32_t));
    if (gt != nullptr) {
        detail::write_bytes(dir / "ground_truth.u8", gt->values.data(), gt->values.size());
    }

    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot open for writing: " + (dir / "manifest.json").string());
    out << detail::manifest_to_json(m).dump(2) << "\n";
}

inline std::pair<MtsDataset, std::optional<GroundTruthMask>> load_dataset(
    const std::filesystem::path& dir) {
    detail::require_little_endian_host();
    DatasetManifest m = detail::manifest_from_json(detail::load_manifest_json(dir));
    if (m.kind != "dataset") {
        throw IoError("manifest kind '" + m.kind + "' is not a dataset: " + dir.string());
    }

    MtsDataset ds;
    ds.data = Tensor3(m.n, m.d, m.l);
    ds.n_classes = m.n_classes;
    ds.name = m.name;
    ds.split = (m.split == "test") ? Split::Test : Split::Train;

    const std::size_t cells = ds.data.size();
    auto data_bytes = detail::read_bytes(dir / m.payload_files.at("data"),
                                         cells * sizeof(double), "data");
    std::memcpy(ds.data.v.data(), data_bytes.data(), data_bytes.size());

    auto labels_path = dir / m.payload_files.at("labels");
    {
        std::ifstream in(labels_path, std::ios::binary);
        if (!in) throw IoError("cannot open: " + labels_path.string());
        std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
        if (buf.size() != static_cast<std::size_t>(m.n) * sizeof(std::int32_t)) {
            throw IoError("manifest says N=" + std::to_string(m.n) + ", labels file holds " +
                          std::to_string(buf.size() / sizeof(std::int32_t)) + " entries");
        }
        ds.labels.resize(static_cast<std::size_t>(m.n));
        std::memcpy(ds.labels.data(), buf.data(), buf.size());
    }

    std::optional<GroundTruthMask> gt;
    if (m.payload_files.contains("ground_truth")) {
        auto raw = detail::read_bytes(dir / m.payload_files.at("ground_truth"), cells,
                                      "ground_truth");
        gt.emplace(m.n, m.d, m.l);
        std::memcpy(gt->values.data(), raw.data(), raw.size());
    }
    return {std::move(ds), std::move(gt)};
}

/// Saliency reuses the dataset directory format with kind: "saliency"
/// (float64 payload only, no labels).
inline void save_saliency(const Saliency& s, const std::filesystem::path& dir) {
    detail::require_little_endian_host();
    std::filesystem::create_directories(dir);
    DatasetManifest m;
    m.kind = "saliency";
    m.n = s.values.n;
    m.d = s.values.d;
    m.l = s.values.l;
    m.method = s.method;
    m.normalized = s.normalized;
    m.payload_files["data"] = "data.f64le";
    detail::write_bytes(dir / "data.f64le", s.values.v.data(), s.values.v.size() * sizeof(double));
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot open for writing: " + (dir / "manifest.json").string());
    out << detail::manifest_to_json(m).dump(2) << "\n";
}

inline Saliency load_saliency(const std::filesystem::path& dir) {
    detail::require_little_endian_host();
    DatasetManifest m = detail::manifest_from_json(detail::load_manifest_json(dir));
    if (m.kind != "saliency") {
        throw IoError("manifest kind '" + m.kind + "' is not a saliency: " + dir.string());
    }
    Saliency s;
    s.values = Tensor3(m.n, m.d, m.l);
    s.method = m.method;
    s.normalized = m.normalized;
    auto bytes = detail::read_bytes(dir / m.payload_files.at("data"),
                                    s.values.size() * sizeof(double), "data");
    std::memcpy(s.values.v.data(), bytes.data(), bytes.size());
    return s;
}

/// Wide CSV importer for small external datasets. One row per
/// (instance, channel): instance,channel,label,v0,...,v{L-1}. No header.
inline MtsDataset import_csv(const std::filesystem::path& path, const std::string& name = "csv") {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());

    struct Row {
        int instance, channel, label;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 4) {
            throw IoError("line " + std::to_string(line_no) +
                          ": expected instance,channel,label,v0,... (got " +
                          std::to_string(cells.size()) + " cells)");
        }
        Row r;
        try {
            r.instance = std::stoi(cells[0]);
            r.channel = std::stoi(cells[1]);
            r.label = std::stoi(cells[2]);
            for (std::size_t i = 3; i < cells.size(); ++i) r.values.push_back(std::stod(cells[i]));
        } catch (const std::exception&) {
            throw IoError("line " + std::to_string(line_no) + ": cannot parse numeric cell");
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw IoError("empty CSV: " + path.string());

    int n = 0, d = 0;
    const std::size_t l = rows.front().values.size();
    for (const auto& r : rows) {
        if (r.instance < 0 || r.channel < 0) throw IoError("negative instance/channel index");
        if (r.values.size() != l) {
            throw IoError("inconsistent series length: expected " + std::to_string(l) + ", got " +
                          std::to_string(r.values.size()));
        }
        n = std::max(n, r.instance + 1);
        d = std::max(d, r.channel + 1);
    }

    MtsDataset ds;
    ds.data = Tensor3(n, d, static_cast<int>(l));
    ds.labels.assign(static_cast<std::size_t>(n), -1);
    ds.name = name;
    std::vector<bool> seen(static_cast<std::size_t>(n) * static_cast<std::size_t>(d), false);
    for (const auto& r : rows) {
        std::size_t slot = static_cast<std::size_t>(r.instance) * d + r.channel;
        if (seen[slot]) {
            throw IoError("duplicate row for instance " + std::to_string(r.instance) +
                          " channel " + std::to_string(r.channel));
        }
        seen[slot] = true;
        auto& lbl = ds.labels[static_cast<std::size_t>(r.instance)];
        if (lbl != -1 && lbl != r.label) {
            throw IoError("conflicting labels for instance " + std::to_string(r.instance));
        }
        lbl = r.label;
        for (std::size_t t = 0; t < l; ++t) {
            ds.data.at(r.instance, r.channel, static_cast<int>(t)) = r.values[t];
        }
    }
    for (std::size_t s = 0; s < seen.size(); ++s) {
        if (!seen[s]) {
            throw IoError("missing row for instance " + std::to_string(s / d) + " channel " +
                          std::to_string(s % d));
        }
    }
    std::int32_t max_label = 0;
    for (auto lbl : ds.labels) max_label = std::max(max_label, lbl);
    ds.n_classes = max_label + 1;
    return ds;
}

} // namespace tsxb
