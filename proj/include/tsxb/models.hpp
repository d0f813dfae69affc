#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"
#include "tsxb/parallel.hpp"
#include "tsxb/rng.hpp"
#include "tsxb/tensor.hpp"

namespace tsxb {

/// Which class probability serves as the score S(X) that perturbation
/// methods track: the class the model predicts on the clean input (default),
/// or the labeled class.
enum class ScoreTarget { PredictedClass, TrueClass };

/// Black-box probabilistic classifier over fixed-shape series.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual int n_classes() const = 0;
    virtual int channels() const = 0;
    virtual int length() const = 0;

    /// instance is a d*L buffer (channel-major); probs_out has n_classes slots.
    virtual void predict_proba_one(std::span<const double> instance,
                                   std::span<double> probs_out) const = 0;

    /// Row-stochastic N x C matrix.
    virtual Matrix predict_proba(const Tensor3& batch) const {
        if (batch.d != channels() || batch.l != length()) {
            throw ValidationError("batch shape " + std::to_string(batch.d) + "x" +
                                  std::to_string(batch.l) + " does not match model " +
                                  std::to_string(channels()) + "x" + std::to_string(length()));
        }
        Matrix out(batch.n, n_classes());
        for (int i = 0; i < batch.n; ++i) {
            predict_proba_one(batch.instance(i), out.row(i));
        }
        return out;
    }
};

inline double accuracy(const Classifier& model, const MtsDataset& ds) {
    Matrix probs = model.predict_proba(ds.data);
    int correct = 0;
    for (int i = 0; i < ds.n(); ++i) {
        if (argmax(probs.row(i)) == ds.labels[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / ds.n();
}

/// Scores one d*L instance buffer; the quantity perturbation methods probe.
using ScoreFn = std::function<double(std::span<const double>)>;

/// Fixes the tracked class from the clean instance, then scores any
/// perturbed variant by that class's probability. The model reference must
/// outlive the returned function.
inline ScoreFn make_class_scorer(const Classifier& model, std::span<const double> clean,
                                 ScoreTarget target, int true_label = -1) {
    std::vector<double> probs(static_cast<std::size_t>(model.n_classes()));
    model.predict_proba_one(clean, probs);
    int cls;
    if (target == ScoreTarget::TrueClass) {
        if (true_label < 0 || true_label >= model.n_classes()) {
            throw ConfigError("true label " + std::to_string(true_label) +
                              " outside [0, " + std::to_string(model.n_classes()) + ")");
        }
        cls = true_label;
    } else {
        cls = argmax(probs);
    }
    return [&model, cls](std::span<const double> x) {
        thread_local std::vector<double> p;
        p.resize(static_cast<std::size_t>(model.n_classes()));
        model.predict_proba_one(x, p);
        return p[static_cast<std::size_t>(cls)];
    };
}

namespace detail {

inline void softmax_inplace(std::span<double> scores) {
    double mx = scores[0];
    for (double s : scores) mx = std::max(mx, s);
    double sum = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (auto& s : scores) s /= sum;
}

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// Ridge head over standardized features shared by both built-in models:
/// closed-form solve of (Z^T Z + lambda I) W = Z^T Y on centered/scaled
/// features, bias handled separately (penalized, so duplicating the data
/// is equivalent to doubling lambda; that trade is documented in the tests).
struct RidgeHead {
    int p = 0;
    int n_classes = 0;
    double lambda = 1.0;
    std::vector<double> mean;   // p
    std::vector<double> scale;  // p, 1.0 where the feature is constant
    Matrix weights;             // (p+1) x C, row 0 bias

    // prediction-time folding: score_c = offset[c] + x . folded[., c]
    std::vector<double> folded; // p x C, row-major
    std::vector<double> offset; // C

    void fold() {
        folded.assign(static_cast<std::size_t>(p) * n_classes, 0.0);
        offset.assign(static_cast<std::size_t>(n_classes), 0.0);
        for (int c = 0; c < n_classes; ++c) {
            double off = weights.at(0, c);
            for (int j = 0; j < p; ++j) {
                double w = weights.at(j + 1, c) / scale[static_cast<std::size_t>(j)];
                folded[static_cast<std::size_t>(j) * n_classes + c] = w;
                off -= mean[static_cast<std::size_t>(j)] * w;
            }
            offset[static_cast<std::size_t>(c)] = off;
        }
    }

    void score(std::span<const double> x, std::span<double> out) const {
        for (int c = 0; c < n_classes; ++c) out[static_cast<std::size_t>(c)] = offset[static_cast<std::size_t>(c)];
        for (int j = 0; j < p; ++j) {
            const double xj = x[static_cast<std::size_t>(j)];
            const double* w = folded.data() + static_cast<std::size_t>(j) * n_classes;
            for (int c = 0; c < n_classes; ++c) out[static_cast<std::size_t>(c)] += xj * w[c];
        }
    }
};

/// Fits the ridge head from a raw (unstandardized) row-major feature matrix.
/// Works off X^T X so the N x p matrix is never copied.
inline RidgeHead fit_ridge_head(const double* features, int n, int p,
                                std::span<const std::int32_t> labels, int n_classes,
                                double lambda) {
    RowMajorMap X(features, n, p);
    RidgeHead head;
    head.p = p;
    head.n_classes = n_classes;
    head.lambda = lambda;

    Eigen::VectorXd mu = X.colwise().mean();
    Eigen::VectorXd sq = (X.rowwise() - mu.transpose()).colwise().squaredNorm();
    head.mean.assign(mu.data(), mu.data() + p);
    head.scale.resize(static_cast<std::size_t>(p));
    int degenerate = 0;
    for (int j = 0; j < p; ++j) {
        double sd = std::sqrt(sq[j] / n); // population std: duplication-invariant
        if (sd < 1e-12) {
            ++degenerate;
            sd = 1.0;
        }
        head.scale[static_cast<std::size_t>(j)] = sd;
    }
    if (degenerate > 0) {
        std::fprintf(stderr, "warning: %d constant feature(s) dropped from ridge fit\n",
                     degenerate);
    }

    Eigen::VectorXd inv_scale(p);
    for (int j = 0; j < p; ++j) inv_scale[j] = 1.0 / head.scale[static_cast<std::size_t>(j)];

    // Z^T Z = D^-1 (X^T X - N mu mu^T) D^-1 avoids materializing Z.
    Eigen::MatrixXd A(p, p);
    A.setZero();
    A.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
    A.triangularView<Eigen::Upper>() = A.transpose();
    A.noalias() -= static_cast<double>(n) * mu * mu.transpose();
    A = inv_scale.asDiagonal() * A * inv_scale.asDiagonal();
    A.diagonal().array() += lambda;

    // Z^T Y = D^-1 (X^T Y - mu * class_counts^T)
    Eigen::MatrixXd XtY = Eigen::MatrixXd::Zero(p, n_classes);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes);
    for (int i = 0; i < n; ++i) {
        int c = labels[static_cast<std::size_t>(i)];
        XtY.col(c) += X.row(i).transpose();
        counts[c] += 1.0;
    }
    Eigen::MatrixXd B = inv_scale.asDiagonal() * (XtY - mu * counts.transpose());

    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(A);
    if (llt.info() != Eigen::Success) {
        throw ValidationError("ridge system not positive definite (lambda too small?)");
    }
    Eigen::MatrixXd W = llt.solve(B);

    head.weights = Matrix(p + 1, n_classes);
    for (int c = 0; c < n_classes; ++c) {
        head.weights.at(0, c) = counts[c] / (static_cast<double>(n) + lambda);
        for (int j = 0; j < p; ++j) head.weights.at(j + 1, c) = W(j, c);
    }
    head.fold();
    return head;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Tabular ridge baseline: multiclass ridge regression on one-hot targets over
// the flattened standardized series, probabilities via softmax.
// ---------------------------------------------------------------------------

class TabularRidgeModel final : public Classifier {
public:
    int d = 0, l = 0;
    detail::RidgeHead head;

    int n_classes() const override { return head.n_classes; }
    int channels() const override { return d; }
    int length() const override { return l; }

    void predict_proba_one(std::span<const double> instance,
                           std::span<double> probs_out) const override {
        if (instance.size() != static_cast<std::size_t>(d) * l) {
            throw ValidationError("instance size does not match model dimensions");
        }
        head.score(instance, probs_out);
        detail::softmax_inplace(probs_out);
    }
};

inline TabularRidgeModel train_tabular(const MtsDataset& ds, double lambda) {
    if (lambda <= 0.0) throw ConfigError("ridge penalty must be > 0");
    if (ds.n() < ds.n_classes) {
        throw ConfigError("need at least n_classes=" + std::to_string(ds.n_classes) +
                          " training instances, got " + std::to_string(ds.n()));
    }
    TabularRidgeModel m;
    m.d = ds.d();
    m.l = ds.l();
    m.head = detail::fit_ridge_head(ds.data.v.data(), ds.n(),
                                    static_cast<int>(ds.data.instance_size()), ds.labels,
                                    ds.n_classes, lambda);
    return m;
}

// ---------------------------------------------------------------------------
// Random convolution kernel classifier: K random dilated kernels over random
// channel subsets, (ppv, max) feature pair per kernel, ridge head on top.
// ---------------------------------------------------------------------------

struct ConvKernel {
    int length = 9;
    int dilation = 1;
    std::vector<int> channel_subset;
    std::vector<double> weights; // channel_subset.size() * length, centered per channel
    double bias = 0.0;
};

class RandomKernelModel final : public Classifier {
public:
    int d = 0, l = 0;
    std::uint64_t seed = 0;
    std::vector<ConvKernel> kernels;
    detail::RidgeHead head; // over 2K features

    int n_classes() const override { return head.n_classes; }
    int channels() const override { return d; }
    int length() const override { return l; }
    int n_kernels() const { return static_cast<int>(kernels.size()); }

    /// (ppv, max) per kernel; out has 2K slots.
    void compute_features(std::span<const double> instance, std::span<double> out) const {
        thread_local std::vector<double> z;
        for (std::size_t k = 0; k < kernels.size(); ++k) {
            const ConvKernel& kr = kernels[k];
            const int out_len = l - (kr.length - 1) * kr.dilation;
            z.assign(static_cast<std::size_t>(out_len), kr.bias);
            const double* w = kr.weights.data();
            for (std::size_t ci = 0; ci < kr.channel_subset.size(); ++ci) {
                const double* ch = instance.data() +
                                   static_cast<std::size_t>(kr.channel_subset[ci]) * l;
                for (int j = 0; j < kr.length; ++j) {
                    const double wj = w[ci * kr.length + j];
                    const double* src = ch + static_cast<std::size_t>(j) * kr.dilation;
                    for (int t = 0; t < out_len; ++t) z[static_cast<std::size_t>(t)] += wj * src[t];
                }
            }
            int positive = 0;
            double mx = z[0];
            for (int t = 0; t < out_len; ++t) {
                if (z[static_cast<std::size_t>(t)] > 0.0) ++positive;
                mx = std::max(mx, z[static_cast<std::size_t>(t)]);
            }
            out[2 * k] = static_cast<double>(positive) / out_len;
            out[2 * k + 1] = mx;
        }
    }

    void predict_proba_one(std::span<const double> instance,
                           std::span<double> probs_out) const override {
        if (instance.size() != static_cast<std::size_t>(d) * l) {
            throw ValidationError("instance size does not match model dimensions");
        }
        thread_local std::vector<double> feats;
        feats.resize(2 * kernels.size());
        compute_features(instance, feats);
        head.score(feats, probs_out);
        detail::softmax_inplace(probs_out);
    }
};

namespace detail {

inline std::vector<ConvKernel> sample_kernels(int d, int l, int k, const Tensor3& calib_data,
                                              Rng master) {
    constexpr int kLengthChoices[] = {7, 9, 11};
    std::vector<int> usable;
    for (int len : kLengthChoices) {
        if (len <= l) usable.push_back(len);
    }
    if (usable.empty()) {
        throw ConfigError("series length " + std::to_string(l) +
                          " shorter than minimum kernel length 7");
    }

    std::vector<ConvKernel> kernels(static_cast<std::size_t>(k));
    std::vector<double> z;
    for (int ki = 0; ki < k; ++ki) {
        Rng rng = master.derive(0x6b65726eULL, static_cast<std::uint64_t>(ki));
        ConvKernel kr;
        kr.length = usable[static_cast<std::size_t>(rng.next_below(usable.size()))];

        const double max_n_ch = std::log2(static_cast<double>(d) + 1.0);
        int n_ch = static_cast<int>(std::floor(std::exp2(rng.next_uniform(0.0, max_n_ch))));
        n_ch = std::clamp(n_ch, 1, d);
        kr.channel_subset = sample_without_replacement(d, n_ch, rng);
        std::sort(kr.channel_subset.begin(), kr.channel_subset.end());

        const double max_exp = std::log2(static_cast<double>(l - 1) / (kr.length - 1));
        kr.dilation = static_cast<int>(std::floor(std::exp2(rng.next_uniform(0.0, max_exp))));
        kr.dilation = std::max(1, kr.dilation);

        kr.weights.resize(kr.channel_subset.size() * static_cast<std::size_t>(kr.length));
        for (std::size_t ci = 0; ci < kr.channel_subset.size(); ++ci) {
            double sum = 0.0;
            for (int j = 0; j < kr.length; ++j) {
                double w = rng.next_normal();
                kr.weights[ci * kr.length + j] = w;
                sum += w;
            }
            const double mean = sum / kr.length;
            for (int j = 0; j < kr.length; ++j) kr.weights[ci * kr.length + j] -= mean;
        }

        // bias from a conv-output quantile on a random calibration instance,
        // so the ppv threshold lands inside the response range
        const int inst = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(calib_data.n)));
        const int out_len = l - (kr.length - 1) * kr.dilation;
        z.assign(static_cast<std::size_t>(out_len), 0.0);
        auto x = calib_data.instance(inst);
        for (std::size_t ci = 0; ci < kr.channel_subset.size(); ++ci) {
            const double* ch = x.data() + static_cast<std::size_t>(kr.channel_subset[ci]) * l;
            for (int j = 0; j < kr.length; ++j) {
                const double wj = kr.weights[ci * kr.length + j];
                const double* src = ch + static_cast<std::size_t>(j) * kr.dilation;
                for (int t = 0; t < out_len; ++t) z[static_cast<std::size_t>(t)] += wj * src[t];
            }
        }
        std::sort(z.begin(), z.end());
        const double q = rng.next_double();
        const auto idx = static_cast<std::size_t>(q * (out_len - 1));
        kr.bias = -z[idx];
        kernels[static_cast<std::size_t>(ki)] = std::move(kr);
    }
    return kernels;
}

} // namespace detail

/// Trains the random-kernel classifier. The head's ridge penalty is selected
/// on a seeded holdout split from a small log grid, then the head is refit on
/// the full training set.
inline RandomKernelModel train_random_kernel(const MtsDataset& ds, int k, std::uint64_t seed,
                                             int threads = 1) {
    if (k < 1) throw ConfigError("kernel count must be >= 1");
    if (ds.n() < ds.n_classes) throw ConfigError("not enough training instances");

    RandomKernelModel m;
    m.d = ds.d();
    m.l = ds.l();
    m.seed = seed;
    Rng master(seed);
    m.kernels = detail::sample_kernels(ds.d(), ds.l(), k, ds.data, master);

    const int p = 2 * k;
    std::vector<double> features(static_cast<std::size_t>(ds.n()) * p);
    parallel_for(static_cast<std::size_t>(ds.n()), threads, [&](std::size_t i) {
        m.compute_features(ds.data.instance(static_cast<int>(i)),
                           {features.data() + i * p, static_cast<std::size_t>(p)});
    });

    // lambda selection on a ~10% seeded holdout (skipped for tiny datasets)
    static constexpr double kLambdaGrid[] = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0};
    double best_lambda = 1.0;
    const int holdout = std::min(ds.n() / 10, 2000);
    if (holdout >= 20 && ds.n() - holdout >= 10 * ds.n_classes) {
        std::vector<int> order(static_cast<std::size_t>(ds.n()));
        for (int i = 0; i < ds.n(); ++i) order[static_cast<std::size_t>(i)] = i;
        Rng split_rng = master.derive(0x73706c69ULL);
        split_rng.shuffle(std::span<int>(order));

        const int n_fit = ds.n() - holdout;
        std::vector<double> fit_feats(static_cast<std::size_t>(n_fit) * p);
        std::vector<std::int32_t> fit_labels(static_cast<std::size_t>(n_fit));
        for (int i = 0; i < n_fit; ++i) {
            int src = order[static_cast<std::size_t>(i)];
            std::copy_n(features.data() + static_cast<std::size_t>(src) * p, p,
                        fit_feats.data() + static_cast<std::size_t>(i) * p);
            fit_labels[static_cast<std::size_t>(i)] = ds.labels[static_cast<std::size_t>(src)];
        }

        double best_correct = -1.0;
        std::vector<double> probs(static_cast<std::size_t>(ds.n_classes));
        for (double lambda : kLambdaGrid) {
            detail::RidgeHead head = detail::fit_ridge_head(fit_feats.data(), n_fit, p,
                                                            fit_labels, ds.n_classes, lambda);
            int correct = 0;
            for (int i = n_fit; i < ds.n(); ++i) {
                int src = order[static_cast<std::size_t>(i)];
                head.score({features.data() + static_cast<std::size_t>(src) * p,
                            static_cast<std::size_t>(p)},
                           probs);
                if (argmax(probs) == ds.labels[static_cast<std::size_t>(src)]) ++correct;
            }
            if (correct > best_correct) {
                best_correct = correct;
                best_lambda = lambda;
            }
        }
    }

    m.head = detail::fit_ridge_head(features.data(), ds.n(), p, ds.labels, ds.n_classes,
                                    best_lambda);
    return m;
}

// ---------------------------------------------------------------------------
// Model persistence: 8-byte magic, uint32 header length, JSON header with the
// integer hyperparameters, then a raw little-endian float64 payload. Keeping
// every double in the binary payload makes the round trip bit-exact.
// ---------------------------------------------------------------------------

namespace detail {

constexpr char kModelMagic[8] = {'T', 'S', 'X', 'B', 'M', 'D', 'L', '1'};
constexpr int kModelVersion = 1;

inline void write_model_file(const std::filesystem::path& path, const nlohmann::json& header,
                             const std::vector<double>& payload) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(kModelMagic, sizeof(kModelMagic));
    const std::string h = header.dump();
    const std::uint32_t hlen = static_cast<std::uint32_t>(h.size());
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(double)));
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::pair<nlohmann::json, std::vector<double>> read_model_file(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
        throw IoError("not a model file (bad magic): " + path.string());
    }
    std::uint32_t hlen = 0;
    if (!in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen))) {
        throw IoError("truncated model header: " + path.string());
    }
    std::string h(hlen, '\0');
    if (!in.read(h.data(), hlen)) throw IoError("truncated model header: " + path.string());
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(h);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model header parse error: " + std::string(e.what()));
    }
    if (header.value("version", -1) != kModelVersion) {
        throw IoError("model version mismatch: file has " +
                      std::to_string(header.value("version", -1)) + ", this build reads " +
                      std::to_string(kModelVersion));
    }
    std::vector<char> rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (rest.size() % sizeof(double) != 0) {
        throw IoError("model payload not a multiple of 8 bytes: " + path.string());
    }
    std::vector<double> payload(rest.size() / sizeof(double));
    std::memcpy(payload.data(), rest.data(), rest.size());
    return {std::move(header), std::move(payload)};
}

inline void append_head(const RidgeHead& head, std::vector<double>& payload) {
    payload.push_back(head.lambda);
    payload.insert(payload.end(), head.mean.begin(), head.mean.end());
    payload.insert(payload.end(), head.scale.begin(), head.scale.end());
    payload.insert(payload.end(), head.weights.v.begin(), head.weights.v.end());
}

inline RidgeHead consume_head(int p, int n_classes, const std::vector<double>& payload,
                              std::size_t& pos) {
    RidgeHead head;
    head.p = p;
    head.n_classes = n_classes;
    const std::size_t need = 1 + 2 * static_cast<std::size_t>(p) +
                             static_cast<std::size_t>(p + 1) * n_classes;
    if (pos + need > payload.size()) throw IoError("model payload shorter than header implies");
    head.lambda = payload[pos++];
    head.mean.assign(payload.begin() + static_cast<std::ptrdiff_t>(pos),
                     payload.begin() + static_cast<std::ptrdiff_t>(pos + p));
    pos += static_cast<std::size_t>(p);
    head.scale.assign(payload.begin() + static_cast<std::ptrdiff_t>(pos),
                      payload.begin() + static_cast<std::ptrdiff_t>(pos + p));
    pos += static_cast<std::size_t>(p);
    head.weights = Matrix(p + 1, n_classes);
    std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(pos), head.weights.v.size(),
                head.weights.v.begin());
    pos += head.weights.v.size();
    head.fold();
    return head;
}

} // namespace detail

inline void save_model(const TabularRidgeModel& m, const std::filesystem::path& path) {
    nlohmann::json header{{"version", detail::kModelVersion},
                          {"type", "tabular_ridge"},
                          {"d", m.d},
                          {"l", m.l},
                          {"n_classes", m.n_classes()}};
    std::vector<double> payload;
    detail::append_head(m.head, payload);
    detail::write_model_file(path, header, payload);
}

inline void save_model(const RandomKernelModel& m, const std::filesystem::path& path) {
    nlohmann::json kernels = nlohmann::json::array();
    for (const auto& kr : m.kernels) {
        kernels.push_back({{"len", kr.length},
                           {"dil", kr.dilation},
                           {"channels", kr.channel_subset}});
    }
    nlohmann::json header{{"version", detail::kModelVersion},
                          {"type", "random_kernel"},
                          {"d", m.d},
                          {"l", m.l},
                          {"n_classes", m.n_classes()},
                          {"seed", m.seed},
                          {"kernels", std::move(kernels)}};
    std::vector<double> payload;
    for (const auto& kr : m.kernels) {
        payload.insert(payload.end(), kr.weights.begin(), kr.weights.end());
        payload.push_back(kr.bias);
    }
    detail::append_head(m.head, payload);
    detail::write_model_file(path, header, payload);
}

inline std::unique_ptr<Classifier> load_model(const std::filesystem::path& path) {
    auto [header, payload] = detail::read_model_file(path);
    const std::string type = header.value("type", "");
    std::size_t pos = 0;
    try {
        if (type == "tabular_ridge") {
            auto m = std::make_unique<TabularRidgeModel>();
            m->d = header.at("d").get<int>();
            m->l = header.at("l").get<int>();
            const int c = header.at("n_classes").get<int>();
            m->head = detail::consume_head(m->d * m->l, c, payload, pos);
            return m;
        }
        if (type == "random_kernel") {
            auto m = std::make_unique<RandomKernelModel>();
            m->d = header.at("d").get<int>();
            m->l = header.at("l").get<int>();
            m->seed = header.at("seed").get<std::uint64_t>();
            const int c = header.at("n_classes").get<int>();
            for (const auto& jk : header.at("kernels")) {
                ConvKernel kr;
                kr.length = jk.at("len").get<int>();
                kr.dilation = jk.at("dil").get<int>();
                kr.channel_subset = jk.at("channels").get<std::vector<int>>();
                const std::size_t n_weights = kr.channel_subset.size() *
                                              static_cast<std::size_t>(kr.length);
                if (pos + n_weights + 1 > payload.size()) {
                    throw IoError("model payload shorter than header implies");
                }
                kr.weights.assign(payload.begin() + static_cast<std::ptrdiff_t>(pos),
                                  payload.begin() + static_cast<std::ptrdiff_t>(pos + n_weights));
                pos += n_weights;
                kr.bias = payload[pos++];
                m->kernels.push_back(std::move(kr));
            }
            m->head = detail::consume_head(2 * static_cast<int>(m->kernels.size()), c, payload, pos);
            return m;
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model header parse error: " + std::string(e.what()));
    }
    throw IoError("unknown model type '" + type + "' in " + path.string());
}

} // namespace tsxb
