#pragma once

// Shared test scaffolding: stub classifiers and temp directories.

#include <atomic>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>

#include "tsxb/models.hpp"

namespace tsxb::testing {

/// Classifier driven by an arbitrary probability function.
class StubClassifier final : public Classifier {
public:
    using ProbFn = std::function<void(std::span<const double>, std::span<double>)>;

    StubClassifier(int d, int l, int n_classes, ProbFn fn)
        : d_(d), l_(l), n_classes_(n_classes), fn_(std::move(fn)) {}

    int n_classes() const override { return n_classes_; }
    int channels() const override { return d_; }
    int length() const override { return l_; }
    void predict_proba_one(std::span<const double> x, std::span<double> probs) const override {
        fn_(x, probs);
    }

private:
    int d_, l_, n_classes_;
    ProbFn fn_;
};

/// Constant output regardless of input.
inline StubClassifier make_fixed_stub(int d, int l, std::vector<double> probs) {
    const int c = static_cast<int>(probs.size());
    return StubClassifier(d, l, c, [probs = std::move(probs)](auto, std::span<double> out) {
        std::copy(probs.begin(), probs.end(), out.begin());
    });
}

inline StubClassifier make_uniform_stub(int d, int l, int n_classes) {
    std::vector<double> probs(static_cast<std::size_t>(n_classes), 1.0 / n_classes);
    return make_fixed_stub(d, l, std::move(probs));
}

/// Binary stub whose class-1 probability is sigmoid(scale * w . x).
inline StubClassifier make_linear_stub(int d, int l, std::vector<double> w, double scale = 1.0) {
    return StubClassifier(d, l, 2, [w = std::move(w), scale](std::span<const double> x,
                                                             std::span<double> out) {
        double dot = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) dot += w[j] * x[j];
        const double p1 = 1.0 / (1.0 + std::exp(-scale * dot));
        out[0] = 1.0 - p1;
        out[1] = p1;
    });
}

/// Unique scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("tsxb_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

} // namespace tsxb::testing
