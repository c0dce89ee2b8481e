#pragma once

// Fold scoring (per-class F1, class-weighted F1 and its constant-prediction
// baseline), stratified sampling and stratified k-fold cross-validation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pvfp/error.hpp"
#include "pvfp/random.hpp"
#include "pvfp/svm.hpp"

namespace pvfp {

struct FoldScore {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double f1_class1 = 0.0;
    double f1_class2 = 0.0;
    double weighted_f1 = 0.0;
    double baseline_f1 = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

// F1 = 2tp / (2tp + fp + fn), defined as 0 when the denominator is 0.
inline double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
    const std::size_t den = 2 * tp + fp + fn;
    return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

// Expected weighted F1 of the two constant predictors:
// n1/(n1+n2) * 2n1/(n2+2n1) + n2/(n1+n2) * 2n2/(n1+2n2).
inline double worst_case_f1(std::size_t n1, std::size_t n2) {
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    if (a + b == 0.0) return 0.0;
    return (a / (a + b)) * (2.0 * a / (b + 2.0 * a)) + (b / (a + b)) * (2.0 * b / (a + 2.0 * b));
}

inline FoldScore score_fold(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw Error("score_fold: size mismatch");
    std::size_t tp1 = 0, fp1 = 0, fn1 = 0, tp2 = 0, fp2 = 0, fn2 = 0;
    FoldScore s;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], p = predicted[i];
        (t == 1 ? s.n1 : s.n2)++;
        if (t == 1 && p == 1) ++tp1;
        if (t != 1 && p == 1) ++fp1;
        if (t == 1 && p != 1) ++fn1;
        if (t == 2 && p == 2) ++tp2;
        if (t != 2 && p == 2) ++fp2;
        if (t == 2 && p != 2) ++fn2;
    }
    const double total = static_cast<double>(s.n1 + s.n2);
    s.gamma1 = total > 0 ? static_cast<double>(s.n1) / total : 0.0;
    s.gamma2 = total > 0 ? static_cast<double>(s.n2) / total : 0.0;
    s.f1_class1 = f1_score(tp1, fp1, fn1);
    s.f1_class2 = f1_score(tp2, fp2, fn2);
    s.weighted_f1 = s.gamma1 * s.f1_class1 + s.gamma2 * s.f1_class2;
    s.baseline_f1 = worst_case_f1(s.n1, s.n2);
    return s;
}

namespace detail {

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> class_indices(std::span<const int> labels) {
    std::vector<std::size_t> c1, c2;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) c1.push_back(i);
        else if (labels[i] == 2) c2.push_back(i);
        else throw Error("labels must be 1 or 2");
    }
    return {std::move(c1), std::move(c2)};
}

}  // namespace detail

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Per class: round(count * test_fraction) test instances, at least one, and at
// least one left for training. Indices are returned sorted.
inline TrainTestSplit stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must be in (0, 1)");
    auto [c1, c2] = detail::class_indices(labels);
    if (c1.size() < 2 || c2.size() < 2) throw DegenerateError("insufficient instances: each class needs at least 2");
    Rng rng(seed);
    TrainTestSplit out;
    for (auto* cls : {&c1, &c2}) {
        rng.shuffle(*cls);
        auto k = static_cast<std::size_t>(std::llround(static_cast<double>(cls->size()) * test_fraction));
        k = std::clamp<std::size_t>(k, 1, cls->size() - 1);
        out.test.insert(out.test.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(k));
        out.train.insert(out.train.end(), cls->begin() + static_cast<std::ptrdiff_t>(k), cls->end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

// Test-index sets of k stratified folds. Each class is shuffled and dealt
// round-robin, class 2 continuing where class 1 stopped, so fold sizes differ by
// at most one and class counts per fold by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
    auto [c1, c2] = detail::class_indices(labels);
    const auto uk = static_cast<std::size_t>(k);
    if (c1.size() < uk || c2.size() < uk) throw DegenerateError("too few instances for k folds");
    Rng rng(seed);
    rng.shuffle(c1);
    rng.shuffle(c2);
    std::vector<std::vector<std::size_t>> folds(uk);
    std::size_t pos = 0;
    for (const auto* cls : {&c1, &c2})
        for (std::size_t idx : *cls) folds[pos++ % uk].push_back(idx);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

inline std::vector<FoldScore> cross_validate(const Matrix& rows, std::span<const int> labels, int k,
                                             const Trainer& trainer, std::uint64_t seed) {
    if (rows.rows() != labels.size()) throw Error("cross_validate: label count does not match row count");
    const auto folds = stratified_folds(labels, k, seed);
    std::vector<FoldScore> scores;
    scores.reserve(folds.size());
    std::vector<char> in_test(labels.size());
    for (const auto& test : folds) {
        std::fill(in_test.begin(), in_test.end(), 0);
        for (std::size_t i : test) in_test[i] = 1;
        std::vector<std::size_t> train;
        train.reserve(labels.size() - test.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (!in_test[i]) train.push_back(i);

        const Matrix Xtr = rows.select_rows(train);
        std::vector<int> ytr(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) ytr[i] = labels[train[i]];
        const auto model = trainer.train(Xtr, ytr);

        std::vector<int> truth(test.size()), pred(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            truth[i] = labels[test[i]];
            pred[i] = model->predict(rows.row(test[i]));
        }
        scores.push_back(score_fold(truth, pred));
    }
    return scores;
}

// RBF SVM with the given configuration; folds are seeded from config.seed.
inline std::vector<FoldScore> cross_validate(const Matrix& rows, std::span<const int> labels, int k,
                                             const ClassifierConfig& config) {
    return cross_validate(rows, labels, k, RbfSvmTrainer(config), config.seed);
}

}  // namespace pvfp
