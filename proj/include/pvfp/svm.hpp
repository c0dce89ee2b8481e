#pragma once

// Binary soft-margin SVM with an RBF kernel, trained in the dual by sequential
// minimal optimization with second-order working-set selection.
//
// Identical training points with identical labels are merged into one point
// whose box constraint is count * C. The dual objective depends on such a group
// only through the sum of its multipliers, so the merged problem has the same
// optimum and the same decision function, while the solver only sees distinct
// rows. Distinct rows are sorted, which also makes training independent of the
// input row order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <list>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "pvfp/error.hpp"

namespace pvfp {

// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const std::vector<double>& data() const noexcept { return data_; }

    void append_row(std::span<const double> r) {
        if (rows_ == 0 && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) throw Error("Matrix::append_row: width mismatch");
        data_.insert(data_.end(), r.begin(), r.end());
        ++rows_;
    }

    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t k = 0; k < idx.size(); ++k) std::copy_n(row(idx[k]).begin(), cols_, out.row(k).begin());
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct KernelGamma {
    enum class Mode { Scale, Fixed };
    Mode mode = Mode::Scale;
    double value = 0.0;

    // 1 / (num_features * variance of all training entries)
    static KernelGamma scale() { return {}; }
    static KernelGamma fixed(double g) { return {Mode::Fixed, g}; }
};

struct ClassifierConfig {
    double C = 1.0;
    KernelGamma gamma;
    double tol = 1e-3;
    // Iteration cap is max_passes * max(distinct rows, 100).
    int max_passes = 100;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(C > 0.0)) throw ConfigError("classifier C must be positive");
        if (gamma.mode == KernelGamma::Mode::Fixed && !(gamma.value > 0.0))
            throw ConfigError("fixed kernel gamma must be positive");
        if (!(tol > 0.0)) throw ConfigError("classifier tolerance must be positive");
        if (max_passes < 1) throw ConfigError("max_passes must be at least 1");
    }
};

// Any f: R^|S| -> {1, 2}.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual int predict(std::span<const double> x) const = 0;

    std::vector<int> predict(const Matrix& X) const {
        std::vector<int> out(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict(X.row(i));
        return out;
    }
};

class Trainer {
public:
    virtual ~Trainer() = default;
    // labels are 1 or 2; both classes must be present.
    virtual std::unique_ptr<Classifier> train(const Matrix& X, std::span<const int> labels) const = 0;
};

struct SvmDiagnostics {
    std::size_t distinct_points = 0;
    std::size_t iterations = 0;
    std::size_t support_vectors = 0;
    // Maximal KKT violation m(alpha) - M(alpha) at exit.
    double kkt_gap = 0.0;
    bool converged = false;
    double gamma = 0.0;
};

class RbfSvm final : public Classifier {
public:
    // sum_i alpha_i y_i k(x_i, x) - rho; positive means class 1.
    double decision(std::span<const double> x) const {
        double f = -rho_;
        for (std::size_t s = 0; s < coef_.size(); ++s) {
            const auto sv = support_.row(s);
            double d2 = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double t = sv[k] - x[k];
                d2 += t * t;
            }
            f += coef_[s] * std::exp(-gamma_ * d2);
        }
        return f;
    }

    using Classifier::predict;
    int predict(std::span<const double> x) const override { return decision(x) > 0.0 ? 1 : 2; }

    const SvmDiagnostics& diagnostics() const noexcept { return diag_; }
    double rho() const noexcept { return rho_; }

private:
    friend RbfSvm train_rbf_svm(const Matrix&, std::span<const int>, const ClassifierConfig&);
    Matrix support_;
    std::vector<double> coef_;
    double rho_ = 0.0;
    double gamma_ = 1.0;
    SvmDiagnostics diag_;
};

namespace detail {

// LRU cache of Q columns under a byte budget (at least two columns).
class ColumnCache {
public:
    using Fill = std::function<void(std::size_t, std::vector<double>&)>;

    ColumnCache(std::size_t l, std::size_t budget_bytes, Fill fill)
        : l_(l), fill_(std::move(fill)), columns_(l), where_(l), cached_(l, false) {
        const std::size_t per = std::max<std::size_t>(l * sizeof(double), 1);
        capacity_ = std::max<std::size_t>(2, budget_bytes / per);
    }

    const std::vector<double>& get(std::size_t i) {
        if (cached_[i]) {
            lru_.splice(lru_.begin(), lru_, where_[i]);
            return columns_[i];
        }
        if (lru_.size() >= capacity_) {
            const std::size_t victim = lru_.back();
            lru_.pop_back();
            cached_[victim] = false;
            std::vector<double>().swap(columns_[victim]);
        }
        columns_[i].resize(l_);
        fill_(i, columns_[i]);
        lru_.push_front(i);
        where_[i] = lru_.begin();
        cached_[i] = true;
        return columns_[i];
    }

private:
    std::size_t l_;
    Fill fill_;
    std::size_t capacity_ = 2;
    std::vector<std::vector<double>> columns_;
    std::list<std::size_t> lru_;
    std::vector<std::list<std::size_t>::iterator> where_;
    std::vector<bool> cached_;
};

}  // namespace detail

inline double resolve_gamma(const Matrix& X, const KernelGamma& g) {
    if (g.mode == KernelGamma::Mode::Fixed) return g.value;
    const auto& v = X.data();
    if (v.empty() || X.cols() == 0) return 1.0;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double var = ss / static_cast<double>(v.size());
    return var > 0.0 ? 1.0 / (static_cast<double>(X.cols()) * var) : 1.0;
}

inline RbfSvm train_rbf_svm(const Matrix& X, std::span<const int> labels, const ClassifierConfig& cfg) {
    cfg.validate();
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    if (labels.size() != n) throw Error("train: label count does not match row count");
    std::size_t n1 = 0, n2 = 0;
    for (int lab : labels) {
        if (lab == 1) ++n1;
        else if (lab == 2) ++n2;
        else throw Error("train: labels must be 1 or 2");
    }
    if (n1 == 0 || n2 == 0) throw DegenerateError("degenerate training set: a single class");
    for (double v : X.data())
        if (std::isnan(v)) throw Error("train: NaN feature");

    RbfSvm model;
    model.gamma_ = resolve_gamma(X, cfg.gamma);
    const double gamma = model.gamma_;

    // Merge duplicates: sort by (row, label), then group.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto row_less = [&](std::size_t a, std::size_t b) {
        const auto ra = X.row(a), rb = X.row(b);
        for (std::size_t k = 0; k < d; ++k) {
            if (ra[k] < rb[k]) return true;
            if (rb[k] < ra[k]) return false;
        }
        return labels[a] < labels[b];
    };
    std::sort(order.begin(), order.end(), row_less);
    Matrix U;
    std::vector<double> y;
    std::vector<double> cap;
    for (std::size_t k = 0; k < n;) {
        std::size_t m = k + 1;
        while (m < n && !row_less(order[k], order[m])) ++m;
        U.append_row(X.row(order[k]));
        y.push_back(labels[order[k]] == 1 ? 1.0 : -1.0);
        cap.push_back(cfg.C * static_cast<double>(m - k));
        k = m;
    }
    const std::size_t l = y.size();

    auto kernel = [&](std::size_t i, std::size_t j) {
        if (i == j) return 1.0;
        const auto a = U.row(i), b = U.row(j);
        double d2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double t = a[k] - b[k];
            d2 += t * t;
        }
        return std::exp(-gamma * d2);
    };
    detail::ColumnCache cache(l, std::size_t{256} << 20, [&](std::size_t i, std::vector<double>& col) {
        for (std::size_t t = 0; t < l; ++t) col[t] = y[i] * y[t] * kernel(i, t);
    });

    constexpr double kTau = 1e-12;
    std::vector<double> alpha(l, 0.0);
    std::vector<double> G(l, -1.0);
    auto at_upper = [&](std::size_t t) { return alpha[t] >= cap[t]; };
    auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
    const std::size_t max_iter = static_cast<std::size_t>(cfg.max_passes) * std::max<std::size_t>(l, 100);
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::size_t iter = 0;
    double gap = inf;
    bool converged = false;
    for (;;) {
        double gmax = -inf;
        std::size_t i = l;
        for (std::size_t t = 0; t < l; ++t) {
            if (y[t] > 0) {
                if (!at_upper(t) && -G[t] > gmax) {
                    gmax = -G[t];
                    i = t;
                }
            } else if (!at_lower(t) && G[t] > gmax) {
                gmax = G[t];
                i = t;
            }
        }
        if (i == l) {
            gap = 0.0;
            converged = true;
            break;
        }
        const std::vector<double>& Qi = cache.get(i);
        double gmax2 = -inf;
        double best = inf;
        std::size_t j = l;
        for (std::size_t t = 0; t < l; ++t) {
            if (y[t] > 0) {
                if (at_lower(t)) continue;
                const double grad_diff = gmax + G[t];
                gmax2 = std::max(gmax2, G[t]);
                if (grad_diff > 0) {
                    double quad = 2.0 - 2.0 * y[i] * Qi[t];
                    if (quad <= 0) quad = kTau;
                    const double obj = -grad_diff * grad_diff / quad;
                    if (obj < best) {
                        best = obj;
                        j = t;
                    }
                }
            } else {
                if (at_upper(t)) continue;
                const double grad_diff = gmax - G[t];
                gmax2 = std::max(gmax2, -G[t]);
                if (grad_diff > 0) {
                    double quad = 2.0 + 2.0 * y[i] * Qi[t];
                    if (quad <= 0) quad = kTau;
                    const double obj = -grad_diff * grad_diff / quad;
                    if (obj < best) {
                        best = obj;
                        j = t;
                    }
                }
            }
        }
        gap = gmax + gmax2;
        if (gap < cfg.tol || j == l) {
            converged = true;
            break;
        }
        if (iter >= max_iter) break;
        ++iter;

        // Qi stays cached: it is the most recent entry and capacity >= 2.
        const std::vector<double>& Qj = cache.get(j);
        const double Ci = cap[i], Cj = cap[j];
        const double old_i = alpha[i], old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = 2.0 + 2.0 * Qi[j];
            if (quad <= 0) quad = kTau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > Ci - Cj) {
                if (alpha[i] > Ci) {
                    alpha[i] = Ci;
                    alpha[j] = Ci - diff;
                }
            } else if (alpha[j] > Cj) {
                alpha[j] = Cj;
                alpha[i] = Cj + diff;
            }
        } else {
            double quad = 2.0 - 2.0 * Qi[j];
            if (quad <= 0) quad = kTau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > Ci) {
                if (alpha[i] > Ci) {
                    alpha[i] = Ci;
                    alpha[j] = sum - Ci;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > Cj) {
                if (alpha[j] > Cj) {
                    alpha[j] = Cj;
                    alpha[i] = sum - Cj;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < l; ++t) G[t] += Qi[t] * di + Qj[t] * dj;
    }

    // rho: mean of y*G over free multipliers, or the midpoint of the feasible range.
    double ub = inf, lb = -inf, sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < l; ++t) {
        const double yg = y[t] * G[t];
        if (at_upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (at_lower(t)) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    model.rho_ = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    for (std::size_t t = 0; t < l; ++t) {
        if (alpha[t] <= 0.0) continue;
        model.support_.append_row(U.row(t));
        model.coef_.push_back(y[t] * alpha[t]);
    }
    model.diag_ = SvmDiagnostics{l, iter, model.coef_.size(), gap, converged, gamma};
    return model;
}

class RbfSvmTrainer final : public Trainer {
public:
    explicit RbfSvmTrainer(ClassifierConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    std::unique_ptr<Classifier> train(const Matrix& X, std::span<const int> labels) const override {
        return std::make_unique<RbfSvm>(train_rbf_svm(X, labels, cfg_));
    }

private:
    ClassifierConfig cfg_;
};

}  // namespace pvfp
