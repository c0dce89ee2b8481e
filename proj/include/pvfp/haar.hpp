#pragma once

// Haar basis matrices H(n) of dimension 2^n, their inverses, and the discrete
// wavelet transform w = H^-1 x / inverse x = H w.
//
// Every column of H(n) is either the all-ones column or a step of the form
// +1 on [start, start+half) and -1 on [start+half, start+2*half). The basis
// stores those descriptors, produced by the recurrence
//
//     H(n) = ( H(n-1) (x) (1, 1)^T  |  I(n-1) (x) (1, -1)^T ),   H(0) = 1,
//
// so memory is O(2^n) and entries are reproduced exactly. The inverse is
// diag(1 / col_sq_norms) * H^T; the column norms are powers of two, so every
// entry of H^-1 is an exact binary fraction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pvfp/error.hpp"

namespace pvfp {

inline constexpr int kMaxHaarExponent = 16;
// Dense materialization is limited to 4096 x 4096.
inline constexpr int kMaxDenseHaarExponent = 12;

struct TimeSeries {
    std::vector<double> values;
    std::size_t original_len = 0;
};

struct WaveletVector {
    std::vector<double> coeffs;

    bool operator==(const WaveletVector&) const = default;
};

class HaarBasis {
public:
    explicit HaarBasis(int n) : n_(n) {
        if (n < 0) throw Error("Haar exponent must be non-negative");
        if (n > kMaxHaarExponent) throw Error("dimension too large: 2^" + std::to_string(n) + " exceeds 2^16");
        dim_ = std::size_t{1} << n;
        // H(0) = 1 is the scaling column alone.
        columns_.push_back(Column{0, 0});
        for (int level = 1; level <= n; ++level) {
            const std::size_t prev = columns_.size();
            // H(level-1) (x) (1,1)^T: every row duplicated, so supports double.
            for (auto& c : columns_) {
                c.start *= 2;
                c.half *= 2;
            }
            // I(level-1) (x) (1,-1)^T: +1 at 2i, -1 at 2i+1.
            for (std::size_t i = 0; i < prev; ++i) columns_.push_back(Column{2 * i, 1});
        }
    }

    int n() const noexcept { return n_; }
    std::size_t dim() const noexcept { return dim_; }

    // Entry H(i, j), in {-1, 0, 1}.
    int h(std::size_t i, std::size_t j) const {
        const Column& c = columns_[j];
        if (j == 0) return 1;
        if (i >= c.start && i < c.start + c.half) return 1;
        if (i >= c.start + c.half && i < c.start + 2 * c.half) return -1;
        return 0;
    }

    // Entry H^-1(i, j) = H(j, i) / col_sq_norm(i).
    double h_inv(std::size_t i, std::size_t j) const {
        return static_cast<double>(h(j, i)) / static_cast<double>(col_sq_norm(i));
    }

    std::int64_t col_sq_norm(std::size_t j) const {
        return j == 0 ? static_cast<std::int64_t>(dim_) : static_cast<std::int64_t>(2 * columns_[j].half);
    }

    std::vector<std::int64_t> col_sq_norms() const {
        std::vector<std::int64_t> out(dim_);
        for (std::size_t j = 0; j < dim_; ++j) out[j] = col_sq_norm(j);
        return out;
    }

    // Row-major dense H.
    std::vector<int> dense_h() const {
        check_dense();
        std::vector<int> out(dim_ * dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) out[i * dim_ + j] = h(i, j);
        return out;
    }

    // Row-major dense H^-1.
    std::vector<double> dense_h_inv() const {
        check_dense();
        std::vector<double> out(dim_ * dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) out[i * dim_ + j] = h_inv(i, j);
        return out;
    }

    // w = H^-1 x
    WaveletVector dwt(std::span<const double> x) const {
        if (x.size() != dim_)
            throw Error("dwt: series length " + std::to_string(x.size()) + " does not match basis dimension " +
                        std::to_string(dim_));
        WaveletVector w{std::vector<double>(dim_, 0.0)};
        double total = 0.0;
        for (double v : x) total += v;
        w.coeffs[0] = total / static_cast<double>(dim_);
        for (std::size_t j = 1; j < dim_; ++j) {
            const Column& c = columns_[j];
            double acc = 0.0;
            for (std::size_t i = c.start; i < c.start + c.half; ++i) acc += x[i];
            for (std::size_t i = c.start + c.half; i < c.start + 2 * c.half; ++i) acc -= x[i];
            w.coeffs[j] = acc / static_cast<double>(2 * c.half);
        }
        return w;
    }

    WaveletVector dwt(const TimeSeries& x) const { return dwt(std::span<const double>(x.values)); }

    // x = H w
    TimeSeries idwt(std::span<const double> w) const {
        if (w.size() != dim_)
            throw Error("idwt: coefficient count " + std::to_string(w.size()) +
                        " does not match basis dimension " + std::to_string(dim_));
        TimeSeries x{std::vector<double>(dim_, w[0]), dim_};
        for (std::size_t j = 1; j < dim_; ++j) {
            if (w[j] == 0.0) continue;
            const Column& c = columns_[j];
            for (std::size_t i = c.start; i < c.start + c.half; ++i) x.values[i] += w[j];
            for (std::size_t i = c.start + c.half; i < c.start + 2 * c.half; ++i) x.values[i] -= w[j];
        }
        return x;
    }

    TimeSeries idwt(const WaveletVector& w) const { return idwt(std::span<const double>(w.coeffs)); }

private:
    struct Column {
        std::size_t start;
        std::size_t half;  // 0 for the scaling column
    };

    void check_dense() const {
        if (n_ > kMaxDenseHaarExponent) throw Error("dense Haar matrix requested above 2^12");
    }

    int n_;
    std::size_t dim_ = 1;
    std::vector<Column> columns_;
};

inline HaarBasis build_basis(int n) { return HaarBasis(n); }

// Smallest n with 2^n >= len (len 0 and 1 both give 0).
inline int haar_exponent_for(std::size_t len) {
    int n = 0;
    while ((std::size_t{1} << n) < len) {
        ++n;
        if (n > kMaxHaarExponent)
            throw Error("dimension too large: length " + std::to_string(len) + " exceeds 2^16");
    }
    return n;
}

// Memoized bases; safe for concurrent use.
inline std::shared_ptr<const HaarBasis> haar_basis(int n) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const HaarBasis>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const HaarBasis>(n);
    return slot;
}

// Zero-pads to the next power of two.
inline TimeSeries pad_pow2(std::span<const double> raw) {
    if (raw.empty()) throw Error("pad_pow2: empty series");
    const std::size_t dim = std::size_t{1} << haar_exponent_for(raw.size());
    TimeSeries out{std::vector<double>(dim, 0.0), raw.size()};
    std::copy(raw.begin(), raw.end(), out.values.begin());
    return out;
}

}  // namespace pvfp
