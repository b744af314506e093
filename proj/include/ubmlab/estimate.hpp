#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ubmlab/linalg.hpp"

namespace ubmlab {

/// Sum by recursive halving; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Monte Carlo mean with per-component standard error.
struct Estimate {
    Complex mean{0.0, 0.0};
    double se_re = 0.0;
    double se_im = 0.0;
    std::size_t samples = 0;

    /// Larger of the two component standard errors.
    double se() const { return std::max(se_re, se_im); }
};

/// Mean and standard error of i.i.d. complex samples (two-pass, pairwise sums).
inline Estimate estimate_from_samples(std::span<const Complex> xs) {
    Estimate e;
    e.samples = xs.size();
    if (xs.empty()) return e;
    const double m = static_cast<double>(xs.size());
    std::vector<double> buf(xs.size());
    std::transform(xs.begin(), xs.end(), buf.begin(), [](Complex z) { return z.real(); });
    const double mean_re = pairwise_sum(buf) / m;
    std::transform(xs.begin(), xs.end(), buf.begin(), [](Complex z) { return z.imag(); });
    const double mean_im = pairwise_sum(buf) / m;
    e.mean = {mean_re, mean_im};
    if (xs.size() < 2) return e;
    std::transform(xs.begin(), xs.end(), buf.begin(), [&](Complex z) { return (z.real() - mean_re) * (z.real() - mean_re); });
    e.se_re = std::sqrt(pairwise_sum(buf) / (m - 1.0) / m);
    std::transform(xs.begin(), xs.end(), buf.begin(), [&](Complex z) { return (z.imag() - mean_im) * (z.imag() - mean_im); });
    e.se_im = std::sqrt(pairwise_sum(buf) / (m - 1.0) / m);
    return e;
}

/// Per-path samples: one row per path, `width` complex columns.
class SampleTable {
public:
    SampleTable() = default;
    SampleTable(std::size_t paths, std::size_t width) : paths_(paths), width_(width), data_(paths * width) {}

    std::size_t paths() const { return paths_; }
    std::size_t width() const { return width_; }
    std::span<Complex> row(std::size_t path) { return {data_.data() + path * width_, width_}; }
    std::span<const Complex> row(std::size_t path) const { return {data_.data() + path * width_, width_}; }
    Complex& operator()(std::size_t path, std::size_t col) { return data_[path * width_ + col]; }
    Complex operator()(std::size_t path, std::size_t col) const { return data_[path * width_ + col]; }

    std::vector<Complex> column(std::size_t col) const {
        std::vector<Complex> out(paths_);
        for (std::size_t m = 0; m < paths_; ++m) out[m] = (*this)(m, col);
        return out;
    }

    Estimate estimate(std::size_t col) const { return estimate_from_samples(column(col)); }

    /// Estimate of sum_c w_c X_c, formed per path.
    Estimate combine(std::span<const std::size_t> cols, std::span<const Complex> weights) const {
        std::vector<Complex> out(paths_, Complex{});
        for (std::size_t m = 0; m < paths_; ++m) {
            for (std::size_t k = 0; k < cols.size(); ++k) out[m] += weights[k] * (*this)(m, cols[k]);
        }
        return estimate_from_samples(out);
    }

private:
    std::size_t paths_ = 0;
    std::size_t width_ = 0;
    std::vector<Complex> data_;
};

}  // namespace ubmlab
