// stats.hpp
//
// Time-series statistics over binned throughput: moments, periodogram-based
// long-range-dependence estimation, plain regression/correlation helpers.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tracekit/trace.hpp"

namespace tracekit {

/// Ordinary least-squares line with the correlation of the fitted points.
struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double pearson_r = 0.0;
    size_t n = 0;
};

/// Least-squares fit of ys against xs. Throws when xs has zero variance or
/// fewer than two points are given. pearson_r is clamped to [-1, 1]; a
/// constant ys yields r = 0.
RegressionFit linear_fit(std::span<const double> xs, std::span<const double> ys);

/// Product-moment correlation. Throws when either side has zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct Histogram {
    double bin_width = 0.0;
    std::vector<double> edges;   // lower edge per bin
    std::vector<size_t> counts;  // sums to the input length
    double mean = 0.0;
};

Histogram histogram(std::span<const double> values, double bin_width);

/// Bits/sec per fixed-width bin, aligned to t=0. A trailing partial bin is
/// dropped.
struct ThroughputSeries {
    std::vector<double> values;
    double bin_width = 0.0;

    double mean() const;
    double stddev() const;  // population
};

/// Bin k holds 8 * (bytes with kT <= t < (k+1)T) / T. Requires
/// bin_width > 0 and duration >= 2 * bin_width.
ThroughputSeries throughput_series(const Trace& trace, double bin_width = 0.1);

/// Third standardized central moment with population (1/n) normalization.
/// Positive for right-skewed data. Throws for n < 3 or zero variance.
double skewness(std::span<const double> values);
double skewness(const ThroughputSeries& series);

struct SpectrumPoint {
    double freq = 0.0;
    double power = 0.0;
};

struct PsdPoint {
    double log10_f = 0.0;
    double log10_p = 0.0;
};

/// Periodogram of a series: P(f_j) = |DFT_j|^2 / n at f_j = j/(n*T),
/// j = 1..floor(n/2) (f=0 excluded). The caller detrends first if desired.
std::vector<SpectrumPoint> periodogram(std::span<const double> values,
                                       double bin_width);

/// Least-squares linear detrend (residuals of value against bin index).
std::vector<double> detrend_linear(std::span<const double> values);

struct HurstEstimate {
    double h = 0.0;              // (1 - spectral_slope) / 2, unclamped
    double spectral_slope = 0.0;
    double regression_r = 0.0;
    size_t n_points = 0;

    double h_clamped() const;  // pinned into [0, 1] for reporting
};

/// Fits log10 P against log10 f over the lowest `ceil(fraction * count)`
/// frequencies of an already-computed spectrum.
HurstEstimate hurst_from_psd(std::span<const PsdPoint> psd, double fraction);

/// Detrends, computes the periodogram and fits the low-frequency slope.
/// Requires at least 32 bins; a constant (all-zero after detrending) series
/// is an error.
HurstEstimate hurst_periodogram(const ThroughputSeries& series,
                                double low_freq_fraction = 0.1);

}  // namespace tracekit
