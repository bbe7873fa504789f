#include "tracekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "tracekit/fft.hpp"

namespace tracekit {

namespace {

double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace

RegressionFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("linear_fit: length mismatch");
    if (xs.size() < 2)
        throw std::invalid_argument("linear_fit: need at least 2 points");
    double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0)
        throw std::runtime_error("linear_fit: x values have zero variance");
    RegressionFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.pearson_r =
        syy == 0.0 ? 0.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    fit.n = xs.size();
    return fit;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 2)
        throw std::invalid_argument("pearson: need at least 2 points");
    double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::runtime_error("pearson: undefined for zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Histogram histogram(std::span<const double> values, double bin_width) {
    if (values.empty()) throw std::invalid_argument("histogram: empty input");
    if (bin_width <= 0.0)
        throw std::invalid_argument("histogram: bin_width must be > 0");
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    double lo = std::floor(*mn / bin_width) * bin_width;
    size_t nbins = static_cast<size_t>(std::floor((*mx - lo) / bin_width)) + 1;

    Histogram h;
    h.bin_width = bin_width;
    h.counts.assign(nbins, 0);
    h.edges.resize(nbins);
    for (size_t i = 0; i < nbins; ++i)
        h.edges[i] = lo + static_cast<double>(i) * bin_width;
    for (double v : values) {
        auto idx = static_cast<size_t>(std::floor((v - lo) / bin_width));
        if (idx >= nbins) idx = nbins - 1;
        ++h.counts[idx];
    }
    h.mean = mean_of(values);
    return h;
}

double ThroughputSeries::mean() const {
    return values.empty() ? 0.0 : mean_of(values);
}

double ThroughputSeries::stddev() const {
    if (values.empty()) return 0.0;
    double m = mean();
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size()));
}

ThroughputSeries throughput_series(const Trace& trace, double bin_width) {
    if (bin_width <= 0.0)
        throw std::invalid_argument("throughput_series: bin_width must be > 0");
    if (trace.duration < 2.0 * bin_width)
        throw std::runtime_error(
            "throughput_series: trace shorter than two bins");

    // Small relative guard so durations that are exact multiples of the bin
    // width do not lose their final bin to rounding.
    double guard = bin_width * 1e-9;
    auto nbins =
        static_cast<size_t>(std::floor((trace.duration + guard) / bin_width));

    ThroughputSeries series;
    series.bin_width = bin_width;
    series.values.assign(nbins, 0.0);
    for (const auto& p : trace.packets) {
        auto k = static_cast<size_t>(
            std::floor((p.timestamp + guard) / bin_width));
        if (k < nbins) series.values[k] += static_cast<double>(p.size);
    }
    for (auto& v : series.values) v = v * 8.0 / bin_width;
    return series;
}

double skewness(std::span<const double> values) {
    if (values.size() < 3)
        throw std::invalid_argument("skewness: need at least 3 values");
    double m = mean_of(values);
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    auto n = static_cast<double>(values.size());
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0)
        throw std::runtime_error("skewness: undefined for constant series");
    return m3 / std::pow(m2, 1.5);
}

double skewness(const ThroughputSeries& series) { return skewness(series.values); }

std::vector<double> detrend_linear(std::span<const double> values) {
    std::vector<double> idx(values.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
    RegressionFit fit = linear_fit(idx, {values.data(), values.size()});
    std::vector<double> out(values.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = values[i] - (fit.intercept + fit.slope * idx[i]);
    return out;
}

std::vector<SpectrumPoint> periodogram(std::span<const double> values,
                                       double bin_width) {
    if (bin_width <= 0.0)
        throw std::invalid_argument("periodogram: bin_width must be > 0");
    size_t n = values.size();
    if (n < 2) throw std::invalid_argument("periodogram: series too short");

    std::vector<std::complex<double>> buf(n);
    for (size_t i = 0; i < n; ++i) buf[i] = values[i];
    fft(buf);

    std::vector<SpectrumPoint> psd;
    psd.reserve(n / 2);
    for (size_t j = 1; j <= n / 2; ++j) {
        double f = static_cast<double>(j) / (static_cast<double>(n) * bin_width);
        psd.push_back({f, std::norm(buf[j]) / static_cast<double>(n)});
    }
    return psd;
}

double HurstEstimate::h_clamped() const { return std::clamp(h, 0.0, 1.0); }

HurstEstimate hurst_from_psd(std::span<const PsdPoint> psd, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("hurst: fraction must be in (0, 1]");
    auto want = static_cast<size_t>(
        std::ceil(fraction * static_cast<double>(psd.size()) - 1e-9));
    if (want > psd.size()) want = psd.size();
    if (want < 2)
        throw std::runtime_error("hurst: too few spectral points to fit");

    std::vector<double> xs(want), ys(want);
    for (size_t i = 0; i < want; ++i) {
        xs[i] = psd[i].log10_f;
        ys[i] = psd[i].log10_p;
    }
    RegressionFit fit = linear_fit(xs, ys);

    HurstEstimate est;
    est.spectral_slope = fit.slope;
    est.h = (1.0 - fit.slope) / 2.0;
    est.regression_r = fit.pearson_r;
    est.n_points = want;
    return est;
}

HurstEstimate hurst_periodogram(const ThroughputSeries& series,
                                double low_freq_fraction) {
    if (!(low_freq_fraction > 0.0 && low_freq_fraction <= 1.0))
        throw std::invalid_argument("hurst: fraction must be in (0, 1]");
    if (series.values.size() < 32)
        throw std::runtime_error("hurst: need at least 32 bins");
    std::vector<double> resid = detrend_linear(series.values);
    bool all_zero = std::all_of(resid.begin(), resid.end(),
                                [](double v) { return v == 0.0; });
    if (all_zero)
        throw std::runtime_error("hurst: series is constant after detrending");

    auto psd = periodogram(resid, series.bin_width);
    auto want = static_cast<size_t>(std::ceil(
        low_freq_fraction * static_cast<double>(psd.size()) - 1e-9));
    if (want > psd.size()) want = psd.size();
    if (want < 2)
        throw std::runtime_error("hurst: too few spectral points to fit");

    std::vector<PsdPoint> band(want);
    for (size_t i = 0; i < want; ++i) {
        if (psd[i].power <= 0.0)
            throw std::runtime_error(
                "hurst: zero spectral density inside the regression band");
        band[i] = {std::log10(psd[i].freq), std::log10(psd[i].power)};
    }
    HurstEstimate est = hurst_from_psd(band, 1.0);
    est.n_points = want;
    return est;
}

}  // namespace tracekit
