// flows.hpp
//
// Per-time-unit flow decomposition: a flow is a 5-tuple observed within one
// bin of width tau, kept only when it carries at least two packets. Tail
// behaviour of the per-flow packet counts is summarized with a log-log
// complementary-CDF fit.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tracekit/trace.hpp"

namespace tracekit {

struct PerTimeUnitFlow {
    FlowKey key;
    size_t bin_index = 0;
    uint32_t packet_count = 0;
    uint64_t byte_count = 0;
};

/// Splits the trace into tau-wide bins aligned to t=0 (the same grid as
/// throughput_series) and collects the qualifying flows of every bin.
/// TCP/UDP records with both ports zero (non-first fragments, snapped
/// captures) are excluded. With `bidirectional`, both directions of a
/// conversation merge into the canonical key.
std::vector<PerTimeUnitFlow> extract_flows(const Trace& trace, double tau = 0.1,
                                           bool bidirectional = false);

/// Packet count strictly above the threshold.
bool is_greedy(const PerTimeUnitFlow& flow, uint32_t threshold = 20);

struct EccdfPoint {
    uint32_t value = 0;  // a distinct observed packet count
    double prob = 0.0;   // P[count > value]; 0 at the maximum
};

/// Empirical complementary CDF evaluated at each distinct observed value,
/// ascending. Strict inequality, so the largest value maps to 0.
std::vector<EccdfPoint> eccdf(std::span<const uint32_t> counts);

struct TailFit {
    double alpha = 0.0;       // negated log-log slope
    double regression_r = 0.0;
    uint32_t min_value = 0;   // fit restricted to value >= min_value
    size_t n_points = 0;

    bool heavy_tailed() const { return alpha < 2.0; }
};

/// Least-squares fit of log10 P against log10 value over points with
/// value >= min_value and P > 0. Needs at least three such points.
TailFit fit_tail(std::span<const EccdfPoint> points, uint32_t min_value = 10);

struct ProtocolMix {
    double tcp = 0.0;
    double udp = 0.0;
    double other = 0.0;
};

/// Flow-count shares by protocol; shares sum to 1. With `greedy_only`, only
/// flows above the threshold count. Throws when no flow qualifies.
ProtocolMix protocol_mix(std::span<const PerTimeUnitFlow> flows,
                         bool greedy_only = false, uint32_t threshold = 20);

struct AlphaSkewPoint {
    std::string id;
    double alpha = 0.0;
    double skewness = 0.0;
};

/// Per-trace (tail exponent, throughput skewness) pairs, one per input.
/// Failures are rethrown with the trace id prepended.
std::vector<AlphaSkewPoint> alpha_vs_skewness(std::span<const Trace> traces,
                                              std::span<const std::string> ids,
                                              double tau = 0.1,
                                              uint32_t min_value = 10);

}  // namespace tracekit
