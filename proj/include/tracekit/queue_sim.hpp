// queue_sim.hpp
//
// Trace-driven single-server FIFO queue with tail drop. Arrivals replay the
// trace; service time is size * 8 / bandwidth.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracekit/trace.hpp"

namespace tracekit {

enum class BufferConvention {
    kSystem,     // buffer_packets counts the packet in service
    kQueueOnly,  // buffer_packets counts waiting packets only
};

struct SimConfig {
    std::optional<double> bandwidth_bps;       // exactly one of these two
    std::optional<double> target_utilization;  // derive bandwidth for this rho
    uint32_t buffer_packets = 50;
    BufferConvention convention = BufferConvention::kSystem;

    void validate() const;  // throws on inconsistent settings
};

struct SimResult {
    uint64_t total_packets = 0;
    uint64_t dropped_packets = 0;
    uint64_t departed_packets = 0;
    double loss_ratio = 0.0;
    double effective_bandwidth_bps = 0.0;  // the rate the run used
    uint32_t max_occupancy = 0;  // peak count, in the convention's unit
};

/// Bandwidth that puts the trace's mean rate at the target utilization:
/// (total bytes * 8 / duration) / rho.
double derive_bandwidth(const Trace& trace, double rho = 0.6);

/// Replays the trace through the queue. A packet arriving when the system
/// is full is dropped; departures at the same instant are processed before
/// the arrival, and simultaneous arrivals keep trace order.
SimResult simulate(const Trace& trace, const SimConfig& config);

struct SweepRow {
    std::string id;
    bool ok = false;
    std::string error;
    double skewness = 0.0;
    double hurst = 0.0;
    double loss_ratio = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    // Undefined (e.g. all rows failed, or zero variance) stays empty.
    std::optional<double> corr_skewness_loss;
    std::optional<double> corr_hurst_loss;
};

/// Per-trace skewness, Hurst estimate and simulated loss at a common
/// utilization and buffer size, plus the correlations between the shape
/// statistics and loss. A failing trace marks its row and is excluded from
/// the correlations.
SweepResult performance_sweep(std::span<const Trace> traces,
                              std::span<const std::string> ids,
                              double rho = 0.6, uint32_t buffer_packets = 50,
                              double tau = 0.1, double freq_fraction = 0.1,
                              BufferConvention convention =
                                  BufferConvention::kSystem);

}  // namespace tracekit
