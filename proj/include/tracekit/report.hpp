// report.hpp
//
// Turns traces into versioned JSON reports plus two-column CSV artifacts
// ready for plotting. All output is a pure function of the inputs, so
// identical runs produce identical bytes.

#pragma once

#include <map>
#include <span>
#include <string>

#include "json.hpp"
#include "tracekit/queue_sim.hpp"
#include "tracekit/trace.hpp"

namespace tracekit {

constexpr int kReportVersion = 1;

struct AnalysisParams {
    double tau = 0.1;
    uint32_t greedy_threshold = 20;
    uint32_t tail_min = 10;
    double freq_fraction = 0.1;
    bool bidirectional_flows = false;
    double min_share = 0.01;
};

struct AnalysisOutput {
    nlohmann::ordered_json report;
    // artifact filename -> CSV content
    std::map<std::string, std::string> artifacts;
};

/// Runs every analysis that the trace supports. Sections that the data
/// cannot sustain (one-way traffic, constant throughput, ...) are marked
/// unavailable with a reason instead of failing the whole report.
AnalysisOutput analyze_trace(const Trace& trace, const std::string& name,
                             const AnalysisParams& params);

/// The same report flattened to `key,value` lines for --format csv.
std::string report_as_csv(const nlohmann::ordered_json& report);

nlohmann::ordered_json simulate_report(const Trace& trace,
                                       const std::string& name,
                                       const SimConfig& config);

struct SweepOutput {
    SweepResult result;
    nlohmann::ordered_json summary;
    std::string table_csv;
};

SweepOutput sweep_report(std::span<const Trace> traces,
                         std::span<const std::string> ids, double rho,
                         uint32_t buffer_packets, double tau,
                         double freq_fraction, BufferConvention convention);

}  // namespace tracekit
