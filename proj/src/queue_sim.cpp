#include "tracekit/queue_sim.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "tracekit/stats.hpp"

namespace tracekit {

void SimConfig::validate() const {
    if (bandwidth_bps.has_value() == target_utilization.has_value())
        throw std::invalid_argument(
            "sim config: set exactly one of bandwidth and target utilization");
    if (bandwidth_bps && *bandwidth_bps <= 0.0)
        throw std::invalid_argument("sim config: bandwidth must be > 0");
    if (target_utilization &&
        !(*target_utilization > 0.0 && *target_utilization < 1.0))
        throw std::invalid_argument(
            "sim config: target utilization must be in (0, 1)");
    if (buffer_packets < 1)
        throw std::invalid_argument("sim config: buffer must hold >= 1 packet");
}

double derive_bandwidth(const Trace& trace, double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("derive_bandwidth: rho must be in (0, 1)");
    if (trace.duration <= 0.0)
        throw std::runtime_error("derive_bandwidth: trace has no duration");
    double mean_bps =
        static_cast<double>(trace.total_bytes()) * 8.0 / trace.duration;
    if (mean_bps <= 0.0)
        throw std::runtime_error("derive_bandwidth: trace carries no bytes");
    return mean_bps / rho;
}

SimResult simulate(const Trace& trace, const SimConfig& config) {
    config.validate();
    if (!trace.sorted_by_time())
        throw std::invalid_argument("simulate: trace not sorted");

    double bw = config.bandwidth_bps
                    ? *config.bandwidth_bps
                    : derive_bandwidth(trace, *config.target_utilization);

    // System capacity including the packet in service.
    uint64_t capacity = config.buffer_packets;
    if (config.convention == BufferConvention::kQueueOnly) capacity += 1;

    SimResult res;
    res.total_packets = trace.packets.size();
    res.effective_bandwidth_bps = bw;

    std::deque<double> departures;  // departure instants, FIFO order
    double last_departure = 0.0;
    size_t waiting_adjust =
        config.convention == BufferConvention::kQueueOnly ? 1 : 0;

    for (const auto& p : trace.packets) {
        while (!departures.empty() && departures.front() <= p.timestamp) {
            departures.pop_front();
            ++res.departed_packets;
        }
        if (departures.size() >= capacity) {
            ++res.dropped_packets;
            continue;
        }
        double start = departures.empty()
                           ? p.timestamp
                           : std::max(p.timestamp, last_departure);
        last_departure = start + static_cast<double>(p.size) * 8.0 / bw;
        departures.push_back(last_departure);
        uint32_t occupancy =
            static_cast<uint32_t>(departures.size() - waiting_adjust);
        res.max_occupancy = std::max(res.max_occupancy, occupancy);
    }
    res.departed_packets += departures.size();

    res.loss_ratio = res.total_packets == 0
                         ? 0.0
                         : static_cast<double>(res.dropped_packets) /
                               static_cast<double>(res.total_packets);
    return res;
}

SweepResult performance_sweep(std::span<const Trace> traces,
                              std::span<const std::string> ids, double rho,
                              uint32_t buffer_packets, double tau,
                              double freq_fraction,
                              BufferConvention convention) {
    if (!ids.empty() && ids.size() != traces.size())
        throw std::invalid_argument("performance_sweep: id count mismatch");

    SweepResult result;
    std::vector<double> skews, hursts, losses;
    for (size_t i = 0; i < traces.size(); ++i) {
        SweepRow row;
        row.id = ids.empty() ? std::to_string(i) : ids[i];
        try {
            ThroughputSeries ts = throughput_series(traces[i], tau);
            row.skewness = skewness(ts);
            row.hurst = hurst_periodogram(ts, freq_fraction).h;
            SimConfig cfg;
            cfg.target_utilization = rho;
            cfg.buffer_packets = buffer_packets;
            cfg.convention = convention;
            row.loss_ratio = simulate(traces[i], cfg).loss_ratio;
            row.ok = true;
            skews.push_back(row.skewness);
            hursts.push_back(row.hurst);
            losses.push_back(row.loss_ratio);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        result.rows.push_back(std::move(row));
    }

    if (losses.size() >= 2) {
        try {
            result.corr_skewness_loss = pearson(skews, losses);
        } catch (const std::exception&) {
        }
        try {
            result.corr_hurst_loss = pearson(hursts, losses);
        } catch (const std::exception&) {
        }
    }
    return result;
}

}  // namespace tracekit
