#include "tracekit/flows.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tracekit/stats.hpp"

namespace tracekit {

std::vector<PerTimeUnitFlow> extract_flows(const Trace& trace, double tau,
                                           bool bidirectional) {
    if (tau <= 0.0)
        throw std::invalid_argument("extract_flows: tau must be > 0");
    if (!trace.sorted_by_time())
        throw std::invalid_argument("extract_flows: trace not sorted");

    std::vector<PerTimeUnitFlow> out;
    std::map<FlowKey, std::pair<uint32_t, uint64_t>> bin;  // count, bytes
    size_t current = 0;
    double guard = tau * 1e-9;

    auto flush = [&]() {
        for (const auto& [key, cb] : bin)
            if (cb.first >= 2)
                out.push_back({key, current, cb.first, cb.second});
        bin.clear();
    };

    for (const auto& p : trace.packets) {
        if ((p.protocol == kProtoTcp || p.protocol == kProtoUdp) &&
            p.src_port == 0 && p.dst_port == 0)
            continue;  // fragment continuation or snapped header
        auto k = static_cast<size_t>(std::floor((p.timestamp + guard) / tau));
        if (k != current) {
            flush();
            current = k;
        }
        FlowKey key = FlowKey::of(p);
        if (bidirectional) key = key.canonical();
        auto& slot = bin[key];
        slot.first += 1;
        slot.second += p.size;
    }
    flush();
    return out;
}

bool is_greedy(const PerTimeUnitFlow& flow, uint32_t threshold) {
    return flow.packet_count > threshold;
}

std::vector<EccdfPoint> eccdf(std::span<const uint32_t> counts) {
    if (counts.empty()) throw std::invalid_argument("eccdf: empty input");
    std::vector<uint32_t> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<EccdfPoint> out;
    auto n = static_cast<double>(sorted.size());
    size_t i = 0;
    while (i < sorted.size()) {
        uint32_t v = sorted[i];
        while (i < sorted.size() && sorted[i] == v) ++i;
        // i now indexes the first element > v
        out.push_back({v, static_cast<double>(sorted.size() - i) / n});
    }
    return out;
}

TailFit fit_tail(std::span<const EccdfPoint> points, uint32_t min_value) {
    std::vector<double> xs, ys;
    for (const auto& pt : points) {
        if (pt.value < min_value || pt.prob <= 0.0) continue;
        xs.push_back(std::log10(static_cast<double>(pt.value)));
        ys.push_back(std::log10(pt.prob));
    }
    if (xs.size() < 3)
        throw std::runtime_error(
            "fit_tail: fewer than 3 usable points at or above value " +
            std::to_string(min_value));
    RegressionFit fit = linear_fit(xs, ys);
    return TailFit{-fit.slope, fit.pearson_r, min_value, xs.size()};
}

ProtocolMix protocol_mix(std::span<const PerTimeUnitFlow> flows,
                         bool greedy_only, uint32_t threshold) {
    uint64_t tcp = 0, udp = 0, other = 0;
    for (const auto& f : flows) {
        if (greedy_only && !is_greedy(f, threshold)) continue;
        if (f.key.protocol == kProtoTcp)
            ++tcp;
        else if (f.key.protocol == kProtoUdp)
            ++udp;
        else
            ++other;
    }
    uint64_t total = tcp + udp + other;
    if (total == 0)
        throw std::runtime_error("protocol_mix: no qualifying flows");
    auto d = static_cast<double>(total);
    return ProtocolMix{static_cast<double>(tcp) / d,
                       static_cast<double>(udp) / d,
                       static_cast<double>(other) / d};
}

std::vector<AlphaSkewPoint> alpha_vs_skewness(std::span<const Trace> traces,
                                              std::span<const std::string> ids,
                                              double tau, uint32_t min_value) {
    if (!ids.empty() && ids.size() != traces.size())
        throw std::invalid_argument("alpha_vs_skewness: id count mismatch");

    std::vector<AlphaSkewPoint> out;
    out.reserve(traces.size());
    for (size_t i = 0; i < traces.size(); ++i) {
        std::string id = ids.empty() ? std::to_string(i) : ids[i];
        try {
            ThroughputSeries ts = throughput_series(traces[i], tau);
            double skew = skewness(ts);
            auto flows = extract_flows(traces[i], tau);
            std::vector<uint32_t> counts;
            counts.reserve(flows.size());
            for (const auto& f : flows) counts.push_back(f.packet_count);
            TailFit fit = fit_tail(eccdf(counts), min_value);
            out.push_back({id, fit.alpha, skew});
        } catch (const std::exception& e) {
            throw std::runtime_error("trace " + id + ": " + e.what());
        }
    }
    return out;
}

}  // namespace tracekit
