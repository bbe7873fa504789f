#include "tracekit/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tracekit/flows.hpp"
#include "tracekit/path.hpp"
#include "tracekit/stats.hpp"

namespace tracekit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
    char buf[40];
    snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

ordered_json unavailable(const std::string& reason) {
    ordered_json j;
    j["available"] = false;
    j["reason"] = reason;
    return j;
}

// Hop histogram over per-time-unit flows: each flow contributes its key's
// hop estimate once, so busy paths weigh in proportionally.
struct HopSamples {
    std::vector<double> all;
    std::vector<double> greedy;
};

HopSamples hop_samples(const std::vector<PerTimeUnitFlow>& flows,
                       const std::vector<HopEstimate>& estimates,
                       uint32_t threshold) {
    std::map<FlowKey, int> hop_by_key;
    for (const auto& est : estimates)
        if (!est.ambiguous) hop_by_key[est.key] = est.hops;

    HopSamples samples;
    for (const auto& f : flows) {
        auto it = hop_by_key.find(f.key.canonical());
        if (it == hop_by_key.end()) continue;
        samples.all.push_back(static_cast<double>(it->second));
        if (is_greedy(f, threshold))
            samples.greedy.push_back(static_cast<double>(it->second));
    }
    return samples;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "hops,count\n";
    for (size_t i = 0; i < h.counts.size(); ++i)
        out += num(h.edges[i]) + "," + std::to_string(h.counts[i]) + "\n";
    return out;
}

}  // namespace

AnalysisOutput analyze_trace(const Trace& trace, const std::string& name,
                             const AnalysisParams& params) {
    AnalysisOutput out;
    ordered_json& j = out.report;
    j["report_version"] = kReportVersion;
    j["trace"] = name;
    {
        ordered_json p;
        p["tau"] = params.tau;
        p["greedy_threshold"] = params.greedy_threshold;
        p["tail_min"] = params.tail_min;
        p["freq_fraction"] = params.freq_fraction;
        p["bidirectional_flows"] = params.bidirectional_flows;
        p["min_share"] = params.min_share;
        j["params"] = std::move(p);
    }
    j["packets"] = trace.packets.size();
    j["duration_s"] = trace.duration;
    j["total_bytes"] = trace.total_bytes();

    // Throughput, skewness, long-range dependence.
    bool have_series = false;
    ThroughputSeries series;
    try {
        series = throughput_series(trace, params.tau);
        have_series = true;
        ordered_json t;
        t["available"] = true;
        t["bins"] = series.values.size();
        t["mean_bps"] = series.mean();
        t["stddev_bps"] = series.stddev();
        j["throughput"] = std::move(t);

        std::string csv = "index,value\n";
        for (size_t i = 0; i < series.values.size(); ++i)
            csv += std::to_string(i) + "," + num(series.values[i]) + "\n";
        out.artifacts["throughput.csv"] = std::move(csv);
    } catch (const std::exception& e) {
        j["throughput"] = unavailable(e.what());
    }

    if (have_series) {
        try {
            ordered_json s;
            s["available"] = true;
            s["value"] = skewness(series);
            j["skewness"] = std::move(s);
        } catch (const std::exception& e) {
            j["skewness"] = unavailable(e.what());
        }
        try {
            HurstEstimate est =
                hurst_periodogram(series, params.freq_fraction);
            ordered_json h;
            h["available"] = true;
            h["h"] = est.h;
            h["h_clamped"] = est.h_clamped();
            h["spectral_slope"] = est.spectral_slope;
            h["regression_r"] = est.regression_r;
            h["n_points"] = est.n_points;
            j["hurst"] = std::move(h);

            auto resid = detrend_linear(series.values);
            auto psd = periodogram(resid, series.bin_width);
            std::string csv = "log10_f,log10_P\n";
            for (const auto& pt : psd) {
                if (pt.power <= 0.0) continue;
                csv += num(std::log10(pt.freq)) + "," +
                       num(std::log10(pt.power)) + "\n";
            }
            out.artifacts["psd.csv"] = std::move(csv);
        } catch (const std::exception& e) {
            j["hurst"] = unavailable(e.what());
        }
    } else {
        j["skewness"] = unavailable("no throughput series");
        j["hurst"] = unavailable("no throughput series");
    }

    // Per-time-unit flows and their tail.
    std::vector<PerTimeUnitFlow> flows;
    try {
        flows = extract_flows(trace, params.tau, params.bidirectional_flows);
        size_t greedy = 0;
        for (const auto& f : flows)
            if (is_greedy(f, params.greedy_threshold)) ++greedy;
        ordered_json fj;
        fj["available"] = true;
        fj["per_time_unit_flows"] = flows.size();
        fj["greedy_flows"] = greedy;
        fj["greedy_share"] = flows.empty() ? 0.0
                                           : static_cast<double>(greedy) /
                                                 static_cast<double>(flows.size());
        j["flows"] = std::move(fj);
    } catch (const std::exception& e) {
        j["flows"] = unavailable(e.what());
    }

    if (!flows.empty()) {
        std::vector<uint32_t> counts;
        counts.reserve(flows.size());
        for (const auto& f : flows) counts.push_back(f.packet_count);
        auto curve = eccdf(counts);

        std::string csv = "n_p,eccdf\n";
        for (const auto& pt : curve)
            csv += std::to_string(pt.value) + "," + num(pt.prob) + "\n";
        out.artifacts["llcd.csv"] = std::move(csv);

        try {
            TailFit fit = fit_tail(curve, params.tail_min);
            ordered_json tf;
            tf["available"] = true;
            tf["alpha"] = fit.alpha;
            tf["regression_r"] = fit.regression_r;
            tf["min_value"] = fit.min_value;
            tf["n_points"] = fit.n_points;
            tf["heavy_tailed"] = fit.heavy_tailed();
            j["tail_fit"] = std::move(tf);
        } catch (const std::exception& e) {
            j["tail_fit"] = unavailable(e.what());
        }

        ordered_json mix;
        mix["available"] = true;
        try {
            ProtocolMix all = protocol_mix(flows);
            ordered_json ja;
            ja["tcp"] = all.tcp;
            ja["udp"] = all.udp;
            ja["other"] = all.other;
            mix["all"] = std::move(ja);
        } catch (const std::exception& e) {
            mix = unavailable(e.what());
        }
        if (mix["available"].get<bool>()) {
            try {
                ProtocolMix greedy =
                    protocol_mix(flows, true, params.greedy_threshold);
                ordered_json jg;
                jg["available"] = true;
                jg["tcp"] = greedy.tcp;
                jg["udp"] = greedy.udp;
                jg["other"] = greedy.other;
                mix["greedy"] = std::move(jg);
            } catch (const std::exception& e) {
                mix["greedy"] = unavailable(e.what());
            }
        }
        j["protocol_mix"] = std::move(mix);
    } else {
        j["tail_fit"] = unavailable("no per-time-unit flows");
        j["protocol_mix"] = unavailable("no per-time-unit flows");
    }

    // Path section: hops, handshake RTTs, their relation.
    ordered_json paths;
    auto estimates = estimate_hops(trace);
    size_t ambiguous = 0;
    for (const auto& est : estimates)
        if (est.ambiguous) ++ambiguous;

    if (estimates.empty()) {
        paths["hops"] = unavailable("no bidirectional keys");
    } else {
        auto samples = hop_samples(flows, estimates, params.greedy_threshold);
        ordered_json hj;
        hj["available"] = true;
        hj["keys"] = estimates.size();
        hj["ambiguous_keys"] = ambiguous;
        if (!samples.all.empty()) {
            Histogram hist = histogram(samples.all, 1.0);
            hj["mean_all"] = hist.mean;
            out.artifacts["hop_hist_all.csv"] = histogram_csv(hist);
        }
        if (!samples.greedy.empty()) {
            Histogram hist = histogram(samples.greedy, 1.0);
            hj["mean_greedy"] = hist.mean;
            out.artifacts["hop_hist_greedy.csv"] = histogram_csv(hist);
        }
        paths["hops"] = std::move(hj);
    }

    auto handshakes = estimate_rtts(trace);
    if (handshakes.empty()) {
        paths["rtt"] = unavailable("no complete handshakes");
    } else {
        size_t clean = 0;
        double sum = 0.0;
        for (const auto& h : handshakes) {
            if (!h.clean) continue;
            ++clean;
            sum += h.rtt;
        }
        ordered_json rj;
        rj["available"] = true;
        rj["handshakes"] = handshakes.size();
        rj["clean"] = clean;
        if (clean > 0) rj["mean_rtt_s"] = sum / static_cast<double>(clean);
        paths["rtt"] = std::move(rj);
    }

    try {
        HopsVsRtt rel = hops_vs_rtt(trace, params.min_share);
        ordered_json rj;
        rj["available"] = true;
        rj["slope_s_per_hop"] = rel.fit.slope;
        rj["intercept_s"] = rel.fit.intercept;
        rj["pearson_r"] = rel.fit.pearson_r;
        rj["groups_used"] = rel.used_groups;
        paths["hops_vs_rtt"] = std::move(rj);

        std::string csv = "hops,mean_rtt_s\n";
        for (const auto& g : rel.groups)
            csv += std::to_string(g.hops) + "," + num(g.mean_rtt) + "\n";
        out.artifacts["hops_rtt.csv"] = std::move(csv);
    } catch (const std::exception& e) {
        paths["hops_vs_rtt"] = unavailable(e.what());
    }
    j["paths"] = std::move(paths);

    return out;
}

namespace {

void flatten(const ordered_json& j, const std::string& prefix,
             std::string& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        size_t i = 0;
        for (const auto& v : j)
            flatten(v, prefix + "." + std::to_string(i++), out);
    } else {
        out += prefix + "," + j.dump() + "\n";
    }
}

}  // namespace

std::string report_as_csv(const ordered_json& report) {
    std::string out = "key,value\n";
    flatten(report, "", out);
    return out;
}

nlohmann::ordered_json simulate_report(const Trace& trace,
                                       const std::string& name,
                                       const SimConfig& config) {
    SimResult res = simulate(trace, config);
    ordered_json j;
    j["report_version"] = kReportVersion;
    j["trace"] = name;
    j["packets"] = trace.packets.size();
    j["duration_s"] = trace.duration;
    j["bandwidth_bps"] = res.effective_bandwidth_bps;
    j["bandwidth_derived"] = config.target_utilization.has_value();
    if (config.target_utilization)
        j["target_utilization"] = *config.target_utilization;
    j["buffer_packets"] = config.buffer_packets;
    j["buffer_convention"] =
        config.convention == BufferConvention::kSystem ? "system" : "queue_only";
    j["total_packets"] = res.total_packets;
    j["dropped_packets"] = res.dropped_packets;
    j["departed_packets"] = res.departed_packets;
    j["loss_ratio"] = res.loss_ratio;
    j["max_occupancy"] = res.max_occupancy;
    return j;
}

SweepOutput sweep_report(std::span<const Trace> traces,
                         std::span<const std::string> ids, double rho,
                         uint32_t buffer_packets, double tau,
                         double freq_fraction, BufferConvention convention) {
    SweepOutput out;
    out.result = performance_sweep(traces, ids, rho, buffer_packets, tau,
                                   freq_fraction, convention);

    std::string csv = "trace,skewness,hurst,loss_ratio,status\n";
    for (const auto& row : out.result.rows) {
        if (row.ok) {
            csv += row.id + "," + num(row.skewness) + "," + num(row.hurst) +
                   "," + num(row.loss_ratio) + ",ok\n";
        } else {
            std::string msg = row.error;
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            csv += row.id + ",,,,error: " + msg + "\n";
        }
    }
    out.table_csv = std::move(csv);

    ordered_json j;
    j["report_version"] = kReportVersion;
    j["rho"] = rho;
    j["buffer_packets"] = buffer_packets;
    j["tau"] = tau;
    j["freq_fraction"] = freq_fraction;
    j["traces"] = out.result.rows.size();
    auto failed = ordered_json::array();
    for (const auto& row : out.result.rows)
        if (!row.ok) failed.push_back(row.id);
    j["failed"] = std::move(failed);
    j["corr_skewness_loss"] = out.result.corr_skewness_loss
                                  ? ordered_json(*out.result.corr_skewness_loss)
                                  : ordered_json(nullptr);
    j["corr_hurst_loss"] = out.result.corr_hurst_loss
                               ? ordered_json(*out.result.corr_hurst_loss)
                               : ordered_json(nullptr);
    out.summary = std::move(j);
    return out;
}

}  // namespace tracekit
