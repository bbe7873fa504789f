// synth.hpp
//
// Synthetic traffic: an aggregate of independent ON/OFF sources with
// Pareto-distributed period lengths, plus optional path emulation that
// rewrites TTLs and injects scripted TCP handshakes so the path analyses
// have exact expected answers.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tracekit/trace.hpp"

namespace tracekit {

enum class RateMode {
    kUniform,  // every source sends at rate_pps
    kPareto,   // per-source rates drawn from a Pareto with mean rate_pps
};

/// Aggregate model. Shapes live in (1, 2]: infinite-variance periods with a
/// finite mean. The implied long-range dependence of the aggregate is
/// H = (3 - min(on_shape, off_shape)) / 2.
struct SourceModel {
    uint32_t n_sources = 1;
    double on_shape = 1.4;
    double off_shape = 1.4;
    double mean_on = 1.0;   // seconds
    double mean_off = 1.0;  // seconds; 0 keeps sources always on
    RateMode rate_mode = RateMode::kUniform;
    double rate_pps = 100.0;   // packets/sec; the mean under kPareto
    double rate_shape = 1.2;   // Pareto shape for kPareto rates
    uint32_t packet_size = 1000;  // bytes, IP datagram length
    uint64_t seed = 1;
    double duration = 300.0;  // seconds
    double tau = 0.1;         // bin width used for ground-truth bin counts
    double tcp_share = 1.0;   // fraction of sources speaking TCP
    double udp_share = 0.0;   // then UDP; the rest use a portless protocol

    // Path emulation (off by default): sources get distances cycling
    // [client_hops_min, client_hops_max], the sink sits server_hops away,
    // and scripted handshake RTTs grow linearly with the total hop count.
    bool path_emulation = false;
    int client_hops_min = 2;
    int client_hops_max = 12;
    int server_hops = 1;
    double ms_per_hop = 5.0;

    void validate() const;
};

/// Flat key=value model file ('#' comments). Unknown keys are errors.
SourceModel parse_model(std::istream& in);
SourceModel parse_model_file(const std::string& path);
SourceModel parse_model_string(const std::string& text);

struct SourceTruth {
    uint32_t index = 0;
    uint32_t src_ip = 0;
    uint16_t src_port = 0;
    uint8_t protocol = 0;
    double rate_pps = 0.0;
    std::vector<std::pair<double, double>> on_intervals;
};

struct KeyTruth {
    uint64_t packets = 0;
    uint64_t bytes = 0;
    std::map<size_t, uint32_t> bin_counts;  // bin index -> packets, width tau
};

struct HandshakeTruth {
    FlowKey key;  // initiator direction
    double t_syn = 0.0;
    double t_synack = 0.0;
    double t_ack = 0.0;
};

struct PathTruth {
    int distance = 0;        // hops to the observation point
    uint8_t initial_ttl = 0;
    double base_rtt = 0.0;   // scripted full RTT for connections it opens
};

/// Everything the generator scheduled, recorded independently of the trace
/// so analyses can be checked against exact expectations.
struct GroundTruth {
    double theoretical_h = 0.0;
    double tau = 0.1;
    uint64_t total_packets = 0;
    uint64_t total_bytes = 0;
    std::vector<SourceTruth> sources;
    std::map<FlowKey, KeyTruth> keys;
    std::vector<HandshakeTruth> handshakes;
    std::map<uint32_t, PathTruth> topology;

    std::string to_json() const;
};

struct SynthOutput {
    Trace trace;
    GroundTruth truth;
};

/// Builds the aggregate trace. Each source runs its own deterministic
/// substream of the master seed, so adding sources never perturbs existing
/// ones and equal seeds give byte-identical traces. Packets are emitted at
/// fixed spacing 1/rate inside ON periods, timestamps quantized to 1 us.
SynthOutput generate(const SourceModel& model, double duration);
SynthOutput generate(const SourceModel& model);

using Topology = std::map<uint32_t, PathTruth>;

/// Deterministic address plan: source i sends from synth_source_ip(i)
/// toward the common sink.
uint32_t synth_source_ip(uint32_t index);
extern const uint32_t kSynthSinkIp;

/// Topology the model's path emulation uses: client distances cycle
/// [client_hops_min, client_hops_max] (initial TTL 128), the sink sits
/// server_hops away (initial TTL 64), and each client's scripted RTT is
/// ms_per_hop * (client hops + server hops + 1).
Topology build_topology(const SourceModel& model);

/// Rewrites every packet's TTL to initial_ttl - distance of its sender and
/// injects one scripted handshake per directional TCP key (SYN at the key's
/// first packet, SYN+ACK half an RTT later, ACK a full RTT later). Every IP
/// in the trace must appear in the topology. When `truth` is given, the
/// injected packets and the topology are recorded there.
Trace emulate_path(const Trace& trace, const Topology& topology,
                   GroundTruth* truth = nullptr);

}  // namespace tracekit
