#include "tracekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tracekit {

namespace {

constexpr uint8_t kProtoOther = 47;  // a portless protocol for "other" sources

double quantize_us(double t) { return std::round(t * 1e6) / 1e6; }

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t source_seed(uint64_t master, uint32_t index) {
    return splitmix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

// 53-bit uniform in [0, 1); avoids implementation-defined distributions so
// equal seeds reproduce across platforms.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Pareto via inverse transform, parameterized by its mean: the scale is
// mean * (shape - 1) / shape. A zero mean collapses to zero.
double pareto_sample(double mean, double shape, std::mt19937_64& rng) {
    if (mean <= 0.0) return 0.0;
    double scale = mean * (shape - 1.0) / shape;
    double u = uniform01(rng);
    return scale / std::pow(1.0 - u, 1.0 / shape);
}

}  // namespace

void SourceModel::validate() const {
    auto bad = [](const std::string& what) {
        throw std::invalid_argument("source model: " + what);
    };
    if (n_sources < 1) bad("n_sources must be >= 1");
    if (!(on_shape > 1.0 && on_shape <= 2.0)) bad("on_shape must be in (1, 2]");
    if (!(off_shape > 1.0 && off_shape <= 2.0))
        bad("off_shape must be in (1, 2]");
    if (!(mean_on > 0.0)) bad("mean_on must be > 0");
    if (mean_off < 0.0) bad("mean_off must be >= 0");
    if (!(rate_pps > 0.0)) bad("rate_pps must be > 0");
    if (rate_mode == RateMode::kPareto && !(rate_shape > 1.0))
        bad("rate_shape must be > 1");
    if (packet_size < 40) bad("packet_size must be >= 40 bytes");
    if (!(duration > 0.0)) bad("duration must be > 0");
    if (!(tau > 0.0)) bad("tau must be > 0");
    if (tcp_share < 0.0 || udp_share < 0.0 || tcp_share + udp_share > 1.0 + 1e-12)
        bad("protocol shares must be nonnegative and sum to at most 1");
    if (path_emulation) {
        if (client_hops_min < 0 || client_hops_max < client_hops_min)
            bad("client hop range is inverted");
        if (server_hops < 0) bad("server_hops must be >= 0");
        if (!(ms_per_hop > 0.0)) bad("ms_per_hop must be > 0");
        if (client_hops_max >= 128) bad("client hops must stay below 128");
        if (server_hops >= 64) bad("server hops must stay below 64");
    }
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    const char* begin = v.c_str();
    char* end = nullptr;
    double d = strtod(begin, &end);
    if (v.empty() || end != begin + v.size())
        throw std::runtime_error("model config: bad value for " + key);
    return d;
}

int64_t to_int(const std::string& v, const std::string& key) {
    double d = to_double(v, key);
    auto i = static_cast<int64_t>(d);
    if (static_cast<double>(i) != d)
        throw std::runtime_error("model config: " + key + " must be an integer");
    return i;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw std::runtime_error("model config: bad value for " + key);
}

}  // namespace

SourceModel parse_model(std::istream& in) {
    SourceModel m;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("model config line " +
                                     std::to_string(lineno) +
                                     ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "n_sources")
            m.n_sources = static_cast<uint32_t>(to_int(val, key));
        else if (key == "on_shape")
            m.on_shape = to_double(val, key);
        else if (key == "off_shape")
            m.off_shape = to_double(val, key);
        else if (key == "mean_on")
            m.mean_on = to_double(val, key);
        else if (key == "mean_off")
            m.mean_off = to_double(val, key);
        else if (key == "rate_mode") {
            if (val == "uniform")
                m.rate_mode = RateMode::kUniform;
            else if (val == "pareto")
                m.rate_mode = RateMode::kPareto;
            else
                throw std::runtime_error(
                    "model config: rate_mode must be uniform or pareto");
        } else if (key == "rate_pps")
            m.rate_pps = to_double(val, key);
        else if (key == "rate_shape")
            m.rate_shape = to_double(val, key);
        else if (key == "packet_size")
            m.packet_size = static_cast<uint32_t>(to_int(val, key));
        else if (key == "seed")
            m.seed = static_cast<uint64_t>(to_int(val, key));
        else if (key == "duration")
            m.duration = to_double(val, key);
        else if (key == "tau")
            m.tau = to_double(val, key);
        else if (key == "tcp_share")
            m.tcp_share = to_double(val, key);
        else if (key == "udp_share")
            m.udp_share = to_double(val, key);
        else if (key == "path_emulation")
            m.path_emulation = to_bool(val, key);
        else if (key == "client_hops_min")
            m.client_hops_min = static_cast<int>(to_int(val, key));
        else if (key == "client_hops_max")
            m.client_hops_max = static_cast<int>(to_int(val, key));
        else if (key == "server_hops")
            m.server_hops = static_cast<int>(to_int(val, key));
        else if (key == "ms_per_hop")
            m.ms_per_hop = to_double(val, key);
        else
            throw std::runtime_error("model config line " +
                                     std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
    }
    m.validate();
    return m;
}

SourceModel parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_model(in);
}

SourceModel parse_model_string(const std::string& text) {
    std::istringstream ss(text);
    return parse_model(ss);
}

uint32_t synth_source_ip(uint32_t index) {
    return (10u << 24) | (index + 1);  // 10.0.0.1 upward
}

const uint32_t kSynthSinkIp = (192u << 24) | (168u << 16) | 1u;  // 192.168.0.1

Topology build_topology(const SourceModel& model) {
    Topology topo;
    int span = model.client_hops_max - model.client_hops_min + 1;
    for (uint32_t i = 0; i < model.n_sources; ++i) {
        int dist = model.client_hops_min + static_cast<int>(i % span);
        int total_hops = dist + model.server_hops + 1;
        topo[synth_source_ip(i)] =
            PathTruth{dist, 128, model.ms_per_hop * 1e-3 * total_hops};
    }
    topo[kSynthSinkIp] = PathTruth{model.server_hops, 64, 0.0};
    return topo;
}

SynthOutput generate(const SourceModel& model) {
    return generate(model, model.duration);
}

SynthOutput generate(const SourceModel& model, double duration) {
    model.validate();
    if (!(duration > 0.0))
        throw std::invalid_argument("generate: duration must be > 0");

    SynthOutput out;
    GroundTruth& gt = out.truth;
    gt.theoretical_h = (3.0 - std::min(model.on_shape, model.off_shape)) / 2.0;
    gt.tau = model.tau;

    auto n = model.n_sources;
    auto tcp_end = static_cast<uint32_t>(std::llround(model.tcp_share * n));
    auto udp_end = static_cast<uint32_t>(
        std::llround((model.tcp_share + model.udp_share) * n));
    double guard = model.tau * 1e-9;

    auto& packets = out.trace.packets;
    for (uint32_t i = 0; i < n; ++i) {
        std::mt19937_64 rng(source_seed(model.seed, i));
        double rate = model.rate_mode == RateMode::kUniform
                          ? model.rate_pps
                          : pareto_sample(model.rate_pps, model.rate_shape, rng);

        PacketRecord proto;
        proto.size = model.packet_size;
        proto.src_ip = synth_source_ip(i);
        proto.dst_ip = kSynthSinkIp;
        proto.ttl = 64;
        if (i < tcp_end) {
            proto.protocol = kProtoTcp;
            proto.src_port = static_cast<uint16_t>(10000 + i % 50000);
            proto.dst_port = 80;
            proto.tcp_flags = tcpflag::kAck | tcpflag::kPsh;
        } else if (i < udp_end) {
            proto.protocol = kProtoUdp;
            proto.src_port = static_cast<uint16_t>(10000 + i % 50000);
            proto.dst_port = 53;
        } else {
            proto.protocol = kProtoOther;
        }

        SourceTruth st;
        st.index = i;
        st.src_ip = proto.src_ip;
        st.src_port = proto.src_port;
        st.protocol = proto.protocol;
        st.rate_pps = rate;

        KeyTruth& kt = gt.keys[FlowKey::of(proto)];
        double t = 0.0;
        while (t < duration) {
            t += pareto_sample(model.mean_off, model.off_shape, rng);
            if (t >= duration) break;
            double on_len = pareto_sample(model.mean_on, model.on_shape, rng);
            double emit_end = std::min(t + on_len, duration);
            st.on_intervals.emplace_back(t, emit_end);
            for (uint64_t k = 0;; ++k) {
                double tp = t + static_cast<double>(k) / rate;
                if (tp >= emit_end) break;
                PacketRecord p = proto;
                p.timestamp = quantize_us(tp);
                packets.push_back(p);
                ++kt.packets;
                kt.bytes += p.size;
                ++kt.bin_counts[static_cast<size_t>(
                    std::floor((p.timestamp + guard) / model.tau))];
            }
            t += on_len;
        }
        gt.sources.push_back(std::move(st));
    }

    // Totals from the per-key records keep a single source of truth.
    gt.total_packets = 0;
    gt.total_bytes = 0;
    for (const auto& [key, kt] : gt.keys) {
        gt.total_packets += kt.packets;
        gt.total_bytes += kt.bytes;
    }

    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    out.trace.duration = duration;

    if (model.path_emulation)
        out.trace = emulate_path(out.trace, build_topology(model), &gt);
    return out;
}

Trace emulate_path(const Trace& trace, const Topology& topology,
                   GroundTruth* truth) {
    auto spec_of = [&](uint32_t ip) -> const PathTruth& {
        auto it = topology.find(ip);
        if (it == topology.end())
            throw std::runtime_error("emulate_path: no topology entry for " +
                                     format_ipv4(ip));
        return it->second;
    };
    auto rewritten_ttl = [&](uint32_t ip) {
        const PathTruth& spec = spec_of(ip);
        int ttl = static_cast<int>(spec.initial_ttl) - spec.distance;
        if (ttl < 1)
            throw std::runtime_error(
                "emulate_path: distance exhausts the TTL of " + format_ipv4(ip));
        return static_cast<uint8_t>(ttl);
    };

    Trace out;
    out.packets.reserve(trace.packets.size());
    out.duration = trace.duration;
    out.origin = trace.origin;

    std::map<FlowKey, double> first_seen;  // directional TCP keys
    for (const auto& p : trace.packets) {
        PacketRecord q = p;
        q.ttl = rewritten_ttl(p.src_ip);
        spec_of(p.dst_ip);  // both endpoints must be mapped
        out.packets.push_back(q);
        if (p.protocol == kProtoTcp)
            first_seen.emplace(FlowKey::of(p), p.timestamp);
    }

    double tau = truth ? truth->tau : 0.1;
    double guard = tau * 1e-9;
    auto bin_of = [&](double t) {
        return static_cast<size_t>(std::floor((t + guard) / tau));
    };

    for (const auto& [key, t0] : first_seen) {
        const PathTruth& client = spec_of(key.src_ip);
        if (client.base_rtt <= 0.0)
            throw std::runtime_error(
                "emulate_path: nonpositive scripted RTT for " +
                format_ipv4(key.src_ip));
        double t_syn = quantize_us(t0);
        double t_synack = quantize_us(t0 + client.base_rtt / 2.0);
        double t_ack = quantize_us(t0 + client.base_rtt);

        PacketRecord syn;
        syn.timestamp = t_syn;
        syn.size = 40;
        syn.src_ip = key.src_ip;
        syn.dst_ip = key.dst_ip;
        syn.src_port = key.src_port;
        syn.dst_port = key.dst_port;
        syn.protocol = kProtoTcp;
        syn.ttl = rewritten_ttl(key.src_ip);
        syn.tcp_flags = tcpflag::kSyn;

        PacketRecord synack = syn;
        synack.timestamp = t_synack;
        synack.src_ip = key.dst_ip;
        synack.dst_ip = key.src_ip;
        synack.src_port = key.dst_port;
        synack.dst_port = key.src_port;
        synack.ttl = rewritten_ttl(key.dst_ip);
        synack.tcp_flags = tcpflag::kSyn | tcpflag::kAck;

        PacketRecord ack = syn;
        ack.timestamp = t_ack;
        ack.tcp_flags = tcpflag::kAck;

        out.packets.push_back(syn);
        out.packets.push_back(synack);
        out.packets.push_back(ack);

        if (truth) {
            truth->handshakes.push_back({key, t_syn, t_synack, t_ack});
            KeyTruth& fwd = truth->keys[key];
            fwd.packets += 2;
            fwd.bytes += 80;
            ++fwd.bin_counts[bin_of(t_syn)];
            ++fwd.bin_counts[bin_of(t_ack)];
            KeyTruth& rev = truth->keys[key.reversed()];
            rev.packets += 1;
            rev.bytes += 40;
            ++rev.bin_counts[bin_of(t_synack)];
            truth->total_packets += 3;
            truth->total_bytes += 120;
        }
    }

    std::stable_sort(out.packets.begin(), out.packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    out.duration = std::max(out.duration, out.last_timestamp());
    if (truth) truth->topology = topology;
    return out;
}

std::string GroundTruth::to_json() const {
    nlohmann::ordered_json j;
    j["theoretical_h"] = theoretical_h;
    j["tau"] = tau;
    j["total_packets"] = total_packets;
    j["total_bytes"] = total_bytes;

    j["sources"] = nlohmann::ordered_json::array();
    for (const auto& s : sources) {
        nlohmann::ordered_json js;
        js["index"] = s.index;
        js["src_ip"] = format_ipv4(s.src_ip);
        js["src_port"] = s.src_port;
        js["protocol"] = s.protocol;
        js["rate_pps"] = s.rate_pps;
        auto intervals = nlohmann::ordered_json::array();
        for (const auto& [a, b] : s.on_intervals)
            intervals.push_back({a, b});
        js["on_intervals"] = std::move(intervals);
        j["sources"].push_back(std::move(js));
    }

    j["keys"] = nlohmann::ordered_json::array();
    for (const auto& [key, kt] : keys) {
        nlohmann::ordered_json jk;
        jk["src_ip"] = format_ipv4(key.src_ip);
        jk["dst_ip"] = format_ipv4(key.dst_ip);
        jk["src_port"] = key.src_port;
        jk["dst_port"] = key.dst_port;
        jk["protocol"] = key.protocol;
        jk["packets"] = kt.packets;
        jk["bytes"] = kt.bytes;
        auto bins = nlohmann::ordered_json::array();
        for (const auto& [bin, count] : kt.bin_counts)
            bins.push_back({bin, count});
        jk["bin_counts"] = std::move(bins);
        j["keys"].push_back(std::move(jk));
    }

    j["handshakes"] = nlohmann::ordered_json::array();
    for (const auto& h : handshakes) {
        nlohmann::ordered_json jh;
        jh["src_ip"] = format_ipv4(h.key.src_ip);
        jh["dst_ip"] = format_ipv4(h.key.dst_ip);
        jh["src_port"] = h.key.src_port;
        jh["dst_port"] = h.key.dst_port;
        jh["t_syn"] = h.t_syn;
        jh["t_synack"] = h.t_synack;
        jh["t_ack"] = h.t_ack;
        j["handshakes"].push_back(std::move(jh));
    }

    j["topology"] = nlohmann::ordered_json::array();
    for (const auto& [ip, spec] : topology) {
        nlohmann::ordered_json jt;
        jt["ip"] = format_ipv4(ip);
        jt["distance"] = spec.distance;
        jt["initial_ttl"] = spec.initial_ttl;
        jt["base_rtt_s"] = spec.base_rtt;
        j["topology"].push_back(std::move(jt));
    }
    return j.dump(2) + "\n";
}

}  // namespace tracekit
