#include "tracekit/path.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace tracekit {

uint8_t infer_initial_ttl(uint8_t observed) {
    if (observed == 0)
        throw std::invalid_argument("infer_initial_ttl: observed TTL is 0");
    for (uint8_t candidate : {32, 64, 128})
        if (observed <= candidate) return candidate;
    return 255;
}

namespace {

struct DirectionStats {
    std::map<uint8_t, uint32_t> ttl_counts;
    std::set<uint8_t> initials;  // distinct inferred initial TTLs
};

// Modal TTL; ties resolved toward the smaller TTL by ascending iteration.
uint8_t modal_ttl(const std::map<uint8_t, uint32_t>& counts) {
    uint8_t best = 0;
    uint32_t best_n = 0;
    for (const auto& [ttl, n] : counts) {
        if (n > best_n) {
            best = ttl;
            best_n = n;
        }
    }
    return best;
}

}  // namespace

std::vector<HopEstimate> estimate_hops(const Trace& trace) {
    // Forward = packets travelling in the canonical key direction.
    std::map<FlowKey, std::pair<DirectionStats, DirectionStats>> keys;
    for (const auto& p : trace.packets) {
        if (p.ttl == 0) continue;
        FlowKey dir = FlowKey::of(p);
        DirectionStats& stats = dir.is_canonical()
                                    ? keys[dir].first
                                    : keys[dir.canonical()].second;
        ++stats.ttl_counts[p.ttl];
        stats.initials.insert(infer_initial_ttl(p.ttl));
    }

    std::vector<HopEstimate> out;
    std::unordered_map<uint32_t, std::set<int>> sender_decs;
    for (const auto& [key, dirs] : keys) {
        const auto& [fwd, rev] = dirs;
        if (fwd.ttl_counts.empty() || rev.ttl_counts.empty())
            continue;  // one-way keys carry no round-trip TTL evidence

        uint8_t ttl_fwd = modal_ttl(fwd.ttl_counts);
        uint8_t ttl_rev = modal_ttl(rev.ttl_counts);
        HopEstimate est;
        est.key = key;
        est.dec_src = infer_initial_ttl(ttl_fwd) - ttl_fwd;
        est.dec_dst = infer_initial_ttl(ttl_rev) - ttl_rev;
        est.hops = est.dec_src + est.dec_dst + 1;
        est.ambiguous = fwd.initials.size() > 1 || rev.initials.size() > 1;
        out.push_back(est);

        sender_decs[key.src_ip].insert(est.dec_src);
        sender_decs[key.dst_ip].insert(est.dec_dst);
    }

    // A sender IP with several distinct decrements taints all its keys.
    for (auto& est : out) {
        if (sender_decs[est.key.src_ip].size() > 1 ||
            sender_decs[est.key.dst_ip].size() > 1)
            est.ambiguous = true;
    }
    return out;
}

namespace {

struct HandshakeState {
    bool have_syn = false;
    uint32_t init_ip = 0;  // the SYN sender
    uint16_t init_port = 0;
    double t_syn = 0.0;
    double t_synack = -1.0;
    double t_ack = -1.0;
    int dup_syn = 0;
    int dup_synack = 0;
    bool odd = false;  // unexpected pattern, e.g. SYN from both sides
};

}  // namespace

std::vector<HandshakeRecord> estimate_rtts(const Trace& trace) {
    if (!trace.sorted_by_time())
        throw std::invalid_argument("estimate_rtts: trace not sorted");

    std::map<FlowKey, HandshakeState> states;
    for (const auto& p : trace.packets) {
        if (p.protocol != kProtoTcp) continue;
        bool syn = is_pure_syn(p.tcp_flags);
        bool synack = is_syn_ack(p.tcp_flags);
        bool ack = is_handshake_ack(p.tcp_flags);
        if (!syn && !synack && !ack) continue;

        FlowKey key = FlowKey::of(p).canonical();
        HandshakeState& st = states[key];
        if (st.t_ack >= 0.0) continue;  // only the first handshake per key

        bool from_initiator =
            st.have_syn && p.src_ip == st.init_ip && p.src_port == st.init_port;
        if (syn) {
            if (!st.have_syn) {
                st.have_syn = true;
                st.init_ip = p.src_ip;
                st.init_port = p.src_port;
                st.t_syn = p.timestamp;
            } else if (from_initiator) {
                ++st.dup_syn;
            } else {
                st.odd = true;  // SYN from the responder side
            }
        } else if (synack) {
            if (!st.have_syn || from_initiator) {
                st.odd = st.have_syn ? true : st.odd;
                continue;  // mid-capture or malformed; nothing to anchor on
            }
            if (st.t_synack < 0.0)
                st.t_synack = p.timestamp;
            else
                ++st.dup_synack;
        } else if (ack) {
            if (st.have_syn && st.t_synack >= 0.0 && from_initiator &&
                p.timestamp >= st.t_synack)
                st.t_ack = p.timestamp;
        }
    }

    std::vector<HandshakeRecord> out;
    for (const auto& [key, st] : states) {
        if (!st.have_syn || st.t_synack < 0.0 || st.t_ack < 0.0) continue;
        HandshakeRecord rec;
        rec.key = key;
        rec.t_syn = st.t_syn;
        rec.t_synack = st.t_synack;
        rec.t_ack = st.t_ack;
        rec.rtt = st.t_ack - st.t_syn;
        if (rec.rtt <= 0.0) continue;
        rec.clean = st.dup_syn == 0 && st.dup_synack == 0 && !st.odd &&
                    st.t_syn < st.t_synack && st.t_synack < st.t_ack;
        out.push_back(rec);
    }
    return out;
}

HopsVsRtt hops_vs_rtt(const Trace& trace, double min_share) {
    auto hops = estimate_hops(trace);
    std::map<FlowKey, int> hop_by_key;
    for (const auto& est : hops)
        if (!est.ambiguous) hop_by_key[est.key] = est.hops;

    std::map<int, std::pair<double, size_t>> groups;  // hops -> (rtt sum, n)
    size_t total = 0;
    for (const auto& rec : estimate_rtts(trace)) {
        if (!rec.clean) continue;
        auto it = hop_by_key.find(rec.key);
        if (it == hop_by_key.end()) continue;
        auto& g = groups[it->second];
        g.first += rec.rtt;
        g.second += 1;
        ++total;
    }
    if (total == 0)
        throw std::runtime_error("hops_vs_rtt: no keys with both estimates");

    HopsVsRtt result;
    std::vector<double> xs, ys;
    for (const auto& [h, g] : groups) {
        HopRttGroup grp;
        grp.hops = h;
        grp.mean_rtt = g.first / static_cast<double>(g.second);
        grp.flows = g.second;
        grp.share = static_cast<double>(g.second) / static_cast<double>(total);
        result.groups.push_back(grp);
        if (grp.share > min_share) {
            xs.push_back(static_cast<double>(h));
            ys.push_back(grp.mean_rtt);
        }
    }
    if (xs.size() < 2)
        throw std::runtime_error(
            "hops_vs_rtt: fewer than two hop groups above the share cutoff");
    result.fit = linear_fit(xs, ys);
    result.used_groups = xs.size();
    return result;
}

}  // namespace tracekit
