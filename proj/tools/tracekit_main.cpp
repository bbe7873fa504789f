// tracekit_main.cpp
//
// Command line front end: analyze / simulate / sweep / synth / convert.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tracekit/csv.hpp"
#include "tracekit/pcap.hpp"
#include "tracekit/queue_sim.hpp"
#include "tracekit/report.hpp"
#include "tracekit/synth.hpp"

namespace fs = std::filesystem;
using namespace tracekit;

namespace {

bool looks_like_pcap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    unsigned char magic[4];
    in.read(reinterpret_cast<char*>(magic), 4);
    if (in.gcount() < 4) return false;
    uint32_t m = static_cast<uint32_t>(magic[0]) |
                 (static_cast<uint32_t>(magic[1]) << 8) |
                 (static_cast<uint32_t>(magic[2]) << 16) |
                 (static_cast<uint32_t>(magic[3]) << 24);
    return m == 0xa1b2c3d4 || m == 0xd4c3b2a1 || m == 0xa1b23c4d ||
           m == 0x4d3cb2a1;
}

Trace load_trace(const std::string& path) {
    if (looks_like_pcap(path)) return read_pcap_file(path).trace;
    return read_csv_file(path);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() +
                                 " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

BufferConvention parse_convention(const std::string& name) {
    if (name == "system") return BufferConvention::kSystem;
    if (name == "queue") return BufferConvention::kQueueOnly;
    throw std::runtime_error("buffer convention must be 'system' or 'queue'");
}

// A sweep input is either a directory of traces or a manifest listing one
// path per line (relative entries resolve against the manifest).
std::vector<fs::path> collect_trace_paths(const std::string& input) {
    std::vector<fs::path> paths;
    if (fs::is_directory(input)) {
        for (const auto& entry : fs::directory_iterator(input)) {
            if (!entry.is_regular_file()) continue;
            auto ext = entry.path().extension().string();
            if (ext == ".csv" || ext == ".pcap" || ext == ".cap")
                paths.push_back(entry.path());
        }
        std::sort(paths.begin(), paths.end());
    } else {
        std::ifstream in(input);
        if (!in) throw std::runtime_error("cannot open " + input);
        fs::path base = fs::path(input).parent_path();
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            fs::path p(line);
            paths.push_back(p.is_absolute() ? p : base / p);
        }
    }
    if (paths.empty())
        throw std::runtime_error("no traces found in " + input);
    return paths;
}

int run(int argc, char** argv) {
    CLI::App app{"packet trace statistics and trace-driven queue simulation"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand(
        "analyze", "per-trace statistics, tail fits and path estimates");
    std::string an_input, an_out_dir, an_format = "json";
    AnalysisParams params;
    analyze->add_option("input", an_input, "trace file (pcap or csv)")
        ->required();
    analyze->add_option("--tau", params.tau, "bin width in seconds");
    analyze->add_option("--greedy-threshold", params.greedy_threshold,
                        "packets per bin above which a flow is greedy");
    analyze->add_option("--tail-min", params.tail_min,
                        "smallest packet count used in the tail fit");
    analyze->add_option("--freq-fraction", params.freq_fraction,
                        "fraction of low frequencies fitted for H");
    analyze->add_flag("--bidirectional-flows", params.bidirectional_flows,
                      "merge both directions of a conversation");
    analyze->add_option("--min-share", params.min_share,
                        "flow share a hop group needs to enter the RTT fit");
    analyze->add_option("--out-dir", an_out_dir,
                        "artifact directory (default: <input>.analysis)");
    analyze->add_option("--format", an_format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate", "run the trace through a FIFO tail-drop queue");
    std::string sim_input, sim_convention = "system";
    double sim_rho = 0.6, sim_bandwidth = 0.0;
    uint32_t sim_buffer = 50;
    simulate->add_option("input", sim_input, "trace file (pcap or csv)")
        ->required();
    auto* rho_opt = simulate->add_option(
        "--rho", sim_rho, "target utilization used to derive bandwidth");
    auto* bw_opt = simulate->add_option("--bandwidth", sim_bandwidth,
                                        "fixed service rate in bits/sec");
    simulate->add_option("--buffer", sim_buffer, "buffer size in packets");
    simulate->add_option("--buffer-convention", sim_convention,
                         "'system' counts the packet in service, 'queue' "
                         "counts waiting packets only");

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "analyze and simulate a set of traces, then correlate");
    std::string sw_input, sw_out_dir = "sweep.analysis",
                sw_convention = "system";
    double sw_rho = 0.6, sw_tau = 0.1, sw_fraction = 0.1;
    uint32_t sw_buffer = 50;
    sweep->add_option("input", sw_input, "trace directory or manifest file")
        ->required();
    sweep->add_option("--rho", sw_rho, "target utilization");
    sweep->add_option("--buffer", sw_buffer, "buffer size in packets");
    sweep->add_option("--tau", sw_tau, "bin width in seconds");
    sweep->add_option("--freq-fraction", sw_fraction,
                      "fraction of low frequencies fitted for H");
    sweep->add_option("--buffer-convention", sw_convention,
                      "'system' or 'queue'");
    sweep->add_option("--out-dir", sw_out_dir, "output directory");

    // synth
    auto* synth = app.add_subcommand(
        "synth", "generate a synthetic trace from a source model");
    std::string sy_config, sy_out;
    uint64_t sy_seed = 0;
    bool sy_seed_set = false;
    double sy_duration = 0.0;
    synth->add_option("config", sy_config, "model file (key = value lines)")
        ->required();
    synth->add_option("--out", sy_out, "output trace CSV path")->required();
    synth->add_option("--seed", sy_seed, "override the model seed")
        ->each([&](const std::string&) { sy_seed_set = true; });
    synth->add_option("--duration", sy_duration,
                      "override the model duration in seconds");

    // convert
    auto* convert =
        app.add_subcommand("convert", "convert between pcap and csv");
    std::string cv_input, cv_output, cv_to;
    convert->add_option("input", cv_input, "trace file (pcap or csv)")
        ->required();
    convert->add_option("output", cv_output, "output path")->required();
    convert->add_option("--to", cv_to, "output format (default: by extension)")
        ->check(CLI::IsMember({"pcap", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);  // prints usage; -h exits 0
    }

    if (*analyze) {
        Trace trace = load_trace(an_input);
        std::string name = fs::path(an_input).stem().string();
        AnalysisOutput out = analyze_trace(trace, name, params);

        fs::path dir = an_out_dir.empty() ? fs::path(an_input + ".analysis")
                                          : fs::path(an_out_dir);
        fs::create_directories(dir);
        std::string report = out.report.dump(2) + "\n";
        if (an_format == "csv") {
            write_file(dir / "report.csv", report_as_csv(out.report));
        } else {
            write_file(dir / "report.json", report);
        }
        for (const auto& [file, content] : out.artifacts)
            write_file(dir / file, content);
        std::cout << report;
        return 0;
    }

    if (*simulate) {
        Trace trace = load_trace(sim_input);
        SimConfig cfg;
        if (bw_opt->count() > 0) {
            if (rho_opt->count() > 0)
                throw std::runtime_error(
                    "choose either --bandwidth or --rho, not both");
            cfg.bandwidth_bps = sim_bandwidth;
        } else {
            cfg.target_utilization = sim_rho;
        }
        cfg.buffer_packets = sim_buffer;
        cfg.convention = parse_convention(sim_convention);
        std::string name = fs::path(sim_input).stem().string();
        std::cout << simulate_report(trace, name, cfg).dump(2) << "\n";
        return 0;
    }

    if (*sweep) {
        auto paths = collect_trace_paths(sw_input);
        std::vector<Trace> traces;
        std::vector<std::string> ids;
        for (const auto& p : paths) {
            traces.push_back(load_trace(p.string()));
            ids.push_back(p.stem().string());
        }
        SweepOutput out =
            sweep_report(traces, ids, sw_rho, sw_buffer, sw_tau, sw_fraction,
                         parse_convention(sw_convention));
        fs::path dir(sw_out_dir);
        fs::create_directories(dir);
        std::string summary = out.summary.dump(2) + "\n";
        write_file(dir / "sweep.csv", out.table_csv);
        write_file(dir / "sweep.json", summary);
        std::cout << summary;
        return 0;
    }

    if (*synth) {
        SourceModel model = parse_model_file(sy_config);
        if (sy_seed_set) model.seed = sy_seed;
        if (synth->count("--duration") > 0) model.duration = sy_duration;
        SynthOutput out = generate(model);
        write_csv_file(sy_out, out.trace);
        write_file(fs::path(sy_out + ".truth.json"), out.truth.to_json());
        std::cout << "wrote " << sy_out << " (" << out.trace.packets.size()
                  << " packets)\n";
        return 0;
    }

    if (*convert) {
        Trace trace = load_trace(cv_input);
        std::string to = cv_to;
        if (to.empty()) {
            auto ext = fs::path(cv_output).extension().string();
            to = (ext == ".pcap" || ext == ".cap") ? "pcap" : "csv";
        }
        if (to == "pcap")
            write_pcap_file(cv_output, trace);
        else
            write_csv_file(cv_output, trace);
        std::cout << "wrote " << cv_output << " (" << trace.packets.size()
                  << " packets)\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
