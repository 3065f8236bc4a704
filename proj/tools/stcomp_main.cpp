// stcomp: streaming trajectory compression under per-window bandwidth caps.
//
// Subcommands: compress | evaluate | histogram | bench | synth. Every run
// echoes its fully resolved configuration on stderr (stdout carries only the
// requested artifact), outputs are byte-deterministic unless --timing is
// given, and no subcommand ever writes to its input files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stcomp/bwc.hpp"
#include "stcomp/classic.hpp"
#include "stcomp/eval.hpp"
#include "stcomp/geom.hpp"
#include "stcomp/ingest.hpp"
#include "stcomp/synth.hpp"

namespace {

using namespace stcomp;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

[[noreturn]] void usage_error(const std::string& msg) { raise(errc::config, msg); }

// Inputs resolve against the working directory first, then STCOMP_DATA_DIR.
std::string resolve_input(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("STCOMP_DATA_DIR")) {
        fs::path alt = fs::path(dir) / path;
        if (fs::exists(alt)) return alt.string();
    }
    raise(errc::io, "input file not found: " + path);
}

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path, std::ios::binary);
        if (!file) raise(errc::io, "cannot write " + path);
        os = &file;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// One "config:" line per run, listing every resolved parameter.
class Echo {
  public:
    explicit Echo(const std::string& sub) { line_ << "config: subcommand=" << sub; }
    Echo& kv(const std::string& k, const std::string& v) {
        line_ << ' ' << k << '=' << (v.empty() ? "-" : v);
        return *this;
    }
    Echo& kv(const std::string& k, double v) { return kv(k, fmt(v)); }
    Echo& kv(const std::string& k, std::size_t v) { return kv(k, std::to_string(v)); }
    void flush() { std::cerr << line_.str() << '\n'; }

  private:
    std::ostringstream line_;
};

classic::Predictor parse_predictor(const std::string& name) {
    if (name == "two_point") return classic::Predictor::two_point;
    if (name == "sog_cog") return classic::Predictor::sog_cog;
    usage_error("unknown predictor '" + name + "' (two_point | sog_cog)");
}

bwc::ImpPrioritySign parse_imp_sign(const std::string& name) {
    if (name == "error_increase") return bwc::ImpPrioritySign::error_increase;
    if (name == "as_printed") return bwc::ImpPrioritySign::as_printed;
    usage_error("unknown imp sign '" + name + "' (error_increase | as_printed)");
}

ingest::SchemaConfig schema_for(const std::string& schema_path) {
    if (schema_path.empty()) return {};
    return ingest::load_schema(resolve_input(schema_path));
}

// ---------------------------------------------------------------- compress

struct CompressArgs {
    std::string input;
    std::string output;
    std::string schema;
    std::string algo;
    double ratio = 0.0;
    std::size_t capacity = 0;
    std::size_t buffer = 0;
    double epsilon = 0.0;
    double tolerance = -1.0;
    std::size_t bw = 0;
    double delta = 900.0;
    double start = std::numeric_limits<double>::quiet_NaN();
    double imp_precision = 0.0;
    std::string imp_sign = "error_increase";
    std::string predictor = "two_point";
};

void exclusive(bool explicit_set, double ratio, const char* what) {
    if (explicit_set && ratio > 0.0)
        usage_error(std::string("--ratio and ") + what + " are mutually exclusive");
}

int run_compress(const CompressArgs& a) {
    auto algo = eval::algo_from_name(a.algo);
    if (!algo) usage_error("unknown algorithm '" + a.algo + "'");

    auto origin = ingest::load_csv(resolve_input(a.input), schema_for(a.schema));
    auto stream = ingest::merge_stream(origin.trajectories);
    std::size_t total = stream.size();
    double duration = stream.back().ts - stream.front().ts;

    Echo echo("compress");
    echo.kv("algo", a.algo).kv("input", a.input).kv("output", a.output).kv("schema", a.schema);
    if (a.ratio > 0.0) echo.kv("ratio", a.ratio);

    std::map<TrajId, Sample> samples;
    switch (*algo) {
        case eval::Algo::tdtr: {
            exclusive(a.tolerance >= 0.0, a.ratio, "--tolerance");
            double tol = a.tolerance;
            if (tol < 0.0) {
                if (!(a.ratio > 0.0)) usage_error("tdtr needs --tolerance or --ratio");
                tol = eval::calibrate_threshold(*algo, origin.trajectories, a.ratio,
                                                parse_predictor(a.predictor));
            }
            echo.kv("tolerance", tol);
            for (const auto& [id, t] : origin.trajectories)
                samples.emplace(id, classic::tdtr(t, {tol}));
            break;
        }
        case eval::Algo::squish: {
            exclusive(a.capacity > 0, a.ratio, "--capacity");
            if (a.capacity == 0 && !(a.ratio > 0.0))
                usage_error("squish needs --capacity or --ratio");
            if (a.capacity > 0)
                echo.kv("capacity", a.capacity);
            else
                echo.kv("capacity", std::string("ceil(ratio*len)"));
            for (const auto& [id, t] : origin.trajectories) {
                std::size_t cap = a.capacity > 0
                                      ? a.capacity
                                      : eval::squish_capacity(a.ratio, t.points.size());
                samples.emplace(id, classic::squish(t, {cap}));
            }
            break;
        }
        case eval::Algo::sttrace: {
            exclusive(a.buffer > 0, a.ratio, "--buffer");
            std::size_t buf = a.buffer;
            if (buf == 0) {
                if (!(a.ratio > 0.0)) usage_error("sttrace needs --buffer or --ratio");
                buf = eval::sttrace_buffer(a.ratio, total);
            }
            echo.kv("buffer", buf);
            samples = classic::sttrace(stream, {buf});
            break;
        }
        case eval::Algo::dr: {
            exclusive(a.epsilon > 0.0, a.ratio, "--epsilon");
            double eps = a.epsilon;
            if (!(eps > 0.0)) {
                if (!(a.ratio > 0.0)) usage_error("dr needs --epsilon or --ratio");
                eps = eval::calibrate_threshold(*algo, origin.trajectories, a.ratio,
                                                parse_predictor(a.predictor));
            }
            echo.kv("epsilon", eps).kv("predictor", a.predictor);
            samples = classic::dead_reckoning(stream, {eps, parse_predictor(a.predictor)});
            break;
        }
        default: {
            exclusive(a.bw > 0, a.ratio, "--bw");
            bwc::BwcConfig cfg;
            cfg.algorithm = *algo == eval::Algo::bwc_squish        ? bwc::Algorithm::squish
                            : *algo == eval::Algo::bwc_sttrace     ? bwc::Algorithm::sttrace
                            : *algo == eval::Algo::bwc_sttrace_imp ? bwc::Algorithm::sttrace_imp
                                                                   : bwc::Algorithm::dr;
            cfg.window.delta = a.delta;
            cfg.window.start = std::isnan(a.start) ? stream.front().ts : a.start;
            cfg.window.bw = a.bw;
            if (cfg.window.bw == 0) {
                if (!(a.ratio > 0.0)) usage_error(a.algo + " needs --bw or --ratio");
                cfg.window.bw = eval::bwc_budget(a.ratio, total, a.delta, duration);
            }
            double prec = a.imp_precision > 0.0 ? a.imp_precision : std::min(1.0, a.delta);
            cfg.imp = {prec, parse_imp_sign(a.imp_sign)};
            cfg.predictor = parse_predictor(a.predictor);
            echo.kv("delta", cfg.window.delta)
                .kv("start", cfg.window.start)
                .kv("bw", cfg.window.bw);
            if (*algo == eval::Algo::bwc_sttrace_imp)
                echo.kv("imp_precision", prec).kv("imp_sign", a.imp_sign);
            if (*algo == eval::Algo::bwc_dr) echo.kv("predictor", a.predictor);
            samples = bwc::compress(stream, cfg);
            break;
        }
    }
    echo.flush();

    Output out(a.output);
    ingest::write_sample_csv(origin, samples, *out.os);
    return 0;
}

// ---------------------------------------------------------------- evaluate

int run_evaluate(const std::string& input, const std::string& sample_path,
                 const std::string& schema, double interval, const std::string& output) {
    auto cfg = schema_for(schema);
    auto origin = ingest::load_csv(resolve_input(input), cfg);
    // the sample evaluates in the original's projection plane so identical
    // lat/lon cells land on identical meters
    auto sampled = ingest::load_csv(resolve_input(sample_path), cfg, origin.projection);

    double iv = interval > 0.0 ? interval : eval::default_interval(origin.trajectories);

    std::map<TrajId, Sample> samples;
    std::size_t skipped = 0;
    for (const auto& [id, t] : sampled.trajectories) {
        if (t.points.size() < 2) {
            ++skipped;  // a single kept point reconstructs nothing
            continue;
        }
        samples.emplace(id, Sample{id, t.points});
    }
    Echo echo("evaluate");
    echo.kv("input", input)
        .kv("sample", sample_path)
        .kv("schema", schema)
        .kv("interval", iv)
        .kv("degenerate_skipped", skipped);
    echo.flush();

    auto rep = eval::accuracy(origin.trajectories, samples, iv);
    Output out(output);
    eval::write_accuracy_csv(rep, *out.os);
    return 0;
}

// --------------------------------------------------------------- histogram

int run_histogram(const std::string& sample_path, const std::string& schema, double delta,
                  double start_opt, bool start_given, const std::string& output) {
    auto sampled = ingest::load_csv(resolve_input(sample_path), schema_for(schema));
    double start = start_given ? start_opt : ingest::merge_stream(sampled.trajectories).front().ts;

    Echo echo("histogram");
    echo.kv("sample", sample_path).kv("schema", schema).kv("delta", delta).kv("start", start);
    echo.flush();

    std::map<TrajId, Sample> samples;
    for (const auto& [id, t] : sampled.trajectories) samples.emplace(id, Sample{id, t.points});
    auto h = eval::window_histogram(samples, {start, delta, 1});
    Output out(output);
    eval::write_histogram_csv(h, *out.os);
    return 0;
}

// ------------------------------------------------------------------- bench

struct SynthArgs {
    std::string model = "random_walk";
    int trajectories = 10;
    double duration = 3600.0;
    double period = 10.0;
    double speed = 10.0;
    int leg_steps = 8;
    double burst_start = -1.0;
    double burst_len = 300.0;
    double burst_fraction = 0.85;
    bool no_sog_cog = false;

    ingest::SynthSpec spec() const {
        auto m = ingest::model_from_name(model);
        if (!m) usage_error("unknown motion model '" + model + "'");
        ingest::SynthSpec s;
        s.model = *m;
        s.trajectories = trajectories;
        s.duration = duration;
        s.period = period;
        s.speed = speed;
        s.leg_steps = leg_steps;
        s.burst_start = burst_start;
        s.burst_len = burst_len;
        s.burst_fraction = burst_fraction;
        s.emit_sog_cog = !no_sog_cog;
        return s;
    }
};

struct BenchArgs {
    std::string input;
    std::string schema;
    std::string output;
    std::vector<std::string> algos{"all"};
    double ratio = 0.10;
    double delta = 900.0;
    std::size_t bw = 0;
    double start = std::numeric_limits<double>::quiet_NaN();
    double interval = 0.0;
    double imp_precision = 0.0;
    std::string imp_sign = "error_increase";
    std::string predictor = "two_point";
    bool timing = false;
    std::uint64_t seed = 0;
    bool use_synth = false;
    SynthArgs synth;
};

int run_bench(const BenchArgs& a) {
    if (a.input.empty() == !a.use_synth)
        usage_error("bench needs exactly one of --input or --synth-model");

    std::map<TrajId, Trajectory> originals;
    if (!a.input.empty())
        originals = ingest::load_csv(resolve_input(a.input), schema_for(a.schema)).trajectories;
    else
        originals = ingest::synth(a.seed, a.synth.spec());

    eval::CompareSpec spec;
    if (!(a.algos.size() == 1 && a.algos[0] == "all")) {
        for (const std::string& name : a.algos) {
            auto algo = eval::algo_from_name(name);
            if (!algo) usage_error("unknown algorithm '" + name + "'");
            spec.algos.push_back(*algo);
        }
    }
    spec.ratio = a.ratio;
    spec.window.delta = a.delta;
    spec.window.bw = a.bw;
    spec.window.start =
        std::isnan(a.start) ? ingest::merge_stream(originals).front().ts : a.start;
    spec.interval = a.interval;
    spec.imp_precision = a.imp_precision;
    spec.imp_sign = parse_imp_sign(a.imp_sign);
    spec.predictor = parse_predictor(a.predictor);
    spec.timing = a.timing;

    Echo echo("bench");
    echo.kv("input", a.input.empty() ? "synth:" + a.synth.model : a.input)
        .kv("seed", static_cast<std::size_t>(a.seed))
        .kv("ratio", spec.ratio)
        .kv("delta", spec.window.delta)
        .kv("bw", spec.window.bw)
        .kv("start", spec.window.start)
        .kv("interval", spec.interval)
        .kv("imp_sign", a.imp_sign)
        .kv("predictor", a.predictor)
        .kv("timing", std::string(a.timing ? "on" : "off"));
    echo.flush();

    auto rows = eval::compare(originals, spec);
    Output out(a.output);
    eval::write_compare_csv(rows, *out.os);
    return 0;
}

// ------------------------------------------------------------------- synth

int run_synth(const SynthArgs& a, std::uint64_t seed, const std::string& output) {
    auto made = ingest::synth(seed, a.spec());
    Echo echo("synth");
    echo.kv("model", a.model)
        .kv("seed", static_cast<std::size_t>(seed))
        .kv("trajectories", static_cast<std::size_t>(a.trajectories))
        .kv("duration", a.duration)
        .kv("period", a.period)
        .kv("output", output);
    echo.flush();
    Output out(output);
    ingest::write_canonical_csv(made, *out.os, !a.no_sog_cog);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming trajectory compression under per-window bandwidth caps"};
    app.require_subcommand(1);

    // compress
    CompressArgs ca;
    auto* compress = app.add_subcommand("compress", "compress a trajectory CSV into a sample");
    compress->add_option("--input", ca.input, "trajectory CSV")->required();
    compress->add_option("--output", ca.output, "sample CSV (default stdout)");
    compress->add_option("--schema", ca.schema, "schema file for the input");
    compress->add_option("--algo", ca.algo,
                         "tdtr | squish | sttrace | dr | bwc-squish | bwc-sttrace | "
                         "bwc-sttrace-imp | bwc-dr")
        ->required();
    compress->add_option("--ratio", ca.ratio, "target kept/raw ratio, derives the parameter");
    compress->add_option("--capacity", ca.capacity, "squish: per-trajectory budget");
    compress->add_option("--buffer", ca.buffer, "sttrace: shared buffer size");
    compress->add_option("--epsilon", ca.epsilon, "dr: keep threshold, meters");
    compress->add_option("--tolerance", ca.tolerance, "tdtr: max SED, meters");
    compress->add_option("--bw", ca.bw, "bwc: points per window");
    compress->add_option("--delta", ca.delta, "bwc: window length, seconds");
    compress->add_option("--start", ca.start, "bwc: window origin (default first point)");
    compress->add_option("--imp-precision", ca.imp_precision, "bwc-sttrace-imp: grid step, s");
    compress->add_option("--imp-sign", ca.imp_sign, "error_increase | as_printed");
    compress->add_option("--predictor", ca.predictor, "two_point | sog_cog");

    // evaluate
    std::string ev_input;
    std::string ev_sample;
    std::string ev_schema;
    std::string ev_output;
    double ev_interval = 0.0;
    auto* evaluate = app.add_subcommand("evaluate", "score a sample against its original");
    evaluate->add_option("--input", ev_input, "original trajectory CSV")->required();
    evaluate->add_option("--sample", ev_sample, "sample CSV")->required();
    evaluate->add_option("--schema", ev_schema, "schema file");
    evaluate->add_option("--interval", ev_interval, "grid step, s (default: median-gap rule)");
    evaluate->add_option("--output", ev_output, "report CSV (default stdout)");

    // histogram
    std::string hi_sample;
    std::string hi_schema;
    std::string hi_output;
    double hi_delta = 900.0;
    double hi_start = 0.0;
    auto* histogram = app.add_subcommand("histogram", "points committed per time window");
    histogram->add_option("--sample", hi_sample, "sample CSV")->required();
    histogram->add_option("--schema", hi_schema, "schema file");
    histogram->add_option("--delta", hi_delta, "window length, seconds");
    auto* hi_start_opt =
        histogram->add_option("--start", hi_start, "window origin (default first point)");
    histogram->add_option("--output", hi_output, "histogram CSV (default stdout)");

    // bench
    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "run the algorithm comparison table");
    bench->add_option("--input", ba.input, "trajectory CSV");
    bench->add_option("--schema", ba.schema, "schema file");
    bench->add_option("--algos", ba.algos, "'all' or comma-separated names")->delimiter(',');
    bench->add_option("--ratio", ba.ratio, "target kept/raw ratio");
    bench->add_option("--delta", ba.delta, "window length, seconds");
    bench->add_option("--bw", ba.bw, "points per window (default: derived from ratio)");
    bench->add_option("--start", ba.start, "window origin (default first point)");
    bench->add_option("--interval", ba.interval, "evaluation grid step, s");
    bench->add_option("--imp-precision", ba.imp_precision, "imp grid step, s");
    bench->add_option("--imp-sign", ba.imp_sign, "error_increase | as_printed");
    bench->add_option("--predictor", ba.predictor, "two_point | sog_cog");
    bench->add_flag("--timing", ba.timing, "fill the wall_ms column (non-deterministic)");
    bench->add_option("--seed", ba.seed, "seed for --synth-model");
    bench->add_option("--output", ba.output, "compare CSV (default stdout)");
    auto* bsm = bench->add_option("--synth-model", ba.synth.model, "generate input instead");
    bench->add_option("--trajectories", ba.synth.trajectories);
    bench->add_option("--duration", ba.synth.duration);
    bench->add_option("--period", ba.synth.period);
    bench->add_option("--speed", ba.synth.speed);
    bench->add_option("--leg-steps", ba.synth.leg_steps);
    bench->add_option("--burst-start", ba.synth.burst_start);
    bench->add_option("--burst-len", ba.synth.burst_len);
    bench->add_option("--burst-fraction", ba.synth.burst_fraction);
    bench->add_flag("--no-sog-cog", ba.synth.no_sog_cog);

    // synth
    SynthArgs sa;
    std::uint64_t sy_seed = 0;
    std::string sy_output;
    auto* synth = app.add_subcommand("synth", "generate a deterministic dataset");
    synth->add_option("--model", sa.model,
                      "constant_velocity | random_walk | square_wave | burst | mixed");
    synth->add_option("--seed", sy_seed, "generator seed");
    synth->add_option("--trajectories", sa.trajectories);
    synth->add_option("--duration", sa.duration, "seconds");
    synth->add_option("--period", sa.period, "sampling period, seconds");
    synth->add_option("--speed", sa.speed, "base speed, m/s");
    synth->add_option("--leg-steps", sa.leg_steps, "square_wave: points per leg");
    synth->add_option("--burst-start", sa.burst_start, "burst: band offset, s");
    synth->add_option("--burst-len", sa.burst_len, "burst: band length, s");
    synth->add_option("--burst-fraction", sa.burst_fraction, "burst: share inside the band");
    synth->add_flag("--no-sog-cog", sa.no_sog_cog, "omit speed/heading columns");
    synth->add_option("--output", sy_output, "dataset CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (compress->parsed()) return run_compress(ca);
        if (evaluate->parsed())
            return run_evaluate(ev_input, ev_sample, ev_schema, ev_interval, ev_output);
        if (histogram->parsed())
            return run_histogram(hi_sample, hi_schema, hi_delta, hi_start,
                                 hi_start_opt->count() > 0, hi_output);
        if (bench->parsed()) {
            ba.use_synth = bsm->count() > 0;
            return run_bench(ba);
        }
        if (synth->parsed()) return run_synth(sa, sy_seed, sy_output);
        usage_error("no subcommand given");
    } catch (const error& e) {
        std::cerr << "stcomp: " << e.what() << '\n';
        switch (e.code()) {
            case errc::config:
                return kExitUsage;
            case errc::schema:
            case errc::io:
            case errc::parse:
            case errc::integrity:
            case errc::ordering:
            case errc::out_of_range:
            case errc::empty_input:
            case errc::history_gap:
            case errc::degenerate_span:
                return kExitData;
            default:
                return kExitInternal;
        }
    } catch (const std::exception& e) {
        std::cerr << "stcomp: unexpected: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
