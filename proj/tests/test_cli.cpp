// End-to-end checks of the stcomp binary: exit codes, determinism, the
// compress -> histogram -> evaluate pipeline, and input immutability.
// The binary path comes in via STCOMP_CLI_PATH from CMake.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "stcomp_cli_test";

std::string cli() { return STCOMP_CLI_PATH; }

int run(const std::string& args) {
    std::string cmd = cli() + " " + args + " >/dev/null 2>/dev/null";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

struct Workspace {
    Workspace() {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
};

fs::path wp(const std::string& name) { return kWork / name; }

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("exit codes") {
    Workspace ws;
    auto raw = wp("raw.csv");
    REQUIRE(run("synth --model random_walk --seed 3 --trajectories 2 --duration 200 "
                "--period 10 --output " +
                q(raw)) == 0);

    SUBCASE("missing required parameter is a usage error") {
        CHECK(run("compress --algo squish --input " + q(raw)) == 2);
        CHECK(run("compress --algo sttrace --input " + q(raw)) == 2);
        CHECK(run("compress --input " + q(raw)) == 2);
        CHECK(run("evaluate --input " + q(raw)) == 2);
    }
    SUBCASE("unknown names are usage errors") {
        CHECK(run("compress --algo warp --capacity 5 --input " + q(raw)) == 2);
        CHECK(run("bench --synth-model vortex --seed 1") == 2);
        CHECK(run("frobnicate") == 2);
    }
    SUBCASE("ratio and an explicit parameter are mutually exclusive") {
        CHECK(run("compress --algo dr --ratio 0.2 --epsilon 4 --input " + q(raw)) == 2);
        CHECK(run("compress --algo bwc-squish --ratio 0.2 --bw 9 --input " + q(raw)) == 2);
    }
    SUBCASE("malformed data exits 3") {
        auto bad = wp("bad.csv");
        spit(bad, "id,ts,x,y\n1,0,0,0\n1,5,oops,3\n");
        CHECK(run("compress --algo tdtr --tolerance 1 --input " + q(bad)) == 3);
        spit(bad, "id,ts,lat,lon\n1,0,95.0,3\n");
        CHECK(run("compress --algo tdtr --tolerance 1 --input " + q(bad)) == 3);
        CHECK(run("compress --algo tdtr --tolerance 1 --input " + q(wp("absent.csv"))) == 3);
    }
    SUBCASE("help exits 0") {
        CHECK(run("--help") == 0);
        CHECK(run("compress --help") == 0);
    }
}

TEST_CASE("byte determinism") {
    Workspace ws;
    auto a = wp("a.csv");
    auto b = wp("b.csv");

    SUBCASE("synth") {
        REQUIRE(run("synth --model burst --seed 11 --trajectories 3 --duration 1500 "
                    "--period 5 --output " +
                    q(a)) == 0);
        REQUIRE(run("synth --model burst --seed 11 --trajectories 3 --duration 1500 "
                    "--period 5 --output " +
                    q(b)) == 0);
        CHECK(slurp(a) == slurp(b));
        REQUIRE(run("synth --model burst --seed 12 --trajectories 3 --duration 1500 "
                    "--period 5 --output " +
                    q(b)) == 0);
        CHECK(slurp(a) != slurp(b));
    }
    SUBCASE("bench twice with the same argv is byte-identical") {
        std::string args =
            "bench --synth-model mixed --seed 7 --trajectories 3 --duration 600 "
            "--period 5 --ratio 0.10 --delta 60 --algos all --output ";
        REQUIRE(run(args + q(a)) == 0);
        REQUIRE(run(args + q(b)) == 0);
        std::string report = slurp(a);
        CHECK(report == slurp(b));
        // header plus one row per algorithm
        CHECK(std::count(report.begin(), report.end(), '\n') == 9);
    }
    SUBCASE("stdout equals --output byte for byte") {
        std::string args = "synth --model square_wave --seed 2 --trajectories 2 "
                           "--duration 300 --period 10 ";
        REQUIRE(run(args + "--output " + q(a)) == 0);
        int rc = std::system(
            (cli() + " " + args + " >" + q(b).c_str() + " 2>/dev/null").c_str());
        REQUIRE(WEXITSTATUS(rc) == 0);
        CHECK(slurp(a) == slurp(b));
    }
}

TEST_CASE("compress pipeline") {
    Workspace ws;
    auto raw = wp("raw.csv");
    auto samp = wp("samp.csv");
    REQUIRE(run("synth --model burst --seed 5 --trajectories 4 --duration 2000 "
                "--period 10 --output " +
                q(raw)) == 0);
    std::string raw_before = slurp(raw);

    SUBCASE("bwc output respects the cap in its own histogram") {
        REQUIRE(run("compress --algo bwc-squish --bw 8 --delta 250 --input " + q(raw) +
                    " --output " + q(samp)) == 0);
        auto hist = wp("hist.csv");
        REQUIRE(run("histogram --sample " + q(samp) + " --delta 250 --output " + q(hist)) == 0);
        std::istringstream rows(slurp(hist));
        std::string line;
        std::getline(rows, line);
        CHECK(line == "window_index,window_start_ts,count");
        int bins = 0;
        while (std::getline(rows, line)) {
            auto last = line.rfind(',');
            CHECK(std::stol(line.substr(last + 1)) <= 8);
            ++bins;
        }
        CHECK(bins > 4);
    }
    SUBCASE("sample keeps the input schema plus a kept column") {
        REQUIRE(run("compress --algo tdtr --tolerance 20 --input " + q(raw) + " --output " +
                    q(samp)) == 0);
        std::string body = slurp(samp);
        CHECK(body.substr(0, body.find('\n')) == "id,ts,x,y,sog,cog,kept");
        // every emitted row is a verbatim input row
        std::istringstream rows(body);
        std::string line;
        std::getline(rows, line);
        while (std::getline(rows, line)) {
            std::string orig = line.substr(0, line.rfind(','));
            CHECK(raw_before.find("\n" + orig + "\n") != std::string::npos);
        }
    }
    SUBCASE("evaluate closes the loop") {
        REQUIRE(run("compress --algo dr --epsilon 15 --predictor sog_cog --input " + q(raw) +
                    " --output " + q(samp)) == 0);
        auto acc = wp("acc.csv");
        REQUIRE(run("evaluate --input " + q(raw) + " --sample " + q(samp) + " --output " +
                    q(acc)) == 0);
        std::string body = slurp(acc);
        CHECK(body.find("trajectory_id,eval_points,mean_error_m") == 0);
        CHECK(body.find("all_count_weighted") != std::string::npos);
        CHECK(body.find("all_trajectory_weighted") != std::string::npos);
    }
    SUBCASE("no subcommand mutates its inputs") {
        REQUIRE(run("compress --algo bwc-sttrace --bw 6 --delta 300 --input " + q(raw) +
                    " --output " + q(samp)) == 0);
        std::string samp_before = slurp(samp);
        REQUIRE(run("evaluate --input " + q(raw) + " --sample " + q(samp) + " --output " +
                    q(wp("acc.csv"))) == 0);
        REQUIRE(run("histogram --sample " + q(samp) + " --delta 300 --output " +
                    q(wp("h.csv"))) == 0);
        REQUIRE(run("bench --input " + q(raw) + " --ratio 0.1 --delta 300 --output " +
                    q(wp("cmp.csv"))) == 0);
        CHECK(slurp(raw) == raw_before);
        CHECK(slurp(samp) == samp_before);
    }
}

TEST_CASE("data directory resolution") {
    Workspace ws;
    auto dir = kWork / "data";
    fs::create_directories(dir);
    REQUIRE(run("synth --model constant_velocity --seed 1 --trajectories 1 --duration 100 "
                "--period 10 --output " +
                q(dir / "cv.csv")) == 0);
    std::string cmd = "STCOMP_DATA_DIR=" + q(dir) + " " + cli() +
                      " compress --algo tdtr --tolerance 1 --input cv.csv --output " +
                      q(wp("out.csv")) + " >/dev/null 2>/dev/null";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    // constant velocity compresses to its endpoints
    std::string out = slurp(wp("out.csv"));
    CHECK(std::count(out.begin(), out.end(), '\n') == 3);
}
