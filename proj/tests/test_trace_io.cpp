#include <doctest.h>

#include "error.hpp"
#include "trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

using namespace lsa;

namespace {

Trace sample_trace() {
    LaserParams p;
    DriveWaveform w;
    w.n_pulses = 3;
    IntegrationOptions o;
    o.seed = 0xDEADBEEFCAFEULL;
    o.record_stride = 7;
    InjectionSignal inj;
    inj.power = 5e-8;
    inj.phase_mode = PhaseMode::per_pulse_uniform;
    inj.phase_seed = 11;
    return integrate(p, w, inj, o);
}

void check_same(const Trace& a, const Trace& b) {
    CHECK(a.dt == b.dt);
    CHECK(a.stride == b.stride);
    CHECK(a.seed == b.seed);
    CHECK(a.time == b.time);
    CHECK(a.current == b.current);
    CHECK(a.carrier_density == b.carrier_density);
    CHECK(a.photon_density == b.photon_density);
    CHECK(a.phase == b.phase);
    CHECK(a.power == b.power);
    CHECK(a.injection_phases == b.injection_phases);
    CHECK(a.stats.steps == b.stats.steps);
    CHECK(a.stats.photon_clamps == b.stats.photon_clamps);
    CHECK(a.stats.carrier_clamps == b.stats.carrier_clamps);
    CHECK(a.stats.floor_events == b.stats.floor_events);
}

} // namespace

TEST_SUITE("trace_io") {

TEST_CASE("CSV round trip is lossless") {
    const auto t = sample_trace();
    std::stringstream ss;
    write_trace_csv(ss, t, {"abc123", "9.9.9"});
    Provenance prov;
    const auto back = read_trace_csv(ss, &prov);
    check_same(t, back);
    CHECK(prov.digest == "abc123");
    CHECK(prov.version == "9.9.9");
}

TEST_CASE("binary round trip is lossless") {
    const auto t = sample_trace();
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_trace_binary(ss, t, {"d", "v"});
    Provenance prov;
    const auto back = read_trace_binary(ss, &prov);
    check_same(t, back);
    CHECK(prov.digest == "d");
}

TEST_CASE("CSV header carries the column names and seed") {
    const auto t = sample_trace();
    std::stringstream ss;
    write_trace_csv(ss, t, {"x", "y"});
    const auto text = ss.str();
    CHECK(text.find("t_s,I_A,N_cm3,S_cm3,phi_rad,P_W\n") != std::string::npos);
    CHECK(text.find("# seed=" + std::to_string(t.seed)) != std::string::npos);
}

TEST_CASE("corrupt inputs are rejected") {
    std::stringstream bad("LSATRACX........");
    CHECK_THROWS_AS(read_trace_binary(bad), IoError);
    std::stringstream truncated;
    write_trace_binary(truncated, sample_trace(), {"", ""});
    auto s = truncated.str();
    std::stringstream cut(s.substr(0, s.size() / 2));
    CHECK_THROWS_AS(read_trace_binary(cut), IoError);
    std::stringstream csv("# lsa trace v1\nt_s,I_A,N_cm3,S_cm3,phi_rad,P_W\n0,1,2,3\n");
    CHECK_THROWS_AS(read_trace_csv(csv), IoError);
}

TEST_CASE("save and load pick the format from the path") {
    const auto t = sample_trace();
    const auto dir = std::filesystem::temp_directory_path() / "lsa_trace_io_test";
    std::filesystem::create_directories(dir);
    for (const char* name : {"t.csv", "t.bin"}) {
        const auto path = (dir / name).string();
        save_trace(path, t, {"dg", "vv"});
        Provenance prov;
        check_same(t, load_trace(path, &prov));
        CHECK(prov.digest == "dg");
    }
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_trace((dir / "missing.bin").string()), IoError);
}

}
