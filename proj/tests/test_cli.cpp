// Copyright 2026 The patchfdtd Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the command-line binary end to end on a coarse 1 mm lattice.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"
#include "patchfdtd/port.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("patchfdtd_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result cli(const std::string& args, const std::string& env = "") {
        const fs::path o = dir_ / "stdout.txt", e = dir_ / "stderr.txt";
        const std::string cmd = env + " \"" PATCHFDTD_CLI "\" " + args + " >\"" + o.string() +
                                "\" 2>\"" + e.string() + "\"";
        const int status = std::system(cmd.c_str());
        Result r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(o);
        r.err = slurp(e);
        return r;
    }

    // Coarse run: 1 mm cells, a few hundred steps, no far field.
    json tiny(const std::string& out_name) const {
        return json{{"schema_version", 1},
                    {"output_dir", (dir_ / out_name).string()},
                    {"antenna_overrides", {{"strip.gap", 1e-3}}},
                    {"grid", {{"resolution_m", 1e-3}, {"pml_cells", 6}}},
                    {"termination", {{"max_steps", 600}}},
                    {"outputs", {{"rlc_fit", false}, {"pattern", {{"enabled", false}}}}}};
    }

    fs::path write_config(const json& doc, const std::string& name = "config.json") const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << doc.dump(2);
        return p;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, UnknownKeyIsConfigError) {
    json doc = tiny("out");
    doc["grid"]["resolutoin_m"] = 1e-3;
    const Result r = cli("simulate " + write_config(doc).string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("grid.resolutoin_m"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(Cli, BadValueNamesTheField) {
    json doc = tiny("out");
    doc["grid"]["resolution_m"] = -1.0;
    const Result r = cli("simulate " + write_config(doc).string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("grid.resolution_m"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingSchemaVersionIsConfigError) {
    json doc = tiny("out");
    doc.erase("schema_version");
    const Result r = cli("simulate " + write_config(doc).string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("schema_version"), std::string::npos) << r.err;
}

TEST_F(Cli, FrequencyAboveNyquistIsConfigError) {
    json doc = tiny("out");
    doc["waveform"] = {{"f0_hz", 200e9}, {"f_span_hz", 150e9}};
    doc["frequency_grid"] = {{"start_hz", 100e9}, {"stop_hz", 340e9}, {"points", 11}};
    const Result r = cli("simulate " + write_config(doc).string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Nyquist"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("frequency_grid.stop_hz"), std::string::npos) << r.err;
}

TEST_F(Cli, FrequencyOutsideExcitationIsConfigError) {
    json doc = tiny("out");
    doc["frequency_grid"] = {{"start_hz", 1.0e9}, {"stop_hz", 3.0e9}, {"points", 11}};
    const Result r = cli("simulate " + write_config(doc).string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("frequency_grid.start_hz"), std::string::npos) << r.err;
}

TEST_F(Cli, GeometryOffLatticeIsConfigError) {
    json doc = tiny("out");
    doc.erase("antenna_overrides");
    const Result r = cli("simulate " + write_config(doc).string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("strips[0]"), std::string::npos) << r.err;
}

TEST_F(Cli, ArgumentErrorsExitTwo) {
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("analyze").code, 2);
}

TEST_F(Cli, SimulateIsDeterministicAndAnalyzeReproducesBand) {
    const Result a = cli("simulate " + write_config(tiny("a"), "a.json").string());
    ASSERT_EQ(a.code, 0) << a.err;
    const Result b = cli("--workers 1 simulate " + write_config(tiny("b"), "b.json").string());
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NE(a.out.find("no resonance"), std::string::npos) << a.out;

    for (const char* f : {"port.csv", "impedance.csv", "band_report.json", "summary.json"}) {
        ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
    const json summary = json::parse(slurp(dir_ / "a" / "summary.json"));
    EXPECT_EQ(summary.at("resonance"), "no_resonance");
    EXPECT_EQ(summary.at("termination"), "max_steps");
    EXPECT_EQ(summary.at("steps"), 600);

    const Result an = cli("analyze " + (dir_ / "a" / "port.csv").string() + " --no-fit");
    ASSERT_EQ(an.code, 0) << an.err;
    EXPECT_EQ(slurp(dir_ / "a" / "analyze" / "band_report.json"),
              slurp(dir_ / "a" / "band_report.json"));
    EXPECT_EQ(slurp(dir_ / "a" / "analyze" / "impedance.csv"), slurp(dir_ / "a" / "impedance.csv"));
}

TEST_F(Cli, OutputDirectoryOverride) {
    const fs::path target = dir_ / "elsewhere";
    const Result r = cli("simulate " + write_config(tiny("ignored")).string(),
                         "PATCHFDTD_OUTPUT_DIR=\"" + target.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(target / "summary.json"));
    EXPECT_FALSE(fs::exists(dir_ / "ignored"));
}

TEST_F(Cli, TruncatedPortCsvIsSchemaError) {
    ASSERT_EQ(cli("simulate " + write_config(tiny("a")).string()).code, 0);
    const std::string text = slurp(dir_ / "a" / "port.csv");
    const std::size_t cut = text.find('\n', text.size() / 2);
    std::ofstream(dir_ / "short.csv") << text.substr(0, cut + 10);
    const Result r = cli("analyze " + (dir_ / "short.csv").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("row"), std::string::npos) << r.err;
}

// Thevenin source (50 ohm) driving a parallel RLC, integrated with RK4 at
// 0.5 ps; the stored record is then re-analysed through the CLI.
TEST_F(Cli, AnalyzeFitsSyntheticRlcRecord) {
    const double r_ohm = 50.0, l_h = 1e-9, c_f = 4.2199e-12, rs = 50.0, h = 0.5e-12;
    const patchfdtd::Waveform w = patchfdtd::make_waveform();
    auto deriv = [&](double t, double v, double il, double& dv, double& dil) {
        const double vs = patchfdtd::waveform_sample(w, t);
        dv = ((vs - v) / rs - v / r_ohm - il) / c_f;
        dil = v / l_h;
    };
    patchfdtd::PortRecord rec;
    rec.dt = h;
    double v = 0.0, il = 0.0;
    const int n = 80000;
    for (int k = 0; k < n; ++k) {
        const double t = k * h;
        const double vs = patchfdtd::waveform_sample(w, t);
        rec.t.push_back(t);
        rec.v.push_back(v);
        rec.i.push_back((vs - v) / rs);
        rec.source.push_back(vs);
        double k1v, k1i, k2v, k2i, k3v, k3i, k4v, k4i;
        deriv(t, v, il, k1v, k1i);
        deriv(t + h / 2, v + h / 2 * k1v, il + h / 2 * k1i, k2v, k2i);
        deriv(t + h / 2, v + h / 2 * k2v, il + h / 2 * k2i, k3v, k3i);
        deriv(t + h, v + h * k3v, il + h * k3i, k4v, k4i);
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        il += h / 6 * (k1i + 2 * k2i + 2 * k3i + k4i);
    }
    patchfdtd::write_port_csv((dir_ / "rlc.csv").string(), rec);

    const Result r = cli("analyze " + (dir_ / "rlc.csv").string() + " --out " +
                         (dir_ / "fit").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const json fit = json::parse(slurp(dir_ / "fit" / "rlc_fit.json"));
    ASSERT_FALSE(fit.contains("error")) << fit.dump();
    EXPECT_NEAR(fit.at("r_ohm").get<double>(), r_ohm, 0.01 * r_ohm);
    EXPECT_NEAR(fit.at("l_h").get<double>(), l_h, 0.01 * l_h);
    EXPECT_NEAR(fit.at("c_f").get<double>(), c_f, 0.01 * c_f);

    const Result again = cli("fit-rlc " + (dir_ / "fit" / "impedance.csv").string());
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(json::parse(again.out), fit);
}

TEST_F(Cli, SweepWithNoValuesWritesEmptyTable) {
    const Result r = cli("sweep " + write_config(tiny("sw")).string() +
                         " --param feed_pin.x --values \"\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir_ / "sw" / "sweep.csv"), "value,f_res_hz,rl_min_db,bandwidth_hz\n");
}

TEST_F(Cli, SweepRejectsBadValueBeforeRunning) {
    const Result r = cli("sweep " + write_config(tiny("sw")).string() +
                         " --param feed_pin.x --values 0.5e-3,0.5");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("0.5"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir_ / "sw" / "feed_pin.x=0.0005"));
    const Result p = cli("sweep " + write_config(tiny("sw")).string() +
                         " --param no_such.thing --values 1e-3");
    EXPECT_EQ(p.code, 2);
}

TEST_F(Cli, SweepParallelMatchesSerial) {
    const std::string args = " --param feed_pin.x --values 2e-3,1e-3,3e-3";
    const Result s = cli("sweep " + write_config(tiny("serial"), "s.json").string() + args);
    ASSERT_EQ(s.code, 0) << s.err;
    const Result p =
        cli("sweep " + write_config(tiny("parallel"), "p.json").string() + args + " --parallel");
    ASSERT_EQ(p.code, 0) << p.err;
    const std::string table = slurp(dir_ / "serial" / "sweep.csv");
    EXPECT_EQ(table, slurp(dir_ / "parallel" / "sweep.csv"));
    std::istringstream lines(table);
    std::string line;
    std::getline(lines, line);
    double prev = -1.0;
    int rows = 0;
    while (std::getline(lines, line)) {
        const double v = std::stod(line.substr(0, line.find(',')));
        EXPECT_GT(v, prev);
        prev = v;
        ++rows;
    }
    EXPECT_EQ(rows, 3);
}
