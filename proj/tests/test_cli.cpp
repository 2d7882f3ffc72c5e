#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli_app.hpp"
#include "oracles.hpp"
#include "sstedr/sstedr.hpp"

using namespace sstedr;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("sstedr_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "sstedr");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write_file(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  void write_tone(const std::string& name, double f, double dt, std::size_t n) const {
    std::ofstream f_out(path(name));
    io::write_signal(f_out, UniformSignal(oracle::tone(n, f, dt), dt));
  }

  io::Series read_freq(const std::string& p) const {
    std::ifstream in(p);
    return io::read_series(in, "t,freq_hz");
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, SstToneRidge) {
  write_tone("tone.csv", 0.3, 0.25, 4096);
  ASSERT_EQ(run({"sst", path("tone.csv"), "--out-dir", path("out"), "--write-sst"}), 0) << err_.str();
  const auto ridge = read_freq(path("out/ridge.csv"));
  ASSERT_EQ(ridge.t.size(), 4096u);
  const double step = std::exp2(std::log2(2048.0) / 511.0);
  for (std::size_t m = 410; m < 4096 - 410; ++m) {
    EXPECT_LE(std::max(ridge.value[m] / 0.3, 0.3 / ridge.value[m]), step * (1.0 + 1e-8));
  }
  EXPECT_TRUE(fs::exists(path("out/sst.csv")));
  EXPECT_TRUE(fs::exists(path("out/run.log")));
}

TEST_F(CliTest, SstInputErrors) {
  write_file("empty.csv", "");
  EXPECT_EQ(run({"sst", path("empty.csv"), "--out-dir", path("out")}), cli::input_error);
  write_file("uneven.csv", "t,value\n0,1\n1,2\n3,1\n4,0\n5,1\n");
  EXPECT_EQ(run({"sst", path("uneven.csv"), "--out-dir", path("out")}), cli::input_error);
  write_file("short.csv", "t,value\n0,1\n1,2\n");
  EXPECT_EQ(run({"sst", path("short.csv"), "--out-dir", path("out")}), cli::input_error);
  EXPECT_EQ(run({"sst", path("missing.csv")}), cli::input_error);
  EXPECT_EQ(run({"sst", path("empty.csv"), "--bogus", "1"}), cli::input_error);
  EXPECT_EQ(run({}), cli::input_error);
}

TEST_F(CliTest, TwoBinGrid) {
  write_tone("tone.csv", 0.1, 0.5, 300);
  ASSERT_EQ(run({"sst", path("tone.csv"), "--n-xi=2", "--out-dir", path("out")}), 0) << err_.str();
  const auto ridge = read_freq(path("out/ridge.csv"));
  const double xi_min = 1.0 / (256 * 0.5), xi_max = 1.0;
  for (double f : ridge.value) EXPECT_TRUE(f == xi_min || f == xi_max) << f;
}

TEST_F(CliTest, ConfigPrecedenceAndReplay) {
  write_tone("tone.csv", 0.2, 0.5, 1024);
  write_file("cfg.txt", "# overrides\nlambda = 7\nn_xi=128\n");
  ASSERT_EQ(run({"sst", path("tone.csv"), "--config", path("cfg.txt"), "--lambda", "9", "--out-dir", path("a")}), 0);
  const auto log = slurp(path("a/run.log"));
  EXPECT_NE(log.find("lambda=9\n"), std::string::npos);
  EXPECT_NE(log.find("n_xi=128\n"), std::string::npos);
  EXPECT_NE(log.find("sigma=0.15\n"), std::string::npos);
  ASSERT_EQ(run({"sst", path("tone.csv"), "--config", path("a/run.log"), "--out-dir", path("b")}), 0);
  EXPECT_EQ(slurp(path("a/ridge.csv")), slurp(path("b/ridge.csv")));
  EXPECT_EQ(slurp(path("a/run.log")), slurp(path("b/run.log")));

  write_file("bad.txt", "lambda=1\nwindow=3\n");
  EXPECT_EQ(run({"sst", path("tone.csv"), "--config", path("bad.txt"), "--out-dir", path("c")}), cli::input_error);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);
  EXPECT_EQ(run({"sst", path("tone.csv"), "--lambda", "abc", "--out-dir", path("c")}), cli::input_error);
}

TEST_F(CliTest, SynthIsDeterministic) {
  const std::vector<std::string> flags{"synth", "--kind", "respiration", "--iif", "0.3", "--duration", "60",
                                       "--noise-sd", "0.2", "--seed", "5"};
  auto a = flags, b = flags;
  a.insert(a.end(), {"--out-dir", path("a")});
  b.insert(b.end(), {"--out-dir", path("b")});
  ASSERT_EQ(run(a), 0) << err_.str();
  ASSERT_EQ(run(b), 0);
  EXPECT_EQ(slurp(path("a/signal.csv")), slurp(path("b/signal.csv")));
  EXPECT_EQ(slurp(path("a/truth_iif.csv")), slurp(path("b/truth_iif.csv")));
  const auto truth = read_freq(path("a/truth_iif.csv"));
  ASSERT_EQ(truth.value.size(), 1200u);
  for (double v : truth.value) EXPECT_EQ(v, 0.3);
}

TEST_F(CliTest, SynthEcgAnnotationsParse) {
  ASSERT_EQ(run({"synth", "--kind", "ecg", "--rr", "af", "--seed", "7", "--duration", "60", "--pac-fraction", "0.1",
                 "--pvc-fraction", "0.05", "--out-dir", path("e")}),
            0)
      << err_.str();
  std::ifstream in(path("e/beats.csv"));
  const auto beats = load_annotations(in);
  EXPECT_GT(beats.size(), 40u);
  std::ifstream ecg(path("e/ecg.csv"));
  EXPECT_EQ(io::read_signal(ecg).size(), 60000u);
}

TEST_F(CliTest, SynthRejectsInvalidSpec) {
  EXPECT_EQ(run({"synth", "--kind", "eeg", "--out-dir", path("x")}), cli::input_error);
  EXPECT_EQ(run({"synth", "--kind", "ecg", "--rr", "af", "--rr-min", "2", "--rr-max", "1", "--out-dir", path("x")}),
            cli::input_error);
  EXPECT_EQ(run({"synth", "--dt", "-1", "--out-dir", path("x")}), cli::input_error);
}

TEST_F(CliTest, EdrDetectorPath) {
  ASSERT_EQ(run({"synth", "--kind", "ecg", "--duration", "300", "--mod-hz", "0.25", "--seed", "1", "--out-dir",
                 path("s")}),
            0);
  ASSERT_EQ(run({"edr", path("s/ecg.csv"), "--out-dir", path("r")}), 0) << err_.str();
  const auto log = slurp(path("r/run.log"));
  EXPECT_NE(log.find("# beats_source=detector\n"), std::string::npos);
  EXPECT_NE(log.find("lambda=10\n"), std::string::npos);
  EXPECT_NE(log.find("beats_dropped_after_truncation="), std::string::npos);
  const auto if_e = read_freq(path("r/if_e.csv"));
  const std::size_t n = if_e.value.size();
  std::vector<double> interior(if_e.value.begin() + static_cast<long>(n / 10),
                               if_e.value.end() - static_cast<long>(n / 10));
  EXPECT_NEAR(oracle::median(interior), 0.25, 0.02 * 0.25);
  std::ifstream edr(path("r/edr.csv"));
  EXPECT_EQ(io::read_signal(edr).size(), n);
}

TEST_F(CliTest, EdrAnnotationsPath) {
  ASSERT_EQ(run({"synth", "--kind", "ecg", "--duration", "300", "--seed", "2", "--out-dir", path("s")}), 0);
  ASSERT_EQ(run({"edr", path("s/ecg.csv"), "--annotations", path("s/beats.csv"), "--out-dir", path("r")}), 0)
      << err_.str();
  EXPECT_NE(slurp(path("r/run.log")).find("# beats_source=annotations:"), std::string::npos);
}

TEST_F(CliTest, EdrInsufficientBeats) {
  ASSERT_EQ(run({"synth", "--kind", "ecg", "--duration", "10", "--out-dir", path("s")}), 0);
  write_file("few.csv", "t,label\n1,N\n2,PVC\n3,N\n4,PVC\n5,N\n6,PVC\n");
  EXPECT_EQ(run({"edr", path("s/ecg.csv"), "--annotations", path("few.csv"), "--out-dir", path("r")}),
            cli::insufficient_beats);
  write_file("broken.csv", "t,label\n1,N\n2,Q\n");
  EXPECT_EQ(run({"edr", path("s/ecg.csv"), "--annotations", path("broken.csv"), "--out-dir", path("r")}),
            cli::input_error);
  EXPECT_EQ(run({"edr", path("s/ecg.csv"), "--annotations", path("nope.csv"), "--out-dir", path("r")}),
            cli::input_error);
}

TEST_F(CliTest, DegenerateSst) {
  std::ofstream f(path("zero.csv"));
  io::write_signal(f, UniformSignal(std::vector<double>(512, 0.0), 0.25));
  f.close();
  EXPECT_EQ(run({"sst", path("zero.csv"), "--out-dir", path("r")}), cli::degenerate_sst);
}

TEST_F(CliTest, EvalMetrics) {
  const auto write_const = [&](const std::string& name, double v, double t0, std::size_t n) {
    std::vector<double> t(n), x(n, v);
    for (std::size_t m = 0; m < n; ++m) t[m] = t0 + 0.25 * static_cast<double>(m);
    std::ofstream o(path(name));
    io::write_series(o, "t,freq_hz", t, x);
  };
  write_const("ref.csv", 0.30, 0.0, 4800);
  write_const("est.csv", 0.27, 0.0, 4800);
  ASSERT_EQ(run({"eval", path("ref.csv"), path("ref.csv"), "--out-dir", path("same")}), 0) << err_.str();
  auto doc = nlohmann::json::parse(slurp(path("same/metrics.json")));
  ASSERT_EQ(doc["results"].size(), 3u);
  for (const auto& r : doc["results"]) EXPECT_EQ(r["E_K"].get<double>(), 0.0);
  EXPECT_EQ(doc["results"][0]["K"].get<int>(), 240);
  EXPECT_EQ(doc["results"][2]["K"].get<int>(), 20);

  ASSERT_EQ(run({"eval", path("ref.csv"), path("est.csv"), "--out-dir", path("off")}), 0);
  doc = nlohmann::json::parse(slurp(path("off/metrics.json")));
  for (const auto& r : doc["results"]) {
    EXPECT_NEAR(r["E_K"].get<double>(), 10.0, 1e-9);
    for (double d : r["deltas"].get<std::vector<double>>()) EXPECT_NEAR(d, 10.0, 1e-9);
  }

  EXPECT_EQ(run({"eval", path("ref.csv"), path("est.csv"), "--segments", "5000", "--out-dir", path("k")}),
            cli::input_error);
  EXPECT_EQ(run({"eval", path("ref.csv"), path("est.csv"), "--segments", "3,x", "--out-dir", path("k")}),
            cli::input_error);
  write_const("late.csv", 0.27, 100.0, 4800);
  EXPECT_EQ(run({"eval", path("ref.csv"), path("late.csv"), "--out-dir", path("k")}), cli::input_error);
}

TEST_F(CliTest, EvalResamplesMatchingRange) {
  std::vector<double> t1, v1, t2, v2;
  for (int m = 0; m <= 400; ++m) {
    t1.push_back(0.25 * m);
    v1.push_back(0.3);
  }
  for (int m = 0; m <= 100; ++m) {
    t2.push_back(1.0 * m);
    v2.push_back(0.27);
  }
  {
    std::ofstream a(path("ref.csv")), b(path("est.csv"));
    io::write_series(a, "t,freq_hz", t1, v1);
    io::write_series(b, "t,freq_hz", t2, v2);
  }
  ASSERT_EQ(run({"eval", path("ref.csv"), path("est.csv"), "--segments", "4", "--out-dir", path("r")}), 0)
      << err_.str();
  const auto doc = nlohmann::json::parse(slurp(path("r/metrics.json")));
  EXPECT_TRUE(doc["resampled"].get<bool>());
  EXPECT_NEAR(doc["results"][0]["E_K"].get<double>(), 10.0, 1e-9);
}
