#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using georoute::cli::expand_sweep;
using georoute::cli::parse_and_dispatch;
using georoute::cli::sha256_hex;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "georoute");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  RunResult r;
  r.code = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::size_t columns(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("georoute_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out(const std::string& name = "out") const { return (dir_ / name).string(); }

  // Checks the header of `file` and that every data row has the same width.
  void expect_schema(const std::string& file, const std::string& header, std::size_t min_rows = 1) {
    const auto lines = lines_of(slurp(dir_ / "out" / file));
    ASSERT_FALSE(lines.empty()) << file;
    EXPECT_EQ(lines.front(), header) << file;
    EXPECT_GE(lines.size() - 1, min_rows) << file;
    for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(columns(lines[i]), columns(header)) << file << ":" << i;
  }

  fs::path dir_;
};

}  // namespace

TEST(CliHelpers, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(CliHelpers, ExpandSweep) {
  EXPECT_EQ(expand_sweep("1e3:1e5:log10"), (std::vector<double>{1e3, 1e4, 1e5}));
  EXPECT_EQ(expand_sweep("1000"), (std::vector<double>{1000}));
  EXPECT_EQ(expand_sweep("10, 20,30"), (std::vector<double>{10, 20, 30}));
  for (const char* bad : {"", "abc", "-5", "1e3:1e2:log10", "1:10:lin", "10,,20"}) {
    try {
      expand_sweep(bad);
      ADD_FAILURE() << bad;
    } catch (const std::invalid_argument& e) {
      EXPECT_EQ(std::string(e.what()).rfind("lambda:", 0), 0u) << bad;
    }
  }
}

TEST_F(CliTest, UsageErrorsExitOneAndNameTheKey) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"bounds", "--help"}).code, 0);

  RunResult r = run({"bounds", "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("lambda"), std::string::npos);

  r = run({"bounds", "--lambda", "1e4", "--eta", "1.5", "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("eta:"), std::string::npos);

  r = run({"bounds", "--lambda", "1e4", "--radius", "0.01", "--c", "3", "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("radius"), std::string::npos);

  r = run({"experiment", "hopcount", "--lambda", "1e4", "--scheme", "greedy", "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("scheme"), std::string::npos);

  r = run({"experiment", "teleport", "--lambda", "1e4", "--out", out()});
  EXPECT_EQ(r.code, 1);

  r = run({"gen", "--lambda", "1e3,1e4", "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("lambda"), std::string::npos);

  r = run({"experiment", "hopcount", "--lambda", "1e4", "--h", "5", "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("h:"), std::string::npos);

  std::ofstream(dir_ / "bad.cfg") << "lambda = 1e4\nbogus = 3\n";
  r = run({"bounds", "--config", (dir_ / "bad.cfg").string(), "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);

  r = run({"bounds", "--config", (dir_ / "missing.cfg").string(), "--out", out()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("config"), std::string::npos);
}

TEST_F(CliTest, RuntimeFailureExitsTwo) {
  const RunResult r = run({"experiment", "hopcount", "--lambda", "5", "--radius", "0.01", "--h", "0.5", "--fields",
                           "1", "--routes", "1", "--out", out()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("failed"), std::string::npos);
}

TEST_F(CliTest, RouteTraceAndManifest) {
  const RunResult r = run({"route", "--lambda", "1e5", "--src", "-0.25,-0.25", "--dst", "0.25,0.25", "--trace",
                           "--seed", "3", "--out", out()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto trace = lines_of(slurp(dir_ / "out" / "trace.csv"));
  ASSERT_GE(trace.size(), 3u);
  EXPECT_EQ(trace.front(), "hop,node_index,x,y,r,x_prime,y_prime");
  EXPECT_EQ(trace.back().rfind("#status=Delivered nu=", 0), 0u);
  EXPECT_EQ(trace.back(), "#status=Delivered nu=" + std::to_string(trace.size() - 3));
  EXPECT_EQ(trace[1].rfind("0,", 0), 0u);

  const auto manifest = nlohmann::json::parse(slurp(dir_ / "out" / "manifest.json"));
  EXPECT_EQ(manifest["command"], "route");
  std::map<std::string, bool> seen;
  for (const auto& f : manifest["files"]) {
    const std::string body = slurp(dir_ / "out" / f["path"].get<std::string>());
    EXPECT_EQ(f["bytes"].get<std::size_t>(), body.size());
    EXPECT_EQ(f["sha256"].get<std::string>(), sha256_hex(body));
    seen[f["path"]] = true;
  }
  EXPECT_TRUE(seen["trace.csv"]);
  EXPECT_TRUE(seen["route.csv"]);
  EXPECT_TRUE(seen["config.json"]);
}

TEST_F(CliTest, ConfigSidecarReproducesOutputs) {
  const RunResult first = run({"experiment", "hopcount", "--lambda", "3000", "--fields", "2", "--routes", "3",
                               "--seed", "9", "--jobs", "2", "--out", out("a")});
  ASSERT_EQ(first.code, 0) << first.err;
  const RunResult second = run({"experiment", "hopcount", "--config", (dir_ / "a" / "config.json").string(), "--jobs",
                                "1", "--out", out("b")});
  ASSERT_EQ(second.code, 0) << second.err;
  for (const char* f : {"hopcount.csv", "hopcount_fields.csv", "hopcount_routes.csv", "config.json"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(CliTest, KeyValueConfigWithFlagOverride) {
  std::ofstream(dir_ / "run.cfg") << "# comment\nlambda = 2000\nradius = 0.05\nseed = 4\n";
  const RunResult r = run({"bounds", "--config", (dir_ / "run.cfg").string(), "--c", "7", "--out", out()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto cfg = nlohmann::json::parse(slurp(dir_ / "out" / "config.json"))["config"];
  EXPECT_FALSE(cfg.contains("radius"));
  EXPECT_EQ(cfg["c"], "7");
  EXPECT_EQ(cfg["seed"], "4");
  EXPECT_EQ(cfg["lambda"], "2000");
}

TEST_F(CliTest, DefaultRadiusIsCriticalRadius) {
  const RunResult r = run({"bounds", "--lambda", "1e6", "--out", out()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("R=0.00525652"), std::string::npos) << r.out;
  const auto rows = lines_of(slurp(dir_ / "out" / "bounds.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(rows[1].find("314.59"), std::string::npos);
  EXPECT_NE(rows[1].find("370.44"), std::string::npos);
  EXPECT_NE(rows[1].find("316.95"), std::string::npos);
}

TEST_F(CliTest, SchemaGen) {
  ASSERT_EQ(run({"gen", "--lambda", "200", "--out", out()}).code, 0);
  expect_schema("field.csv", "index,x,y", 100);
}

TEST_F(CliTest, SchemaRoute) {
  ASSERT_EQ(run({"route", "--lambda", "5000", "--out", out()}).code, 0);
  expect_schema("route.csv", "lambda,radius,h,status,nu,stretch");
}

TEST_F(CliTest, SchemaBounds) {
  ASSERT_EQ(run({"bounds", "--lambda", "1e3:1e6:log10", "--out", out()}).code, 0);
  expect_schema("bounds.csv",
                "N,d,eta,sigma_interior,sigma_edge,sigma_total,Enu_lower,Enu_upper,Enu_asym,var_bound,vmr_asym", 4);
}

TEST_F(CliTest, SchemaHopcount) {
  ASSERT_EQ(run({"experiment", "hopcount", "--lambda", "2000,4000", "--fields", "2", "--routes", "3", "--out", out()})
                .code,
            0);
  expect_schema("hopcount.csv",
                "lambda,d,h_over_R,mean_nu,var_nu,norm_mean,vmr_sqrt,ci,bound_lo,bound_hi,asymptote,n_fail", 2);
  expect_schema("hopcount_fields.csv", "lambda,field,mean_nu,var_nu,n_delivered,n_fail", 4);
  expect_schema("hopcount_routes.csv", "lambda,field,route,status,nu,h,stretch", 12);
}

TEST_F(CliTest, SchemaEdge) {
  ASSERT_EQ(run({"experiment", "edge", "--lambda", "3000", "--fields", "2", "--routes", "2", "--out", out()}).code, 0);
  expect_schema("edge.csv",
                "lambda,d,h_over_R,mean_nu,var_nu,norm_mean,vmr_sqrt,ci,bound_lo,bound_hi,asymptote,n_fail");
  expect_schema("edge_routes.csv", "lambda,field,route,status,nu,h,stretch", 4);
}

TEST_F(CliTest, SchemaVariance) {
  ASSERT_EQ(run({"experiment", "variance", "--lambda", "2000", "--fields", "2", "--routes", "3", "--out", out()}).code,
            0);
  expect_schema("variance.csv",
                "lambda,d,h_over_R,mean_nu,var_nu,var_ci,vmr_sqrt,env_lo,env_hi,vmr_asym_sqrt,finite_bound,n_fail");
}

TEST_F(CliTest, SchemaStretch) {
  ASSERT_EQ(run({"experiment", "stretch", "--lambda", "2000", "--fields", "2", "--routes", "3", "--out", out()}).code,
            0);
  expect_schema("stretch.csv",
                "lambda,d,h,radius,mean_stretch,var_stretch,ci,stretch_over_h,var_over_Rh,asym_mean,asym_var,n_fail");
}

TEST_F(CliTest, SchemaConnectivity) {
  ASSERT_EQ(run({"experiment", "connectivity", "--lambda", "1000", "--fields", "3", "--out", out()}).code, 0);
  expect_schema("connectivity.csv", "N,d,eta,empirical_fraction,sigma_bound");
}

TEST_F(CliTest, SchemaMarkov) {
  ASSERT_EQ(run({"experiment", "markov", "--lambda", "5000", "--fields", "2", "--routes", "3", "--out", out()}).code,
            0);
  expect_schema("markov.csv", "bin_lo,bin_hi,rho_hat,area_ratio,lower,upper,n_events", 10);
  expect_schema("markov_pooled.csv", "n_events,n_hits,rho_hat,mean_area_ratio,p_value,n_disjoint");
}

TEST_F(CliTest, SchemaSchemes) {
  const RunResult r =
      run({"experiment", "schemes", "--lambda", "5000", "--scheme", "mfr", "--fields", "2", "--routes", "2", "--out",
           out()});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_schema("schemes.csv",
                "lambda,scheme,E_x,E_g,var_x,se_x,predicted_mean_nu,sim_mean_nu,mean_dev,predicted_vmr,sim_vmr,vmr_dev,"
                "side_condition,n_fail");
  EXPECT_NE(slurp(dir_ / "out" / "schemes.csv").find(",mfr,"), std::string::npos);
}
