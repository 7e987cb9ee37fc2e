#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gasket/io.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + GASKET_CLI_PATH + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("gasket_cli_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, MatricesCsv) {
  const auto r = run("matrices --p 2 --q 3 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2,3,A0,1,1,0,0,0,0\n2,3,A0,2,0,0,1,0,0\n2,3,A0,3,0,1,0,0,1\n2,3,A0,4,0,1,0,1,0\n2,3,A0,5,0,0,0,1,0\n"),
            std::string::npos);
  EXPECT_NE(r.out.find("2,3,A1,1,0,1,0,0,0\n2,3,A1,2,1,0,0,1,0\n2,3,A1,3,1,0,1,0,0\n2,3,A1,4,0,0,1,0,1\n2,3,A1,5,0,0,0,0,1\n"),
            std::string::npos);
}

TEST(Cli, GasketTangentInput) {
  const auto a = run("matrices --gasket-tan 1 4 --format json");
  ASSERT_EQ(a.code, 0);
  const auto j = gasket::Json::parse(a.out);
  EXPECT_EQ(j["result"]["p"], 2);
  EXPECT_EQ(j["result"]["q"], 3);
}

TEST(Cli, PressureAtZero) {
  const auto r = run("pressure --p 1 --q 1 --t 0 --n 12");
  ASSERT_EQ(r.code, 0);
  const auto j = gasket::Json::parse(r.out);
  EXPECT_EQ(j["result"][0]["value"].get<double>(), std::log(2.0));
  EXPECT_EQ(j["result"][0]["n"], 12);
  EXPECT_EQ(j["result"][0]["bound_kind"], "upper");
}

TEST(Cli, ConserveCorner) {
  const auto r = run("conserve --p 1 --q 1 --a 1 --n 32");
  ASSERT_EQ(r.code, 0);
  const auto j = gasket::Json::parse(r.out);
  const auto& c = j["result"]["conservation"][0];
  EXPECT_LT(std::abs(c["deviation"].get<double>()), c["envelope"].get<double>());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("matrices").code, 1);
  EXPECT_EQ(run("matrices --p 1 --q 1 --gasket-tan 1 3").code, 1);
  EXPECT_EQ(run("matrices --p 0 --q 1").code, 1);
  EXPECT_EQ(run("bogus").code, 1);
  EXPECT_EQ(run("matrices --p 1 --q 1 --format xml").code, 1);
  EXPECT_EQ(run("slice --p 1 --q 1 --a 5/2").code, 1);
  EXPECT_EQ(run("alpha --p 1 --q 1 --n 30").code, 2);
  EXPECT_EQ(run("slice --p 1 --q 1 --a 1/3 --n 1-4 --geometric-max 30").code, 0);
  EXPECT_EQ(run("primitive --p 1 --q 1 --n 50").code, 2);
  EXPECT_EQ(run("validate --p 3 --q 4").code, 0);
}

TEST(Cli, SpectrumFigureData) {
  const auto r = run("spectrum --kind gamma --p 1 --q 1 --n 16 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("argument,value,n,bound_kind,t_star,flags\n0,1,16,estimate"), std::string::npos);
  EXPECT_NE(r.out.find(",0,16,estimate,0,endpoint\n"), std::string::npos);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = temp_dir("env");
  const auto r = run("envelope --p 1 --q 2 --n 10 --format csv", "GASKET_OUTPUT_DIR=" + dir.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const auto text = slurp(dir / "envelope.csv");
  EXPECT_NE(text.find("p,q,quantity,n,value,bound_kind,witness,extrapolated\n"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ReproducibleOutputFiles) {
  const auto dir = temp_dir("repro");
  for (const char* name : {"a", "b"}) {
    const auto path = (dir / (std::string(name) + ".json")).string();
    ASSERT_EQ(run("beta --p 2 --q 3 --mode mc --n 500 --trials 40 --seed 5 --threads 3 --output " + path).code, 0);
  }
  const auto a = slurp(dir / "a.json"), b = slurp(dir / "b.json");
  EXPECT_EQ(gasket::strip_wall_time(a), gasket::strip_wall_time(b));
  const auto c = (dir / "c.json").string();
  ASSERT_EQ(run("beta --p 2 --q 3 --mode mc --n 500 --trials 40 --seed 5 --threads 1 --output " + c).code, 0);
  EXPECT_EQ(gasket::strip_wall_time(a), gasket::strip_wall_time(slurp(c)));
  std::filesystem::remove_all(dir);
}

TEST(Cli, Selftest) {
  const auto r = run("selftest --format csv");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find(",false,"), std::string::npos);
}
