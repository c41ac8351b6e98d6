#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "symcap/cli.hpp"

using namespace symcap;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "symcap_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, EhExample) {
  auto r = run_cli({"eh", "1,3/2,2", "--count", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1, 3/2, 2\n");
}

TEST(Cli, PackInfeasibleWithWitness) {
  auto r = run_cli({"pack", "3/2", "1,1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "Infeasible: witness (1;1,1)\n");
  auto ok = run_cli({"pack", "4", "1^8,2^2"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "Feasible\n");
  auto e = run_cli({"pack", "--ellipsoid", "1,3125,25,125"});
  EXPECT_EQ(e.code, 0);
  auto j = run_cli({"--json", "pack", "1", "1,1"});
  EXPECT_EQ(j.code, 1);
  auto parsed = Json::parse(j.out);
  EXPECT_EQ(parsed["status"], "Infeasible");
  EXPECT_EQ(parsed["witness"]["type"], "volume");
}

TEST(Cli, VerifyTamperedStep) {
  ChainBuilder ch({RealExpr(1), RealExpr(5)});
  ch.include({RealExpr(1), RealExpr(5)});
  ch.step(rules::AxiomMSsqrt{RealExpr(5)}, AxisTuple(2, sqrt(RealExpr(5))));
  auto path = temp_file("tampered.json");
  write(path, certificate_to_json(ch.finish(Ellipsoid::ball(sqrt(RealExpr(5)), 2))).dump(2));
  auto r = run_cli({"verify", path.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "Invalid at step 2: hypothesis b = 4 or b >= 8 1/36 fails\n");
}

TEST(Cli, CertifyOutputIsAcceptedByVerify) {
  const std::vector<std::vector<std::string>> cases{
      {"olga2", "2", "1"},        {"olga3", "2", "3"},         {"olga4", "2000000000000", "3"},
      {"fullfill2", "9", "1000000000000000000000000000000"}, {"lambdatrick", "5", "6", "3", "1"},
      {"pack", "9", "2"},         {"pack", "1553044545181", "3"}, {"fval", "3", "20"},
      {"fval", "3/2", "3"},       {"fval", "5/2", "11"}};
  for (const auto& c : cases) {
    std::vector<std::string> args{"certify"};
    args.insert(args.end(), c.begin(), c.end());
    auto made = run_cli(args);
    ASSERT_EQ(made.code, 0) << c[0] << ": " << made.err;
    auto path = temp_file("cert_" + c[0] + ".json");
    write(path, made.out);
    auto checked = run_cli({"verify", path.string()});
    EXPECT_EQ(checked.code, 0) << c[0] << ": " << checked.out << checked.err;
    EXPECT_EQ(checked.out, "Valid\n");
  }
  auto to_file = temp_file("olga3_file.json");
  EXPECT_EQ(run_cli({"certify", "olga3", "3", "3", "-o", to_file.string()}).code, 0);
  EXPECT_EQ(run_cli({"verify", to_file.string()}).code, 0);
}

TEST(Cli, CertifyHypothesisViolations) {
  auto r = run_cli({"certify", "olga4", "100", "3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("hypothesis violated"), std::string::npos);
  EXPECT_EQ(run_cli({"certify", "fullfill2", "1", "100"}).code, 1);
  EXPECT_EQ(run_cli({"certify", "lambdatrick", "1", "2", "3", "1"}).code, 1);
  EXPECT_EQ(run_cli({"certify", "pack", "8", "2"}).code, 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
  EXPECT_EQ(run_cli({"eh"}).code, 2);
  EXPECT_EQ(run_cli({"eh", "1,1.5"}).code, 2);
  EXPECT_EQ(run_cli({"certify", "olga9", "1", "1"}).code, 2);
  EXPECT_EQ(run_cli({"certify", "olga2", "1"}).code, 2);
  EXPECT_EQ(run_cli({"fval", "3", "2"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "/nonexistent/file.json"}).code, 2);
  EXPECT_EQ(run_cli({"--bits", "32", "eh", "1,2"}).code, 2);
  auto bad = temp_file("bad.json");
  write(bad, "{ not json");
  EXPECT_EQ(run_cli({"verify", bad.string()}).code, 2);
  auto help = run_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("fig1-map"), std::string::npos);
}

TEST(Cli, PrecisionExhaustedExitsThree) {
  // sqrt(2) against a 2000-bit truncation of it, with a 64-bit budget
  BigInt t = floor_root(pow_int(BigInt(2), 4001), 2);
  BigRational q = BigRational(t) / BigRational(pow_int(BigInt(2), 2000));
  auto r = run_cli({"--bits", "64", "eh", "root(2, 2)," + to_string(q)});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("precision exhausted"), std::string::npos);
  EXPECT_EQ(run_cli({"--bits", "8192", "eh", "root(2, 2)," + to_string(q), "--count", "2"}).code, 0);
}

TEST(Cli, EnvironmentBudget) {
  ::setenv("SYMCAP_BITS", "32", 1);
  EXPECT_EQ(run_cli({"eh", "1,2"}).code, 2);
  ::setenv("SYMCAP_BITS", "junk", 1);
  EXPECT_EQ(run_cli({"eh", "1,2"}).code, 2);
  ::setenv("SYMCAP_BITS", "512", 1);
  EXPECT_EQ(run_cli({"eh", "1,2"}).code, 0);
  ::unsetenv("SYMCAP_BITS");
}

TEST(Cli, OtherCommands) {
  EXPECT_EQ(run_cli({"packing-number", "8"}).out, "288/289\n");
  auto w = run_cli({"weights", "2", "5"});
  EXPECT_EQ(w.code, 0);
  EXPECT_EQ(w.out, "continued fraction: [2; 2]\nweights: 2^2, 1^2\n");
  auto f = run_cli({"fval", "3/2", "3"});
  EXPECT_EQ(f.out, "lower: 2\nupper: 2\nknown: 2 (L2.12, EH k=3)\n");
  auto s = run_cli({"stability", "2"});
  EXPECT_EQ(s.out, "M_2 = 289/36\n");
  auto s3 = run_cli({"--json", "stability", "3", "--remark"});
  auto js = Json::parse(s3.out);
  EXPECT_EQ(js["M_equals_beta"], true);
  EXPECT_EQ(js["fullfill_bound"]["lo_decimal"].get<std::string>().substr(0, 6), "1.4055");
  auto t = run_cli({"toric", "fig2", "5", "2", "--refined"});
  EXPECT_EQ(t.out, "Valid tiling, 3130 parts (1^3125, 25^4, 100^1)\n");
  auto tj = run_cli({"--json", "toric", "subdivide", "3", "3"});
  EXPECT_EQ(Json::parse(tj.out)["valid"], true);
  EXPECT_EQ(run_cli({"toric", "unit", "4"}).code, 0);
  EXPECT_EQ(run_cli({"toric", "spiral", "4"}).code, 2);
}

TEST(Cli, Fig1MapIsDeterministicAcrossThreads) {
  auto one = run_cli({"--json", "fig1-map", "--steps", "6", "--threads", "1", "--max-count", "30"});
  auto many = run_cli({"--json", "fig1-map", "--steps", "6", "--threads", "4", "--max-count", "30"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, many.out);
  auto cells = Json::parse(one.out)["cells"];
  EXPECT_GT(cells.size(), 20u);
  bool any_tight = false;
  for (const auto& c : cells) any_tight = any_tight || c["tight"].get<bool>();
  EXPECT_TRUE(any_tight);
}

TEST(Cli, Determinism) {
  for (std::vector<std::string> args :
       {std::vector<std::string>{"--json", "certify", "olga4", "2000000000000", "3"},
        std::vector<std::string>{"--json", "fval", "3", "20"}, std::vector<std::string>{"--json", "eh", "1,2,3", "--count", "20"}}) {
    EXPECT_EQ(run_cli(args).out, run_cli(args).out);
  }
}
