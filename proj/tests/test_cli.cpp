#include "ccsymbol/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ccsymbol;

namespace {

const std::string kExamples = CCSYMBOL_EXAMPLES_DIR;

struct Result {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ccsymbol");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string example(const std::string& name) { return kExamples + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("ccsymbol_test_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

}  // namespace

TEST(Cli, DecomposeOneVariable) {
  auto r = run({"decompose1d", "-i", example("decompose1d_t_one_minus_t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.report();
  EXPECT_EQ(j["omega"], 1);
  ASSERT_EQ(j["plus_params"].size(), 1u);
  EXPECT_EQ(j["plus_params"][0]["i"], 1);
  EXPECT_EQ(j["plus_params"][0]["a"], json::parse(R"([{"c": 1, "e": []}])"));
  EXPECT_EQ(j["version"], kVersion);
}

TEST(Cli, SymbolOfTWithItself) {
  auto r = run({"symbol1d", "-i", example("symbol1d_t_t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["value_text"], "-1");
}

TEST(Cli, OtherSubcommandsRun) {
  for (auto [cmd, file] : std::vector<std::pair<std::string, std::string>>{{"symbol1d", "symbol1d_nilpotent.json"},
                                                                          {"decompose2d", "decompose2d_example.json"},
                                                                          {"symbol2d", "symbol2d_example.json"},
                                                                          {"weil", "weil_example.json"},
                                                                          {"verify-iterint", "iterint_example.json"}}) {
    auto r = run({cmd, "-i", example(file)});
    EXPECT_EQ(r.code, 0) << cmd << ": " << r.err;
  }
  auto w = run({"weil", "-i", example("weil_example.json")}).report();
  EXPECT_TRUE(w["reciprocity_holds"].get<bool>());
  auto s = run({"symbol2d", "-i", example("symbol2d_example.json")}).report();
  EXPECT_TRUE(s["factors"].contains("T"));
  EXPECT_TRUE(s["factors"].contains("S"));
  EXPECT_EQ(s["conventions"]["i21-rule"], "parshin");
}

TEST(Cli, VerifyCaseOneDefault) {
  auto r = run({"verify-cases", "--case", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.report();
  EXPECT_LE(j["max_best_residual"].get<double>(), 1e-6);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, VerifyAllCasesAndDraws) {
  auto r = run({"verify-cases", "--draws", "3", "--eps1", "0.5", "--eps2", "0.6"});
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = r.report();
  EXPECT_EQ(j["reports"].size(), 9u * 4);
  for (const auto& rep : j["reports"])
    if (!rep["flag"].is_null()) {
      EXPECT_EQ(rep["best"], "derived") << rep.dump();
    }
}

TEST(Cli, VerificationFailureExitsOne) {
  auto r = run({"verify-cases", "--case", "1", "--tol", "1e-40"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.report()["pass"].get<bool>());
}

TEST(Cli, MalformedJsonReportsPosition) {
  auto p = temp_file("bad.json", "{\n  \"f\": {\"terms\": [\n    {\"n\": 1, \"c\": 1,}\n  ]}\n}\n");
  auto r = run({"decompose1d", "-i", p});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":3:21:"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run({"symbol2d", "-i", example("symbol2d_example.json"), "-c", "bogus=derived"}).code, 2);
  EXPECT_EQ(run({"symbol2d", "-i", example("symbol2d_example.json"), "-c", "case8=maybe"}).code, 2);
  auto p = temp_file("conv.json", R"({"f1": {"terms": []}, "f2": {"terms": []}, "f3": {"terms": []},
                                      "conventions": {"no-such-flag": "derived"}})");
  EXPECT_EQ(run({"symbol2d", "-i", p}).code, 2);
  EXPECT_EQ(run({"verify-cases", "--case", "9"}).code, 2);
  EXPECT_EQ(run({"decompose1d", "-i", "/nonexistent/input.json"}).code, 2);
  EXPECT_EQ(run({"decompose1d"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  auto q = temp_file("float.json", R"({"f": {"terms": [{"n": 0, "c": 0.5}]}})");
  EXPECT_EQ(run({"decompose1d", "-i", q}).code, 2);
  auto c = temp_file("conv_err.json", R"({"case": 1, "a": 0.9, "b": 0.5, "c": 0.5, "e": [[1,-1],[0,1],[-1,0]]})");
  EXPECT_EQ(run({"verify-cases", "--params", c}).code, 2);
}

TEST(Cli, OutputFileMatchesStdout) {
  auto path = (std::filesystem::temp_directory_path() / "ccsymbol_test_out.json").string();
  auto a = run({"symbol1d", "-i", example("symbol1d_nilpotent.json")});
  auto b = run({"symbol1d", "-i", example("symbol1d_nilpotent.json"), "-o", path});
  ASSERT_EQ(b.code, 0);
  EXPECT_TRUE(b.out.empty());
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text, a.out);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  std::vector<std::vector<std::string>> jobs{{"symbol2d", "-i", example("symbol2d_example.json")},
                                             {"weil", "-i", example("weil_example.json")},
                                             {"verify-cases", "--draws", "2", "--eps1", "0.4", "--eps2", "0.4"},
                                             {"verify-iterint", "--count", "10"}};
  for (const auto& job : jobs) {
    setenv("CC_SYMBOL_THREADS", "1", 1);
    auto a = run(job);
    setenv("CC_SYMBOL_THREADS", "3", 1);
    auto b = run(job);
    unsetenv("CC_SYMBOL_THREADS");
    auto c = run(job);
    EXPECT_EQ(a.out, b.out) << job[0];
    EXPECT_EQ(a.out, c.out) << job[0];
  }
}
