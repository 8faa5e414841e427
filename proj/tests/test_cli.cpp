#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "common.hpp"
#include "doctest.h"
#include "ostrovsky/cli.hpp"

using namespace ostrovsky;
using namespace testing_util;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ostrovsky");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("ostrovsky_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exponent outside the admissible range") {
  fs::path d = fresh_dir("badp");
  Invocation r = invoke({"solve", "--family", "abs", "--p", "4", "--lambda", "1", "--out", d.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("InvalidExponent") != std::string::npos);
  CHECK(r.err.find("1 < p < 3") != std::string::npos);
}

TEST_CASE("usage errors") {
  fs::path d = fresh_dir("usage");
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"solve", "--family", "signed", "--p", "2", "--out", d.string()}).code == 2);  // no lambda
  CHECK(invoke({"solve", "--family", "signed", "--p", "2", "--lambda", "1", "--n", "1000", "--out", d.string()})
            .code == 2);
  // one lambda is not a curve
  CHECK(invoke({"sweep", "--family", "signed", "--p", "2", "--lambda", "1", "--out", d.string()}).code == 2);
  // a perturbation needs an explicit seed
  Invocation e = invoke({"evolve", "--family", "signed", "--p", "2", "--lambda", "1", "--T", "0.1", "--out", d.string()});
  CHECK(e.code == 2);
  CHECK(invoke({"evolve", "--family", "signed", "--p", "2", "--lambda", "1", "--delta", "0.5", "--seed", "1", "--out",
                d.string()})
            .code == 2);
}

TEST_CASE("solve writes the profile") {
  fs::path d = fresh_dir("solve");
  Invocation r = invoke({"solve", "--family", "signed", "--p", "2", "--lambda", "1", "--out", d.string()});
  CHECK(r.code == 0);
  REQUIRE(fs::exists(d / "profile_signed_p2_lambda1.csv"));
  REQUIRE(fs::exists(d / "profile_signed_p2_lambda1.json"));
  std::string csv = slurp(d / "profile_signed_p2_lambda1.csv");
  CHECK(csv.rfind("x,phi,dphi,antideriv\n", 0) == 0);
  WaveProfile pr = profile_from_json(json::parse(slurp(d / "profile_signed_p2_lambda1.json")));
  CHECK(pr.omega < 2.0);
  // same numbers as the module
  const WaveProfile& ref = reference_profile();
  CHECK(pr.omega == ref.omega);
  CHECK(pr.energy == ref.energy);
  CHECK(max_abs_diff(pr.phi.values, ref.phi.values) == 0.0);
  // no temporaries left behind
  for (const auto& e : fs::directory_iterator(d)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("outputs are bit-identical across runs") {
  fs::path a = fresh_dir("rep_a"), b = fresh_dir("rep_b");
  for (const fs::path& d : {a, b})
    REQUIRE(invoke({"sweep", "--family", "signed", "--p", "2", "--lambda", "0.5,1", "--out", d.string()}).code == 0);
  for (const auto& e : fs::directory_iterator(a)) {
    fs::path other = b / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
  }
}

TEST_CASE("sweep with every level failing") {
  fs::path d = fresh_dir("sweepfail");
  Invocation r = invoke({"sweep", "--family", "signed", "--p", "2", "--lambda", "0.5,1", "--max-iter", "2", "--out",
                         d.string()});
  CHECK(r.code == 3);
  REQUIRE(fs::exists(d / "manifest.json"));
  json m = json::parse(slurp(d / "manifest.json"));
  CHECK(m["failed"].size() == 2);
  CHECK(m["failed"][0]["error"].get<std::string>().find("NoConvergence") != std::string::npos);
  CHECK(fs::exists(d / "cost_curve.csv"));
}

TEST_CASE("subadditivity over four levels") {
  fs::path d = fresh_dir("subadd");
  Invocation r =
      invoke({"subadd", "--family", "signed", "--p", "2", "--lambda", "0.5,1,1.5,2", "--out", d.string()});
  CHECK(r.code == 0);
  json s = json::parse(slurp(d / "subadditivity.json"));
  CHECK(s["pass"] == true);
}

TEST_CASE("verify-all on the reference cell") {
  fs::path d = fresh_dir("verify");
  Invocation r = invoke({"verify-all", "--family", "signed", "--p", "2", "--lambda", "1", "--out", d.string()});
  CHECK(r.code == 0);
  std::string table = slurp(d / "verification_table.csv");
  std::stringstream ss(table);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  auto h = split(header), v = split(row);
  REQUIRE(h.size() == v.size());
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] == name) return v[i];
    FAIL("missing column " << name);
    return std::string();
  };
  CHECK(col("verdict") == "Stable");
  CHECK(col("pass") == "true");
  CHECK(col("n_minus") == "1");
  CHECK(col("evolve_ratio").empty());
  // table values reproduce the module reports
  const WaveProfile& pr = reference_profile();
  CHECK(std::stod(col("omega")) == pr.omega);
  CHECK(std::stod(col("m_value")) == pr.energy);
  PohozaevReport a = pohozaev_residuals(pr);
  CHECK(std::stod(col("pohozaev_r1")) == a.r1);
  CHECK(std::stod(col("pohozaev_r2")) == a.r2);
  json m = json::parse(slurp(d / "manifest.json"));
  CHECK(m.contains("note"));
}

TEST_CASE("config file with flag overrides") {
  fs::path d = fresh_dir("config");
  json cfg{{"family", "signed"}, {"p", 3.0}, {"lambda", 1.0}, {"out_dir", d.string()}};
  fs::path file = d / "run.json";
  std::ofstream(file) << cfg.dump();
  Invocation r = invoke({"solve", "--config", file.string(), "--p", "2"});
  CHECK(r.code == 0);
  CHECK(fs::exists(d / "profile_signed_p2_lambda1.json"));
  CHECK_FALSE(fs::exists(d / "profile_signed_p3_lambda1.json"));

  std::ofstream(file) << json{{"family", "signed"}, {"p", 2.0}, {"lambda", 1.0}, {"colour", "red"}}.dump();
  CHECK(invoke({"solve", "--config", file.string(), "--out", d.string()}).code == 2);
}

TEST_CASE("config merge round trip") {
  RunConfig c;
  c.command = "solve";
  c.out_dir = "x";
  merge_config_json(c, json{{"family", "abs"}, {"p", 1.5}, {"lambdas", {0.5, 1.0}},
                            {"grid", {{"L", 30.0}, {"n", 512}}}, {"evolve", {{"seed", 4}}}});
  CHECK(c.family == Family::AbsPower);
  CHECK(c.p == 1.5);
  CHECK(c.lambdas == std::vector<double>{0.5, 1.0});
  CHECK(c.grid.L == 30.0);
  CHECK(c.grid.n == 512);
  CHECK(c.evolve.seed == 4u);
  RunConfig d;
  merge_config_json(d, config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));
  CHECK(error_of([&] { merge_config_json(d, json{{"grid", {{"m", 3}}}}); }) == ErrorCode::Usage);
  CHECK(error_of([&] { merge_config_json(d, json{{"p", "two"}}); }) == ErrorCode::Usage);
  CHECK(exit_code_for(ErrorCode::InvalidExponent) == 2);
  CHECK(exit_code_for(ErrorCode::NoConvergence) == 3);
}

}
