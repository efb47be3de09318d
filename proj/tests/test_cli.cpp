#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult cli(const std::string& args, const std::string& env = "") {
  const bool merged = args.find("2>&1") != std::string::npos;
  const std::string cmd = env + " " + CYCLEKIT_CLI_PATH + " " + args + (merged ? "" : " 2>/dev/null");
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string sample(const std::string& name) { return std::string(CYCLEKIT_SAMPLES_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cyclekit_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<double> radii(const json& doc) {
  std::vector<double> out;
  for (const auto& c : doc.at("cycles").at("cycles")) out.push_back(c.at("radius").at("value"));
  return out;
}

// Every numeric leaf must sit inside an object that names its provenance.
void check_provenance(const json& node, const std::string& path, bool covered) {
  if (node.is_object()) {
    const bool here = node.contains("provenance");
    for (const auto& [k, v] : node.items()) check_provenance(v, path + "/" + k, here);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) check_provenance(node[i], path + "/" + std::to_string(i), covered);
  } else if (node.is_number()) {
    EXPECT_TRUE(covered) << path;
  }
}

}  // namespace

TEST(Cli, ReduceLotkaVolterra) {
  const CliResult r = cli("reduce --model lotka_volterra --param alpha=2 gamma=1");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("kind"), "lls");
  const json& F = doc.at("reduction").at("lls").at("F");
  ASSERT_EQ(F.size(), 2u);
  std::map<std::pair<int, int>, std::string> f;
  for (const auto& t : F) f[{t.at("n"), t.at("m")}] = t.at("c").at("value");
  EXPECT_EQ((f[{1, 0}]), "1/3");
  EXPECT_EQ((f[{0, 1}]), "-1/3");
  EXPECT_EQ(doc.at("reduction").at("lls").at("G").at(0).at("c").at("value"), "2");
}

TEST(Cli, ReduceGlycolyticReportsDampingSign) {
  const CliResult r = cli("reduce --model glycolytic --param a=0.1 b=0.5");
  ASSERT_EQ(r.code, 0);
  const json lls = json::parse(r.out).at("reduction").at("lls");
  EXPECT_EQ(lls.at("F00_sign").at("value"), -1);
  EXPECT_EQ(lls.at("class"), "Rayleigh");
}

TEST(Cli, MalformedInputExitsOneWithPosition) {
  const CliResult r = cli("reduce --input " + sample("bad.json") + " 2>&1");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("line 5, column"), std::string::npos);
}

TEST(Cli, SchemaErrorsExitOne) {
  const fs::path p = scratch("schema.json");
  std::ofstream(p) << R"({"kind": "kinetic", "a": [0, 1, 0], "b": [0, 0, -1], "mu": 1})";
  const CliResult r = cli("reduce --input " + p.string() + " 2>&1");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("/f"), std::string::npos);
}

TEST(Cli, ReductionFailureExitsTwo) {
  const CliResult wrong = cli("reduce --model lotka_volterra --fixed-point 2,2");
  EXPECT_EQ(wrong.code, 2);
  const fs::path p = scratch("degenerate.json");
  std::ofstream(p) << R"({"kind": "kinetic", "a": [0, 0, 1], "b": [0, 0, 1], "mu": 1,
                          "f": {"terms": [{"i": 2, "j": 0, "c": 1}]}, "fixed_point": [0, 0]})";
  EXPECT_EQ(cli("reduce --input " + p.string()).code, 2);
}

TEST(Cli, NotOscillatoryExitsThree) {
  const fs::path p = scratch("saddle.json");
  std::ofstream(p) << R"({"kind": "lls", "A": [{"n": 1, "m": 0, "c": 1}, {"n": 0, "m": 1, "c": "1/10"}]})";
  EXPECT_EQ(cli("count --input " + p.string()).code, 3);
  EXPECT_EQ(cli("reduce --input " + p.string()).code, 0);
}

TEST(Cli, StrictEpsPolicyExitsThree) {
  EXPECT_EQ(cli("count --model rychkov --eps-policy strict").code, 3);
  EXPECT_EQ(cli("count --model rychkov --eps-policy warn").code, 0);
  EXPECT_EQ(cli("count --model van_der_pol --eps-policy strict").code, 0);
}

TEST(Cli, CountRychkov) {
  const CliResult r = cli("count --model rychkov");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  const auto rs = radii(doc);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_DOUBLE_EQ(rs[0], 1.0);
  EXPECT_DOUBLE_EQ(rs[1], 2.0);
  EXPECT_EQ(doc.at("cycles").at("cycles").at(0).at("stability"), "Unstable");
  EXPECT_FALSE(doc.at("warnings").empty());
}

TEST(Cli, CountKaiserWithoutSexticTerm) {
  const CliResult r = cli("count --model kaiser --param alpha=0.1 beta=0");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  const auto rs = radii(doc);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_NEAR(rs[0], 2.351, 1e-3);
  EXPECT_NEAR(rs[1], 3.804, 1e-3);
  EXPECT_EQ(doc.at("cycles").at("cycles").at(0).at("stability"), "Stable");
  EXPECT_EQ(doc.at("cycles").at("cycles").at(1).at("stability"), "Unstable");
}

TEST(Cli, CountGaikoWithNegativeLinearDamping) {
  const CliResult r = cli("count --model gaiko --param k=3 mu1=-1/100");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("cycles").at("bound").at("max_cycles").at("value"), 3);
  EXPECT_NE(doc.at("warnings").dump().find("requires mu1>0"), std::string::npos);
}

TEST(Cli, VerifyVanDerPol) {
  const CliResult r = cli("verify --model van_der_pol --param eps=0.1 --seeds 0.5,4");
  ASSERT_EQ(r.code, 0);
  const json cmp = json::parse(r.out).at("comparison");
  EXPECT_TRUE(cmp.at("all_agree").get<bool>());
  ASSERT_EQ(cmp.at("matches").size(), 1u);
  EXPECT_NEAR(cmp.at("matches").at(0).at("detected_amplitude").at("value").get<double>(), 2.0, 0.04);
}

TEST(Cli, VerifyBlowsLloyd) {
  const CliResult r = cli("verify --model blows_lloyd --param k=3 eps=0.01 --seeds 0.5,1.5,2.5,3.5");
  ASSERT_EQ(r.code, 0);
  const json cmp = json::parse(r.out).at("comparison");
  EXPECT_EQ(cmp.at("matches").size(), 3u);
  EXPECT_TRUE(cmp.at("all_agree").get<bool>());
}

TEST(Cli, VerifyLotkaVolterraFindsNothing) {
  const CliResult r = cli("verify --model lotka_volterra");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_TRUE(doc.at("detection").at("cycles").empty());
  EXPECT_NE(doc.at("warnings").dump().find("NoConvergence"), std::string::npos);
}

TEST(Cli, VerifyWritesTrajectories) {
  const fs::path dir = scratch("traj");
  fs::remove_all(dir);
  const CliResult r = cli("verify --input " + sample("vdp_lls.json") + " --seeds 1 --emit-trajectories " +
                    dir.string());
  ASSERT_EQ(r.code, 0);
  ASSERT_TRUE(fs::exists(dir / "seed_0_forward.csv"));
  std::ifstream f(dir / "seed_0_forward.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "t,xi,xi_dot");
}

TEST(Cli, ReduceOutputRoundTrips) {
  const fs::path p = scratch("bl_lls.json");
  ASSERT_EQ(cli("reduce --model blows_lloyd -o " + p.string()).code, 0);
  const CliResult direct = cli("count --model blows_lloyd");
  const CliResult again = cli("count --input " + p.string());
  ASSERT_EQ(direct.code, 0);
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(json::parse(direct.out).at("cycles"), json::parse(again.out).at("cycles"));
  EXPECT_EQ(json::parse(direct.out).at("averaging"), json::parse(again.out).at("averaging"));
}

TEST(Cli, KineticFileWithoutFixedPointIsSearched) {
  const CliResult r = cli("count --input " + sample("brusselator.json") + " --seed 7");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("reduction").at("fixed_point").at("x").at("value"), "1");
  EXPECT_EQ(doc.at("cycles").at("cycles").size(), 1u);
}

TEST(Cli, OutputIsDeterministic) {
  const std::string args = "verify --input " + sample("brusselator.json") + " --seed 3";
  const CliResult a = cli(args), b = cli(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const CliResult serial = cli(args, "CYCLEKIT_THREADS=1");
  EXPECT_EQ(a.out, serial.out);
}

TEST(Cli, NumbersCarryProvenance) {
  const CliResult r = cli("verify --model rychkov");
  ASSERT_EQ(r.code, 0);
  json doc = json::parse(r.out);
  // The top-level "A" list and the raw B table are system-file payloads with
  // exact "p/q" strings and integer exponents only.
  doc.erase("A");
  check_provenance(doc.at("cycles"), "/cycles", false);
  check_provenance(doc.at("comparison"), "/comparison", false);
  check_provenance(doc.at("detection").at("cycles"), "/detection/cycles", false);
}

TEST(Cli, TableFormats) {
  const CliResult csv = cli("table --nmax 1 --mmax 2 --format csv");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out, "N,M,oplus,R\n1,1,2,0\n1,2,3,0\n");
  const CliResult text = cli("table --nmax 1 --mmax 2");
  EXPECT_NE(text.out.find("2,0 3,0"), std::string::npos);
  const CliResult full = cli("table --format json");
  ASSERT_EQ(full.code, 0);
  const json cells = json::parse(full.out).at("cells");
  EXPECT_EQ(cells.at(9).at(9).at("R").at("value"), 18);
  EXPECT_EQ(cli("table --nmax 0").code, 1);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("count").code, 1);
  EXPECT_EQ(cli("count --model nosuch").code, 1);
  EXPECT_EQ(cli("count --model van_der_pol --param eps").code, 1);
  EXPECT_EQ(cli("count --model van_der_pol --eps-policy lax").code, 1);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, ZooListsModels) {
  const CliResult r = cli("zoo --format json");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).size(), 8u);
}
