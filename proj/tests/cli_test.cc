#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "twirlkit/circuit_io.h"

namespace twirlkit::cli {
namespace {

std::string fixture(const std::string& name) { return std::string(TWIRLKIT_FIXTURE_DIR) + "/" + name; }
std::string preset_file(const std::string& name) { return std::string(TWIRLKIT_PRESET_DIR) + "/" + name; }

bool has(const Result& r, const std::string& s) { return r.out.find(s) != std::string::npos; }

TEST(Cli, VerifySuitesPassWithSeed) {
  for (const char* suite : {"qops", "symmetrize", "simmaps", "refframe", "gpt", "circuits"}) {
    SCOPED_TRACE(suite);
    Result r = run({"verify", suite, "--seed", "7"});
    EXPECT_EQ(r.exit_code, kExitPass) << r.out;
    EXPECT_TRUE(has(r, "result=pass"));
    EXPECT_FALSE(has(r, "[FAIL]"));
  }
}

TEST(Cli, VerifyAllAggregatesEverySuite) {
  Result r = run({"verify", "all", "--format", "machine"});
  EXPECT_EQ(r.exit_code, kExitPass);
  for (const char* suite : {"qops:", "symmetrize:", "simmaps:", "refframe:", "gpt:", "circuits:"}) {
    EXPECT_TRUE(has(r, suite)) << suite;
  }
}

TEST(Cli, CorruptedChannelFixtureFailsWithWitness) {
  Result r = run({"verify", "simmaps", "--fixture", fixture("corrupted_channel.json")});
  EXPECT_EQ(r.exit_code, kExitFailure);
  EXPECT_TRUE(has(r, "witness: image of gate mid is invalid"));
  EXPECT_TRUE(has(r, "min_eigenvalue=-0.5"));
  EXPECT_TRUE(has(r, "result=fail"));
  EXPECT_TRUE(has(r, "exit_code=1"));
}

TEST(Cli, MachineSectionIsDeterministic) {
  std::vector<std::string> args = {"verify", "all", "--seed", "11", "--format", "machine"};
  EXPECT_EQ(run(args).out, run(args).out);
  Result both = run({"verify", "qops", "--seed", "11"});
  Result machine = run({"verify", "qops", "--seed", "11", "--format", "machine"});
  const std::string fence = "```machine\n";
  ASSERT_NE(both.out.find(fence), std::string::npos);
  EXPECT_EQ(both.out.substr(both.out.find(fence)), machine.out);
  Result human = run({"verify", "qops", "--format", "human"});
  EXPECT_EQ(human.out.find(fence), std::string::npos);
}

TEST(Cli, ScenarioChsh) {
  Result r = run({"scenario", "chsh", "--format", "machine"});
  EXPECT_EQ(r.exit_code, kExitPass);
  std::istringstream is(r.out);
  double v = 0.0;
  for (std::string l; std::getline(is, l);) {
    if (l.rfind("chsh=", 0) == 0) v = std::stod(l.substr(5));
  }
  EXPECT_NEAR(v, 2 * std::sqrt(2.0), 1e-6);
}

TEST(Cli, ScenarioBilocalityUnderDollar) {
  Result r = run({"scenario", "bilocality", "--map", "dollar", "--group", "z2phase", "--format", "machine"});
  EXPECT_EQ(r.exit_code, kExitPass) << r.out;
  std::istringstream is(r.out);
  double delta = 1.0;
  for (std::string l; std::getline(is, l);) {
    if (l.rfind("statistics_max_error=", 0) == 0) delta = std::stod(l.substr(21));
  }
  EXPECT_LT(delta, 1e-9);
  EXPECT_TRUE(has(r, "all_valid=1"));
}

TEST(Cli, ScenarioBellBipartiteUnderDollarCIsInvalid) {
  Result r = run({"scenario", "bell-bipartite", "--map", "dollarC"});
  EXPECT_EQ(r.exit_code, kExitFailure);
  EXPECT_TRUE(has(r, "INVALID"));
  EXPECT_TRUE(has(r, "min_eigenvalue=-0.125"));
  EXPECT_TRUE(has(r, "min_eigenvalue_gate=S"));
}

TEST(Cli, DistrictReports) {
  Result dbell = run({"district", preset_file("dbell")});
  EXPECT_EQ(dbell.exit_code, kExitPass) << dbell.out << dbell.err;
  EXPECT_TRUE(has(dbell, "districts=2"));
  EXPECT_TRUE(has(dbell, "district.0.excluded=1"));
  EXPECT_TRUE(has(dbell, "district.1.excluded=1"));
  EXPECT_TRUE(has(dbell, "verdict=gap excluded"));

  Result pbr = run({"district", preset_file("pbr.json")});
  EXPECT_EQ(pbr.exit_code, kExitPass);
  EXPECT_TRUE(has(pbr, "verdict=gap excluded"));
  EXPECT_TRUE(has(pbr, "algebraic causal structure"));

  Result bilo = run({"district", "presets/bilocality"});
  EXPECT_EQ(bilo.exit_code, kExitPass);
  EXPECT_TRUE(has(bilo, "verdict=no exclusion"));
}

TEST(Cli, DistrictVerdictMismatchFails) {
  CircuitDocument doc = load_circuit_file(preset_file("bilocality.json"));
  doc.metadata.expected_verdict = "gap excluded";
  auto path = std::filesystem::temp_directory_path() / "twirlkit_cli_mismatch.json";
  save_circuit_file(path.string(), doc);
  Result r = run({"district", path.string()});
  std::filesystem::remove(path);
  EXPECT_EQ(r.exit_code, kExitFailure);
}

TEST(Cli, Classify) {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
      {{"qt:2", "time-reversal"}, "strongly_nonphysical"},
      {{"pmqt:2", "z2phase"}, "weakly_nonphysical"},
      {{"pptworld:2", "conjugation"}, "physical"}};
  for (const auto& [args, verdict] : cases) {
    Result r = run({"classify", args[0], args[1]});
    EXPECT_EQ(r.exit_code, kExitPass);
    EXPECT_TRUE(has(r, "verdict=" + verdict + "\n")) << r.out;
  }
}

TEST(Cli, Refframe) {
  Result bell = run({"refframe", "z2phase", "phi+"});
  EXPECT_TRUE(has(bell, "shared_rf=1"));
  EXPECT_TRUE(has(bell, "perfect_shared_rf=1"));
  Result mixed = run({"refframe", "z2phase", "mixed"});
  EXPECT_TRUE(has(mixed, "shared_rf=0"));
  Result noisy = run({"refframe", "z2phase", "noisy:0.9"});
  EXPECT_TRUE(has(noisy, "shared_rf=1"));
  EXPECT_TRUE(has(noisy, "perfect_shared_rf=0"));
  // The diagonal Z3 twirl decoheres qutrit Φ+ into a classical correlation.
  Result qutrit = run({"refframe", "z3cyclic", "phi+", "--dim", "3"});
  EXPECT_TRUE(has(qutrit, "shared_rf=0"));
  Result frame = run({"refframe", "z3cyclic", "frame", "--dim", "3"});
  EXPECT_TRUE(has(frame, "perfect_shared_rf=1"));
  Result file = run({"refframe", "z2phase", "--file", preset_file("bell-bipartite.json")});
  EXPECT_EQ(file.exit_code, kExitPass) << file.err;
  EXPECT_TRUE(has(file, "perfect_shared_rf=1"));
}

TEST(Cli, SimulateFile) {
  for (const char* map : {"dollar", "euro"}) {
    Result r = run({"simulate", preset_file("bilocality.json"), "--map", map});
    EXPECT_EQ(r.exit_code, kExitPass) << r.out;
  }
  Result c = run({"simulate", fixture("corrupted_channel.json")});
  EXPECT_EQ(c.exit_code, kExitFailure);
}

TEST(Cli, ExportPresetRoundTrips) {
  Result r = run({"export-preset", "dbell"});
  EXPECT_EQ(r.exit_code, kExitPass);
  CircuitDocument doc = circuit_from_json(r.out);
  EXPECT_EQ(doc.name, "dbell");
  std::ifstream f(preset_file("dbell.json"));
  std::stringstream committed;
  committed << f.rdbuf();
  EXPECT_EQ(r.out, committed.str());
  Result g = run({"export-preset", "bilocality", "--group", "z3cyclic"});
  EXPECT_TRUE(circuit_from_json(g.out).rep.has_value());
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run({}).exit_code, kExitInputError);
  EXPECT_EQ(run({"verify", "nosuch"}).exit_code, kExitInputError);
  EXPECT_EQ(run({"scenario", "nosuch"}).exit_code, kExitInputError);
  EXPECT_EQ(run({"district", "/no/such/file.json"}).exit_code, kExitInputError);
  EXPECT_EQ(run({"classify", "qt:x", "z2phase"}).exit_code, kExitInputError);
  EXPECT_EQ(run({"refframe", "z2phase", "noisy:2"}).exit_code, kExitInputError);
  EXPECT_EQ(run({"scenario", "chsh", "--map", "pound"}).exit_code, kExitInputError);
  EXPECT_EQ(run({"verify", "qops", "--format", "xml"}).exit_code, kExitInputError);
  EXPECT_EQ(run({"--help"}).exit_code, kExitPass);
}

}  // namespace
}  // namespace twirlkit::cli
