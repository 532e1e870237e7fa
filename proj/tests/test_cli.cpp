#include "ergolab/cli.hpp"
#include "support/test_support.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ergolab;
using Json = nlohmann::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("ergolab_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::string error_of(const Outcome& o) { return Json::parse(o.err).at("error").get<std::string>(); }

}  // namespace

TEST_CASE("exit code mapping") {
  CHECK(cli::exit_code(ErrorCode::ConfigError) == cli::Config);
  CHECK(cli::exit_code(ErrorCode::UnknownPreset) == cli::Config);
  CHECK(cli::exit_code(ErrorCode::BudgetExceeded) == cli::Budget);
  for (auto code : {ErrorCode::DivergentMass, ErrorCode::EmptyRecipe, ErrorCode::StageOrder, ErrorCode::ShiftTooLarge,
                    ErrorCode::BadWeights, ErrorCode::DimensionMismatch, ErrorCode::NotDoublyStochastic,
                    ErrorCode::NotMixing, ErrorCode::NotErgodic, ErrorCode::OverlapViolation, ErrorCode::BadMarginals,
                    ErrorCode::UndefinedOrbit, ErrorCode::ZeroMeanViolation}) {
    CHECK(cli::exit_code(code) == cli::Precondition);
  }
}

TEST_CASE("construct") {
  const auto o = run({"construct", "--preset", "chacon", "--depth", "4"});
  REQUIRE(o.code == 0);
  const auto j = Json::parse(o.out);
  CHECK(j.at("built_stage") == 4);
  CHECK(j.at("total_mass") == "1/1");
  std::vector<std::uint64_t> heights;
  for (const auto& s : j.at("stages")) heights.push_back(s.at("height"));
  CHECK(heights == std::vector<std::uint64_t>{1, 4, 13, 40});
  CHECK(j.at("stages")[3].at("tower_mass") == "80/81");

  const auto csv = run({"construct", "--preset", "asym5", "--depth", "3", "--format", "csv"});
  CHECK(csv.out == "stage,height,level_width,tower_mass\n1,1,2/5,2/5\n2,11,2/25,22/25\n3,61,2/125,122/125\n");

  const auto file = temp_file("construction.txt", "h1 = 2\nw1 = \"1/4\"\nstages = [[2, [0, 1]]]\n");
  const auto from_file = run({"construct", "--file", file, "--format", "csv"});
  CHECK(from_file.code == 0);
  CHECK(from_file.out == "stage,height,level_width,tower_mass\n1,2,1/4,1/2\n2,5,1/8,5/8\n");
}

TEST_CASE("correlate") {
  const auto sets = temp_file("sets.json", R"({"ranges": [[0, 20]]})");
  const auto o = run({"correlate", "--preset", "chacon", "--stage", "4", "--sets", sets, "--shifts", "0,40"});
  REQUIRE(o.code == 0);
  CHECK(o.out == "shift_1,shift_2,lower,upper,eval_stage\n0,40,1040/2187,3160/6561,8\n");

  const auto fixed = run({"correlate", "--stage", "4", "--sets", sets, "--shifts", "0,40", "--eval-stage", "6",
                          "--refine-depth", "1", "--format", "json"});
  const auto j = Json::parse(fixed.out);
  CHECK(j.at("eval_stage") == 6);
  CHECK(j.at("lower") == "338/729");

  const auto too_far = run({"correlate", "--stage", "4", "--sets", sets, "--shifts", "0,400", "--eval-stage", "5"});
  CHECK(too_far.code == cli::Precondition);
  CHECK(error_of(too_far) == "ShiftTooLarge");

  const auto bad_set = temp_file("bad_sets.json", R"({"levels": [0, 99]})");
  const auto outside = run({"correlate", "--stage", "3", "--sets", bad_set, "--shifts", "0"});
  CHECK(outside.code == cli::Config);

  const auto unknown_key = temp_file("unknown_sets.json", R"({"lvls": [0]})");
  CHECK(run({"correlate", "--stage", "3", "--sets", unknown_key, "--shifts", "0"}).code == cli::Config);
  CHECK(run({"correlate", "--stage", "3", "--sets", sets, "--shifts", "0,a"}).code == cli::Config);
}

TEST_CASE("weak-limit and mixing-scan") {
  const auto w = run({"weak-limit", "--stages", "6..7"});
  REQUIRE(w.code == 0);
  const auto j = Json::parse(w.out);
  CHECK(j.at("rows")[0].at("best_k") == 365);
  CHECK(j.at("rows")[0].at("best_deviation") == "43/177147");
  CHECK(j.at("rows")[1].at("best_deviation") == "46/531441");

  CHECK(run({"weak-limit", "--target", "0:1/2,1:1/3"}).code == cli::Precondition);

  const auto m = run({"mixing-scan", "--eval-stage", "6"});
  REQUIRE(m.code == 0);
  const auto mj = Json::parse(m.out);
  CHECK(mj.at("d") == "2797/75");
  CHECK(mj.at("grid_points") == 72630);
  CHECK(mj.at("offender_count") == 11188);
  CHECK(run({"mixing-scan", "--eval-stage", "5", "--h", "500"}).code == cli::Precondition);
}

TEST_CASE("ledrappier") {
  const auto o = run({"ledrappier", "--n", "16", "--cyl", "(0,0)=0", "--shifts", "(4,0);(-4,0);(0,4);(0,-4)"});
  REQUIRE(o.code == 0);
  const auto j = Json::parse(o.out);
  CHECK(j.at("measure") == "1/16");
  CHECK(j.at("product") == "1/32");
  CHECK(j.at("dependencies").size() == 1);
  CHECK(j.at("dependencies")[0].size() == 5);

  const auto sq = run({"ledrappier", "--n", "8", "--square", "--cyl", "(0,0)=1"});
  CHECK(Json::parse(sq.out).at("measure") == "0/1");
  CHECK(run({"ledrappier", "--n", "2"}).code == cli::Config);
  CHECK(run({"ledrappier", "--cyl", "(0,0)=7"}).code == cli::Config);
}

TEST_CASE("cascade is deterministic for a seed") {
  const auto cocycle = temp_file("cocycle.csv", "stage,3\n0,1\n1,1\n2,-1\n3,-1\n");
  const std::vector<std::string> args = {"--seed", "7", "cascade", "--base", "odometer:2", "--cocycle", cocycle,
                                         "--samples", "32", "--length", "4096", "--min-returns", "10"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(Json::parse(a.out).at("fraction") == "1/1");
  CHECK(Json::parse(a.out).at("per_point").size() == 32);
  auto other = args;
  other[1] = "8";
  CHECK(run(other).out != a.out);

  const auto unbalanced = temp_file("unbalanced.csv", "stage,2\n0,1\n1,0\n");
  const auto z = run({"cascade", "--cocycle", unbalanced});
  CHECK(z.code == cli::Precondition);
  CHECK(error_of(z) == "ZeroMeanViolation");

  // Every orbit of length 200 leaves the 121-point stage-5 tower.
  const auto stage2 = temp_file("stage2.csv", "stage,2\n0,1\n1,-1\n2,1\n3,-1\n");
  const auto tower = run({"cascade", "--base", "tower:chacon@5", "--cocycle", stage2, "--samples", "16", "--length",
                          "200", "--min-returns", "2"});
  CHECK(tower.code == cli::Precondition);
  CHECK(error_of(tower) == "UndefinedOrbit");
  CHECK(run({"cascade", "--base", "rotation:1/3", "--cocycle", cocycle}).code == cli::Config);
}

TEST_CASE("markov") {
  const auto matrix = temp_file("matrix.csv", "1/2,1/2,0\n0,1/2,1/2\n1/2,0,1/2\n");
  const auto o = run({"markov", "--matrix", matrix, "--f", "1,0,-1"});
  REQUIRE(o.code == 0);
  const auto j = Json::parse(o.out);
  CHECK(j.at("ergodic") == true);
  CHECK(j.at("mixing") == true);
  CHECK(j.at("residual") == "0/1");
  CHECK(j.at("joining")[1][0] == "1/6");

  const auto bad = temp_file("bad_matrix.csv", "1/2,1/2\n1/3,2/3\n");
  const auto e = run({"markov", "--matrix", bad});
  CHECK(e.code == cli::Precondition);
  CHECK(error_of(e) == "NotDoublyStochastic");
}

TEST_CASE("asym5-asymmetry") {
  const auto o = run({"asym5-asymmetry", "--stages", "6..6"});
  REQUIRE(o.code == 0);
  const auto rows = Json::parse(o.out).at("rows");
  CHECK(rows.size() == 5);
  CHECK(rows[0].at("n") == 7812);
  const auto budget = run({"asym5-asymmetry", "--stages", "6..10"});
  CHECK(budget.code == cli::Budget);
  CHECK(error_of(budget) == "BudgetExceeded");
}

TEST_CASE("props and output files") {
  const auto p = run({"props", "--seed", "1"});
  CHECK(p.code == 0);
  CHECK(Json::parse(p.out).at("passed") == true);

  const auto path = (std::filesystem::temp_directory_path() / "ergolab_test_out.csv").string();
  const auto o = run({"--output", path, "--format", "csv", "construct", "--depth", "2"});
  CHECK(o.code == 0);
  CHECK(o.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == "stage,height,level_width,tower_mass\n1,1,2/3,2/3\n2,4,2/9,8/9\n");
}

TEST_CASE("configuration errors") {
  const auto unknown = run({"construct", "--preset", "nope"});
  CHECK(unknown.code == cli::Config);
  CHECK(error_of(unknown) == "UnknownPreset");
  CHECK(run({"construct", "--bogus"}).code == cli::Config);
  CHECK(run({"frobnicate"}).code == cli::Config);
  CHECK(run({}).code == cli::Config);
  CHECK(run({"--format", "xml", "construct"}).code == cli::Config);
  const auto budget = run({"construct", "--depth", "30"});
  CHECK(budget.code == cli::Budget);
  CHECK(error_of(budget) == "BudgetExceeded");
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("mixing-scan") != std::string::npos);
}
