#include "soliton/commands.hpp"
#include "soliton/profile_io.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace soliton;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Workdir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("soliton_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const json& j) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  fs::path dir_;
};

json cigar_config() {
  return {{"n", 2},          {"epsilon", {1, 1}},  {"tau", 1.0},
          {"alpha", {0, 0}}, {"beta", {0, 0}},     {"lambda", 0.0},
          {"mode", "theorem3"},
          {"initial", {{"c1", -1.0}, {"c2", 0.0}, {"h0", 1.0}}},
          {"xi_span", {0.0, 10.0}},
          {"sample", {{"box", {{-2, 2}, {-2, 2}}}}}};
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SOLITON_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

using Cli = Workdir;

TEST_F(Cli, SolveCigarWritesClosedForm) {
  const fs::path cfg = write("cigar.json", cigar_config());
  std::ostringstream out, err;
  ASSERT_EQ(cmd_solve(cfg, out, err), kExitOk) << err.str();
  const ProfileTable t = read_profile_csv(dir_ / "profile.csv");
  EXPECT_EQ(t.n, 2u);
  EXPECT_EQ(t.mode, "theorem3");
  ASSERT_GT(t.nodes.size(), 2u);
  for (const auto& s : t.nodes) {
    EXPECT_NEAR(s.phi, std::sqrt(1.0 + s.xi), 1e-10);
    EXPECT_NEAR(s.f, -std::log(1.0 + s.xi), 1e-9);
  }

  json summary;
  std::ifstream(dir_ / "summary.json") >> summary;
  EXPECT_EQ(summary["termination"]["status"], "completed");
  EXPECT_EQ(summary["soliton_type"], "steady");
  EXPECT_EQ(summary["invariance"]["kind"], "pseudo_rotational");
  EXPECT_EQ(summary["config"]["mode"], "theorem3");
  EXPECT_EQ(summary["config"]["initial"]["c1"], -1.0);
  EXPECT_TRUE(summary["config"].contains("tolerances"));

  std::ostringstream vout, verr;
  EXPECT_EQ(cmd_verify(cfg, dir_ / "profile.csv", {}, vout, verr), kExitOk) << verr.str();
  EXPECT_TRUE(fs::exists(dir_ / "report.json"));
}

TEST_F(Cli, GaussianGalleryHasConstantPhi) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_gallery_emit("gaussian", dir_, out, err), kExitOk) << err.str();
  const ProfileTable t = read_profile_csv(dir_ / "profile.csv");
  for (const auto& s : t.nodes) {
    EXPECT_EQ(s.phi, t.nodes.front().phi);
    EXPECT_EQ(s.dphi, 0.0);
  }
  std::ostringstream vout;
  EXPECT_EQ(cmd_verify(dir_ / "config.json", dir_ / "profile.csv", {}, vout, err), kExitOk);
}

TEST_F(Cli, NullTranslationIsAnError) {
  json j = cigar_config();
  j["tau"] = 0.0;
  j["epsilon"] = {1, -1};
  j["alpha"] = {1, 1};
  j["mode"] = "theorem2";
  j["initial"] = {{"phi0", 1.0}, {"dphi0", 0.0}, {"df0", 0.0}};
  const fs::path cfg = write("null.json", j);
  std::ostringstream out, err;
  EXPECT_EQ(cmd_solve(cfg, out, err), kExitError);
  EXPECT_NE(err.str().find("NullTranslationDirection"), std::string::npos) << err.str();
}

TEST_F(Cli, CorruptedProfileFailsVerification) {
  const fs::path cfg = write("cigar.json", cigar_config());
  std::ostringstream out, err;
  ASSERT_EQ(cmd_solve(cfg, out, err), kExitOk);
  ProfileTable t = read_profile_csv(dir_ / "profile.csv");
  for (auto& s : t.nodes) s.dphi *= 1.01;
  write_profile_csv(dir_ / "bad.csv", t);
  EXPECT_EQ(cmd_verify(cfg, dir_ / "bad.csv", {}, out, err), kExitVerifyFail);
  json report;
  std::ifstream(dir_ / "report.json") >> report;
  EXPECT_EQ(report["verdict"], "fail");
  EXPECT_GT(report["max_diag"].get<double>(), 1e-3);
}

TEST_F(Cli, MismatchedDimensionIsMalformed) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_gallery_emit("gaussian", dir_, out, err), kExitOk);
  const fs::path cfg = write("cigar.json", cigar_config());
  std::ostringstream verr;
  EXPECT_EQ(cmd_verify(cfg, dir_ / "profile.csv", {}, out, verr), kExitError);
  EXPECT_NE(verr.str().find("ProfileMalformed"), std::string::npos) << verr.str();
}

TEST_F(Cli, GalleryListAndEmit) {
  std::ostringstream list;
  EXPECT_EQ(cmd_gallery_list(list), kExitOk);
  for (const char* name : {"gaussian", "cigar", "space_form", "n2_polynomial"})
    EXPECT_NE(list.str().find(name), std::string::npos) << name;

  std::ostringstream out, err;
  ASSERT_EQ(cmd_gallery_emit("space_form", dir_, out, err), kExitOk);
  json summary;
  std::ifstream(dir_ / "summary.json") >> summary;
  EXPECT_DOUBLE_EQ(summary["lambda"].get<double>(), 8.0);
  EXPECT_EQ(summary["soliton_type"], "shrinking");

  // emitted config re-solves to the same profile
  const ProfileTable emitted = read_profile_csv(dir_ / "profile.csv");
  const fs::path sub = dir_ / "resolve";
  fs::create_directories(sub);
  json cfg;
  std::ifstream(dir_ / "config.json") >> cfg;
  cfg.erase("output");
  std::ofstream(sub / "config.json") << cfg.dump();
  ASSERT_EQ(cmd_solve(sub / "config.json", out, err), kExitOk) << err.str();
  const ProfileTable again = read_profile_csv(sub / "profile.csv");
  ASSERT_EQ(again.nodes.size(), emitted.nodes.size());
  for (std::size_t i = 0; i < again.nodes.size(); ++i) EXPECT_EQ(again.nodes[i].phi, emitted.nodes[i].phi);

  EXPECT_EQ(cmd_gallery_emit("torus", dir_, out, err), kExitError);
}

TEST(Config, CollectsFieldErrors) {
  json j = cigar_config();
  j["tau"] = "one";
  j["epsilon"] = {1, 2};
  j["bogus"] = 1;
  j.erase("xi_span");
  try {
    (void)parse_config(j, ".");
    FAIL();
  } catch (const SolitonError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    const std::string msg = e.what();
    for (const char* field : {"'tau'", "'epsilon'", "'bogus'", "'xi_span'"})
      EXPECT_NE(msg.find(field), std::string::npos) << field << " in " << msg;
  }
}

TEST(Config, RejectsOneDimensionAndBadGallery) {
  json j = cigar_config();
  j["n"] = 1;
  j["epsilon"] = {1};
  j["alpha"] = {0};
  j["beta"] = {0};
  EXPECT_THROW((void)parse_config(j, "."), SolitonError);

  json g = cigar_config();
  g["mode"] = "gallery:torus";
  g.erase("initial");
  EXPECT_THROW((void)parse_config(g, "."), SolitonError);
}

TEST(ProfileCsv, RoundTripIsExact) {
  ProfileTable t{3, "theorem2", {}};
  for (int i = 0; i < 20; ++i) {
    const double xi = 0.1 * i + 1.0 / 3.0;
    t.nodes.push_back(ReducedState{xi, std::exp(-xi), -std::exp(-xi) / 7.0, std::sin(xi), 1e-300 * i});
  }
  std::stringstream s;
  write_profile_csv(s, t);
  const ProfileTable back = read_profile_csv(s);
  EXPECT_EQ(back.n, 3u);
  EXPECT_EQ(back.mode, "theorem2");
  ASSERT_EQ(back.nodes.size(), t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    EXPECT_EQ(back.nodes[i].xi, t.nodes[i].xi);
    EXPECT_EQ(back.nodes[i].phi, t.nodes[i].phi);
    EXPECT_EQ(back.nodes[i].dphi, t.nodes[i].dphi);
    EXPECT_EQ(back.nodes[i].f, t.nodes[i].f);
    EXPECT_EQ(back.nodes[i].df, t.nodes[i].df);
  }
}

TEST(ProfileCsv, MalformedInputs) {
  // the metadata line is optional; without it n is unknown (0)
  std::stringstream plain("xi,phi,dphi,f,df\n0,1,0,0,0\n1,1,0,0,0\n");
  EXPECT_EQ(read_profile_csv(plain).n, 0u);

  for (const char* text : {"# soliton-profile n=2 mode=theorem3\n0,1,0,0,0\n1,1,0,0,0\n",
                           "# soliton-profile n=2 mode=theorem3\nxi,phi,dphi,f,df\n0,1,0,0\n1,1,0,0,0\n",
                           "# soliton-profile n=2 mode=theorem3\nxi,phi,dphi,f,df\n0,1,0,0,nan\n1,1,0,0,0\n",
                           "# soliton-profile n=2 mode=theorem3\nxi,phi,dphi,f,df\n0,1,0,0,0\n"}) {
    std::stringstream s(text);
    try {
      (void)read_profile_csv(s);
      FAIL() << text;
    } catch (const SolitonError& e) {
      EXPECT_EQ(e.code(), ErrorCode::ProfileMalformed);
    }
  }
}

TEST_F(Cli, BinaryExitCodes) {
  const fs::path cfg = write("cigar.json", cigar_config());
  EXPECT_EQ(run_binary("gallery list"), 0);
  EXPECT_EQ(run_binary("solve " + cfg.string()), 0);
  EXPECT_EQ(run_binary("verify " + cfg.string() + " " + (dir_ / "profile.csv").string()), 0);
  EXPECT_EQ(run_binary("--seed 5 --points 50 verify " + cfg.string() + " " + (dir_ / "profile.csv").string()), 0);
  EXPECT_EQ(run_binary("verify " + cfg.string() + " " + (dir_ / "missing.csv").string()), 2);
  EXPECT_EQ(run_binary("frobnicate"), 2);

  ProfileTable t = read_profile_csv(dir_ / "profile.csv");
  for (auto& s : t.nodes) s.dphi *= 1.01;
  write_profile_csv(dir_ / "bad.csv", t);
  EXPECT_EQ(run_binary("verify " + cfg.string() + " " + (dir_ / "bad.csv").string()), 1);
}
