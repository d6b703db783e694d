#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "clonevet/classifier/curation.hpp"
#include "clonevet/classifier/model.hpp"
#include "fixtures.hpp"
#include "generator.hpp"

using namespace clonevet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded; returns its exit code and stdout.
CliRun cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CLONEVET_CLI_PATH + "\" " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class DeskCli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = testkit::temp_dir("cli");
    ds = testkit::make_desk_study(dir);
    kb = dir / "kb.sqlite";
    ASSERT_EQ(cli("import-seed --kb " + q(kb) + " --csv " + q(ds.seed_csv)).code, 0);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string study_args() const {
    return "study --corpus " + q(ds.corpus) + " --csv " + q(ds.detector_csv) + " --kb " + q(kb);
  }

  fs::path dir;
  testkit::DeskStudy ds;
  fs::path kb;
};

}  // namespace

TEST(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("resolve --corpus /nonexistent").code, 1);  // --csv missing
  EXPECT_EQ(cli("sample-size --confidence 1.5").code, 1);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, SampleSize) {
  CliRun r = cli("sample-size");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "385\n");
  EXPECT_EQ(cli("sample-size --confidence 0.95 --margin 0.05 --population 100").out, "80\n");
  EXPECT_EQ(cli("sample-size --confidence 0.99 --margin 0.03").out, "1844\n");
}

TEST(Cli, StorageFailureExitsWithTwo) {
  const fs::path dir = testkit::temp_dir("cli-storage");
  const fs::path junk = dir / "kb.sqlite";
  std::ofstream(junk) << "this is not a database, only some text long enough to look like a header.....";
  EXPECT_EQ(cli("export-labels --kb " + q(junk)).code, 2);
  EXPECT_EQ(cli("export-labels --kb " + q(dir / "missing" / "deeper" / "kb.sqlite")).code, 2);
  fs::remove_all(dir);
}

TEST_F(DeskCli, IngestWritesIndex) {
  const CliRun r = cli("ingest --corpus " + q(ds.corpus));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("indexed 5 files, 30 methods"), std::string::npos) << r.out;
  const json idx = json::parse(slurp(ds.corpus / ".clonevet" / "index.json"));
  EXPECT_EQ(idx["method_count"], 30);
  // A study run from the index gives the same numbers as one from scratch.
  const CliRun a = cli(study_args() + " --labels " + q(ds.labels_csv) + " --format json");
  fs::remove_all(ds.corpus / ".clonevet");
  const CliRun b = cli(study_args() + " --labels " + q(ds.labels_csv) + " --format json");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(DeskCli, StudyReportsExactPrecision) {
  const CliRun r = cli(study_args() + " --labels " + q(ds.labels_csv) + " --format json");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["sample_size"], ds.sample);
  EXPECT_EQ(j["auto_counts"]["T1"], ds.auto_t1);
  EXPECT_EQ(j["auto_counts"]["T2"], ds.auto_t2);
  EXPECT_EQ(j["auto_counts"]["known"], ds.known);
  EXPECT_EQ(j["manual_count"], ds.manual);
  EXPECT_EQ(j["tp"], ds.tp);
  EXPECT_EQ(j["fp"], ds.fp);
  EXPECT_EQ(j["precision"]["exact"], "4/5");
  EXPECT_EQ(j["effort_reduction"]["exact"], "2/5");
  EXPECT_EQ(j["sampling"]["cochran_minimum"], 20);
  EXPECT_EQ(j["sampling"]["drawn"], 20);

  const CliRun table = cli(study_args() + " --labels " + q(ds.labels_csv) + " --format table");
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("80.00%"), std::string::npos) << table.out;
}

TEST_F(DeskCli, StudyWithoutSeedLabelsNeedsMoreVerdicts) {
  // An empty knowledge base leaves the two seeded pairs to the judges.
  const CliRun r = cli("study --corpus " + q(ds.corpus) + " --csv " + q(ds.detector_csv) + " --labels " +
                    q(ds.labels_csv) + " --format json");
  EXPECT_EQ(r.code, 1);
}

TEST_F(DeskCli, MissingVerdictIsAUserError) {
  EXPECT_EQ(cli(study_args() + " --labels " + q(ds.partial_labels_csv)).code, 1);
  EXPECT_EQ(cli(study_args()).code, 1);
  EXPECT_EQ(cli(study_args() + " --labels " + q(dir / "nope.csv")).code, 1);
}

TEST_F(DeskCli, ResolveListsEveryPair) {
  const CliRun r = cli("resolve --corpus " + q(ds.corpus) + " --csv " + q(ds.detector_csv) + " --kb " + q(kb));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::map<std::string, int> status;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    for (const char* s : {"AutoType1", "AutoType2", "KnownTrue", "KnownFalse", "Manual"}) {
      if (line.find(s) != std::string::npos) ++status[s];
    }
  }
  EXPECT_EQ(rows, 20);
  EXPECT_EQ(status["AutoType1"], ds.auto_t1);
  EXPECT_EQ(status["AutoType2"], ds.auto_t2);
  EXPECT_EQ(status["KnownTrue"], 1);
  EXPECT_EQ(status["KnownFalse"], 1);
  EXPECT_EQ(status["Manual"], ds.manual);
}

TEST_F(DeskCli, SeedExportRoundTrip) {
  const CliRun r = cli("export-labels --kb " + q(kb));
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  EXPECT_EQ(rows, 3);  // header and two seed rows

  const fs::path copy = dir / "kb2.sqlite";
  const fs::path exported = dir / "export.csv";
  ASSERT_EQ(cli("export-labels --kb " + q(kb) + " --output " + q(exported)).code, 0);
  ASSERT_EQ(cli("import-seed --kb " + q(copy) + " --csv " + q(exported)).code, 0);
  EXPECT_EQ(cli("export-labels --kb " + q(copy)).out, r.out);
}

TEST(Cli, CurateAndTrain) {
  const fs::path dir = testkit::temp_dir("cli-train");
  const testkit::FamilyFixture fx = testkit::make_family_fixture(11, 24);
  for (const auto& f : fx.files) {
    fs::create_directories(dir / "corpus" / f.folder_name);
    std::ofstream(dir / "corpus" / f.folder_name / f.file_name, std::ios::binary) << f.content;
  }
  auto write_pairs = [&](const fs::path& p, const std::vector<PairKey>& keys) {
    std::ofstream out(p, std::ios::binary);
    for (const auto& k : keys) out << testkit::key_columns(k) << "\n";
  };
  write_pairs(dir / "t1.csv", fx.tools[0]);
  write_pairs(dir / "t2.csv", fx.tools[1]);
  write_pairs(dir / "u1.csv", fx.unions[0]);

  const std::string curate = "curate --corpus " + q(dir / "corpus") + " --tool " + q(dir / "t1.csv") +
                             " --tool " + q(dir / "t2.csv") + " --union " + q(dir / "u1.csv") +
                             " --min-tokens 10 --theta 0.5 --seed 4 --output ";
  const CliRun c = cli(curate + q(dir / "train.csv"));
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("Intersection of all tools"), std::string::npos);
  ASSERT_EQ(cli(curate + q(dir / "train2.csv")).code, 0);
  EXPECT_EQ(slurp(dir / "train.csv"), slurp(dir / "train2.csv"));

  const classifier::TrainingSet set = classifier::load_training_set(dir / "train.csv");
  EXPECT_GT(set.rows.size(), 0u);
  EXPECT_EQ(set.count(true), set.count(false));

  const CliRun t = cli("train --training-set " + q(dir / "train.csv") + " --output " + q(dir / "m.json") +
                    " --epochs 120 --seed 9");
  ASSERT_EQ(t.code, 0);
  const CliRun t2 = cli("train --training-set " + q(dir / "train.csv") + " --output " + q(dir / "m2.json") +
                     " --epochs 120 --seed 9");
  ASSERT_EQ(t2.code, 0);
  const auto m1 = classifier::ClassifierModel::load(dir / "m.json");
  const auto m2 = classifier::ClassifierModel::load(dir / "m2.json");
  EXPECT_EQ(m1.digest(), m2.digest());
  EXPECT_NE(t.out.find(m1.digest()), std::string::npos);

  // One tool alone cannot be intersected.
  EXPECT_EQ(cli("curate --corpus " + q(dir / "corpus") + " --tool " + q(dir / "t1.csv") + " --output " +
                q(dir / "x.csv")).code,
            1);
  EXPECT_EQ(cli("train --training-set " + q(dir / "nope.csv") + " --output " + q(dir / "m3.json")).code, 1);
  fs::remove_all(dir);
}
