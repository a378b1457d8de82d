#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "cli.hpp"
#include "sonn/model_io.hpp"
#include "test_support.hpp"

using namespace sonn;
using sonn::testing::slurp;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult sonn_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& path) { return path.string(); }

std::string error_line(const std::string& text) {
  std::smatch m;
  static const std::regex re("(^|\n)error: ([0-9.]+)");
  return std::regex_search(text, m, re) ? m[2].str() : "";
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { dir = sonn::testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name()); }
  std::filesystem::path dir;
};

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
  ASSERT_EQ(sonn_run({"generate", "xor", "--n", "1000", "--seed", "7", "--out", p(dir / "a.csv")}).code, 0);
  ASSERT_EQ(sonn_run({"generate", "xor", "--n", "1000", "--seed", "7", "--out", p(dir / "b.csv")}).code, 0);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  const Dataset d = load_csv(dir / "a.csv", "y");
  EXPECT_EQ(d.rows(), 1000u);
  EXPECT_EQ(d.cols(), 2u);
  const CliResult blobs = sonn_run({"generate", "blobs", "--n", "30", "--classes", "3"});
  EXPECT_EQ(blobs.code, 0);
  EXPECT_EQ(blobs.out.rfind("x1,x2,y\n", 0), 0u);
}

TEST_F(Cli, UsageErrors) {
  const CliResult r = sonn_run({"generate", "spiral"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(sonn_run({}).code, cli::kUsage);
  EXPECT_EQ(sonn_run({"train", "--method", "svm", "--data", "x.csv"}).code, cli::kUsage);
  EXPECT_EQ(sonn_run({"--help"}).code, cli::kOk);
}

TEST_F(Cli, MissingFileIsADataError) {
  EXPECT_EQ(sonn_run({"train", "--method", "lm", "--data", p(dir / "none.csv")}).code, cli::kData);
  EXPECT_EQ(sonn_run({"evaluate", "--model", p(dir / "none.json"), "--data", p(dir / "none.csv")}).code, cli::kData);
}

TEST_F(Cli, TrainGmdhOnXorAndEvaluate) {
  sonn_run({"generate", "xor", "--n", "1000", "--seed", "7", "--out", p(dir / "xor.csv")});
  const CliResult t = sonn_run({"train", "--method", "gmdh-layered", "--kind", "bilinear", "--data", p(dir / "xor.csv"),
                          "--seed", "7", "--model", p(dir / "m.json")});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("y_1^(1)"), std::string::npos);
  const std::string trained = error_line(t.out);
  ASSERT_FALSE(trained.empty());
  EXPECT_LT(std::stod(trained), 0.05);

  const CliResult e = sonn_run({"evaluate", "--model", p(dir / "m.json"), "--data", p(dir / "xor.csv"), "--out",
                          p(dir / "report.csv")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(error_line(e.out), trained);
  EXPECT_FALSE(slurp(dir / "report.csv").empty());

  const CliResult x = sonn_run({"export", "--model", p(dir / "m.json")});
  ASSERT_EQ(x.code, 0);
  EXPECT_EQ(x.out, to_polynomial_text(std::get<PolyNetwork>(load_model(dir / "m.json").payload)));
  const CliResult dot = sonn_run({"export", "--model", p(dir / "m.json"), "--format", "dot", "--out", p(dir / "m.dot")});
  EXPECT_EQ(dot.code, 0);
  EXPECT_EQ(slurp(dir / "m.dot").rfind("digraph", 0), 0u);
}

TEST_F(Cli, PairwiseOnBlobs) {
  sonn_run({"generate", "blobs", "--n", "300", "--classes", "3", "--seed", "2", "--out", p(dir / "b.csv")});
  const CliResult t = sonn_run({"train", "--method", "pairwise-dt", "--classes", "3", "--data", p(dir / "b.csv"),
                          "--model", p(dir / "pw.json"), "--report", p(dir / "pairs.csv")});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("TLUs: 3"), std::string::npos);
  EXPECT_NE(t.out.find("0/1"), std::string::npos);
  EXPECT_NE(t.out.find("1/2"), std::string::npos);
  const std::string pairs = slurp(dir / "pairs.csv");
  EXPECT_EQ(std::count(pairs.begin(), pairs.end(), '\n'), 4);
  EXPECT_EQ(sonn_run({"train", "--method", "pairwise-dt", "--classes", "4", "--data", p(dir / "b.csv")}).code,
            cli::kData);
  EXPECT_EQ(sonn_run({"extract-rules", "--model", p(dir / "pw.json"), "--data", p(dir / "b.csv")}).code,
            cli::kUsage);
}

TEST_F(Cli, GroupedEvaluationAndColumnMismatch) {
  sonn::testing::spit(dir / "g.csv", "rec,f1,f2,y\nA,0.1,1,1\nA,0.2,2,1\nA,0.3,-1,0\nB,0.4,-2,0\nB,0.5,-3,0\n"
                                     "B,0.6,3,1\nC,0.7,-0.5,0\nC,0.8,0.5,1\nC,0.9,1.5,1\n");
  ASSERT_EQ(sonn_run({"train", "--method", "lm", "--data", p(dir / "g.csv"), "--group-by", "rec", "--split",
                      "0.5:0.5", "--model", p(dir / "lm.json")})
                .code,
            0);
  const CliResult e = sonn_run({"evaluate", "--model", p(dir / "lm.json"), "--data", p(dir / "g.csv"), "--group-by", "rec"});
  ASSERT_EQ(e.code, 0) << e.err;
  for (const char* g : {"A", "B", "C"}) EXPECT_NE(e.out.find(std::string("\n  ") + g + " (3 rows)"), std::string::npos) << e.out;

  sonn::testing::spit(dir / "bad.csv", "f1,f3,y\n1,2,1\n2,3,0\n");
  const CliResult bad = sonn_run({"evaluate", "--model", p(dir / "lm.json"), "--data", p(dir / "bad.csv")});
  EXPECT_EQ(bad.code, cli::kData);
  EXPECT_NE(bad.err.find("f2"), std::string::npos);
}

TEST_F(Cli, ExtractRulesOnSeparableData) {
  std::ostringstream csv;
  csv << "a,b,y\n";
  Rng rng(4);
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    csv << format_double(rng.uniform(-1, 1)) << ',' << format_double(label ? rng.uniform(1.2, 3) : rng.uniform(-2, 0.9))
        << ',' << label << '\n';
  }
  sonn::testing::spit(dir / "s.csv", csv.str());
  ASSERT_EQ(sonn_run({"train", "--method", "ecnn", "--data", p(dir / "s.csv"), "--model", p(dir / "e.json")}).code, 0);
  const CliResult r = sonn_run({"extract-rules", "--model", p(dir / "e.json"), "--data", p(dir / "s.csv"), "--out",
                          p(dir / "rules.json"), "--test", p(dir / "s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("if b > "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("test errors:"), std::string::npos);
  const ModelFile rules = load_model(dir / "rules.json");
  EXPECT_EQ(rules.method, Method::RuleTree);
  const auto& tree = std::get<RuleTree>(rules.payload);
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_GT(tree.nodes[0].threshold, 0.9);
  EXPECT_LT(tree.nodes[0].threshold, 1.2);
}

TEST_F(Cli, ExtractRulesNeedsBothClassesRight) {
  ModelFile m;
  m.method = Method::Lm;
  m.norm = NormParams::identity(1);
  m.feature_names = {"a"};
  m.class_names = {"0", "1"};
  LinearMachine lm = LinearMachine::zeros(2, 1);
  lm.class_weights[0](0) = 1.0;
  m.payload = lm;
  save_model(m, dir / "always0.json");
  sonn::testing::spit(dir / "d.csv", "a,y\n1,0\n2,1\n3,0\n");
  const CliResult r = sonn_run({"extract-rules", "--model", p(dir / "always0.json"), "--data", p(dir / "d.csv")});
  EXPECT_EQ(r.code, cli::kTraining);
  EXPECT_NE(r.err.find("class '1'"), std::string::npos) << r.err;
}

TEST_F(Cli, FnnHasNoDotExport) {
  sonn_run({"generate", "xor", "--n", "200", "--out", p(dir / "x.csv")});
  ASSERT_EQ(sonn_run({"train", "--method", "fnn", "--data", p(dir / "x.csv"), "--epochs", "50", "--restarts", "1",
                      "--model", p(dir / "f.json")})
                .code,
            0);
  EXPECT_EQ(sonn_run({"export", "--model", p(dir / "f.json"), "--format", "dot"}).code, cli::kUsage);
  EXPECT_EQ(sonn_run({"export", "--model", p(dir / "f.json")}).code, 0);
}
