#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "sonn/errors.hpp"
#include "sonn/evaluation.hpp"
#include "test_support.hpp"

using namespace sonn;

namespace {

ModelFile sign_model() {
  // A linear machine that predicts class 1 when f2 > 0.
  ModelFile m;
  m.method = Method::Lm;
  m.norm = NormParams::identity(2);
  m.feature_names = {"f1", "f2"};
  m.class_names = {"neg", "pos"};
  LinearMachine lm = LinearMachine::zeros(2, 2);
  lm.class_weights[1](2) = 1.0;
  lm.class_weights[0](2) = -1.0;
  m.payload = lm;
  return m;
}

}  // namespace

TEST(Report, ConfusionAndError) {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2, 2}, pred{0, 1, 1, 1, 2, 0, 2};
  const EvalReport r = make_report(truth, pred, {"a", "b", "c"});
  EXPECT_DOUBLE_EQ(r.error, 2.0 / 7.0);
  EXPECT_EQ(r.confusion[0], (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_EQ(r.confusion[2], (std::vector<std::size_t>{1, 0, 2}));
  std::size_t off = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(std::accumulate(r.confusion[i].begin(), r.confusion[i].end(), std::size_t{0}),
              static_cast<std::size_t>(std::count(truth.begin(), truth.end(), static_cast<int>(i))));
    for (std::size_t j = 0; j < 3; ++j) off += i == j ? 0 : r.confusion[i][j];
  }
  EXPECT_DOUBLE_EQ(r.error, static_cast<double>(off) / 7.0);
}

TEST(Report, GroupsInFirstAppearanceOrder) {
  const std::vector<int> truth{0, 0, 1, 1, 1}, pred{0, 1, 1, 1, 0};
  const std::vector<std::string> groups{"r2", "r2", "r1", "r1", "r1"};
  const EvalReport r = make_report(truth, pred, {"a", "b"}, &groups);
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_EQ(r.groups[0].group, "r2");
  EXPECT_EQ(r.groups[0].count, 2u);
  EXPECT_DOUBLE_EQ(r.groups[1].summary.distribution[1], 2.0 / 3.0);
  EXPECT_EQ(r.groups[1].summary.top_class, 1);
  const std::string text = format_report(r);
  EXPECT_NE(text.find("r1"), std::string::npos);
  std::ostringstream csv;
  write_report_csv(r, csv);
  EXPECT_NE(csv.str().find("r2"), std::string::npos);
}

TEST(DatasetForModel, ReordersAndIgnoresExtraColumns) {
  const CsvTable t = parse_csv("extra,f2,y,f1\n9,0.5,pos,1\n9,-0.5,neg,2\n");
  const Dataset d = dataset_for_model(sign_model(), t);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"f1", "f2"}));
  EXPECT_EQ(d.features(0, 0), 1.0);
  EXPECT_EQ(d.features(0, 1), 0.5);
  EXPECT_EQ(d.labels, (std::vector<int>{1, 0}));
  const EvalReport r = evaluate(sign_model(), d);
  EXPECT_EQ(r.error, 0.0);
}

TEST(DatasetForModel, MissingColumnIsNamed) {
  try {
    dataset_for_model(sign_model(), parse_csv("f1,y\n1,pos\n2,neg\n"));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("f2"), std::string::npos);
  }
}

TEST(DatasetForModel, UnknownLabelIsAnError) {
  EXPECT_THROW(dataset_for_model(sign_model(), parse_csv("f1,f2,y\n1,1,pos\n2,1,maybe\n")), DataError);
}

TEST(GroupColumn, Values) {
  const CsvTable t = parse_csv("rec,f1,f2,y\nA,1,1,pos\nB,1,-1,neg\n");
  EXPECT_EQ(group_column(t, "rec"), (std::vector<std::string>{"A", "B"}));
  EXPECT_THROW(group_column(t, "nope"), DataError);
}
