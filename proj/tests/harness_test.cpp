#include <fstream>

#include <gtest/gtest.h>

#include "atp/error.hpp"
#include "atp/harness.hpp"
#include "atp/image_io.hpp"
#include "atp/synth.hpp"
#include "test_util.hpp"

namespace atp {
namespace {

namespace fs = std::filesystem;

class HarnessTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    SynthSpec s;
    s.count_per_class = 6;
    s.rows = s.cols = 32;
    s.seed = 3;
    write_dataset(generate(s), dir_->path() / "data");
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static nlohmann::json base_json() {
    return {{"schema_version", 1},
            {"dataset_root", "data"},
            {"train_per_class", 3},
            {"working_size", 32},
            {"diffusion", {{"sigma", 40}, {"iterations", 3}, {"step", 0.25}}},
            {"atp", {{"beta", 2.2}, {"K", 3}}},
            {"monte_carlo_runs", 2},
            {"seed", 11}};
  }
  static ExperimentConfig config(const nlohmann::json& j) { return ExperimentConfig::from_json(j, dir_->path()); }

  static testing::TempDir* dir_;
};

testing::TempDir* HarnessTest::dir_ = nullptr;

TEST_F(HarnessTest, IngestOrderAndLabels) {
  const auto a = ingest(dir_->path() / "data", 32);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(a[i].label, -1);
  for (std::size_t i = 6; i < 12; ++i) EXPECT_EQ(a[i].label, 1);
  EXPECT_EQ(a[0].path.filename(), "real_0000.pgm");
  EXPECT_EQ(a[6].path.filename(), "fake_0000.pgm");
  const auto b = ingest(dir_->path() / "data", 32);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].image, b[i].image);
    EXPECT_EQ(a[i].path, b[i].path);
  }
  EXPECT_EQ(ingest(dir_->path() / "data", 24)[0].image.rows(), 24u);
}

TEST(Ingest, LayoutContractAndErrors) {
  testing::TempDir dir;
  fs::create_directories(dir / "ok/real");
  fs::create_directories(dir / "ok/fake");
  save_pgm(GrayImage(20, 20, 10.0), dir / "ok/real/a.pgm");
  save_pgm(GrayImage(20, 20, 200.0), dir / "ok/fake/b.pgm");
  testing::write_bytes(dir / "ok/fake/readme.txt", "ignored");
  const auto s = ingest(dir / "ok", 20);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].label, -1);
  EXPECT_EQ(s[1].label, 1);
  EXPECT_EQ(s[0].path.filename(), "a.pgm");

  fs::create_directories(dir / "nofake/real");
  try {
    ingest(dir / "nofake", 20);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingClassDirectory);
  }

  fs::create_directories(dir / "empty/real");
  fs::create_directories(dir / "empty/fake");
  try {
    ingest(dir / "empty", 20);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoImagesFound);
  }

  testing::write_bytes(dir / "ok/real/broken.pgm", "P5\n9 9\n255\n");
  testing::write_bytes(dir / "ok/fake/broken2.png", "\x89PNG\r\n\x1a\nxx");
  try {
    ingest(dir / "ok", 20);
    ADD_FAILURE();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("broken.pgm"), std::string::npos);
    EXPECT_NE(msg.find("broken2.png"), std::string::npos);
  }
}

TEST_F(HarnessTest, ConfigParsingAndValidation) {
  nlohmann::json j = base_json();
  j["sweep"] = {{{"kind", "pixel_missing"}, {"rates", {0.4, 0.5}}},
                {{"kind", "block_missing"}, {"sizes", {{10, 12}}}, {"anchor", "centered"}},
                {{"kind", "awgn"}, {"snr_db", {-10}}}};
  const ExperimentConfig c = config(j);
  EXPECT_EQ(c.dataset_root, dir_->path() / "data");
  const auto conds = c.conditions();
  ASSERT_EQ(conds.size(), 4u);
  EXPECT_EQ(conds[1].param_label(), "0.5");
  EXPECT_EQ(conds[2].param_label(), "10x12");
  EXPECT_EQ(conds[3].kind, DistortionKind::Awgn);
  EXPECT_EQ(c.hash(), config(j).hash());
  EXPECT_EQ(ExperimentConfig::from_json(c.to_json()).hash(), c.hash());

  auto rejects = [&](nlohmann::json bad) {
    try {
      config(bad);
      ADD_FAILURE() << bad.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig) << bad.dump();
    }
  };
  nlohmann::json bad = base_json();
  bad["bogus"] = 1;
  rejects(bad);
  bad = base_json();
  bad["schema_version"] = 2;
  rejects(bad);
  bad = base_json();
  bad["sweep"] = {{{"kind", "awgn"}, {"snr_db", nlohmann::json::array()}}};
  rejects(bad);
  bad = base_json();
  bad["sweep"] = {{{"kind", "pixel_missing"}, {"rates", {1.2}}}};
  rejects(bad);
  bad = base_json();
  bad["diffusion"]["step"] = 0.5;
  rejects(bad);
  bad = base_json();
  bad["atp"]["thresholds"] = {{"source", "nowhere"}};
  rejects(bad);
}

TEST_F(HarnessTest, SplitIsSeededAndDisjoint) {
  const ExperimentConfig c = config(base_json());
  const DatasetSplit a = load_split(c), b = load_split(c);
  ASSERT_EQ(a.train.size(), 6u);
  ASSERT_EQ(a.test.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(a.train[i].path, b.train[i].path);
  for (const auto& t : a.test)
    for (const auto& r : a.train) EXPECT_NE(t.path, r.path);
  std::size_t real = 0;
  for (const auto& t : a.train) real += t.label < 0;
  EXPECT_EQ(real, 3u);
}

TEST_F(HarnessTest, EmptySweepGivesSingleCleanRow) {
  const EvalReport r = run_experiment(config(base_json()));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].kind, "clean");
  EXPECT_EQ(r.rows[0].param, "none");
  EXPECT_EQ(r.rows[0].cm.total(), 6u);
  const std::string csv = r.csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kind,param,run,accuracy,precision,recall,f1,tp,tn,fp,fn");
  EXPECT_TRUE(r.to_json().contains("timings"));
  EXPECT_EQ(r.to_json()["version"], kLibraryVersion);
}

TEST_F(HarnessTest, ZeroRateRepeatsCleanRowAndRowsRecompute) {
  nlohmann::json j = base_json();
  j["sweep"] = {{{"kind", "pixel_missing"}, {"rates", {0.0, 0.7}}}, {{"kind", "block_missing"}, {"sizes", {{8, 8}}}}};
  const EvalReport r = run_experiment(config(j));
  // clean + 2 runs at rate 0 + 2 runs at 0.7 + one block row
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.rows[1].cm, r.rows[0].cm);
  EXPECT_EQ(r.rows[2].cm, r.rows[0].cm);
  EXPECT_EQ(r.rows[5].kind, "block_missing");
  EXPECT_EQ(r.rows[5].run, 0u);
  for (const auto& row : r.rows) {
    const Scores s = scores(row.cm);
    EXPECT_EQ(s.accuracy, row.scores.accuracy);
    EXPECT_EQ(s.precision, row.scores.precision);
    EXPECT_EQ(s.recall, row.scores.recall);
    EXPECT_EQ(s.f1, row.scores.f1);
  }
  ASSERT_EQ(r.conditions.size(), 4u);
  EXPECT_EQ(r.conditions[2].runs, 2u);
  EXPECT_DOUBLE_EQ(r.conditions[2].accuracy, (r.rows[3].scores.accuracy + r.rows[4].scores.accuracy) / 2.0);
}

TEST_F(HarnessTest, ReportsAreByteReproducible) {
  nlohmann::json j = base_json();
  j["sweep"] = {{{"kind", "awgn"}, {"snr_db", {0}}}};
  j["output_dir"] = "out1";
  run_experiment(config(j));
  j["output_dir"] = "out2";
  run_experiment(config(j));
  const auto a = testing::read_bytes(dir_->path() / "out1/report.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, testing::read_bytes(dir_->path() / "out2/report.csv"));
  for (const char* f : {"report.json", "thresholds.json", "model.json"})
    EXPECT_TRUE(fs::exists(dir_->path() / "out1" / f)) << f;
}

TEST_F(HarnessTest, ThresholdSources) {
  nlohmann::json j = base_json();
  j["atp"]["thresholds"] = {{"source", "bundled"}};
  EXPECT_EQ(resolve_thresholds(config(j), {}), bundled_thresholds());

  save_threshold_table(bundled_thresholds(), dir_->path() / "t.json");
  j["atp"]["thresholds"] = {{"source", "file"}, {"path", "t.json"}};
  EXPECT_EQ(resolve_thresholds(config(j), {}), bundled_thresholds());

  j["atp"]["thresholds"] = {{"source", "derive"}, {"reference", "data/real/real_0002.pgm"}};
  const ThresholdTable t = resolve_thresholds(config(j), {});
  EXPECT_EQ(t.K, 3u);
  EXPECT_NO_THROW(t.validate());
}

TEST_F(HarnessTest, EvaluateRefusesForeignModel) {
  const ExperimentConfig c = config(base_json());
  const DatasetSplit split = load_split(c);
  const FeatureConfig fc = feature_config(c, bundled_thresholds());
  SvmModel model = train_model(c, fc, split.train);
  EXPECT_EQ(model.pipeline_config_hash, fc.hash());
  model.pipeline_config_hash ^= 1;
  try {
    evaluate(model, fc, split.test, nullptr);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LayoutHashMismatch);
  }
}

}  // namespace
}  // namespace atp
