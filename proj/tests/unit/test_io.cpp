#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ivuq/errors.hpp"
#include "ivuq/io.hpp"
#include "ivuq/volume.hpp"

using namespace ivuq;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ivuq_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_F(IoTest, DatasetRoundTripAndProvenance) {
  CorpusOptions o;
  o.n = 20;
  const auto set = sample_training_set(o);
  const Provenance prov{0x1234, 42};
  write_dataset(dir_ / "d.bin", set, prov);
  EXPECT_EQ(slurp(dir_ / "d.bin").substr(0, 8), std::string("IVUQDS1\0", 8));
  const auto back = read_dataset(dir_ / "d.bin", set.prior_ranges);
  ASSERT_EQ(back.size(), 20u);
  EXPECT_EQ(back.schedule, set.schedule);
  EXPECT_NEAR(back.signals[17], set.signals[17], 1e-7);
  EXPECT_NEAR(back.labels_normalized[3][1], set.labels_normalized[3][1], 1e-6);
  EXPECT_EQ(read_provenance(dir_ / "d.bin"), prov);
}

TEST_F(IoTest, PhantomRoundTrip) {
  const auto ph = generate_phantom(50.0, PriorRanges{}, BValueSchedule::standard(), 1, 20, 16);
  write_phantom(dir_ / "p.bin", ph);
  const auto back = read_phantom(dir_ / "p.bin", BValueSchedule::standard());
  EXPECT_EQ(back.width, 20);
  EXPECT_EQ(back.height, 16);
  EXPECT_EQ(back.roi_label, ph.roi_label);
  EXPECT_FLOAT_EQ(static_cast<float>(back.snr), 50.0f);
  EXPECT_TRUE(std::isnan(back.truth[0].d));
  EXPECT_FALSE(read_provenance(dir_ / "p.bin").has_value());
  EXPECT_THROW(read_phantom(dir_ / "p.bin", BValueSchedule({0, 100, 200})), InvalidArgument);
}

TEST_F(IoTest, ModelIsBitExact) {
  const auto net = init_network(ivim_layer_sizes(14, 6, 8), 3);
  write_model(dir_ / "m.ivuqnn", net, HeadSpec::gaussian());
  const auto back = read_model(dir_ / "m.ivuqnn");
  EXPECT_EQ(back.net, net);
  EXPECT_EQ(back.spec, HeadSpec::gaussian());
}

TEST_F(IoTest, EnsembleManifest) {
  DeepEnsemble ens;
  ens.spec = HeadSpec::mdn(2);
  ens.ranges[2] = Range{0.005, 0.1};
  ens.members = {init_network(ivim_layer_sizes(14, 18, 8), 1), init_network(ivim_layer_sizes(14, 18, 8), 2)};
  ens.seeds = {1, 2};
  write_ensemble(dir_ / "ensemble.txt", ens, Provenance{9, 1});
  const auto back = read_ensemble(dir_ / "ensemble.txt");
  EXPECT_EQ(back.spec, ens.spec);
  EXPECT_EQ(back.ranges, ens.ranges);
  EXPECT_EQ(back.seeds, ens.seeds);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.members[1], ens.members[1]);
}

TEST_F(IoTest, PredictionAndSamples) {
  PredictionVolume p;
  p.x = 2;
  p.y = 1;
  p.map = {{0.001, 0.1, 0.02}, {NAN, NAN, NAN}};
  p.au = {Triple{1, 2, 3}, Triple{NAN, NAN, NAN}};
  p.eu = {Triple{0.1, 0.2, 0.3}, Triple{NAN, NAN, NAN}};
  write_prediction(dir_ / "p.ivuqpr", p);
  const auto back = read_prediction(dir_ / "p.ivuqpr");
  EXPECT_EQ(back.voxels(), 2u);
  EXPECT_FLOAT_EQ(static_cast<float>(back.map[0].d), 0.001f);
  EXPECT_TRUE(std::isnan(back.map[1].f));
  EXPECT_EQ(fs::file_size(dir_ / "p.ivuqpr"), 8u + 12u + 2u * 9u * 4u);

  SampleDump s;
  s.samples_per_voxel = 2;
  s.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  write_samples(dir_ / "s.ivuqsm", s);
  const auto sb = read_samples(dir_ / "s.ivuqsm");
  EXPECT_EQ(sb.values, s.values);
  EXPECT_EQ(sb.of(1, 2)[1], 12.0f);
}

TEST_F(IoTest, CorruptFilesAreRejected) {
  std::ofstream(dir_ / "bad.bin") << "NOTMAGIC and some more bytes";
  EXPECT_THROW(read_prediction(dir_ / "bad.bin"), FormatError);
  EXPECT_THROW(read_prediction(dir_ / "missing.bin"), IoError);
  PredictionVolume p;
  p.x = p.y = 1;
  p.map = {{0, 0, 0}};
  p.au = p.eu = {Triple{}};
  write_prediction(dir_ / "p.bin", p);
  fs::resize_file(dir_ / "p.bin", fs::file_size(dir_ / "p.bin") - 3);
  EXPECT_THROW(read_prediction(dir_ / "p.bin"), FormatError);
}

TEST_F(IoTest, VolumeSidecarRoundTrip) {
  VolumeInput v;
  v.x = 3;
  v.y = 2;
  v.z = 1;
  v.schedule = BValueSchedule({0, 500});
  for (std::size_t i = 0; i < 6; ++i) {
    v.signals.push_back(1.0 + i);
    v.signals.push_back(0.5 + i);
  }
  v.mask = {0, 1, 1, 0, 0, 1};
  write_volume(dir_ / "scan.txt", v);
  const auto back = read_volume(dir_ / "scan.txt");
  EXPECT_EQ(back.voxels(), 6u);
  EXPECT_EQ(back.schedule, v.schedule);
  EXPECT_EQ(back.mask, v.mask);
  EXPECT_DOUBLE_EQ(back.signal(4)[1], 4.5);
}

TEST_F(IoTest, VolumeSizeMismatch) {
  std::ofstream(dir_ / "scan.raw", std::ios::binary) << "abcd";
  std::ofstream(dir_ / "scan.txt") << "data = scan.raw\ndims = 2,2,1\nbvalues = 0,100\nendianness = little\n";
  EXPECT_THROW(read_volume(dir_ / "scan.txt"), FormatError);
}
