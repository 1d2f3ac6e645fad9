// Copyright 2026 The lodsdf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "lodsdf/checkpoint.hpp"
#include "lodsdf/config.hpp"
#include "unit/test_util.hpp"

namespace lodsdf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

Checkpoint sample_checkpoint(Conditioning c = Conditioning::kHiddenConcat) {
  Checkpoint ck;
  ck.params = init_network(testing::tiny_config(4, 6, 3, c), 9);
  ck.codebook.codes = Eigen::MatrixXd::Random(2, 3);
  ck.shape_names = {"ball", "ring"};
  round_to_f32(ck);
  return ck;
}

void expect_bitwise_equal(const NetworkParams& a, const NetworkParams& b) {
  std::vector<std::vector<double>> ta, tb;
  for_each_tensor(a, [&](const std::string&, auto s) { ta.emplace_back(s.begin(), s.end()); });
  for_each_tensor(b, [&](const std::string&, auto s) { tb.emplace_back(s.begin(), s.end()); });
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t k = 0; k < ta.size(); ++k) {
    ASSERT_EQ(ta[k].size(), tb[k].size());
    EXPECT_EQ(std::memcmp(ta[k].data(), tb[k].data(), ta[k].size() * sizeof(double)), 0) << k;
  }
  EXPECT_EQ(a.config.resolved_bounds(), b.config.resolved_bounds());
  EXPECT_EQ(a.config.conditioning, b.config.conditioning);
}

// Splits an encoded checkpoint into its header JSON and payload bytes.
std::pair<json, std::string> split(const std::string& bytes) {
  std::uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 4, 4);
  return {json::parse(bytes.substr(8, n)), bytes.substr(8 + n)};
}

std::string join(const json& header, const std::string& payload) {
  const std::string h = header.dump();
  const auto n = static_cast<std::uint32_t>(h.size());
  std::string out = "LODS";
  out.append(reinterpret_cast<const char*>(&n), 4);
  return out + h + payload;
}

TEST(Checkpoint, RoundTripIsBitwise) {
  for (auto c : {Conditioning::kHiddenConcat, Conditioning::kInputConcat,
                 Conditioning::kOutputConcat}) {
    const auto ck = sample_checkpoint(c);
    const auto back = decode_checkpoint(encode_checkpoint(ck));
    expect_bitwise_equal(ck.params, back.params);
    EXPECT_EQ(ck.codebook.codes, back.codebook.codes);
    EXPECT_EQ(ck.shape_names, back.shape_names);
  }
}

TEST(Checkpoint, FileRoundTrip) {
  const auto dir = fs::temp_directory_path() / "lodsdf_ckpt_test";
  fs::create_directories(dir);
  const auto ck = sample_checkpoint();
  save_checkpoint(ck, dir / "m.lods");
  const auto back = load_checkpoint(dir / "m.lods");
  expect_bitwise_equal(ck.params, back.params);
  EXPECT_THROW(load_checkpoint(dir / "missing.lods"), CheckpointError);
  fs::remove_all(dir);
}

TEST(Checkpoint, HeaderFields) {
  const auto [header, payload] = split(encode_checkpoint(sample_checkpoint()));
  EXPECT_EQ(header.at("format_version"), kCheckpointVersion);
  EXPECT_EQ(header.at("N"), 4);
  EXPECT_EQ(header.at("d_h"), 6);
  EXPECT_EQ(header.at("d_l"), 3);
  EXPECT_EQ(header.at("B_schedule").size(), 4u);
  EXPECT_EQ(header.at("conditioning"), "hidden_concat");
  EXPECT_EQ(header.at("shape_names"), json::array({"ball", "ring"}));
}

TEST(Checkpoint, TamperedLayerCountNamesField) {
  auto [header, payload] = split(encode_checkpoint(sample_checkpoint()));
  header["N"] = 5;
  try {
    decode_checkpoint(join(header, payload));
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("N"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, CorruptInputs) {
  const auto bytes = encode_checkpoint(sample_checkpoint());
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 4)), CheckpointError);
  EXPECT_THROW(decode_checkpoint(bytes + "xxxx"), CheckpointError);
  EXPECT_THROW(decode_checkpoint("LODX" + bytes.substr(4)), CheckpointError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, 6)), CheckpointError);
  auto [header, payload] = split(bytes);
  header["format_version"] = 2;
  EXPECT_THROW(decode_checkpoint(join(header, payload)), CheckpointError);
  header["format_version"] = 1;
  header.erase("d_h");
  EXPECT_THROW(decode_checkpoint(join(header, payload)), CheckpointError);
}

TEST(Checkpoint, F32Rounding) {
  Checkpoint ck = sample_checkpoint();
  ck.params.heads[0].bias = 0.1;
  round_to_f32(ck);
  EXPECT_EQ(ck.params.heads[0].bias, static_cast<double>(0.1f));
}

TEST(RunConfig, DefaultsAndRoundTrip) {
  const auto c = RunConfig::from_json(json::object());
  EXPECT_EQ(c.network.layers, 7);
  EXPECT_EQ(c.resolved_dataset().size(), 8u);
  const auto back = RunConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(RunConfig, ParsesSections) {
  const json j = {
      {"seed", 5},
      {"network", {{"layers", 5}, {"hidden_dim", 16}, {"conditioning", "output_concat"}}},
      {"train", {{"steps", 10}}},
      {"meshing", {{"target_resolution", 64}}},
      {"dataset",
       json::array({{{"name", "s"},
                     {"shape", {{"kind", "sphere"}, {"center", {0, 0, 0}}, {"radius", 0.3}}}}})}};
  const auto c = RunConfig::from_json(j);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.network.layers, 5);
  EXPECT_EQ(c.network.conditioning, Conditioning::kOutputConcat);
  EXPECT_EQ(c.train.steps, 10);
  EXPECT_EQ(c.meshing.target_resolution, 64);
  ASSERT_EQ(c.dataset.size(), 1u);
  EXPECT_NEAR(c.dataset[0].oracle().distance(Vec3(0.3, 0, 0)), 0.0, 1e-15);
}

TEST(RunConfig, UnknownKeysRejected) {
  EXPECT_THROW(RunConfig::from_json({{"sede", 1}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"network", {{"layer", 3}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"train", {{"steps", "many"}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"network", {{"conditioning", "sideways"}}}}), ConfigError);
}

TEST(RunConfig, LoadsObjRelativeToFile) {
  const auto dir = fs::temp_directory_path() / "lodsdf_cfg_test";
  fs::create_directories(dir);
  save_obj(testing::cube_mesh(-0.3, 0.3), dir / "cube.obj");
  std::ofstream(dir / "run.json") << json{{"dataset", json::array({{{"name", "c"}, {"obj", "cube.obj"}}})}}.dump();
  const auto c = RunConfig::load(dir / "run.json");
  ASSERT_EQ(c.dataset.size(), 1u);
  EXPECT_NEAR(c.dataset[0].oracle().distance(Vec3::Zero()), -0.3, 1e-12);
  fs::remove_all(dir);
}

TEST(RunConfig, TrainingSamplesPerShape) {
  RunConfig c;
  c.sampling.total = 200;
  c.seed = 3;
  const auto sets = build_training_samples(c);
  ASSERT_EQ(sets.size(), 8u);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    EXPECT_EQ(sets[k].shape_id, static_cast<int>(k));
    EXPECT_EQ(sets[k].fine.size(), 10u);
  }
}

}  // namespace
}  // namespace lodsdf
