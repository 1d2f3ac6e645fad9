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

#include "lodsdf/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lodsdf/detail/byte_io.hpp"
#include "lodsdf/geometry.hpp"

namespace lodsdf {
namespace {

constexpr std::string_view kMagic = "LODS";

template <class F>
void for_each_block(Checkpoint& c, F&& f) {
  for_each_tensor(c.params, [&](const std::string&, std::span<double> t) { f(t); });
  for (Eigen::Index r = 0; r < c.codebook.codes.rows(); ++r) {
    for (Eigen::Index col = 0; col < c.codebook.codes.cols(); ++col) {
      f(std::span<double>(&c.codebook.codes(r, col), 1));
    }
  }
}

std::size_t scalar_count(const Checkpoint& c) {
  std::size_t n = 0;
  for_each_tensor(c.params, [&](const std::string&, std::span<const double> t) { n += t.size(); });
  return n + static_cast<std::size_t>(c.codebook.codes.size());
}

template <class T>
T field(const nlohmann::json& header, const char* name) {
  if (!header.contains(name)) throw CheckpointError(std::string("checkpoint header lacks field ") + name);
  try {
    return header.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw CheckpointError(std::string("checkpoint header field ") + name + " has the wrong type");
  }
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& checkpoint) {
  const auto& cfg = checkpoint.params.config;
  if (checkpoint.shape_names.size() != checkpoint.codebook.size()) {
    throw CheckpointError("checkpoint: shape_names must match codebook rows");
  }
  if (checkpoint.codebook.size() > 0 && checkpoint.codebook.codes.cols() != cfg.latent_dim) {
    throw CheckpointError("checkpoint: codebook width differs from d_l");
  }
  const nlohmann::json header = {
      {"format_version", kCheckpointVersion},
      {"N", cfg.layers},
      {"d_h", cfg.hidden_dim},
      {"d_l", cfg.latent_dim},
      {"B", cfg.bandwidth},
      {"B_schedule", cfg.resolved_bounds()},
      {"conditioning", to_string(cfg.conditioning)},
      {"shape_names", checkpoint.shape_names},
      {"codebook_rows", checkpoint.codebook.size()},
      {"dtype", "f32le"},
      {"layout", "column-major"},
  };
  const std::string text = header.dump();
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text);
  Checkpoint copy = checkpoint;
  for_each_block(copy, [&](std::span<double> t) {
    for (double v : t) w.f32(static_cast<float>(v));
  });
  return w.take();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  detail::ByteReader r(bytes);
  try {
    if (r.bytes(kMagic.size()) != kMagic) throw CheckpointError("not a checkpoint: bad magic");
    const std::uint32_t header_len = r.u32();
    const auto text = r.bytes(header_len);
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
    }
    const int version = field<int>(header, "format_version");
    if (version != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint format_version " + std::to_string(version) +
                            " (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    NetworkConfig cfg;
    cfg.layers = field<int>(header, "N");
    cfg.hidden_dim = field<int>(header, "d_h");
    cfg.latent_dim = field<int>(header, "d_l");
    cfg.bandwidth = field<double>(header, "B");
    cfg.bounds = field<std::vector<double>>(header, "B_schedule");
    if (static_cast<int>(cfg.bounds.size()) != cfg.layers) {
      throw CheckpointError("checkpoint header field N = " + std::to_string(cfg.layers) +
                            " disagrees with B_schedule length " +
                            std::to_string(cfg.bounds.size()));
    }
    try {
      cfg.conditioning = conditioning_from_string(field<std::string>(header, "conditioning"));
      cfg.validate();
    } catch (const ConfigError& e) {
      throw CheckpointError(std::string("checkpoint header: ") + e.what());
    }
    Checkpoint c;
    c.shape_names = field<std::vector<std::string>>(header, "shape_names");
    const auto rows = field<std::size_t>(header, "codebook_rows");
    if (rows != c.shape_names.size()) {
      throw CheckpointError("checkpoint header field codebook_rows disagrees with shape_names");
    }
    c.params = init_network(cfg, 0);
    c.codebook.codes = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), cfg.latent_dim);
    const std::size_t expected = scalar_count(c) * 4;
    if (r.remaining() != expected) {
      throw CheckpointError("checkpoint payload holds " + std::to_string(r.remaining()) +
                            " bytes, header shapes need " + std::to_string(expected));
    }
    for_each_block(c, [&](std::span<double> t) {
      for (double& v : t) v = static_cast<double>(r.f32());
    });
    return c;
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const CheckpointError*>(&e)) throw;
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

void round_to_f32(Checkpoint& checkpoint) {
  for_each_block(checkpoint, [](std::span<double> t) {
    for (double& v : t) v = static_cast<double>(static_cast<float>(v));
  });
}

}  // namespace lodsdf
