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

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lodsdf/network.hpp"
#include "lodsdf/training.hpp"

namespace lodsdf {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  NetworkParams params;
  Codebook codebook;
  std::vector<std::string> shape_names;  // one per codebook row
};

// "LODS", u32 header length, header JSON, then every tensor of
// for_each_tensor order followed by the codebook (row by row) as little-endian
// f32. Parameters are rounded to f32 on save; values that are already f32
// representable survive a round trip bit for bit.
std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::string& bytes);

// Atomic write (temp file + rename).
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Rounds every parameter and codebook entry to the nearest f32.
void round_to_f32(Checkpoint& checkpoint);

}  // namespace lodsdf
