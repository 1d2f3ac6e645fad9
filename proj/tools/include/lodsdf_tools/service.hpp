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

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "lodsdf/checkpoint.hpp"
#include "lodsdf/meshing.hpp"

namespace httplib {
class Server;
}

namespace lodsdf {

struct ServiceOptions {
  int max_resolution = 256;
  int base_resolution = 32;
  double subdivision_factor = 3.0;
};

struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

// Read-only request handlers over one loaded checkpoint. Every handler is
// const and thread safe.
class MeshService {
 public:
  MeshService(Checkpoint checkpoint, ServiceOptions options = {});

  HttpReply model_info() const;
  HttpReply shapes() const;
  // Body: {source, level, resolution, refine_from?, tau?}. Reply body:
  // u32 n_verts, u32 n_tris, f32 xyz per vertex, u32 triples; `evals` header.
  HttpReply mesh(const std::string& body) const;
  // Body: {source, level, axis, offset, res}. Reply: res x res little-endian
  // f32 values, second in-plane axis slowest.
  HttpReply slice(const std::string& body) const;

  // Registers the routes plus CORS handling on `server`.
  void mount(httplib::Server& server) const;

  const Checkpoint& checkpoint() const { return checkpoint_; }

 private:
  LatentCode resolve_source(const nlohmann::json& source) const;
  int resolve_level(const nlohmann::json& body, const char* key) const;

  Checkpoint checkpoint_;
  ServiceOptions options_;
};

// Wire encoding of a mesh as served by /mesh.
std::string encode_wire_mesh(const TriangleMesh& mesh);
TriangleMesh decode_wire_mesh(const std::string& bytes);

}  // namespace lodsdf
