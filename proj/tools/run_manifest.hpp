// Copyright 2026 The VISA-VIS Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run manifests: one JSON file per run directory recording the command, the
// resolved configuration, the seed, content hashes of the checkpoints read
// and written, and wall-clock timestamps.

#ifndef VISAVIS_TOOLS_RUN_MANIFEST_HPP_
#define VISAVIS_TOOLS_RUN_MANIFEST_HPP_

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <nlohmann/json.hpp>

#include "visavis/errors.hpp"

namespace visavis::tools {

inline constexpr char kManifestName[] = "manifest.json";

// Hash of a file as `git hash-object` computes it: SHA-1 over
// "blob <size>\0" followed by the contents.
inline std::string git_blob_sha1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  const std::string header = "blob " + std::to_string(data.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, data.data(), data.size()) &&
                  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::ordered_json config,
              std::uint64_t seed)
      : started_(utc_timestamp()) {
    j_["command"] = std::move(command);
    j_["config"] = std::move(config);
    j_["seed"] = seed;
    j_["inputs"] = nlohmann::ordered_json::array();
    j_["outputs"] = nlohmann::ordered_json::array();
  }

  void add_input(const std::filesystem::path& p) { add("inputs", p); }
  void add_output(const std::filesystem::path& p) { add("outputs", p); }
  void set(const std::string& key, nlohmann::ordered_json value) {
    j_[key] = std::move(value);
  }

  // Written once; an existing manifest is never replaced.
  void write(const std::filesystem::path& dir) {
    j_["started"] = started_;
    j_["finished"] = utc_timestamp();
    const auto path = dir / kManifestName;
    if (std::filesystem::exists(path))
      throw Error(path.string() + " already exists");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j_.dump(2) << '\n';
  }

 private:
  void add(const char* list, const std::filesystem::path& p) {
    j_[list].push_back({{"path", p.string()}, {"sha1", git_blob_sha1(p)}});
  }

  nlohmann::ordered_json j_;
  std::string started_;
};

}  // namespace visavis::tools

#endif  // VISAVIS_TOOLS_RUN_MANIFEST_HPP_
