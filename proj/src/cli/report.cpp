// Copyright 2026 The oversmooth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <openssl/evp.h>

#include "oversmooth/cli/report.hpp"
#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::cli {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file_bytes(path)); }

void Report::add_input(const std::filesystem::path& path) { inputs.push_back({path.string(), sha256_file(path)}); }

void Report::add_output(const std::filesystem::path& path) { outputs.push_back({path.string(), sha256_file(path)}); }

std::string Report::to_json() const {
  auto digests = [](const std::vector<FileDigest>& files) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& f : files) list.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return list;
  };
  nlohmann::json j;
  j["command"] = command;
  j["inputs"] = digests(inputs);
  j["outputs"] = digests(outputs);
  j["parameters"] = parameters;
  j["results"] = results;
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

}  // namespace oversmooth::cli
