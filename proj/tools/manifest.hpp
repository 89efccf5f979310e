#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rsa::cli {

struct RunRecord {
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
};

std::string sha256_file(const std::filesystem::path& path);

// Writes "<output>.manifest.json" beside every output. The content depends
// only on the command, its options and the bytes of inputs and outputs.
void write_manifests(const std::string& command,
                     const std::map<std::string, std::vector<std::string>>& config,
                     const RunRecord& record);

}  // namespace rsa::cli
