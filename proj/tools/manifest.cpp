#include "manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "rsa/error.hpp"
#include "rsa/io.hpp"

#ifndef RSA_VERSION
#define RSA_VERSION "0.0.0"
#endif

namespace rsa::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for hashing", path.string()));

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);

  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_manifests(const std::string& command,
                     const std::map<std::string, std::vector<std::string>>& config,
                     const RunRecord& record) {
  nlohmann::json manifest;
  manifest["tool"] = "rsa";
  manifest["version"] = RSA_VERSION;
  manifest["command"] = command;
  manifest["config"] = config;
  auto files = [](const std::vector<std::filesystem::path>& paths) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& path : paths) {
      list.push_back({{"path", path.generic_string()}, {"sha256", sha256_file(path)}});
    }
    return list;
  };
  manifest["inputs"] = files(record.inputs);
  manifest["outputs"] = files(record.outputs);
  const std::string text = manifest.dump(2) + "\n";
  for (const auto& output : record.outputs) {
    io::write_text(output.string() + ".manifest.json", text);
  }
}

}  // namespace rsa::cli
