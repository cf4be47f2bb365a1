#include "dklb/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include "json.hpp"

#include "dklb/error.hpp"

namespace dklb {

namespace {

constexpr int kManifestFormat = 1;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string file_blob_hash(const std::string& path) { return git_blob_hash(slurp(path)); }

std::string manifest_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["format"] = kManifestFormat;
  j["tool"] = "dklb";
  j["subcommand"] = m.subcommand;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["warnings"] = m.warnings;
  return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const Manifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("manifest: cannot open '" + path + "' for writing");
  out << manifest_json(m);
}

Manifest read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format").get<int>() != kManifestFormat) {
      throw ValidationError("manifest '" + path + "' has an unsupported format version");
    }
    Manifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config").get<ConfigValues>();
    m.inputs = j.value("inputs", std::map<std::string, std::string>{});
    m.outputs = j.value("outputs", std::map<std::string, std::string>{});
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest '" + path + "' is missing fields: " + e.what());
  }
}

}  // namespace dklb
