#pragma once

// Run manifests: the full configuration echo, the seed, git-style content
// hashes of inputs and outputs, and recorded warnings. A manifest alone is
// enough to replay a run.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dklb/config.hpp"

namespace dklb {

/// SHA-1 of "blob <size>\0<content>", as printed by `git hash-object`.
std::string git_blob_hash(const std::string& content);
std::string file_blob_hash(const std::string& path);

struct Manifest {
  std::string subcommand;
  std::uint64_t seed = 0;
  ConfigValues config;
  std::map<std::string, std::string> inputs;   // label -> blob hash
  std::map<std::string, std::string> outputs;  // file name -> blob hash
  std::vector<std::string> warnings;
};

std::string manifest_json(const Manifest& m);
void write_manifest(const std::string& path, const Manifest& m);
/// Throws ValidationError for unreadable or malformed manifests.
Manifest read_manifest(const std::string& path);

}  // namespace dklb
