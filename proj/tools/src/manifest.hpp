#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nebv::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Current UTC time as 2024-01-31T12:34:56Z.
std::string utc_timestamp();

struct RunManifest {
  std::string command;
  std::string config_digest;  // sha256 over `config_source` (a file) or `config_text`
  std::string config_source;  // path of the config file, or "inline"
  std::string config_text;    // canonical parameters when there is no config file
  std::optional<std::uint64_t> seed;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;  // file names relative to the manifest
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, sha256)

  std::string to_json() const;
};

/// Writes files into a directory all-or-nothing: each file is written to a
/// temporary name and renamed on commit(); destruction without commit removes
/// every temporary and every file already renamed.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet();

  /// Stages `content` under `name`; returns the final path.
  std::filesystem::path stage(const std::string& name, const std::string& content);
  void commit();
  std::vector<std::string> names() const;

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;  // (temp, final)
  std::vector<std::filesystem::path> committed_;
  bool done_ = false;
};

}  // namespace nebv::cli
