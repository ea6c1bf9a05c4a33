#include "manifest.hpp"

#include <openssl/evp.h>

#include <json.hpp>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace nebv::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_source"] = config_source;
  j["config_digest"] = config_digest;
  if (!config_text.empty()) j["config"] = nlohmann::ordered_json::parse(config_text);
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["version"] = version;
  j["started"] = started;
  j["finished"] = finished;
  j["outputs"] = outputs;
  auto& in = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"sha256", digest}});
  return j.dump(2) + "\n";
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

OutputSet::~OutputSet() {
  if (done_) return;
  std::error_code ec;
  for (const auto& [tmp, final_path] : staged_) fs::remove(tmp, ec);
  for (const auto& path : committed_) fs::remove(path, ec);
}

fs::path OutputSet::stage(const std::string& name, const std::string& content) {
  const fs::path final_path = dir_ / name;
  const fs::path tmp = dir_ / ("." + name + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  staged_.emplace_back(tmp, final_path);
  return final_path;
}

void OutputSet::commit() {
  for (const auto& [tmp, final_path] : staged_) {
    fs::rename(tmp, final_path);
    committed_.push_back(final_path);
  }
  staged_.clear();
  done_ = true;
}

std::vector<std::string> OutputSet::names() const {
  std::vector<std::string> out;
  for (const auto& [tmp, final_path] : staged_) out.push_back(final_path.filename().string());
  return out;
}

}  // namespace nebv::cli
