#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>

#include <json.hpp>

#include "dmc/csv.hpp"

namespace dmc {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr const char* kRngDescription = "splitmix64-streams-v1";

// Reproducibility record written next to every command's outputs. In
// deterministic mode the timestamps are pinned so reruns are byte-identical.
class RunManifest {
 public:
  RunManifest(std::string command, std::uint64_t master_seed, bool deterministic)
      : deterministic_(deterministic) {
    doc_["command"] = std::move(command);
    doc_["master_seed"] = master_seed;
    doc_["code_version"] = kCodeVersion;
    doc_["rng"] = kRngDescription;
    doc_["deterministic"] = deterministic;
    doc_["parameters"] = nlohmann::json::object();
    doc_["started_at"] = now();
  }

  template <typename T>
  void set_param(const std::string& key, const T& value) {
    doc_["parameters"][key] = value;
  }

  void set_output(const std::string& key, const std::string& path) {
    doc_["outputs"][key] = path;
  }

  void write(const std::string& path) {
    doc_["finished_at"] = now();
    write_text_file(path, doc_.dump(2) + "\n");
  }

 private:
  std::string now() const {
    if (deterministic_) return "1970-01-01T00:00:00Z";
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
  }

  nlohmann::json doc_;
  bool deterministic_;
};

}  // namespace dmc
