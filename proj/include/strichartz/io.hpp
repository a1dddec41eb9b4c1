#pragma once

// CSV tables, atomic file writes and run manifests.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace strichartz::io {

inline constexpr const char* kToolVersion = "1.0.0";

/// 17 significant digits, so a double round-trips through text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Cell = std::variant<std::int64_t, double, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("CsvTable: row width differs from the header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>)
                os << format_double(v);
              else
                os << v;
            },
            r[i]);
      }
      os << '\n';
    }
    return os.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Writes to a temporary sibling and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct RunManifest {
  std::string command_line;
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  unsigned shards = 1;
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;
  nlohmann::json guards = nlohmann::json::object();
  nlohmann::json profiles = nlohmann::json::object();
  std::vector<std::string> artifacts;
};

inline nlohmann::json to_json(const RunManifest& m) {
  return {{"command_line", m.command_line}, {"subcommand", m.subcommand}, {"config", m.config},
          {"seed", m.seed},                 {"shards", m.shards},         {"tool_version", m.tool_version},
          {"wall_seconds", m.wall_seconds}, {"guards", m.guards},         {"profiles", m.profiles},
          {"artifacts", m.artifacts}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command_line = j.at("command_line").get<std::string>();
  m.subcommand = j.at("subcommand").get<std::string>();
  m.config = j.at("config");
  m.seed = j.at("seed").get<std::uint64_t>();
  m.shards = j.at("shards").get<unsigned>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.wall_seconds = j.at("wall_seconds").get<double>();
  m.guards = j.at("guards");
  m.profiles = j.at("profiles");
  m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  return m;
}

inline std::filesystem::path manifest_path(const std::filesystem::path& artifact) {
  auto p = artifact;
  p += ".manifest.json";
  return p;
}

/// Artifact plus its sidecar manifest, both written atomically.
inline void write_artifact(const std::filesystem::path& path, const std::string& content, RunManifest manifest) {
  write_atomic(path, content);
  manifest.artifacts = {path.filename().string()};
  write_atomic(manifest_path(path), to_json(manifest).dump(2) + "\n");
}

}  // namespace strichartz::io
