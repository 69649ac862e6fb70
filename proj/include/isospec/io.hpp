#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace isospec::io {

std::string sha256_hex(std::string_view data);

/// Shortest round-trip decimal; "inf", "-inf", "nan" for the rest.
std::string format_double(double v);

/// Sorted keys, two-space indent, trailing newline.
std::string canonical_json(const nlohmann::json& j);

/// Comma-separated table with a header row and a trailing "# key: value"
/// block. Metadata values are written as compact JSON.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  std::string render(const nlohmann::json& metadata) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct EmittedFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);
  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& name, const std::string& content);
  void write_csv(const std::string& name, const CsvTable& table, const nlohmann::json& metadata);
  void write_json(const std::string& name, const nlohmann::json& j);
  const std::vector<EmittedFile>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<EmittedFile> files_;
};

/// Library, compiler and dependency versions.
nlohmann::json versions();

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string config_hash;
  int threads = 1;
  double wall_seconds = 0;
  std::vector<EmittedFile> files;
  nlohmann::json to_json() const;
};

}  // namespace isospec::io
