#include "isospec/io.hpp"

#include <boost/version.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <gmp.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>
#include <Eigen/Core>

#include "isospec/errors.hpp"

namespace isospec::io {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string canonical_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw PreconditionError("csv: row width differs from header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::render(const nlohmann::json& metadata) const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  for (const auto& [k, v] : metadata.items()) out += "# " + k + ": " + v.dump() + "\n";
  return out;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write(const std::string& name, const std::string& content) {
  std::ofstream f(root_ / name, std::ios::binary);
  if (!f) throw ResourceError("cannot open " + (root_ / name).string() + " for writing", 0);
  f << content;
  if (!f) throw ResourceError("write failed for " + (root_ / name).string(), 0);
  files_.push_back({name, sha256_hex(content), content.size()});
}

void OutputDir::write_csv(const std::string& name, const CsvTable& table,
                          const nlohmann::json& metadata) {
  write(name, table.render(metadata));
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& j) {
  write(name, canonical_json(j));
}

nlohmann::json versions() {
  return {{"isospec", "1.0.0"},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"gmp", gmp_version},
          {"openssl", OPENSSL_VERSION_TEXT}};
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& e : files) f.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  return {{"command", command},   {"config", config},        {"config_hash", config_hash},
          {"threads", threads},   {"versions", versions()},  {"wall_seconds", wall_seconds},
          {"files", f}};
}

}  // namespace isospec::io
