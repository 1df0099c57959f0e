#pragma once

/**
 * @file io.hpp
 * @brief Output writers: CSV, NDJSON, run manifests. All numeric output is
 *        17-significant-digit decimal so doubles round-trip exactly.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nemasoh/version.hpp"

namespace nemasoh {

/// Shortest-fixed 17-significant-digit decimal form of x.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("csv: cannot open '" + path + "'");
    write_strings(header);
  }

  void write_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) line += ',';
      line += format_g17(values[i]);
    }
    out_ << line << '\n';
  }

  void write_strings(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    out_ << line << '\n';
  }

 private:
  std::ofstream out_;
};

/// One JSON object per line; fields are appended in call order.
class NdjsonWriter {
 public:
  explicit NdjsonWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("ndjson: cannot open '" + path + "'");
  }

  class Record {
   public:
    explicit Record(std::ofstream& out) : out_(out) {}
    Record& field(const std::string& key, double v) {
      add("\"" + key + "\":" + format_g17(v));
      return *this;
    }
    Record& field(const std::string& key, long long v) {
      add("\"" + key + "\":" + std::to_string(v));
      return *this;
    }
    Record& field(const std::string& key, const std::string& v) {
      add("\"" + key + "\":\"" + v + "\"");
      return *this;
    }
    Record& field_array(const std::string& key, const std::vector<double>& v) {
      std::string s = "\"" + key + "\":[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_g17(v[i]);
      }
      add(s + "]");
      return *this;
    }
    ~Record() { out_ << '{' << body_ << "}\n"; }

   private:
    void add(const std::string& s) {
      if (!body_.empty()) body_ += ',';
      body_ += s;
    }
    std::ofstream& out_;
    std::string body_;
  };

  Record record() { return Record(out_); }

 private:
  std::ofstream out_;
};

/**
 * Write the run manifest next to the outputs: the full configuration echo
 * (itself a valid config file), the seed and the code version. Re-running
 * the same subcommand on the manifest reproduces the run bit-identically.
 */
inline void write_manifest(
    const std::filesystem::path& dir,
    const std::vector<std::pair<std::string, std::string>>& config_items) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.txt");
  if (!out) throw std::runtime_error("manifest: cannot open output file");
  out << "# run manifest (readable as a config file)\n";
  out << "meta.version = " << kVersion << "\n";
  for (const auto& [k, v] : config_items) out << k << " = " << v << "\n";
}

}  // namespace nemasoh
