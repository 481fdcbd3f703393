#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace advrisk::cli {

std::uint64_t fnv1a(std::string_view data);
std::string fnv1a_hex(std::string_view data);

/// Collects output files in memory and writes them in path order.
///
/// Sweep workers only produce strings; the main thread owns the sink, so every
/// file is written by one writer and the directory contents do not depend on
/// scheduling.
class OutputSink {
 public:
  explicit OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  void add(const std::string& relative, std::string content);
  /// Writes all files; throws std::runtime_error on I/O failure.
  void flush();

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
};

// Renders a number so that identical doubles always give identical text.
std::string num(double v);

}  // namespace advrisk::cli
