#pragma once

#include <concepts>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace pedcoal {

inline constexpr const char* kVersion = "0.1.0";

// Minimal CSV emitter: header row first, one row per record, numeric fields
// rendered with round-trip precision.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  static std::string num(double v);
  template <typename T>
    requires std::integral<T>
  static std::string num(T v) {
    return std::to_string(v);
  }

 private:
  std::ofstream out_;
  std::size_t columns_;
  static std::string escape(const std::string& field);
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Deterministic static partition of [0, count) across `threads` workers;
// results land in caller-indexed storage so scheduling never reorders them.
void parallel_for(std::uint64_t count, int threads,
                  const std::function<void(std::uint64_t)>& body);

}  // namespace pedcoal
