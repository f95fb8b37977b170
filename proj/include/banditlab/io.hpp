#pragma once

// Output plumbing: config hashing, locale-independent number formatting, and
// files that open with a manifest line (config hash + master seed).

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "json.hpp"

namespace banditlab {

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolName = "banditlab";
inline constexpr const char* kToolVersion = "1.0.0";

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return out;
}

/// Shortest round-trip decimal form.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Manifest {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string command;

  std::string header_line() const {
    return std::string("# ") + kToolName + " " + kToolVersion + " command=" + command + " config_hash=" + config_hash +
           " seed=" + std::to_string(seed);
  }

  nlohmann::ordered_json to_json() const {
    return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config_hash", config_hash},
            {"seed", seed}};
  }
};

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

/// CSV with the manifest as a leading comment line.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Manifest& manifest, std::string_view header)
      : path_(path), out_(open_output(path)) {
    out_ << manifest.header_line() << '\n' << header << '\n';
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

  void close() { finish_output(out_, path_); }

 private:
  static std::string cell(double v) { return fmt_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_integral_v<T>) {
      return std::to_string(v);
    } else {
      std::ostringstream os;
      os << v;
      return os.str();
    }
  }

  std::filesystem::path path_;
  std::ofstream out_;
};

/// A JSON object whose first line carries the manifest; the remaining
/// members follow one per line-group so the file stays valid JSON.
inline void write_json_with_manifest(const std::filesystem::path& path, const Manifest& manifest,
                                     const nlohmann::ordered_json& body) {
  auto out = open_output(path);
  out << "{\"manifest\": " << manifest.to_json().dump();
  for (auto it = body.begin(); it != body.end(); ++it) out << ",\n\"" << it.key() << "\": " << it.value().dump(2);
  out << "\n}\n";
  finish_output(out, path);
}

}  // namespace banditlab
