#pragma once

#include <cstdint>
#include <string>

namespace sdelab {

// 64-bit FNV-1a over the bytes of `data`.
std::uint64_t fnv1a64(const std::string& data);

// Fixed-width lowercase hex rendering, e.g. "cbf29ce484222325".
std::string hex64(std::uint64_t v);

// Shortest decimal that round-trips a double ("%.17g").
std::string format_double(double v);

void ensure_directory(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace sdelab
