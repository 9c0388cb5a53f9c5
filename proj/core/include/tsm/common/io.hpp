// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsm::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Little-endian float32 encoding, appended to `out`.
void append_f32(std::string& out, std::span<const float> values);
void append_f32(std::string& out, std::span<const double> values);
void append_u32(std::string& out, std::uint32_t value);

/// Sequential little-endian reader over an in-memory buffer.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32();
  std::string_view take(std::size_t n);
  std::vector<double> f32(std::size_t count);
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace tsm::io
