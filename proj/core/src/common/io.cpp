// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/common/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

#include "tsm/common/error.hpp"

namespace tsm::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void append_f32(std::string& out, std::span<const float> values) {
  const auto* p = reinterpret_cast<const char*>(values.data());
  out.append(p, values.size() * sizeof(float));
}

void append_f32(std::string& out, std::span<const double> values) {
  out.reserve(out.size() + values.size() * sizeof(float));
  for (double v : values) {
    const float f = static_cast<float>(v);
    char buf[sizeof(float)];
    std::memcpy(buf, &f, sizeof f);
    out.append(buf, sizeof buf);
  }
}

void append_u32(std::string& out, std::uint32_t value) {
  char buf[4];
  std::memcpy(buf, &value, 4);
  out.append(buf, 4);
}

std::string_view ByteReader::take(std::size_t n) {
  if (n > remaining()) throw ParseError("unexpected end of binary data");
  auto s = bytes_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::uint32_t ByteReader::u32() {
  auto s = take(4);
  std::uint32_t v;
  std::memcpy(&v, s.data(), 4);
  return v;
}

std::vector<double> ByteReader::f32(std::size_t count) {
  auto s = take(count * sizeof(float));
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    float f;
    std::memcpy(&f, s.data() + i * sizeof(float), sizeof f);
    out[i] = f;
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_file(path));
}

}  // namespace tsm::io
