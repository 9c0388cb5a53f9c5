// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tsm::diffusion {

/// Lowercased alphanumeric runs of `text`.
std::vector<std::string> tokenize(std::string_view text);

/// Bag of words: each token is hashed (FNV-1a) to one of `dim` bins, counts
/// are L2-normalized. Text without tokens maps to the zero vector.
Eigen::VectorXd hashed_text_embedding(std::string_view text, int dim);

/// Text features from either the hashed backend or a JSON file mapping exact
/// strings to vectors.
class TextEncoder {
 public:
  enum class Backend { Hashed, File };

  static TextEncoder hashed(int dim);
  static TextEncoder from_file(const std::filesystem::path& path);
  static TextEncoder from_map(std::map<std::string, Eigen::VectorXd> table);

  Backend backend() const noexcept { return backend_; }
  int dim() const noexcept { return dim_; }
  /// Throws LookupError when the file backend has no entry for `text`.
  Eigen::VectorXd embed(std::string_view text) const;

 private:
  TextEncoder(Backend backend, int dim) : backend_(backend), dim_(dim) {}

  Backend backend_;
  int dim_;
  std::map<std::string, Eigen::VectorXd, std::less<>> table_;
};

}  // namespace tsm::diffusion
