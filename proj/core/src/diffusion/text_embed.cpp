// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/text_embed.hpp"

#include <cctype>
#include <cstdint>
#include <nlohmann/json.hpp>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

namespace tsm::diffusion {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Eigen::VectorXd hashed_text_embedding(std::string_view text, int dim) {
  if (dim < 1) throw ValidationError("embedding dimension must be positive");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (const std::string& token : tokenize(text)) {
    std::uint64_t h = 14695981039346656037ull;
    for (char ch : token) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
    v[static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim))] += 1.0;
  }
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

TextEncoder TextEncoder::hashed(int dim) {
  if (dim < 1) throw ValidationError("embedding dimension must be positive");
  return TextEncoder(Backend::Hashed, dim);
}

TextEncoder TextEncoder::from_map(std::map<std::string, Eigen::VectorXd> table) {
  if (table.empty()) throw EmptyInputError("embedding table is empty");
  const auto dim = table.begin()->second.size();
  TextEncoder enc(Backend::File, static_cast<int>(dim));
  for (auto& [key, vec] : table) {
    if (vec.size() != dim || dim == 0) {
      throw ValidationError("embedding for '" + key + "' has inconsistent length");
    }
    if (!vec.allFinite()) throw ValidationError("embedding for '" + key + "' is not finite");
    enc.table_.emplace(key, std::move(vec));
  }
  return enc;
}

TextEncoder TextEncoder::from_file(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path.string() + ": expected an object of text -> vector");
  std::map<std::string, Eigen::VectorXd> table;
  for (const auto& [key, value] : j.items()) {
    std::vector<double> values;
    try {
      values = value.get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError(path.string() + ": embedding for '" + key + "' is not a number array");
    }
    table.emplace(key, Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                          static_cast<Eigen::Index>(values.size())));
  }
  return from_map(std::move(table));
}

Eigen::VectorXd TextEncoder::embed(std::string_view text) const {
  if (backend_ == Backend::Hashed) return hashed_text_embedding(text, dim_);
  const auto it = table_.find(text);
  if (it == table_.end()) throw LookupError("no embedding for text '" + std::string(text) + "'");
  return it->second;
}

}  // namespace tsm::diffusion
