// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/scene/point_cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "tsm/common/error.hpp"

namespace tsm::scene {

void PointCloud::add(const Eigen::Vector3d& position, const Eigen::Vector3d& normal) {
  const double len = normal.norm();
  positions_.push_back(position);
  normals_.push_back(len > 0.0 && std::isfinite(len) ? Eigen::Vector3d(normal / len)
                                                     : Eigen::Vector3d::UnitZ());
}

void PointCloud::reserve(std::size_t n) {
  positions_.reserve(n);
  normals_.reserve(n);
}

void PointCloud::translate(const Eigen::Vector3d& offset) {
  for (auto& p : positions_) p += offset;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view tok, std::size_t line) {
  // std::from_chars for double is not available on every libstdc++ we target.
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ParseError("invalid number '" + s + "'", line);
  }
  return v;
}

void add_row(PointCloud& cloud, const std::array<double, 6>& v) {
  cloud.add({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
}

PointCloud parse_ply(std::istream& in, std::size_t& line_no) {
  std::string line;
  std::optional<std::size_t> vertex_count;
  bool in_vertex = false;
  std::vector<std::string> vertex_props;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") {
        throw ParseError("only ASCII PLY is supported", line_no);
      }
    } else if (toks[0] == "element") {
      if (toks.size() != 3) throw ParseError("malformed element line", line_no);
      in_vertex = toks[1] == "vertex";
      if (in_vertex) {
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(toks[2].data(), toks[2].data() + toks[2].size(), n);
        if (ec != std::errc() || p != toks[2].data() + toks[2].size()) {
          throw ParseError("malformed vertex count", line_no);
        }
        vertex_count = n;
      }
    } else if (toks[0] == "property") {
      if (toks.size() < 3) throw ParseError("malformed property line", line_no);
      if (in_vertex) {
        if (toks[1] == "list") throw ParseError("list properties on vertices", line_no);
        vertex_props.emplace_back(toks.back());
      }
    } else if (toks[0] == "end_header") {
      header_done = true;
      break;
    } else {
      throw ParseError("unexpected header keyword '" + std::string(toks[0]) + "'", line_no);
    }
  }
  if (!header_done) throw ParseError("missing end_header", line_no);
  if (!vertex_count) throw ParseError("missing vertex element", line_no);

  static constexpr std::array<std::string_view, 6> kNames = {"x", "y", "z", "nx", "ny", "nz"};
  std::array<std::size_t, 6> column{};
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    auto it = std::find(vertex_props.begin(), vertex_props.end(), kNames[k]);
    if (it == vertex_props.end()) {
      throw ParseError("vertex property '" + std::string(kNames[k]) + "' missing", line_no);
    }
    column[k] = static_cast<std::size_t>(it - vertex_props.begin());
  }

  PointCloud cloud;
  cloud.reserve(*vertex_count);
  while (cloud.size() < *vertex_count) {
    if (!std::getline(in, line)) {
      throw ParseError("expected " + std::to_string(*vertex_count) + " vertices, got " +
                           std::to_string(cloud.size()),
                       line_no + 1);
    }
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != vertex_props.size()) {
      throw ParseError("expected " + std::to_string(vertex_props.size()) + " values, got " +
                           std::to_string(toks.size()),
                       line_no);
    }
    std::array<double, 6> v{};
    for (std::size_t k = 0; k < 6; ++k) v[k] = parse_number(toks[column[k]], line_no);
    add_row(cloud, v);
  }
  return cloud;
}

}  // namespace

PointCloud parse_point_cloud(std::istream& in) {
  std::size_t line_no = 0;
  PointCloud cloud;
  std::string line;
  bool first = true;
  while (true) {
    if (!std::getline(in, line)) break;
    if (first) {
      first = false;
      const auto toks = split_ws(line);
      if (!toks.empty() && toks[0] == "ply") {
        ++line_no;
        cloud = parse_ply(in, line_no);
        break;
      }
    }
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].starts_with('#')) continue;
    if (toks.size() != 6) {
      throw ParseError("expected 6 columns, got " + std::to_string(toks.size()), line_no);
    }
    std::array<double, 6> v{};
    for (std::size_t k = 0; k < 6; ++k) v[k] = parse_number(toks[k], line_no);
    add_row(cloud, v);
  }
  if (cloud.empty()) throw EmptyInputError("point cloud has no points");
  return cloud;
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_point_cloud(in);
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.position(i);
    const auto& n = cloud.normal(i);
    out << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << n.x() << ' ' << n.y() << ' '
        << n.z() << '\n';
  }
}

PointCloud to_object_frame(const PointCloud& cloud, const Eigen::Vector3d& origin) {
  PointCloud out = cloud;
  out.translate(-origin);
  return out;
}

}  // namespace tsm::scene
