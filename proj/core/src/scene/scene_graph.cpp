// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/scene/scene_graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "tsm/common/error.hpp"

namespace tsm::scene {

std::string_view to_string(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::Near: return "near";
    case SpatialRelation::Far: return "far";
    case SpatialRelation::Above: return "above";
    case SpatialRelation::Below: return "below";
    case SpatialRelation::SupportedBy: return "supported_by";
    case SpatialRelation::Supporting: return "supporting";
    case SpatialRelation::Between: return "between";
  }
  return "unknown";
}

std::optional<SpatialRelation> relation_from_string(std::string_view s) {
  for (auto r : kAllRelations) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string_view relation_phrase(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::Near: return "near";
    case SpatialRelation::Far: return "far from";
    case SpatialRelation::Above: return "above";
    case SpatialRelation::Below: return "below";
    case SpatialRelation::SupportedBy: return "supported by";
    case SpatialRelation::Supporting: return "supporting";
    case SpatialRelation::Between: return "between";
  }
  return "related to";
}

nlohmann::json to_json(const RelationParams& p) {
  return {{"near_threshold", p.near_threshold},
          {"far_threshold", p.far_threshold},
          {"overlap_min", p.overlap_min},
          {"contact_eps", p.contact_eps},
          {"between_margin", p.between_margin},
          {"between_lateral_max", p.between_lateral_max}};
}

RelationParams relation_params_from_json(const nlohmann::json& j) {
  RelationParams p;
  p.near_threshold = j.value("near_threshold", p.near_threshold);
  p.far_threshold = j.value("far_threshold", p.far_threshold);
  p.overlap_min = j.value("overlap_min", p.overlap_min);
  p.contact_eps = j.value("contact_eps", p.contact_eps);
  p.between_margin = j.value("between_margin", p.between_margin);
  p.between_lateral_max = j.value("between_lateral_max", p.between_lateral_max);
  return p;
}

namespace {

double horizontal_distance(const Aabb& a, const Aabb& b) {
  return (a.center.head<2>() - b.center.head<2>()).norm();
}

// a sits above b: separated z-intervals (allowing contact_eps overlap) and
// overlapping footprints (relative to the smaller footprint).
bool is_above(const Aabb& a, const Aabb& b, const RelationParams& p) {
  return a.min().z() >= b.max().z() - p.contact_eps && footprint_overlap(a, b) > p.overlap_min;
}

bool is_supported_by(const Aabb& a, const Aabb& b, const RelationParams& p) {
  return is_above(a, b, p) && std::abs(a.min().z() - b.max().z()) <= p.contact_eps;
}

}  // namespace

RelationSet infer_pairwise_relations(const DetectedObject& a, const DetectedObject& b,
                                     const RelationParams& params) {
  RelationSet out;
  if (is_above(a.box, b.box, params)) out.insert(SpatialRelation::Above);
  if (is_above(b.box, a.box, params)) out.insert(SpatialRelation::Below);
  if (is_supported_by(a.box, b.box, params)) out.insert(SpatialRelation::SupportedBy);
  if (is_supported_by(b.box, a.box, params)) out.insert(SpatialRelation::Supporting);
  if (out.empty()) {
    const double d = horizontal_distance(a.box, b.box);
    if (d < params.near_threshold) out.insert(SpatialRelation::Near);
    if (d > params.far_threshold) out.insert(SpatialRelation::Far);
  }
  return out;
}

bool infer_between(const DetectedObject& c, const DetectedObject& a, const DetectedObject& b,
                   const RelationParams& params) {
  // Canonical anchor order makes the floating-point evaluation identical for
  // (a, b) and (b, a).
  Eigen::Vector2d pa = a.box.center.head<2>();
  Eigen::Vector2d pb = b.box.center.head<2>();
  if (std::lexicographical_compare(pb.data(), pb.data() + 2, pa.data(), pa.data() + 2)) {
    std::swap(pa, pb);
  }
  const Eigen::Vector2d seg = pb - pa;
  const double len2 = seg.squaredNorm();
  if (len2 <= 0.0) return false;
  const Eigen::Vector2d rel = c.box.center.head<2>() - pa;
  const double s = rel.dot(seg) / len2;
  if (!(s > params.between_margin && s < 1.0 - params.between_margin)) return false;
  const double lateral = (rel - s * seg).norm();
  return lateral < params.between_lateral_max;
}

const DetectedObject* SceneGraph::find(ObjectId id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(),
                         [id](const DetectedObject& o) { return o.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

SceneGraph build_scene_graph(std::vector<DetectedObject> objects, const RelationParams& params) {
  std::sort(objects.begin(), objects.end(),
            [](const DetectedObject& x, const DetectedObject& y) { return x.id < y.id; });
  SceneGraph g;
  g.params = params;
  const std::size_t n = objects.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (auto r : infer_pairwise_relations(objects[i], objects[j], params)) {
        g.binary_edges.push_back({objects[i].id, r, objects[j].id});
      }
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (c == i || c == j) continue;
        if (infer_between(objects[c], objects[i], objects[j], params)) {
          g.between_edges.push_back({objects[c].id, objects[i].id, objects[j].id});
        }
      }
    }
  }
  std::sort(g.binary_edges.begin(), g.binary_edges.end());
  g.binary_edges.erase(std::unique(g.binary_edges.begin(), g.binary_edges.end()),
                       g.binary_edges.end());
  std::sort(g.between_edges.begin(), g.between_edges.end());
  g.between_edges.erase(std::unique(g.between_edges.begin(), g.between_edges.end()),
                        g.between_edges.end());
  g.nodes = std::move(objects);
  return g;
}

std::string normalize_category(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

namespace {

Eigen::Vector3d vec3(const nlohmann::json& j, const char* field, std::size_t index) {
  if (!j.is_array() || j.size() != 3) {
    throw ValidationError("detection " + std::to_string(index) + ": '" + field +
                          "' must be an array of 3 numbers");
  }
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) {
      throw ValidationError("detection " + std::to_string(index) + ": '" + field +
                            "' must be numeric");
    }
    v[k] = j[k].get<double>();
  }
  return v;
}

nlohmann::json vec_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

std::vector<DetectedObject> parse_detections(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("detections must be a JSON array");
  std::vector<DetectedObject> out;
  std::unordered_set<ObjectId> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    if (!item.is_object() || !item.contains("id") || !item.contains("category") ||
        !item.contains("center") || !item.contains("size")) {
      throw ValidationError("detection " + std::to_string(i) +
                            ": expected {id, category, center, size}");
    }
    if (!item["id"].is_number_integer() || item["id"].get<long long>() < 0) {
      throw ValidationError("detection " + std::to_string(i) + ": id must be a non-negative integer");
    }
    DetectedObject obj;
    obj.id = item["id"].get<ObjectId>();
    if (!seen.insert(obj.id).second) {
      throw ValidationError("duplicate detection id " + std::to_string(obj.id));
    }
    obj.category = normalize_category(item["category"].get<std::string>());
    if (obj.category.empty()) {
      throw ValidationError("detection " + std::to_string(obj.id) + ": empty category");
    }
    const Eigen::Vector3d size = vec3(item["size"], "size", i);
    if (!(size.array() > 0.0).all()) {
      throw ValidationError("detection " + std::to_string(obj.id) +
                            ": size components must be positive");
    }
    obj.box = Aabb::from_center_size(vec3(item["center"], "center", i), size);
    out.push_back(std::move(obj));
  }
  return out;
}

std::vector<DetectedObject> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_detections(j);
}

nlohmann::json detections_to_json(const std::vector<DetectedObject>& objects) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : objects) {
    arr.push_back({{"id", o.id},
                   {"category", o.category},
                   {"center", vec_json(o.box.center)},
                   {"size", vec_json(o.box.size())}});
  }
  return arr;
}

nlohmann::json to_json(const SceneGraph& graph) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.binary_edges) {
    edges.push_back({{"s", e.subject}, {"rel", to_string(e.relation)}, {"o", e.object}});
  }
  nlohmann::json between = nlohmann::json::array();
  for (const auto& e : graph.between_edges) {
    between.push_back({{"s", e.subject}, {"a1", e.anchor1}, {"a2", e.anchor2}});
  }
  return {{"nodes", detections_to_json(graph.nodes)},
          {"edges", edges},
          {"between", between},
          {"params", to_json(graph.params)}};
}

SceneGraph scene_graph_from_json(const nlohmann::json& j) {
  SceneGraph g;
  g.nodes = parse_detections(j.at("nodes"));
  g.params = relation_params_from_json(j.value("params", nlohmann::json::object()));
  for (const auto& e : j.at("edges")) {
    auto rel = relation_from_string(e.at("rel").get<std::string>());
    if (!rel || *rel == SpatialRelation::Between) throw ValidationError("bad edge relation");
    g.binary_edges.push_back({e.at("s").get<ObjectId>(), *rel, e.at("o").get<ObjectId>()});
  }
  for (const auto& e : j.at("between")) {
    auto a1 = e.at("a1").get<ObjectId>(), a2 = e.at("a2").get<ObjectId>();
    g.between_edges.push_back({e.at("s").get<ObjectId>(), std::min(a1, a2), std::max(a1, a2)});
  }
  for (const auto& e : g.binary_edges) {
    if (!g.find(e.subject) || !g.find(e.object)) throw ValidationError("edge endpoint missing");
  }
  for (const auto& e : g.between_edges) {
    if (!g.find(e.subject) || !g.find(e.anchor1) || !g.find(e.anchor2)) {
      throw ValidationError("between edge endpoint missing");
    }
  }
  std::sort(g.binary_edges.begin(), g.binary_edges.end());
  std::sort(g.between_edges.begin(), g.between_edges.end());
  return g;
}

}  // namespace tsm::scene
