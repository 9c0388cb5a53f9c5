// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/synthetic.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "tsm/common/error.hpp"

namespace tsm::pipeline {

namespace {

using scene::Aabb;
using scene::DetectedObject;
using scene::SpatialRelation;

constexpr std::array<const char*, 6> kTargetCategories = {"chair", "table", "box",
                                                           "stool", "bed",   "sofa"};
constexpr std::array<const char*, 8> kAnchorCategories = {"desk", "lamp", "shelf", "door",
                                                           "window", "tv", "plant", "bookshelf"};
constexpr std::array<SpatialRelation, 7> kRelationCycle = {
    SpatialRelation::Near,       SpatialRelation::Far,        SpatialRelation::Above,
    SpatialRelation::Below,      SpatialRelation::SupportedBy, SpatialRelation::Supporting,
    SpatialRelation::Between};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Eigen::Vector2d direction() {
    const double a = uniform(0.0, 2.0 * std::numbers::pi);
    return {std::cos(a), std::sin(a)};
  }
  template <typename C>
  auto pick(const C& items) {
    return items[static_cast<std::size_t>(integer(0, static_cast<int>(items.size()) - 1))];
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

Aabb floor_box(const Eigen::Vector2d& xy, const Eigen::Vector3d& size) {
  return Aabb::from_center_size({xy.x(), xy.y(), size.z() / 2}, size);
}

Aabb box_on(const Aabb& base, const Eigen::Vector3d& size, double gap) {
  const double zmin = base.max().z() + gap;
  return Aabb::from_center_size({base.center.x(), base.center.y(), zmin + size.z() / 2}, size);
}

double footprint_gap(const Aabb& a, const Aabb& b) {
  const Eigen::Vector2d d = ((a.center - b.center).head<2>().cwiseAbs() -
                             (a.half_extents + b.half_extents).head<2>());
  return d.maxCoeff();
}

bool inside_room(const Aabb& b) {
  return b.min().x() >= 0.3 && b.min().y() >= 0.3 && b.max().x() <= 7.7 && b.max().y() <= 7.7;
}

struct Draft {
  std::vector<Aabb> boxes;
  std::vector<std::string> categories;
  std::set<std::pair<std::size_t, std::size_t>> stacked;  // allowed footprint overlaps

  std::size_t add(const std::string& category, const Aabb& box) {
    boxes.push_back(box);
    categories.push_back(category);
    return boxes.size() - 1;
  }
  bool plausible() const {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (!inside_room(boxes[i])) return false;
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        if (stacked.count({i, j}) || stacked.count({j, i})) continue;
        if (footprint_gap(boxes[i], boxes[j]) < 0.1) return false;
      }
    }
    return true;
  }
};

bool satisfies(const scene::SceneGraph& g, scene::ObjectId id, SpatialRelation rel,
               const std::vector<scene::ObjectId>& anchors) {
  if (rel == SpatialRelation::Between) {
    const auto lo = std::min(anchors[0], anchors[1]);
    const auto hi = std::max(anchors[0], anchors[1]);
    return std::binary_search(g.between_edges.begin(), g.between_edges.end(),
                              scene::BetweenEdge{id, lo, hi});
  }
  return std::binary_search(g.binary_edges.begin(), g.binary_edges.end(),
                            scene::BinaryEdge{id, rel, anchors[0]});
}

}  // namespace

GroundingCase make_grounding_case(std::uint64_t seed, const scene::RelationParams& params) {
  Sampler rs(seed);
  const SpatialRelation rel = kRelationCycle[seed % kRelationCycle.size()];
  const std::string target_cat = rs.pick(kTargetCategories);
  std::vector<std::string> anchor_pool(kAnchorCategories.begin(), kAnchorCategories.end());
  std::shuffle(anchor_pool.begin(), anchor_pool.end(), rs.engine());
  const int anchor_count = rel == SpatialRelation::Between ? 2 : 1;
  const std::vector<std::string> anchor_cats(anchor_pool.begin(), anchor_pool.begin() + anchor_count);

  auto small = [&] { return Eigen::Vector3d(rs.uniform(0.3, 0.6), rs.uniform(0.3, 0.6), rs.uniform(0.4, 1.0)); };
  auto wide = [&] { return Eigen::Vector3d(rs.uniform(0.6, 0.9), rs.uniform(0.6, 0.9), rs.uniform(0.4, 0.8)); };
  auto room_xy = [&] { return Eigen::Vector2d(rs.uniform(1.0, 7.0), rs.uniform(1.0, 7.0)); };

  for (int attempt = 0; attempt < 10000; ++attempt) {
    Draft d;
    std::size_t target = 0;
    std::vector<std::size_t> anchors;
    const Eigen::Vector2d pa = room_xy();
    switch (rel) {
      case SpatialRelation::Near:
        anchors.push_back(d.add(anchor_cats[0], floor_box(pa, small())));
        target = d.add(target_cat, floor_box(pa + rs.uniform(0.75, 0.95) * rs.direction(), small()));
        break;
      case SpatialRelation::Far:
        anchors.push_back(d.add(anchor_cats[0], floor_box(pa, small())));
        target = d.add(target_cat, floor_box(pa + rs.uniform(2.6, 3.6) * rs.direction(), small()));
        break;
      case SpatialRelation::Above:
      case SpatialRelation::SupportedBy: {
        anchors.push_back(d.add(anchor_cats[0], floor_box(pa, wide())));
        const double gap = rel == SpatialRelation::Above ? rs.uniform(0.3, 0.6) : 0.0;
        target = d.add(target_cat, box_on(d.boxes[anchors[0]], small(), gap));
        d.stacked.insert({anchors[0], target});
        break;
      }
      case SpatialRelation::Below:
      case SpatialRelation::Supporting: {
        target = d.add(target_cat, floor_box(pa, wide()));
        const double gap = rel == SpatialRelation::Below ? rs.uniform(0.3, 0.6) : 0.0;
        anchors.push_back(d.add(anchor_cats[0], box_on(d.boxes[target], small(), gap)));
        d.stacked.insert({anchors[0], target});
        break;
      }
      case SpatialRelation::Between: {
        const Eigen::Vector2d dir = rs.direction();
        const Eigen::Vector2d pb = pa + rs.uniform(3.0, 4.0) * dir;
        anchors.push_back(d.add(anchor_cats[0], floor_box(pa, small())));
        anchors.push_back(d.add(anchor_cats[1], floor_box(pb, small())));
        const Eigen::Vector2d perp(-dir.y(), dir.x());
        const Eigen::Vector2d pt = pa + rs.uniform(0.35, 0.65) * (pb - pa) + rs.uniform(-0.2, 0.2) * perp;
        target = d.add(target_cat, floor_box(pt, small()));
        break;
      }
    }
    const int distractors = rs.integer(1, 2);
    for (int k = 0; k < distractors; ++k) {
      Eigen::Vector2d xy = room_xy();
      if (rel == SpatialRelation::Far) xy = pa + rs.uniform(0.75, 0.95) * rs.direction();
      d.add(target_cat, floor_box(xy, small()));
    }
    const int clutter = rs.integer(0, 2);
    for (int k = 0; k < clutter; ++k) {
      d.add(anchor_pool[static_cast<std::size_t>(anchor_count + k)], floor_box(room_xy(), small()));
    }
    if (!d.plausible()) continue;

    // Ids are a random permutation so the target is not always the smallest.
    std::vector<scene::ObjectId> ids(d.boxes.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rs.engine());
    GroundingCase out;
    for (std::size_t i = 0; i < d.boxes.size(); ++i) {
      out.objects.push_back({ids[i], d.categories[i], d.boxes[i]});
    }
    std::vector<scene::ObjectId> anchor_ids;
    for (auto a : anchors) anchor_ids.push_back(ids[a]);
    const auto graph = scene::build_scene_graph(out.objects, params);
    int satisfied = 0;
    bool target_ok = false;
    for (const auto& node : graph.nodes) {
      if (node.category != target_cat || !satisfies(graph, node.id, rel, anchor_ids)) continue;
      ++satisfied;
      target_ok = target_ok || node.id == ids[target];
    }
    if (satisfied != 1 || !target_ok) continue;

    out.target_id = ids[target];
    out.instruction.action = static_cast<grounding::Action>(rs.integer(0, 3));
    out.instruction.target_category = target_cat;
    out.instruction.relation = rel;
    out.instruction.anchor_categories = anchor_cats;
    out.utterance = grounding::render_instruction(out.instruction);
    return out;
  }
  throw Error("could not generate a grounding case for seed " + std::to_string(seed));
}

const scene::DetectedObject& WalkScene::target() const {
  for (const auto& o : objects) {
    if (o.id == target_id) return o;
  }
  throw LookupError("walk scene has no target object");
}

void add_box_surface(scene::PointCloud& cloud, const scene::Aabb& box, double spacing) {
  const Eigen::Vector3d lo = box.min();
  const Eigen::Vector3d hi = box.max();
  auto steps = [&](double len) { return std::max(2, static_cast<int>(std::ceil(len / spacing)) + 1); };
  const int nx = steps(hi.x() - lo.x());
  const int ny = steps(hi.y() - lo.y());
  const int nz = steps(hi.z() - lo.z());
  auto lerp = [](double a, double b, int i, int n) { return a + (b - a) * i / (n - 1); };
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      cloud.add({lerp(lo.x(), hi.x(), i, nx), lerp(lo.y(), hi.y(), j, ny), hi.z()}, Eigen::Vector3d::UnitZ());
    }
  }
  for (int k = 0; k < nz - 1; ++k) {
    const double z = lerp(lo.z(), hi.z(), k, nz);
    for (int i = 0; i < nx; ++i) {
      const double x = lerp(lo.x(), hi.x(), i, nx);
      cloud.add({x, lo.y(), z}, -Eigen::Vector3d::UnitY());
      cloud.add({x, hi.y(), z}, Eigen::Vector3d::UnitY());
    }
    for (int j = 0; j < ny; ++j) {
      const double y = lerp(lo.y(), hi.y(), j, ny);
      cloud.add({lo.x(), y, z}, -Eigen::Vector3d::UnitX());
      cloud.add({hi.x(), y, z}, Eigen::Vector3d::UnitX());
    }
  }
}

WalkScene make_walk_scene(std::uint64_t seed) {
  Sampler rs(seed);
  WalkScene s;
  s.action = rs.integer(0, 1) == 0 ? grounding::Action::Walk : grounding::Action::Sit;
  const std::string category = s.action == grounding::Action::Walk ? "box" : "chair";
  s.utterance = s.action == grounding::Action::Walk ? "walk to the box" : "sit on the chair";

  constexpr double kHalfRoom = 3.0;
  constexpr int kFloorSteps = 31;
  for (int i = 0; i < kFloorSteps; ++i) {
    for (int j = 0; j < kFloorSteps; ++j) {
      const double x = -kHalfRoom + 2 * kHalfRoom * i / (kFloorSteps - 1);
      const double y = -kHalfRoom + 2 * kHalfRoom * j / (kFloorSteps - 1);
      s.cloud.add({x, y, 0.0}, Eigen::Vector3d::UnitZ());
    }
  }

  std::vector<std::pair<std::string, Aabb>> boxes;
  boxes.emplace_back(category,
                     floor_box({rs.uniform(-1.2, 1.2), rs.uniform(-1.2, 1.2)},
                               {rs.uniform(0.4, 0.8), rs.uniform(0.4, 0.8), rs.uniform(0.4, 0.6)}));
  const std::array<const char*, 3> clutter_categories = {"table", "cabinet", "lamp"};
  const int clutter = rs.integer(1, 2);
  for (int k = 0, tries = 0; k < clutter && tries < 1000; ++tries) {
    const Aabb b = floor_box({rs.uniform(-2.5, 2.5), rs.uniform(-2.5, 2.5)},
                             {rs.uniform(0.3, 0.8), rs.uniform(0.3, 0.8), rs.uniform(0.3, 1.2)});
    const bool clear = std::all_of(boxes.begin(), boxes.end(), [&](const auto& other) {
      return footprint_gap(b, other.second) > 0.6;
    });
    if (!clear || b.min().head<2>().minCoeff() < -kHalfRoom || b.max().head<2>().maxCoeff() > kHalfRoom) continue;
    boxes.emplace_back(clutter_categories[static_cast<std::size_t>(k)], b);
    ++k;
  }

  std::vector<scene::ObjectId> ids(boxes.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rs.engine());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    s.objects.push_back({ids[i], boxes[i].first, boxes[i].second});
    add_box_surface(s.cloud, boxes[i].second, 0.1);
  }
  s.target_id = ids[0];
  return s;
}

motion::MotionClip make_walk_clip(const WalkScene& scene, int frames, std::uint64_t seed, double fps) {
  if (frames < 2) throw ValidationError("a scripted clip needs at least two frames");
  Sampler rs(seed);
  const Aabb& box = scene.target().box;
  const Eigen::Vector2d c = box.center.head<2>();
  constexpr double kStandHeight = 0.9;

  Eigen::Vector2d start;
  do {
    start = c + rs.uniform(1.5, 3.0) * rs.direction();
  } while (start.cwiseAbs().maxCoeff() > 2.8);
  const Eigen::Vector2d u = (start - c).normalized();
  const double to_face = std::min(box.half_extents.x() / std::max(std::abs(u.x()), 1e-9),
                                  box.half_extents.y() / std::max(std::abs(u.y()), 1e-9));
  const bool sit = scene.action == grounding::Action::Sit;
  const Eigen::Vector2d end = sit ? c : Eigen::Vector2d(c + u * (to_face + 0.3));
  const double seat_height = box.max().z() + 0.1;
  const Eigen::Vector2d perp(-u.y(), u.x());
  const double bend = rs.uniform(-0.3, 0.3);

  motion::MotionClip clip;
  clip.fps = fps;
  const auto skel = motion::Skeleton::canonical();
  clip.joints = skel.joints();
  std::vector<Eigen::Vector3d> roots(frames);
  std::vector<double> sit_weight(frames, 0.0);
  for (int i = 0; i < frames; ++i) {
    const double a = static_cast<double>(i) / (frames - 1);
    const double s = a * a * (3 - 2 * a);
    const Eigen::Vector2d xy = start + s * (end - start) + bend * std::sin(std::numbers::pi * s) * perp;
    double z = kStandHeight;
    if (sit && s > 0.75) {
      const double w = (s - 0.75) / 0.25;
      sit_weight[i] = w;
      z = kStandHeight + w * (seat_height - kStandHeight);
    }
    roots[i] = {xy.x(), xy.y(), z};
  }

  double travelled = 0.0;
  Eigen::Vector2d heading = -u;
  for (int i = 0; i < frames; ++i) {
    const int j = std::min(i + 1, frames - 1);
    const int k = j == i ? i - 1 : i;
    const Eigen::Vector2d step = roots[j].head<2>() - roots[k].head<2>();
    if (step.norm() > 1e-6) heading = step.normalized();
    if (i > 0) travelled += (roots[i] - roots[i - 1]).head<2>().norm();

    motion::TrajectoryFrame f;
    f.root = roots[i];
    f.heading = heading;
    clip.trajectory.push_back(f);
    clip.global_orient.push_back(motion::matrix_to_rot6d(motion::yaw_matrix(f.yaw())));

    const double phase = 2.0 * std::numbers::pi * travelled / 1.2;
    const double swing = 0.4 * std::sin(phase) * (1.0 - sit_weight[i]);
    const double w = sit_weight[i];
    auto pitch = [](double angle) {
      return motion::matrix_to_rot6d(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitY()).toRotationMatrix());
    };
    std::vector<motion::Rot6d> pose(static_cast<std::size_t>(clip.joints));
    pose[1] = pitch(-swing - w * std::numbers::pi / 2);  // left hip
    pose[2] = pitch(swing - w * std::numbers::pi / 2);   // right hip
    pose[4] = pitch(std::max(0.0, swing) * 0.8 + w * std::numbers::pi / 2);
    pose[5] = pitch(std::max(0.0, -swing) * 0.8 + w * std::numbers::pi / 2);
    pose[16] = pitch(swing * 0.5);
    pose[17] = pitch(-swing * 0.5);
    clip.local_pose.push_back(std::move(pose));
  }
  clip.validate();
  return clip;
}

}  // namespace tsm::pipeline
