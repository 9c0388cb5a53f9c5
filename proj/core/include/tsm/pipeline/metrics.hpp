// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "tsm/motion/motion_clip.hpp"

namespace tsm::pipeline {

/// Rows are samples. `labels` is empty or has one entry per row.
struct FeatureSet {
  Eigen::MatrixXd samples;
  std::vector<std::string> labels;
  std::string extractor;
};

inline constexpr const char* kMeanPoseExtractor = "mean_pose_6d";

/// Frame average of [gamma, theta] in 6D form.
Eigen::VectorXd mean_pose_feature(const motion::MotionClip& clip);
FeatureSet extract_features(const std::vector<motion::MotionClip>& clips,
                            std::vector<std::string> labels = {});

/// Sample mean and unbiased covariance.
void fit_gaussian(const Eigen::MatrixXd& samples, Eigen::VectorXd& mean, Eigen::MatrixXd& cov);

/// Frechet distance between Gaussian fits:
/// |mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2).
/// Needs >= 2 samples per set and equal widths.
double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double fid(const FeatureSet& a, const FeatureSet& b);

/// Mean distance over `pairs` seeded index pairs (i != j).
double diversity(const Eigen::MatrixXd& samples, int pairs, std::uint64_t seed);

/// Per-label seeded pair distance, averaged over labels (sorted by name).
/// Throws ValidationError naming any label with fewer than two samples.
double multimodality(const Eigen::MatrixXd& samples, const std::vector<std::string>& labels,
                     int pairs_per_label, std::uint64_t seed);

}  // namespace tsm::pipeline
